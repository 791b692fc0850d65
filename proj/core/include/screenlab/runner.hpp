#ifndef SCREENLAB_RUNNER_HPP
#define SCREENLAB_RUNNER_HPP

#include <filesystem>
#include <functional>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "screenlab/cell_steklov.hpp"
#include "screenlab/helmholtz.hpp"
#include "screenlab/homogenization.hpp"
#include "screenlab/perforated.hpp"

namespace screenlab
{

// Plate by name: "disk" (radius = size), "square" (half-side = size) or "polygon"
// (vertices x0 y0 x1 y1 ...).
struct PlateConfig
{
  std::string kind = "disk";
  double size = 1.0;
  std::vector<double> vertices;
};

PlateShape make_plate(const PlateConfig &c);

struct CapacityConfig
{
  PlateConfig plate;
  int level = 4;
  std::vector<double> scales{1.0, 2.0};
  bool extrapolate = false;  // also report the three-level extrapolation from `level`
};

struct CellConfig
{
  PlateConfig plate;
  std::vector<double> epsilons{0.5, 0.25, 0.125};
  double R = 4.0;
  double h_divisor = 8.0;  // h = ε / h_divisor
  CellOptions options;
  // > 0: compare the extrapolation with (π/2)·c_ω from the capacity solver at this level.
  int capacity_level = 0;
  bool capacity_extrapolate = false;
};

struct HomogConfig
{
  std::string task = "convergence";  // or "trace"
  Regime regime = Regime::PInfinity;
  std::vector<double> p{1.0};        // finite-p regime: one study per value
  std::vector<double> epsilons{0.5, 1.0 / 3.0, 0.25};
  double q = 0.0;
  PlateConfig plate;
  std::string source = "sine";
  double h_max = 1.0 / 16.0;
  GridOptions grid;
  bool fit_q = false;
  double c_omega = std::numeric_limits<double>::quiet_NaN();
  int capacity_level = 4;  // used when c_omega is not given and p is finite
  // trace task: (ε, δ) pairs as ε0 δ0 ε1 δ1 ..., random sources seed, seed + 1, ...
  std::vector<double> trace_pairs{1.0, 1.0 / 16.0, 0.5, 0.125, 0.25, 0.25, 0.125, 0.5};
  std::size_t samples = 20;
  std::uint64_t seed = 1;
};

struct PerforatedConfig
{
  ScreenMode mode = ScreenMode::NeumannScreen;
  std::string regime;  // empty: pinf for dirichlet, p0 for neumann
  double p = 1.0;
  std::vector<double> epsilons{0.5, 1.0 / 3.0, 0.25};
  PlateConfig plate;
  std::string source = "sine";
  double h_max = 1.0 / 16.0;
  GridOptions grid = screen_grid_defaults();
  bool allow_exploratory = false;
};

struct ResonanceConfig
{
  ScreenMode mode = ScreenMode::NeumannScreen;
  Regime regime = Regime::PZero;
  double p = 1.0;
  std::vector<double> epsilons{0.25};
  PlateConfig plate;
  double L = 2.0;
  double k_min = 0.0;  // 0: 0.9·k₀
  double k_max = 0.0;  // 0: 1.1·k₀
  int k_steps = 21;
  double h_max = 1.0 / 24.0;
  std::string source = "bump";
  bool locate_pole = true;
  GridOptions grid = screen_grid_defaults();
};

using ExperimentConfig =
  std::variant<CapacityConfig, CellConfig, HomogConfig, PerforatedConfig, ResonanceConfig>;

std::string study_name(const ExperimentConfig &c);

struct RunOptions
{
  std::filesystem::path out;  // bundle directory, replaced atomically
  unsigned jobs = 1;
  std::function<void(const std::string &)> log;  // progress messages, may be empty
};

struct RunResult
{
  int exit_code = 0;  // 0 success, 2 invalid configuration, 3 solver failure
  std::string message;
};

// Runs the study and writes the bundle: one or more CSV tables, summary.json and
// log.txt (solver statistics and wall times; the only file with timings). On a solver
// failure the bundle still holds every finished row plus failure.txt.
RunResult run(const ExperimentConfig &config, const RunOptions &options);

}  // namespace screenlab

#endif  // SCREENLAB_RUNNER_HPP
