#ifndef SCREENLAB_HOMOGENIZATION_HPP
#define SCREENLAB_HOMOGENIZATION_HPP

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "screenlab/fv_system.hpp"

namespace screenlab
{

// Grid construction shared by the boundary-value solvers. Lateral spacing is uniform;
// the vertical axis is fine (spacing h) within fine_depth·δ of Γ₁ and grows
// geometrically below. z_ratio = 1 keeps every axis uniform.
struct GridOptions
{
  double fine_depth = 1.0;
  double z_ratio = 1.15;
  double z_max = 1.0 / 16.0;
  bool use_symmetry = true;
  double tol = 1e-9;
  std::size_t max_nodes = 8'000'000;
};

// A grid for Ω (possibly one quarter of it, mirrored about the centre lines).
struct PreparedGrid
{
  BoxRegion grid;
  Box3 omega;
  double h = 0.0;
  double symmetry_factor = 1.0;
};

Box3 default_omega();

// Grid with fine spacing h on Γ₁ = top face of omega. The quarter reduction is used
// when allowed, the layout (if any) is mirror symmetric about the centre lines and f is
// mirror symmetric at every node.
PreparedGrid prepare_grid(const Box3 &omega, double h, double delta, const ScalarSource &f,
                          const PatchLayout *layout, const GridOptions &options);

// Whether f is invariant under reflection about the vertical centre planes of omega,
// checked on a sample lattice.
bool source_mirror_symmetric(const ScalarSource &f, const Box3 &omega);

// Node count prepare_grid would produce, without sampling f.
std::size_t predicted_nodes(const Box3 &omega, double h, double delta, bool quarter,
                            const GridOptions &options);

struct MixedBvpSpec
{
  Box3 omega = default_omega();
  PatchLayout layout{PlateShape::disk(1.0), 0.0, 1.0, {0.0, 2.0, 0.0, 2.0}};
  double q = 0.0;
  ScalarSource f;
  double h = 0.0;  // fine spacing on Γ₁; must not exceed εδ/4
  GridOptions grid;
};

// Perturbed problem: Δu = f in Ω, u = 0 on Γ₂ and the patches, ∂u/∂x₃ + qu = 0 on the
// rest of Γ₁.
GridField solve_perturbed(const MixedBvpSpec &spec);
GridField solve_perturbed(const MixedBvpSpec &spec, const PreparedGrid &grid);
PreparedGrid perturbed_grid(const MixedBvpSpec &spec);

// Limit problems on a prepared grid: u = 0 on all of ∂Ω, or Robin coefficient Q on Γ₁.
GridField solve_dirichlet_limit(const PreparedGrid &grid, const ScalarSource &f, double tol = 1e-9);
GridField solve_robin_limit(const PreparedGrid &grid, const ScalarSource &f, double Q,
                            double tol = 1e-9, const GridField *warm_start = nullptr);

enum class Regime
{
  PInfinity,  // δ = ε²
  PZero,      // δ = √ε
  PFixed,     // δ = ε/p
};

Regime parse_regime(const std::string &name);
std::string to_string(Regime r);
double regime_delta(Regime r, double epsilon, double p);

struct EffectiveQFit
{
  double q_emp = 0.0;
  double residual = 0.0;  // ‖u − u_Q‖_{L₂(Ω)}/‖u‖ at q_emp
  double cand_capacity = 0.0;
  double cand_flux = 0.0;
  double dist_capacity = 0.0;  // |q_emp − cand_capacity|
  double dist_flux = 0.0;
  std::size_t evaluations = 0;
};

struct FitOptions
{
  double q_min = 1.0 / 64.0;
  double q_max = 1024.0;
  double scan_factor = 2.0;
  double rel_tol = 1e-3;
  double tol = 1e-9;
};

// Q ≥ 0 minimizing ‖u − solve_robin_limit(Q)‖_{L₂(Ω)}: geometric scan, then golden
// section between the neighbours of the best scan point. Candidates are filled in when
// given (NaN otherwise).
EffectiveQFit fit_effective_Q(const GridField &u, const PreparedGrid &grid, const ScalarSource &f,
                              double q, const FitOptions &options = {},
                              double cand_capacity = std::numeric_limits<double>::quiet_NaN(),
                              double cand_flux = std::numeric_limits<double>::quiet_NaN());

struct ConvergenceRow
{
  double eps = 0.0;
  double delta = 0.0;
  double h = 0.0;
  double l2_err = 0.0;  // relative to the limit solution
  double h1_err = 0.0;
  double trace_norm = 0.0;
  double q_emp = std::numeric_limits<double>::quiet_NaN();
  double q_cand_capacity = std::numeric_limits<double>::quiet_NaN();
  double q_cand_flux = std::numeric_limits<double>::quiet_NaN();
  double l2_err_flux = std::numeric_limits<double>::quiet_NaN();  // finite p only
  std::size_t unknowns = 0;
  std::size_t iterations = 0;
};

struct ConvergenceReport
{
  Regime regime = Regime::PInfinity;
  double p = 0.0;
  std::vector<ConvergenceRow> rows;  // decreasing ε
  bool monotone = false;             // l2_err strictly decreasing
};

struct StudySpec
{
  Regime regime = Regime::PInfinity;
  double p = 1.0;
  std::vector<double> epsilons;
  double q = 0.0;
  PlateShape plate = PlateShape::disk(1.0);
  Box3 omega = default_omega();
  ScalarSource f;
  double h_max = 1.0 / 16.0;  // h = min(εδ/4, h_max), rounded down to divide 1
  GridOptions grid;
  bool fit_q = false;
  FitOptions fit;
  double c_omega = std::numeric_limits<double>::quiet_NaN();  // needed for finite p
};

// Fine spacing for one row: min(εδ/4, h_max), shrunk so that 1/h is an integer.
double study_spacing(double eps, double delta, double h_max);

// Throws ConfigError unless every row of the schedule is valid and fits the node budget.
void validate_study(const StudySpec &spec);

// Validates the whole schedule before the first solve.
ConvergenceReport convergence_study(const StudySpec &spec);

// Smooth random source: a few Gaussian bumps inside Ω with random signs.
ScalarSource random_source(std::uint64_t seed, const Box3 &omega);

// Source by name, scaled to the box:
//   "sine"      −∏ sin(π(x_d − lo_d)/L_d), the lowest Dirichlet mode (default)
//   "constant"  −1
//   "bump"      −exp(−|x − centre|²/(2·0.15²)), a Gaussian at the box centre
//   "random:N"  random_source(N, box)
ScalarSource named_source(const std::string &name, const Box3 &box);

struct TraceCheck
{
  std::vector<double> ratios;  // ‖u‖_{L₂(Γ₁)} / (√(δ/ε)‖u‖_{H¹(Ω)}) per sample
  double max_ratio = 0.0;
  double min_ratio = 0.0;
};

// Ratios for `samples` random sources (seeds seed, seed + 1, ...), q = 0.
TraceCheck trace_ratio_check(const PatchLayout &layout, const Box3 &omega, double h,
                             std::size_t samples, std::uint64_t seed = 1,
                             const GridOptions &options = {});

}  // namespace screenlab

#endif  // SCREENLAB_HOMOGENIZATION_HPP
