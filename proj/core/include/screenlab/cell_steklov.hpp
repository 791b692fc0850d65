#ifndef SCREENLAB_CELL_STEKLOV_HPP
#define SCREENLAB_CELL_STEKLOV_HPP

#include <functional>
#include <memory>
#include <vector>

#include "screenlab/fv_system.hpp"

namespace screenlab
{

struct CellOptions
{
  // Solve on the quarter cell (0,1)² × (−R,0) when ω is mirror symmetric.
  bool use_symmetry = true;
  // Vertical spacing stays h down to this depth (in units of ε·max|ω|, at least 4h),
  // then grows geometrically by z_ratio up to z_max. z_ratio = 1 keeps the grid uniform.
  double fine_depth = 3.0;
  double z_ratio = 1.2;
  double z_max = 0.25;
  double tol = 1e-8;
};

// Discretized cell problem: Σ_R = (−1,1)² × (−R,0) (or its quarter), Dirichlet on
// ω_ε ⊂ {x₃ = 0}, natural Neumann elsewhere, surface mass on the top face.
struct CellSystem
{
  PlateShape plate = PlateShape::disk(1.0);
  double epsilon = 0.0;
  double R = 0.0;
  double h = 0.0;
  std::shared_ptr<const FvSystem> system;
  SparseMatrix<double> a;
  std::vector<double> b;  // lumped surface mass per dof
  std::size_t patch_nodes = 0;
};

CellSystem assemble_cell(const PlateShape &plate, double epsilon, double R, double h,
                         const CellOptions &options = {});

struct SteklovResult
{
  double lambda = 0.0;
  GridField eigenfield;  // normalized to ∫_σ v² = 1 over the whole cell
  double residual = 0.0;
  double epsilon = 0.0;
  double R = 0.0;
  double h = 0.0;
  std::size_t unknowns = 0;
  std::size_t outer_iterations = 0;
  std::size_t inner_iterations = 0;
};

SteklovResult cell_eigenvalue(const PlateShape &plate, double epsilon, double R, double h,
                              const CellOptions &options = {});
SteklovResult cell_eigenvalue(const CellSystem &cell, const CellOptions &options = {});

// Smooth monotone cut-off: 1 for t ≤ 1/3, 0 for t ≥ 2/3, quintic in between.
double cutoff(double t);

// Rayleigh quotient wᵀAw / wᵀBw of the trial function w = 1 − χ(r/(3τε)), which vanishes
// for r ≤ τε (τ = max|ω|) and equals 1 for r ≥ 2τε.
double trial_quotient(const CellSystem &cell);

struct SweepRow
{
  double epsilon = 0.0;
  double R = 0.0;
  double h = 0.0;
  double lambda = 0.0;
  double lambda_over_eps = 0.0;
  double residual = 0.0;
};

struct SweepResult
{
  std::vector<SweepRow> rows;
  // λ_ε/ε at ε = 0 from the line through the two smallest ε; NaN with fewer than 2 rows.
  double extrapolated = 0.0;
  // Intercept of the least-squares line through every row.
  double extrapolated_lsq = 0.0;
};

using SpacingRule = std::function<double(double epsilon)>;

// λ_ε for each ε; h_rule(ε) must not exceed ε/8.
SweepResult cell_sweep(const PlateShape &plate, const std::vector<double> &epsilons, double R,
                        const SpacingRule &h_rule, const CellOptions &options = {});

// Least-squares intercept at x = 0.
double linear_intercept(const std::vector<double> &x, const std::vector<double> &y);
// Intercept of the line through the two points with the smallest x.
double two_point_intercept(const std::vector<double> &x, const std::vector<double> &y);

}  // namespace screenlab

#endif  // SCREENLAB_CELL_STEKLOV_HPP
