#include "screenlab/cell_steklov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "screenlab/error.hpp"

namespace screenlab
{

namespace
{

std::vector<double> cell_z_axis(double R, double h, double fine, const CellOptions &o)
{
  if (o.z_ratio <= 1.0)
  {
    return uniform_axis(-R, 0.0, h);
  }
  // Snap the fine zone to a whole number of cells of size h.
  const double cells = std::ceil(std::min(fine, R) / h - 1e-9);
  const double depth = std::min(R, cells * h);
  return graded_axis(-R, 0.0, -depth, 0.0, h, o.z_ratio, std::max(o.z_max, h));
}

}  // namespace

CellSystem assemble_cell(const PlateShape &plate, double epsilon, double R, double h,
                         const CellOptions &options)
{
  if (!(epsilon >= 0.0 && epsilon <= 1.0))
  {
    throw ConfigError("cell problem needs 0 <= epsilon <= 1");
  }
  if (!(R >= 4.0))
  {
    throw ConfigError("cell truncation depth R must be at least 4");
  }
  if (!(h > 0.0) || !(h <= 0.5))
  {
    throw ConfigError("cell grid spacing must lie in (0, 1/2]");
  }
  const bool quarter = options.use_symmetry && plate.mirror_symmetric();
  const double x0 = quarter ? 0.0 : -1.0;
  const auto lateral = uniform_axis(x0, 1.0, h);
  const double fine = std::max(4.0 * h, options.fine_depth * epsilon * plate.max_radius());
  FaceRoles roles{FaceRole::Neumann, FaceRole::Neumann, FaceRole::Neumann,
                  FaceRole::Neumann, FaceRole::Neumann, FaceRole::Gamma1};
  BoxRegion grid({lateral, lateral, cell_z_axis(R, h, fine, options)}, roles);
  PatchLayout layout(plate, epsilon, 1.0, {x0, 1.0, x0, 1.0});
  auto tags = classify_grid(layout, grid, ProblemKind::MixedRobin);

  CellSystem cell{plate, epsilon, R, h, nullptr, {}, {}, 0};
  cell.patch_nodes = static_cast<std::size_t>(
    std::count(tags.begin(), tags.end(), BoundaryTag::DirichletPatch));
  if (cell.patch_nodes == 0)
  {
    throw ResolutionError("unresolved patch: no grid node lies in the Dirichlet patch");
  }
  auto sys = std::make_shared<FvSystem>(std::move(grid), std::move(tags), quarter ? 4.0 : 1.0);
  cell.a = sys->assemble(std::vector<double>(sys->dof_count(), 0.0));
  cell.b = sys->robin_areas();
  cell.system = std::move(sys);
  return cell;
}

SteklovResult cell_eigenvalue(const CellSystem &cell, const CellOptions &options)
{
  auto pair = smallest_steklov_pair(cell.a, cell.b, options.tol);
  // Fix the sign (positive away from the patch) and rescale to the unreduced cell.
  double sum = 0.0;
  for (double x : pair.v)
  {
    sum += x;
  }
  const double scale = (sum < 0.0 ? -1.0 : 1.0) / std::sqrt(cell.system->symmetry_factor());
  for (auto &x : pair.v)
  {
    x *= scale;
  }
  SteklovResult r;
  r.lambda = pair.lambda;
  r.eigenfield = GridField(cell.system, std::move(pair.v));
  r.residual = pair.residual;
  r.epsilon = cell.epsilon;
  r.R = cell.R;
  r.h = cell.h;
  r.unknowns = cell.system->dof_count();
  r.outer_iterations = pair.outer_iterations;
  r.inner_iterations = pair.inner_iterations;
  return r;
}

SteklovResult cell_eigenvalue(const PlateShape &plate, double epsilon, double R, double h,
                              const CellOptions &options)
{
  return cell_eigenvalue(assemble_cell(plate, epsilon, R, h, options), options);
}

double cutoff(double t)
{
  if (t <= 1.0 / 3.0)
  {
    return 1.0;
  }
  if (t >= 2.0 / 3.0)
  {
    return 0.0;
  }
  const double s = 3.0 * t - 1.0;  // 0 → 1 across the bridge
  return 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

double trial_quotient(const CellSystem &cell)
{
  const auto &sys = *cell.system;
  const auto &g = sys.grid();
  const double tau = cell.plate.max_radius();
  std::vector<double> w(sys.dof_count(), 0.0);
  for (std::size_t node = 0; node < g.node_count(); ++node)
  {
    const auto d = sys.dof(node);
    if (d < 0)
    {
      continue;
    }
    const auto p = g.point(g.unravel(node));
    const double r = std::sqrt(p.x * p.x + p.y * p.y + p.z * p.z);
    w[static_cast<std::size_t>(d)] = 1.0 - cutoff(r / (3.0 * tau * cell.epsilon));
  }
  const auto aw = cell.a * w;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i)
  {
    num += w[i] * aw[i];
    den += cell.b[i] * w[i] * w[i];
  }
  if (!(den > 0.0))
  {
    throw SolverError("trial function has no trace on σ");
  }
  return num / den;
}

double linear_intercept(const std::vector<double> &x, const std::vector<double> &y)
{
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n)
  {
    return std::numeric_limits<double>::quiet_NaN();
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i)
  {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i)
  {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0)
  {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return my - (sxy / sxx) * mx;
}

double two_point_intercept(const std::vector<double> &x, const std::vector<double> &y)
{
  if (x.size() < 2 || y.size() != x.size())
  {
    return std::numeric_limits<double>::quiet_NaN();
  }
  std::vector<std::size_t> order(x.size());
  for (std::size_t i = 0; i < order.size(); ++i)
  {
    order[i] = i;
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  return linear_intercept({x[order[0]], x[order[1]]}, {y[order[0]], y[order[1]]});
}

SweepResult cell_sweep(const PlateShape &plate, const std::vector<double> &epsilons, double R,
                        const SpacingRule &h_rule, const CellOptions &options)
{
  SweepResult out;
  for (double eps : epsilons)
  {
    const double h = h_rule(eps);
    if (!(h > 0.0) || h > eps / 8.0 * (1.0 + 1e-12))
    {
      throw ConfigError("spacing rule must give 0 < h <= epsilon/8");
    }
  }
  std::vector<double> xs, ys;
  for (double eps : epsilons)
  {
    const double h = h_rule(eps);
    const auto r = cell_eigenvalue(plate, eps, R, h, options);
    out.rows.push_back({eps, R, h, r.lambda, r.lambda / eps, r.residual});
    xs.push_back(eps);
    ys.push_back(r.lambda / eps);
  }
  out.extrapolated = two_point_intercept(xs, ys);
  out.extrapolated_lsq = linear_intercept(xs, ys);
  return out;
}

}  // namespace screenlab
