#include "screenlab/homogenization.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "screenlab/capacity.hpp"
#include "screenlab/error.hpp"

namespace screenlab
{

namespace
{

bool divides(double extent, double h)
{
  const double r = extent / h;
  return std::abs(r - std::round(r)) < 1e-9 * std::max(1.0, r);
}

Rect top_face(const Box3 &omega) { return {omega.lo[0], omega.hi[0], omega.lo[1], omega.hi[1]}; }

std::vector<double> vertical_axis(const Box3 &omega, double h, double delta,
                                  const GridOptions &o)
{
  const double depth = omega.hi[2] - omega.lo[2];
  if (o.z_ratio <= 1.0)
  {
    return uniform_axis(omega.lo[2], omega.hi[2], h);
  }
  const double fine = std::max(4.0 * h, o.fine_depth * delta);
  const double cells = std::ceil(std::min(fine, depth) / h - 1e-9);
  const double fine_depth = std::min(depth, cells * h);
  return graded_axis(omega.lo[2], omega.hi[2], omega.hi[2] - fine_depth, omega.hi[2], h,
                     o.z_ratio, std::max(o.z_max, h));
}

void check_omega(const Box3 &omega)
{
  for (int d = 0; d < 3; ++d)
  {
    if (!(omega.hi[d] > omega.lo[d]))
    {
      throw ConfigError("Ω must be a nondegenerate box");
    }
  }
  if (std::abs(omega.hi[2]) > 1e-12)
  {
    throw ConfigError("the top face of Ω must lie in the plane x3 = 0");
  }
}

bool layout_symmetric(const PatchLayout *layout, const Box3 &omega)
{
  if (layout == nullptr)
  {
    return true;
  }
  const double cx = 0.5 * (omega.lo[0] + omega.hi[0]);
  const double cy = 0.5 * (omega.lo[1] + omega.hi[1]);
  return layout->mirror_symmetric_about(0, cx) && layout->mirror_symmetric_about(1, cy);
}

PatchLayout empty_layout(const Box3 &omega)
{
  return PatchLayout(PlateShape::disk(1.0), 0.0, 1.0, top_face(omega));
}

std::vector<BoundaryTag> limit_tags(const PreparedGrid &g, bool dirichlet)
{
  auto tags = classify_grid(empty_layout(g.omega), g.grid, ProblemKind::MixedRobin);
  if (dirichlet)
  {
    std::replace(tags.begin(), tags.end(), BoundaryTag::RobinComplement,
                 BoundaryTag::DirichletPatch);
  }
  return tags;
}

GridField solve_system(std::shared_ptr<const FvSystem> sys, const ScalarSource &f, double q,
                       double tol, const GridField *warm, std::size_t *iterations = nullptr)
{
  std::vector<double> d(sys->dof_count(), 0.0);
  if (q != 0.0)
  {
    const auto &area = sys->robin_areas();
    for (std::size_t i = 0; i < d.size(); ++i)
    {
      d[i] = q * area[i];
    }
  }
  const auto a = sys->assemble(d);
  const auto b = sys->load(f);
  IterativeOptions<double> opts;
  std::vector<double> guess;
  if (warm != nullptr && warm->system().grid().node_count() == sys->grid().node_count())
  {
    guess.assign(sys->dof_count(), 0.0);
    for (std::size_t node = 0; node < sys->tags().size(); ++node)
    {
      const auto k = sys->dof(node);
      if (k >= 0)
      {
        guess[static_cast<std::size_t>(k)] = warm->at(node);
      }
    }
    opts.initial_guess = &guess;
  }
  auto sol = cg_solve(a, b, tol, opts);
  if (iterations != nullptr)
  {
    *iterations = sol.stats.iterations;
  }
  return GridField(std::move(sys), std::move(sol.x));
}

double relative_l2_distance(const GridField &u, const GridField &v, const Box3 &omega)
{
  const double nu = u.l2_norm(omega);
  return difference(u, v).l2_norm(omega) / (nu > 0.0 ? nu : 1.0);
}

}  // namespace

Box3 default_omega() { return {{0.0, 0.0, -1.0}, {2.0, 2.0, 0.0}}; }

bool source_mirror_symmetric(const ScalarSource &f, const Box3 &omega)
{
  if (!f)
  {
    return true;
  }
  const double cx = omega.lo[0] + omega.hi[0];
  const double cy = omega.lo[1] + omega.hi[1];
  constexpr int kN = 13;
  for (int k = 0; k <= kN; ++k)
  {
    const double z = omega.lo[2] + (omega.hi[2] - omega.lo[2]) * k / kN;
    for (int j = 0; j <= kN; ++j)
    {
      const double y = omega.lo[1] + (omega.hi[1] - omega.lo[1]) * j / kN;
      for (int i = 0; i <= kN; ++i)
      {
        const double x = omega.lo[0] + (omega.hi[0] - omega.lo[0]) * i / kN;
        const double v = f({x, y, z});
        const double tol = 1e-10 * std::max(1.0, std::abs(v));
        if (std::abs(f({cx - x, y, z}) - v) > tol || std::abs(f({x, cy - y, z}) - v) > tol)
        {
          return false;
        }
      }
    }
  }
  return true;
}

std::size_t predicted_nodes(const Box3 &omega, double h, double delta, bool quarter,
                            const GridOptions &options)
{
  const double fx = quarter ? 0.5 : 1.0;
  const auto nx = static_cast<std::size_t>(std::llround(fx * (omega.hi[0] - omega.lo[0]) / h)) + 1;
  const auto ny = static_cast<std::size_t>(std::llround(fx * (omega.hi[1] - omega.lo[1]) / h)) + 1;
  return nx * ny * vertical_axis(omega, h, delta, options).size();
}

PreparedGrid prepare_grid(const Box3 &omega, double h, double delta, const ScalarSource &f,
                          const PatchLayout *layout, const GridOptions &options)
{
  check_omega(omega);
  if (!(h > 0.0))
  {
    throw ConfigError("grid spacing must be positive");
  }
  const double wx = omega.hi[0] - omega.lo[0];
  const double wy = omega.hi[1] - omega.lo[1];
  if (!divides(wx, h) || !divides(wy, h))
  {
    throw ConfigError("grid spacing must divide the lateral extents of Ω");
  }
  const bool quarter = options.use_symmetry && divides(0.5 * wx, h) && divides(0.5 * wy, h) &&
                       layout_symmetric(layout, omega) && source_mirror_symmetric(f, omega);
  const std::size_t nodes = predicted_nodes(omega, h, delta, quarter, options);
  if (nodes > options.max_nodes)
  {
    throw ConfigError("grid needs " + std::to_string(nodes) + " nodes, above the budget of " +
                      std::to_string(options.max_nodes));
  }
  const double x1 = quarter ? omega.lo[0] + 0.5 * wx : omega.hi[0];
  const double y1 = quarter ? omega.lo[1] + 0.5 * wy : omega.hi[1];
  const FaceRole side = quarter ? FaceRole::Neumann : FaceRole::Dirichlet;
  FaceRoles roles{FaceRole::Dirichlet, side, FaceRole::Dirichlet, side, FaceRole::Dirichlet,
                  FaceRole::Gamma1};
  BoxRegion grid({uniform_axis(omega.lo[0], x1, h), uniform_axis(omega.lo[1], y1, h),
                  vertical_axis(omega, h, delta, options)},
                 roles);
  return {std::move(grid), omega, h, quarter ? 4.0 : 1.0};
}

PreparedGrid perturbed_grid(const MixedBvpSpec &spec)
{
  const auto &r = spec.layout.region();
  const auto face = top_face(spec.omega);
  if (std::abs(r.x0 - face.x0) > 1e-12 || std::abs(r.x1 - face.x1) > 1e-12 ||
      std::abs(r.y0 - face.y0) > 1e-12 || std::abs(r.y1 - face.y1) > 1e-12)
  {
    throw ConfigError("layout region must equal the Γ₁ face of Ω");
  }
  return prepare_grid(spec.omega, spec.h, spec.layout.delta(), spec.f, &spec.layout, spec.grid);
}

GridField solve_perturbed(const MixedBvpSpec &spec, const PreparedGrid &grid)
{
  if (!(spec.q >= 0.0))
  {
    throw ConfigError("Robin coefficient q must be nonnegative");
  }
  if (!spec.f)
  {
    throw ConfigError("source f is not set");
  }
  const auto &layout = spec.layout;
  if (!layout.empty() && grid.h > 0.25 * layout.patch_scale() * (1.0 + 1e-9))
  {
    throw ResolutionError("unresolved patch: h exceeds εδ/4");
  }
  auto tags = classify_grid(layout, grid.grid, ProblemKind::MixedRobin);
  if (!layout.empty() &&
      std::find(tags.begin(), tags.end(), BoundaryTag::DirichletPatch) == tags.end())
  {
    throw ResolutionError("unresolved patch: no grid node lies in a patch");
  }
  auto sys = std::make_shared<FvSystem>(grid.grid, std::move(tags), grid.symmetry_factor);
  return solve_system(std::move(sys), spec.f, spec.q, spec.grid.tol, nullptr);
}

GridField solve_perturbed(const MixedBvpSpec &spec)
{
  return solve_perturbed(spec, perturbed_grid(spec));
}

GridField solve_dirichlet_limit(const PreparedGrid &grid, const ScalarSource &f, double tol)
{
  auto sys = std::make_shared<FvSystem>(grid.grid, limit_tags(grid, true), grid.symmetry_factor);
  return solve_system(std::move(sys), f, 0.0, tol, nullptr);
}

GridField solve_robin_limit(const PreparedGrid &grid, const ScalarSource &f, double Q, double tol,
                            const GridField *warm_start)
{
  if (!(Q >= 0.0) || !std::isfinite(Q))
  {
    throw ConfigError("Robin coefficient Q must be finite and nonnegative");
  }
  auto sys = std::make_shared<FvSystem>(grid.grid, limit_tags(grid, false), grid.symmetry_factor);
  return solve_system(std::move(sys), f, Q, tol, warm_start);
}

Regime parse_regime(const std::string &name)
{
  if (name == "pinf")
  {
    return Regime::PInfinity;
  }
  if (name == "p0")
  {
    return Regime::PZero;
  }
  if (name == "pfix")
  {
    return Regime::PFixed;
  }
  throw ConfigError("unknown regime '" + name + "' (expected pinf, p0 or pfix)");
}

std::string to_string(Regime r)
{
  switch (r)
  {
  case Regime::PInfinity:
    return "pinf";
  case Regime::PZero:
    return "p0";
  case Regime::PFixed:
    return "pfix";
  }
  return "?";
}

double regime_delta(Regime r, double epsilon, double p)
{
  switch (r)
  {
  case Regime::PInfinity:
    return epsilon * epsilon;
  case Regime::PZero:
    return std::sqrt(epsilon);
  case Regime::PFixed:
    if (!(p > 0.0))
    {
      throw ConfigError("finite regime needs p > 0");
    }
    return epsilon / p;
  }
  return 0.0;
}

EffectiveQFit fit_effective_Q(const GridField &u, const PreparedGrid &grid, const ScalarSource &f,
                              double q, const FitOptions &options, double cand_capacity,
                              double cand_flux)
{
  if (u.l2_norm(grid.omega) == 0.0)
  {
    throw SolverError("fit undefined: the perturbed solution vanishes");
  }
  EffectiveQFit fit;
  std::map<double, double> cache;
  GridField best_field;
  double best_res = std::numeric_limits<double>::infinity();
  auto residual = [&](double Q) {
    if (auto it = cache.find(Q); it != cache.end())
    {
      return it->second;
    }
    auto v = solve_robin_limit(grid, f, Q, options.tol, best_field.values().empty() ? nullptr : &best_field);
    const double r = relative_l2_distance(u, v, grid.omega);
    ++fit.evaluations;
    cache[Q] = r;
    if (r < best_res)
    {
      best_res = r;
      best_field = std::move(v);
    }
    return r;
  };

  std::vector<double> scan{0.0};
  for (double Q = options.q_min; Q <= options.q_max * (1.0 + 1e-12); Q *= options.scan_factor)
  {
    scan.push_back(Q);
  }
  std::size_t best = 0;
  std::size_t rising = 0;
  for (std::size_t i = 0; i < scan.size(); ++i)
  {
    const double r = residual(scan[i]);
    if (r < cache[scan[best]] || i == 0)
    {
      best = i;
      rising = 0;
    }
    else if (++rising >= 2)
    {
      break;
    }
  }
  double a = best == 0 ? 0.0 : scan[best - 1];
  double b = best + 1 < scan.size() ? scan[best + 1] : scan[best];
  constexpr double kInvPhi = 0.6180339887498949;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  while (b - a > options.rel_tol * std::max(0.5 * (a + b), options.q_min))
  {
    if (residual(c) < residual(d))
    {
      b = d;
      d = c;
      c = b - kInvPhi * (b - a);
    }
    else
    {
      a = c;
      c = d;
      d = a + kInvPhi * (b - a);
    }
  }
  // The attained minimum over every evaluated Q.
  auto it = std::min_element(cache.begin(), cache.end(),
                             [](const auto &x, const auto &y) { return x.second < y.second; });
  fit.q_emp = it->first;
  fit.residual = it->second;
  fit.cand_capacity = cand_capacity;
  fit.cand_flux = cand_flux;
  fit.dist_capacity = std::abs(fit.q_emp - cand_capacity);
  fit.dist_flux = std::abs(fit.q_emp - cand_flux);
  (void)q;
  return fit;
}

double study_spacing(double eps, double delta, double h_max)
{
  const double target = std::min(0.25 * eps * delta, h_max);
  return 1.0 / std::ceil(1.0 / target - 1e-9);
}

void validate_study(const StudySpec &spec)
{
  if (spec.epsilons.empty())
  {
    throw ConfigError("epsilon list is empty");
  }
  if (!spec.f)
  {
    throw ConfigError("source f is not set");
  }
  if (!(spec.q >= 0.0))
  {
    throw ConfigError("Robin coefficient q must be nonnegative");
  }
  check_omega(spec.omega);
  const bool f_symmetric = source_mirror_symmetric(spec.f, spec.omega);
  const Rect face = top_face(spec.omega);
  for (double eps : spec.epsilons)
  {
    if (!(eps > 0.0 && eps <= 1.0))
    {
      throw ConfigError("epsilon values must lie in (0, 1]");
    }
    const double delta = regime_delta(spec.regime, eps, spec.p);
    const double h = study_spacing(eps, delta, spec.h_max);
    PatchLayout layout(spec.plate, eps, delta, face);
    const bool quarter = spec.grid.use_symmetry && f_symmetric && layout_symmetric(&layout, spec.omega);
    const std::size_t nodes = predicted_nodes(spec.omega, h, delta, quarter, spec.grid);
    if (nodes > spec.grid.max_nodes)
    {
      throw ConfigError("infeasible schedule: eps = " + std::to_string(eps) + " needs " +
                        std::to_string(nodes) + " grid nodes (budget " +
                        std::to_string(spec.grid.max_nodes) + ")");
    }
  }
}

ConvergenceReport convergence_study(const StudySpec &spec)
{
  validate_study(spec);
  auto eps_list = spec.epsilons;
  std::sort(eps_list.begin(), eps_list.end(), std::greater<>());
  const Rect face = top_face(spec.omega);

  double c_omega = spec.c_omega;
  if (spec.regime == Regime::PFixed && !std::isfinite(c_omega))
  {
    c_omega = plate_capacity(spec.plate, 4).c_omega;
  }

  ConvergenceReport report;
  report.regime = spec.regime;
  report.p = spec.regime == Regime::PFixed ? spec.p
                                            : (spec.regime == Regime::PZero
                                                 ? 0.0
                                                 : std::numeric_limits<double>::infinity());
  for (double eps : eps_list)
  {
    ConvergenceRow row;
    row.eps = eps;
    row.delta = regime_delta(spec.regime, eps, spec.p);
    row.h = study_spacing(eps, row.delta, spec.h_max);
    MixedBvpSpec bvp{spec.omega, PatchLayout(spec.plate, eps, row.delta, face), spec.q, spec.f,
                     row.h, spec.grid};
    const auto grid = perturbed_grid(bvp);
    const auto u = solve_perturbed(bvp, grid);
    row.unknowns = u.system().dof_count();
    row.trace_norm = u.trace_norm(0.0, face, Side::Upper);

    GridField limit;
    if (spec.regime == Regime::PInfinity)
    {
      limit = solve_dirichlet_limit(grid, spec.f, spec.grid.tol);
    }
    else if (spec.regime == Regime::PZero)
    {
      limit = solve_robin_limit(grid, spec.f, spec.q, spec.grid.tol);
    }
    else
    {
      row.q_cand_capacity = spec.q + c_omega * spec.p;
      row.q_cand_flux = spec.q + 0.5 * std::numbers::pi * c_omega * spec.p;
      limit = solve_robin_limit(grid, spec.f, row.q_cand_capacity, spec.grid.tol);
      const auto flux = solve_robin_limit(grid, spec.f, row.q_cand_flux, spec.grid.tol, &limit);
      row.l2_err_flux = difference(u, flux).l2_norm(spec.omega) / flux.l2_norm(spec.omega);
    }
    const auto diff = difference(u, limit);
    row.l2_err = diff.l2_norm(spec.omega) / limit.l2_norm(spec.omega);
    row.h1_err = diff.h1_norm(spec.omega) / limit.h1_norm(spec.omega);
    if (spec.fit_q)
    {
      const auto fit = fit_effective_Q(u, grid, spec.f, spec.q, spec.fit, row.q_cand_capacity,
                                       row.q_cand_flux);
      row.q_emp = fit.q_emp;
    }
    report.rows.push_back(row);
  }
  report.monotone = true;
  for (std::size_t i = 1; i < report.rows.size(); ++i)
  {
    report.monotone = report.monotone && report.rows[i].l2_err < report.rows[i - 1].l2_err;
  }
  return report;
}

ScalarSource random_source(std::uint64_t seed, const Box3 &omega)
{
  struct Bump
  {
    double x, y, z, width, amp;
  };
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Bump> bumps(3);
  double min_extent = std::numeric_limits<double>::infinity();
  for (int d = 0; d < 3; ++d)
  {
    min_extent = std::min(min_extent, omega.hi[d] - omega.lo[d]);
  }
  for (auto &b : bumps)
  {
    double c[3];
    for (int d = 0; d < 3; ++d)
    {
      const double margin = 0.15 * (omega.hi[d] - omega.lo[d]);
      c[d] = omega.lo[d] + margin + unit(gen) * (omega.hi[d] - omega.lo[d] - 2.0 * margin);
    }
    b = {c[0], c[1], c[2], min_extent * (0.1 + 0.2 * unit(gen)),
         (unit(gen) < 0.5 ? -1.0 : 1.0) * (0.5 + 0.5 * unit(gen))};
  }
  return [bumps](const Point3 &p) {
    double s = 0.0;
    for (const auto &b : bumps)
    {
      const double r2 = (p.x - b.x) * (p.x - b.x) + (p.y - b.y) * (p.y - b.y) +
                        (p.z - b.z) * (p.z - b.z);
      s += b.amp * std::exp(-r2 / (2.0 * b.width * b.width));
    }
    return s;
  };
}

ScalarSource named_source(const std::string &name, const Box3 &box)
{
  const auto lo = box.lo;
  const auto hi = box.hi;
  if (name == "sine")
  {
    return [lo, hi](const Point3 &p) {
      const double x[3] = {p.x, p.y, p.z};
      double v = -1.0;
      for (int d = 0; d < 3; ++d)
      {
        v *= std::sin(std::numbers::pi * (x[d] - lo[d]) / (hi[d] - lo[d]));
      }
      return v;
    };
  }
  if (name == "constant")
  {
    return [](const Point3 &) { return -1.0; };
  }
  if (name == "bump")
  {
    const Point3 c{0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1]), 0.5 * (lo[2] + hi[2])};
    return [c](const Point3 &p) {
      const double r2 = (p.x - c.x) * (p.x - c.x) + (p.y - c.y) * (p.y - c.y) +
                        (p.z - c.z) * (p.z - c.z);
      return -std::exp(-r2 / (2.0 * 0.15 * 0.15));
    };
  }
  if (name.rfind("random:", 0) == 0)
  {
    const auto digits = name.substr(7);
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
    {
      throw ConfigError("random source needs a decimal seed: " + name);
    }
    return random_source(std::stoull(digits), box);
  }
  throw ConfigError("unknown source '" + name + "' (sine, constant, bump, random:N)");
}

TraceCheck trace_ratio_check(const PatchLayout &layout, const Box3 &omega, double h,
                             std::size_t samples, std::uint64_t seed, const GridOptions &options)
{
  if (samples < 10)
  {
    throw ConfigError("trace check needs at least 10 samples");
  }
  if (layout.empty())
  {
    throw ConfigError("trace check needs a layout with patches");
  }
  GridOptions o = options;
  o.use_symmetry = false;  // random sources are not symmetric
  MixedBvpSpec spec{omega, layout, 0.0, nullptr, h, o};
  const auto grid = perturbed_grid(spec);
  if (grid.h > 0.25 * layout.patch_scale() * (1.0 + 1e-9))
  {
    throw ResolutionError("unresolved patch: h exceeds εδ/4");
  }
  auto sys = std::make_shared<FvSystem>(grid.grid,
                                        classify_grid(layout, grid.grid, ProblemKind::MixedRobin),
                                        grid.symmetry_factor);
  const auto a = sys->assemble(std::vector<double>(sys->dof_count(), 0.0));
  const double scale = std::sqrt(layout.delta() / layout.epsilon());
  const Rect face = top_face(omega);
  TraceCheck out;
  for (std::size_t s = 0; s < samples; ++s)
  {
    const auto f = random_source(seed + s, omega);
    auto sol = cg_solve(a, sys->load(f), o.tol);
    const GridField u(sys, std::move(sol.x));
    out.ratios.push_back(u.trace_norm(0.0, face, Side::Upper) / (scale * u.h1_norm(omega)));
  }
  out.max_ratio = *std::max_element(out.ratios.begin(), out.ratios.end());
  out.min_ratio = *std::min_element(out.ratios.begin(), out.ratios.end());
  return out;
}

}  // namespace screenlab
