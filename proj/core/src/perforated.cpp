#include "screenlab/perforated.hpp"

#include <algorithm>
#include <cmath>

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

Rect top_face(const Box3 &b) { return {b.lo[0], b.hi[0], b.lo[1], b.hi[1]}; }

bool same_rect(const Rect &a, const Rect &b)
{
  return std::abs(a.x0 - b.x0) < 1e-12 && std::abs(a.x1 - b.x1) < 1e-12 &&
         std::abs(a.y0 - b.y0) < 1e-12 && std::abs(a.y1 - b.y1) < 1e-12;
}

std::vector<double> lateral_axis(double a, double b, double fine_lo, double fine_hi, double h,
                                 const GridOptions &o)
{
  if (o.z_ratio <= 1.0)
  {
    return uniform_axis(a, b, h);
  }
  return graded_axis(a, b, fine_lo, fine_hi, h, o.z_ratio, std::max(o.z_max, h));
}

std::vector<double> screen_vertical_axis(const Box3 &outer, const Box3 &inner, double h,
                                         double delta, const GridOptions &o)
{
  if (o.z_ratio <= 1.0)
  {
    return uniform_axis(outer.lo[2], outer.hi[2], h);
  }
  const double want = std::max(4.0 * h, o.fine_depth * delta);
  const double room = std::min({-inner.lo[2], outer.hi[2]});
  const double depth = std::min(room, std::ceil(std::min(want, room) / h - 1e-9) * h);
  return graded_axis(outer.lo[2], outer.hi[2], -depth, depth, h, o.z_ratio,
                     std::max(o.z_max, h), {inner.lo[2]});
}

GridField solve_tagged(const PreparedGrid &g, std::vector<BoundaryTag> tags, const ScalarSource &F,
                       double tol)
{
  auto sys = std::make_shared<FvSystem>(g.grid, std::move(tags), g.symmetry_factor);
  const auto a = sys->assemble(std::vector<double>(sys->dof_count(), 0.0));
  auto sol = cg_solve(a, sys->load(F), tol);
  return GridField(std::move(sys), std::move(sol.x));
}

void check_spec(const TransmissionSpec &spec)
{
  if (!spec.F)
  {
    throw ConfigError("source F is not set");
  }
  if (!same_rect(spec.layout.region(), top_face(spec.inner)))
  {
    throw ConfigError("layout region must equal the Γ₁ face of Ω");
  }
}

std::vector<BoundaryTag> screen_tags(const TransmissionSpec &spec, const PreparedGrid &g)
{
  auto tags = classify_grid(spec.layout, g.grid, problem_kind(spec.mode), &g.omega);
  const auto &layout = spec.layout;
  if (!layout.empty())
  {
    if (g.h > 0.25 * layout.patch_scale() * (1.0 + 1e-9))
    {
      throw ResolutionError("unresolved patch: h exceeds εδ/4");
    }
    const auto patch_tag = spec.mode == ScreenMode::DirichletScreen ? BoundaryTag::DirichletPatch
                                                                    : BoundaryTag::WindowInterior;
    if (std::find(tags.begin(), tags.end(), patch_tag) == tags.end())
    {
      throw ResolutionError("unresolved patch: no grid node lies in a patch");
    }
  }
  return tags;
}

TwoDomainField wrap(GridField f, const TransmissionSpec &spec)
{
  return {std::move(f), spec.inner, spec.outer};
}

}  // namespace

ScreenMode parse_screen_mode(const std::string &name)
{
  if (name == "dirichlet")
  {
    return ScreenMode::DirichletScreen;
  }
  if (name == "neumann")
  {
    return ScreenMode::NeumannScreen;
  }
  throw ConfigError("unknown screen mode '" + name + "' (dirichlet, neumann)");
}

std::string to_string(ScreenMode m)
{
  return m == ScreenMode::DirichletScreen ? "dirichlet" : "neumann";
}

ProblemKind problem_kind(ScreenMode m)
{
  return m == ScreenMode::DirichletScreen ? ProblemKind::DirichletScreen
                                          : ProblemKind::NeumannScreen;
}

Box3 default_outer() { return {{-1.0, -1.0, -2.0}, {3.0, 3.0, 1.0}}; }

PreparedGrid screen_grid(const Box3 &outer, const Box3 &inner, const PatchLayout &layout,
                         const ScalarSource &F, double h, const GridOptions &options,
                         FaceRole outer_role)
{
  if (!inner.strictly_inside(outer))
  {
    throw GeometryError("Ω must lie strictly inside the outer box");
  }
  if (std::abs(inner.hi[2]) > 1e-12)
  {
    throw ConfigError("the top face of Ω must lie in the plane x3 = 0");
  }
  if (!(h > 0.0))
  {
    throw ConfigError("grid spacing must be positive");
  }
  for (int d = 0; d < 3; ++d)
  {
    if (!divides(inner.hi[d] - inner.lo[d], h))
    {
      throw ConfigError("grid spacing must divide the extents of Ω");
    }
  }
  double centre[2];
  bool centred = true;
  for (int d = 0; d < 2; ++d)
  {
    centre[d] = 0.5 * (inner.lo[d] + inner.hi[d]);
    centred = centred && std::abs(centre[d] - 0.5 * (outer.lo[d] + outer.hi[d])) < 1e-12 &&
              divides(centre[d] - inner.lo[d], h);
  }
  const bool quarter = options.use_symmetry && centred &&
                       layout.mirror_symmetric_about(0, centre[0]) &&
                       layout.mirror_symmetric_about(1, centre[1]) &&
                       source_mirror_symmetric(F, outer);

  std::array<std::vector<double>, 3> axes;
  for (int d = 0; d < 2; ++d)
  {
    axes[d] = quarter ? lateral_axis(outer.lo[d], centre[d], inner.lo[d], centre[d], h, options)
                      : lateral_axis(outer.lo[d], outer.hi[d], inner.lo[d], inner.hi[d], h, options);
  }
  axes[2] = screen_vertical_axis(outer, inner, h, layout.delta(), options);
  const std::size_t nodes = axes[0].size() * axes[1].size() * axes[2].size();
  if (nodes > options.max_nodes)
  {
    throw ConfigError("grid needs " + std::to_string(nodes) + " nodes, above the budget of " +
                      std::to_string(options.max_nodes));
  }
  const FaceRole side = quarter ? FaceRole::Neumann : outer_role;
  FaceRoles roles{outer_role, side, outer_role, side, outer_role, outer_role};
  BoxRegion grid(std::move(axes), roles);
  for (int d = 0; d < 3; ++d)
  {
    const bool hi_cut = quarter && d < 2;  // the far wall lies in the mirrored half
    if (!grid.find(d, inner.lo[d]) || (!hi_cut && !grid.find(d, inner.hi[d])))
    {
      throw GeometryError("the walls of Ω are not grid planes");
    }
  }
  return {std::move(grid), inner, h, quarter ? 4.0 : 1.0};
}

PreparedGrid transmission_grid(const TransmissionSpec &spec)
{
  check_spec(spec);
  return screen_grid(spec.outer, spec.inner, spec.layout, spec.F, spec.h, spec.grid,
                     FaceRole::Dirichlet);
}

double TwoDomainField::outer_l2() const
{
  const double all = field.l2_norm(outer);
  const double in = field.l2_norm(inner);
  return std::sqrt(std::max(0.0, all * all - in * in));
}

double TwoDomainField::screen_trace() const
{
  return field.trace_norm(inner.hi[2], top_face(inner), Side::Lower);
}

TwoDomainField solve_screened(const TransmissionSpec &spec, const PreparedGrid &grid)
{
  check_spec(spec);
  return wrap(solve_tagged(grid, screen_tags(spec, grid), spec.F, spec.grid.tol), spec);
}

TwoDomainField solve_screened(const TransmissionSpec &spec)
{
  return solve_screened(spec, transmission_grid(spec));
}

TwoDomainField solve_decoupled_limit(const TransmissionSpec &spec, const PreparedGrid &grid)
{
  check_spec(spec);
  auto tags = classify_grid(spec.layout, grid.grid, problem_kind(spec.mode), &grid.omega);
  for (auto &t : tags)
  {
    if (spec.mode == ScreenMode::DirichletScreen && t == BoundaryTag::WindowInterior)
    {
      t = BoundaryTag::DirichletPatch;
    }
    else if (spec.mode == ScreenMode::NeumannScreen && t == BoundaryTag::WindowInterior)
    {
      t = BoundaryTag::NeumannScreen;
    }
  }
  return wrap(solve_tagged(grid, std::move(tags), spec.F, spec.grid.tol), spec);
}

TwoDomainField solve_decoupled_limit(const TransmissionSpec &spec)
{
  return solve_decoupled_limit(spec, transmission_grid(spec));
}

WindowFlux window_flux(const TwoDomainField &u, const ScalarSource &F)
{
  const auto &sys = u.field.system();
  const auto &g = sys.grid();
  const auto &x = u.field.values();
  // Side of every dof: 0 window, 1 inside Ω (below the plane), 2 outside.
  std::vector<int> side(sys.dof_count(), 2);
  const double tol = 1e-11 * std::max(1.0, u.inner.volume());
  for (std::size_t node = 0; node < g.node_count(); ++node)
  {
    const auto tag = sys.tag(node);
    if (tag == BoundaryTag::WindowInterior)
    {
      side[static_cast<std::size_t>(sys.dof(node))] = 0;
    }
    else if (tag == BoundaryTag::NeumannScreen)
    {
      side[static_cast<std::size_t>(sys.dof(node, Side::Lower))] = 1;
    }
    else if (const auto d = sys.dof(node); d >= 0)
    {
      const auto p = g.point(g.unravel(node));
      if (p.z < u.inner.hi[2] - tol && u.inner.contains(p, tol))
      {
        side[static_cast<std::size_t>(d)] = 1;
      }
    }
  }
  WindowFlux out;
  sys.for_each_coupling([&](std::int32_t a, std::int32_t b, double c, const Box3 &) {
    if (a >= 0 && b >= 0 && side[a] == 0 && side[b] == 0)
    {
      return;
    }
    if (a < 0 || b < 0)
    {
      const auto w = a < 0 ? b : a;
      if (w >= 0 && side[w] == 0)
      {
        out.rim += c * x[w];
      }
      return;
    }
    if (side[b] == 0)
    {
      std::swap(a, b);
    }
    if (side[a] != 0)
    {
      return;
    }
    if (side[b] == 1)
    {
      out.leaving_inner += c * (x[b] - x[a]);
    }
    else
    {
      out.entering_outer += c * (x[a] - x[b]);
    }
  });
  const auto load = sys.load(F);
  for (std::size_t i = 0; i < side.size(); ++i)
  {
    if (side[i] == 0)
    {
      out.source += load[i];
    }
  }
  const double s = sys.symmetry_factor();
  out.leaving_inner *= s;
  out.entering_outer *= s;
  out.source *= s;
  out.rim *= s;
  return out;
}

EnergyBalance energy_balance(const TwoDomainField &u, const ScalarSource &F)
{
  const auto &sys = u.field.system();
  const auto &x = u.field.values();
  const auto a = sys.assemble(std::vector<double>(sys.dof_count(), 0.0));
  const auto ax = a * x;
  const auto b = sys.load(F);
  EnergyBalance e;
  for (std::size_t i = 0; i < x.size(); ++i)
  {
    e.energy += x[i] * ax[i];
    e.work += b[i] * x[i];
  }
  e.energy *= sys.symmetry_factor();
  e.work *= sys.symmetry_factor();
  return e;
}

namespace
{

bool proven_pair(const DecouplingSpec &spec)
{
  return (spec.mode == ScreenMode::DirichletScreen && spec.regime == Regime::PInfinity) ||
         (spec.mode == ScreenMode::NeumannScreen && spec.regime == Regime::PZero);
}

// One transmission problem per ε, in decreasing ε, with its grid.
std::vector<std::pair<TransmissionSpec, PreparedGrid>> schedule(const DecouplingSpec &spec)
{
  if (spec.epsilons.empty())
  {
    throw ConfigError("epsilon list is empty");
  }
  if (!spec.F)
  {
    throw ConfigError("source F is not set");
  }
  if (!proven_pair(spec) && !spec.allow_exploratory)
  {
    throw ConfigError("mode/regime mismatch: " + to_string(spec.mode) + " screen with regime " +
                      to_string(spec.regime) + " (dirichlet pairs with pinf, neumann with p0)");
  }
  auto eps_list = spec.epsilons;
  std::sort(eps_list.begin(), eps_list.end(), std::greater<>());
  std::vector<std::pair<TransmissionSpec, PreparedGrid>> out;
  for (double eps : eps_list)
  {
    if (!(eps > 0.0 && eps <= 1.0))
    {
      throw ConfigError("epsilon values must lie in (0, 1]");
    }
    const double delta = regime_delta(spec.regime, eps, spec.p);
    const double h = study_spacing(eps, delta, spec.h_max);
    TransmissionSpec t{spec.outer, spec.inner,
                       PatchLayout(spec.plate, eps, delta, top_face(spec.inner)), spec.mode,
                       spec.F, h, spec.grid};
    auto g = transmission_grid(t);
    out.emplace_back(std::move(t), std::move(g));
  }
  return out;
}

}  // namespace

void validate_decoupling(const DecouplingSpec &spec) { (void)schedule(spec); }

DecouplingReport decoupling_study(const DecouplingSpec &spec)
{
  const auto rows = schedule(spec);
  DecouplingReport report;
  report.mode = spec.mode;
  report.regime = spec.regime;
  report.exploratory = !proven_pair(spec);
  for (const auto &[t, grid] : rows)
  {
    const auto u = solve_screened(t, grid);
    const auto lim = solve_decoupled_limit(t, grid);
    const TwoDomainField diff{difference(u.field, lim.field), t.inner, t.outer};
    DecouplingRow row;
    row.eps = t.layout.epsilon();
    row.delta = t.layout.delta();
    row.h = t.h;
    row.inner_err = diff.inner_l2() / lim.inner_l2();
    row.outer_err = diff.outer_l2() / lim.outer_l2();
    row.screen_trace_or_jump =
      spec.mode == ScreenMode::DirichletScreen ? u.screen_trace() : u.jump_norm();
    row.limit_jump = lim.jump_norm();
    row.area_fraction = patch_area_fraction(t.layout);
    row.unknowns = u.field.system().dof_count();
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace screenlab
