#include "screenlab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "screenlab/error.hpp"

namespace screenlab
{

namespace
{

double coord_tol(const std::vector<double> &axis)
{
  return 1e-11 * std::max({1.0, std::abs(axis.front()), std::abs(axis.back())});
}

constexpr int axis_of(Face f) { return static_cast<int>(f) / 2; }
constexpr bool is_hi(Face f) { return static_cast<int>(f) % 2 == 1; }

constexpr std::array<Face, 6> kFaces = {Face::XLo, Face::XHi, Face::YLo,
                                        Face::YHi, Face::ZLo, Face::ZHi};

// Steps growing from `start_step` by `ratio` (capped at h_max) that exactly cover
// `length`.
std::vector<double> growing_steps(double length, double start_step, double ratio, double h_max)
{
  std::vector<double> steps;
  double sum = 0.0;
  double s = start_step;
  while (sum < length * (1.0 - 1e-12))
  {
    s = std::min(s * ratio, h_max);
    steps.push_back(s);
    sum += s;
  }
  if (steps.empty())
  {
    return {length};
  }
  // Dropping the last step and stretching the rest is preferable to squeezing when the
  // overshoot is more than half a step.
  if (steps.size() > 1 && sum - length > 0.5 * steps.back())
  {
    sum -= steps.back();
    steps.pop_back();
  }
  const double scale = length / sum;
  for (auto &v : steps)
  {
    v *= scale;
  }
  return steps;
}

}  // namespace

BoxRegion::BoxRegion(std::array<std::vector<double>, 3> axes, FaceRoles roles)
  : axes_(std::move(axes)), roles_(roles)
{
  for (int d = 0; d < 3; ++d)
  {
    const auto &a = axes_[d];
    if (a.size() < 2)
    {
      throw GeometryError("every grid axis needs at least two nodes");
    }
    for (std::size_t i = 1; i < a.size(); ++i)
    {
      if (!(a[i] > a[i - 1]))
      {
        throw GeometryError("grid axis coordinates must be strictly increasing");
      }
    }
  }
}

BoxRegion BoxRegion::uniform(const Box3 &box, double h, FaceRoles roles)
{
  return BoxRegion({uniform_axis(box.lo[0], box.hi[0], h), uniform_axis(box.lo[1], box.hi[1], h),
                    uniform_axis(box.lo[2], box.hi[2], h)},
                   roles);
}

GridIndex BoxRegion::unravel(std::size_t n) const
{
  const std::size_t nx = axes_[0].size();
  const std::size_t ny = axes_[1].size();
  return {n % nx, (n / nx) % ny, n / (nx * ny)};
}

Box3 BoxRegion::bounds() const
{
  return {{axes_[0].front(), axes_[1].front(), axes_[2].front()},
          {axes_[0].back(), axes_[1].back(), axes_[2].back()}};
}

BoxRegion BoxRegion::with_role(Face f, FaceRole r) const
{
  BoxRegion copy = *this;
  copy.roles_[static_cast<int>(f)] = r;
  return copy;
}

bool BoxRegion::on_face(Face f, GridIndex g) const
{
  const int d = axis_of(f);
  const std::size_t idx = d == 0 ? g.i : (d == 1 ? g.j : g.k);
  return is_hi(f) ? idx + 1 == axes_[d].size() : idx == 0;
}

double BoxRegion::dual_lo(int d, std::size_t i) const
{
  const auto &a = axes_[d];
  return i == 0 ? a[0] : 0.5 * (a[i - 1] + a[i]);
}

double BoxRegion::dual_hi(int d, std::size_t i) const
{
  const auto &a = axes_[d];
  return i + 1 == a.size() ? a[i] : 0.5 * (a[i] + a[i + 1]);
}

double BoxRegion::max_spacing(int d) const
{
  const auto &a = axes_[d];
  double m = 0.0;
  for (std::size_t i = 1; i < a.size(); ++i)
  {
    m = std::max(m, a[i] - a[i - 1]);
  }
  return m;
}

double BoxRegion::max_spacing_in(int d, double lo, double hi) const
{
  const auto &a = axes_[d];
  const double tol = coord_tol(a);
  double m = 0.0;
  for (std::size_t i = 1; i < a.size(); ++i)
  {
    if (a[i] > lo + tol && a[i - 1] < hi - tol)
    {
      m = std::max(m, a[i] - a[i - 1]);
    }
  }
  return m;
}

std::optional<std::size_t> BoxRegion::find(int d, double x) const
{
  const auto &a = axes_[d];
  const double tol = coord_tol(a);
  auto it = std::lower_bound(a.begin(), a.end(), x - tol);
  if (it != a.end() && std::abs(*it - x) <= tol)
  {
    return static_cast<std::size_t>(it - a.begin());
  }
  return std::nullopt;
}

GridIndex BoxRegion::offset_of(const Box3 &box) const
{
  std::array<std::size_t, 3> off{};
  for (int d = 0; d < 3; ++d)
  {
    auto lo = find(d, box.lo[d]);
    if (!lo || !find(d, box.hi[d]))
    {
      throw GeometryError("sub-region faces must coincide with grid planes");
    }
    off[d] = *lo;
  }
  return {off[0], off[1], off[2]};
}

BoxRegion BoxRegion::sub_region(const Box3 &box, FaceRoles roles) const
{
  std::array<std::vector<double>, 3> axes;
  for (int d = 0; d < 3; ++d)
  {
    auto lo = find(d, box.lo[d]);
    auto hi = find(d, box.hi[d]);
    if (!lo || !hi || *hi <= *lo)
    {
      throw GeometryError("sub-region faces must coincide with grid planes");
    }
    axes[d].assign(axes_[d].begin() + static_cast<std::ptrdiff_t>(*lo),
                   axes_[d].begin() + static_cast<std::ptrdiff_t>(*hi) + 1);
  }
  return BoxRegion(std::move(axes), roles);
}

std::vector<double> uniform_axis(double a, double b, double h)
{
  if (!(b > a) || !(h > 0.0))
  {
    throw GeometryError("uniform axis needs b > a and h > 0");
  }
  const double steps = (b - a) / h;
  const double n = std::round(steps);
  if (n < 1.0 || std::abs(steps - n) > 1e-9 * std::max(1.0, n))
  {
    throw GeometryError("grid spacing " + std::to_string(h) + " does not divide extent " +
                        std::to_string(b - a));
  }
  const auto count = static_cast<std::size_t>(n);
  std::vector<double> nodes(count + 1);
  for (std::size_t i = 0; i <= count; ++i)
  {
    nodes[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(count);
  }
  nodes.back() = b;
  return nodes;
}

std::vector<double> graded_axis(double a, double b, double fine_lo, double fine_hi, double h,
                                double ratio, double h_max, const std::vector<double> &breakpoints)
{
  if (!(a <= fine_lo && fine_lo < fine_hi && fine_hi <= b))
  {
    throw GeometryError("fine zone must lie inside the axis extent");
  }
  if (!(h > 0.0) || !(ratio >= 1.0) || !(h_max >= h))
  {
    throw GeometryError("graded axis needs h > 0, ratio >= 1 and h_max >= h");
  }
  const double tol = 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
  const auto cells = static_cast<std::size_t>(std::ceil((fine_hi - fine_lo) / h - 1e-9));
  const double fine_h = (fine_hi - fine_lo) / static_cast<double>(cells);

  std::vector<double> below;
  std::vector<double> above;
  for (double p : breakpoints)
  {
    if (p > a + tol && p < fine_lo - tol)
    {
      below.push_back(p);
    }
    else if (p > fine_hi + tol && p < b - tol)
    {
      above.push_back(p);
    }
    else if (p > fine_lo + tol && p < fine_hi - tol)
    {
      const double r = (p - fine_lo) / fine_h;
      if (std::abs(r - std::round(r)) > 1e-9)
      {
        throw GeometryError("breakpoint inside the fine zone is not a grid node");
      }
    }
  }
  std::sort(above.begin(), above.end());
  std::sort(below.begin(), below.end(), std::greater<>());
  above.push_back(b);
  below.push_back(a);

  std::vector<double> nodes;
  for (std::size_t i = 0; i <= cells; ++i)
  {
    nodes.push_back(fine_lo + fine_h * static_cast<double>(i));
  }
  nodes.back() = fine_hi;

  double step = fine_h;
  double pos = fine_hi;
  for (double target : above)
  {
    if (target - pos <= tol)
    {
      continue;
    }
    for (double s : growing_steps(target - pos, step, ratio, h_max))
    {
      pos += s;
      nodes.push_back(pos);
      step = s;
    }
    nodes.back() = target;
    pos = target;
  }

  std::vector<double> lower;
  step = fine_h;
  pos = fine_lo;
  for (double target : below)
  {
    if (pos - target <= tol)
    {
      continue;
    }
    for (double s : growing_steps(pos - target, step, ratio, h_max))
    {
      pos -= s;
      lower.push_back(pos);
      step = s;
    }
    lower.back() = target;
    pos = target;
  }
  std::reverse(lower.begin(), lower.end());
  lower.insert(lower.end(), nodes.begin(), nodes.end());
  return lower;
}

namespace
{

void validate_mode(const PatchLayout &layout, const BoxRegion &domain, ProblemKind mode,
                   const Box3 *inner)
{
  const auto b = domain.bounds();
  int gamma1_faces = 0;
  for (Face f : kFaces)
  {
    if (domain.role(f) == FaceRole::Gamma1)
    {
      ++gamma1_faces;
    }
  }
  if (mode == ProblemKind::MixedRobin)
  {
    if (inner != nullptr)
    {
      throw ConfigError("the mixed Robin problem has no inner region");
    }
    if (gamma1_faces != 1 || domain.role(Face::ZHi) != FaceRole::Gamma1)
    {
      throw ConfigError("the mixed Robin problem needs exactly the top face as Γ₁");
    }
    if (std::abs(b.hi[2]) > 1e-12)
    {
      throw ConfigError("Γ₁ must lie in the plane x3 = 0");
    }
    for (Face f : kFaces)
    {
      if (domain.role(f) == FaceRole::Absorbing)
      {
        throw ConfigError("absorbing faces are only valid for screened problems");
      }
    }
    return;
  }
  if (inner == nullptr)
  {
    throw ConfigError("screened problems need the inner region Ω");
  }
  if (gamma1_faces != 0)
  {
    throw ConfigError("in screened problems Γ₁ lies inside the box, not on a face");
  }
  if (std::abs(inner->hi[2]) > 1e-12)
  {
    throw ConfigError("the top face of Ω must lie in the plane x3 = 0");
  }
  const auto &r = layout.region();
  const double tol = 1e-9;
  if (std::abs(r.x0 - inner->lo[0]) > tol || std::abs(r.x1 - inner->hi[0]) > tol ||
      std::abs(r.y0 - inner->lo[1]) > tol || std::abs(r.y1 - inner->hi[1]) > tol)
  {
    throw ConfigError("patch region must equal the top face of Ω");
  }
}

BoundaryTag gamma1_tag(bool in_patch, ProblemKind mode)
{
  switch (mode)
  {
  case ProblemKind::MixedRobin:
    return in_patch ? BoundaryTag::DirichletPatch : BoundaryTag::RobinComplement;
  case ProblemKind::DirichletScreen:
    return in_patch ? BoundaryTag::DirichletPatch : BoundaryTag::WindowInterior;
  case ProblemKind::NeumannScreen:
    return in_patch ? BoundaryTag::WindowInterior : BoundaryTag::NeumannScreen;
  }
  return BoundaryTag::Interior;
}

BoundaryTag classify_unchecked(const PatchLayout &layout, const BoxRegion &domain, GridIndex g,
                               ProblemKind mode, const Box3 *inner)
{
  bool on_gamma1_face = false;
  bool absorbing = false;
  for (Face f : kFaces)
  {
    if (!domain.on_face(f, g))
    {
      continue;
    }
    switch (domain.role(f))
    {
    case FaceRole::Dirichlet:
      return BoundaryTag::OuterDirichlet;
    case FaceRole::Gamma1:
      on_gamma1_face = true;
      break;
    case FaceRole::Absorbing:
      absorbing = true;
      break;
    case FaceRole::Neumann:
      break;
    }
  }
  const Point3 p = domain.point(g);
  if (mode == ProblemKind::MixedRobin)
  {
    if (on_gamma1_face)
    {
      return gamma1_tag(layout.contains({p.x, p.y}), mode);
    }
    return BoundaryTag::Interior;
  }
  if (absorbing)
  {
    return BoundaryTag::AbsorbingOuter;
  }
  const double tol = 1e-11 * std::max(1.0, inner->volume());
  if (!inner->contains(p, tol))
  {
    return BoundaryTag::Interior;
  }
  const bool strictly_inside = p.x > inner->lo[0] + tol && p.x < inner->hi[0] - tol &&
                               p.y > inner->lo[1] + tol && p.y < inner->hi[1] - tol &&
                               p.z > inner->lo[2] + tol;
  if (!strictly_inside)
  {
    return BoundaryTag::OuterDirichlet;  // Γ₂: walls, bottom and the rim of Γ₁
  }
  if (std::abs(p.z - inner->hi[2]) <= tol)
  {
    return gamma1_tag(layout.contains({p.x, p.y}), mode);
  }
  return BoundaryTag::Interior;
}

}  // namespace

BoundaryTag classify_node(const PatchLayout &layout, const BoxRegion &domain, GridIndex node,
                          ProblemKind mode, const Box3 *inner)
{
  if (node.i >= domain.size(0) || node.j >= domain.size(1) || node.k >= domain.size(2))
  {
    throw GeometryError("node index outside the grid");
  }
  validate_mode(layout, domain, mode, inner);
  return classify_unchecked(layout, domain, node, mode, inner);
}

std::vector<BoundaryTag> classify_grid(const PatchLayout &layout, const BoxRegion &domain,
                                       ProblemKind mode, const Box3 *inner)
{
  validate_mode(layout, domain, mode, inner);
  std::vector<BoundaryTag> tags(domain.node_count());
  for (std::size_t k = 0; k < domain.size(2); ++k)
  {
    for (std::size_t j = 0; j < domain.size(1); ++j)
    {
      for (std::size_t i = 0; i < domain.size(0); ++i)
      {
        tags[domain.index(i, j, k)] = classify_unchecked(layout, domain, {i, j, k}, mode, inner);
      }
    }
  }
  return tags;
}

}  // namespace screenlab
