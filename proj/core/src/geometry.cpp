#include "screenlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "screenlab/error.hpp"

namespace screenlab
{

namespace
{

// Relative width of the band around ∂ω that counts as boundary (open-set convention).
constexpr double kBoundaryTol = 1e-10;

double cross(Point2 o, Point2 a, Point2 b)
{
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

double shoelace(const std::vector<Point2> &v)
{
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
  {
    const auto &a = v[i];
    const auto &b = v[(i + 1) % v.size()];
    s += a.x * b.y - b.x * a.y;
  }
  return 0.5 * s;
}

bool near_integer(double v)
{
  return std::abs(v - std::round(v)) < 1e-9;
}

}  // namespace

bool Box3::contains(const Point3 &p, double tol) const
{
  return p.x >= lo[0] - tol && p.x <= hi[0] + tol && p.y >= lo[1] - tol && p.y <= hi[1] + tol &&
         p.z >= lo[2] - tol && p.z <= hi[2] + tol;
}

double Box3::overlap(const Box3 &other) const
{
  double v = 1.0;
  for (int d = 0; d < 3; ++d)
  {
    const double w = std::min(hi[d], other.hi[d]) - std::max(lo[d], other.lo[d]);
    if (w <= 0.0)
    {
      return 0.0;
    }
    v *= w;
  }
  return v;
}

bool Box3::strictly_inside(const Box3 &outer) const
{
  for (int d = 0; d < 3; ++d)
  {
    if (!(lo[d] > outer.lo[d] && hi[d] < outer.hi[d]))
    {
      return false;
    }
  }
  return true;
}

PlateShape::PlateShape(Kind kind, double size, std::vector<Point2> vertices)
  : kind_(kind), size_(size), vertices_(std::move(vertices))
{
}

PlateShape PlateShape::disk(double radius)
{
  if (!(radius > 0.0) || !std::isfinite(radius))
  {
    throw GeometryError("disk radius must be positive and finite");
  }
  return PlateShape(Kind::Disk, radius, {});
}

PlateShape PlateShape::square(double half_side)
{
  if (!(half_side > 0.0) || !std::isfinite(half_side))
  {
    throw GeometryError("square half-side must be positive and finite");
  }
  const double s = half_side;
  return PlateShape(Kind::Square, s, {{-s, -s}, {s, -s}, {s, s}, {-s, s}});
}

PlateShape PlateShape::polygon(std::vector<Point2> vertices)
{
  if (vertices.size() < 3)
  {
    throw GeometryError("polygon needs at least three vertices");
  }
  for (const auto &v : vertices)
  {
    if (!std::isfinite(v.x) || !std::isfinite(v.y))
    {
      throw GeometryError("polygon vertex is not finite");
    }
  }
  if (shoelace(vertices) < 0.0)
  {
    std::reverse(vertices.begin(), vertices.end());
  }
  const std::size_t n = vertices.size();
  for (std::size_t i = 0; i < n; ++i)
  {
    if (cross(vertices[i], vertices[(i + 1) % n], vertices[(i + 2) % n]) <= 0.0)
    {
      throw GeometryError("polygon must be strictly convex");
    }
  }
  PlateShape shape(Kind::Polygon, 0.0, std::move(vertices));
  if (!shape.contains({0.0, 0.0}))
  {
    throw GeometryError("plate must contain the origin in its interior");
  }
  return shape;
}

std::string PlateShape::name() const
{
  switch (kind_)
  {
  case Kind::Disk:
    return "disk";
  case Kind::Square:
    return "square";
  case Kind::Polygon:
    return "polygon";
  }
  return "unknown";
}

bool PlateShape::contains(Point2 y) const
{
  if (!std::isfinite(y.x) || !std::isfinite(y.y))
  {
    return false;
  }
  switch (kind_)
  {
  case Kind::Disk:
    return std::hypot(y.x, y.y) < size_ * (1.0 - kBoundaryTol);
  case Kind::Square:
  {
    const double lim = size_ * (1.0 - kBoundaryTol);
    return std::abs(y.x) < lim && std::abs(y.y) < lim;
  }
  case Kind::Polygon:
  {
    const double scale = max_radius();
    const std::size_t n = vertices_.size();
    for (std::size_t i = 0; i < n; ++i)
    {
      const auto &a = vertices_[i];
      const auto &b = vertices_[(i + 1) % n];
      const double len = std::hypot(b.x - a.x, b.y - a.y);
      if (cross(a, b, y) <= kBoundaryTol * scale * len)
      {
        return false;
      }
    }
    return true;
  }
  }
  return false;
}

double PlateShape::area() const
{
  switch (kind_)
  {
  case Kind::Disk:
    return std::numbers::pi * size_ * size_;
  case Kind::Square:
    return 4.0 * size_ * size_;
  case Kind::Polygon:
    return shoelace(vertices_);
  }
  return 0.0;
}

double PlateShape::max_radius() const
{
  if (kind_ == Kind::Disk)
  {
    return size_;
  }
  double r = 0.0;
  for (const auto &v : vertices_)
  {
    r = std::max(r, std::hypot(v.x, v.y));
  }
  return r;
}

double PlateShape::diameter() const
{
  if (kind_ == Kind::Disk)
  {
    return 2.0 * size_;
  }
  double d = 0.0;
  for (const auto &a : vertices_)
  {
    for (const auto &b : vertices_)
    {
      d = std::max(d, std::hypot(a.x - b.x, a.y - b.y));
    }
  }
  return d;
}

PlateShape PlateShape::scaled(double a) const
{
  if (!(a > 0.0))
  {
    throw GeometryError("plate scale factor must be positive");
  }
  switch (kind_)
  {
  case Kind::Disk:
    return disk(size_ * a);
  case Kind::Square:
    return square(size_ * a);
  case Kind::Polygon:
  {
    auto v = vertices_;
    for (auto &p : v)
    {
      p.x *= a;
      p.y *= a;
    }
    return polygon(std::move(v));
  }
  }
  return *this;
}

bool PlateShape::fits_unit_cell() const
{
  if (kind_ == Kind::Disk || kind_ == Kind::Square)
  {
    return size_ <= 1.0;
  }
  return std::all_of(vertices_.begin(), vertices_.end(), [](const Point2 &v) {
    return std::abs(v.x) <= 1.0 && std::abs(v.y) <= 1.0;
  });
}

bool PlateShape::mirror_symmetric() const
{
  if (kind_ != Kind::Polygon)
  {
    return true;
  }
  const double tol = 1e-12 * std::max(1.0, max_radius());
  auto has_vertex = [&](Point2 p) {
    return std::any_of(vertices_.begin(), vertices_.end(), [&](const Point2 &v) {
      return std::abs(v.x - p.x) <= tol && std::abs(v.y - p.y) <= tol;
    });
  };
  return std::all_of(vertices_.begin(), vertices_.end(), [&](const Point2 &v) {
    return has_vertex({-v.x, v.y}) && has_vertex({v.x, -v.y});
  });
}

bool plate_contains(const PlateShape &plate, Point2 y)
{
  return plate.contains(y);
}

PatchLayout::PatchLayout(PlateShape plate, double epsilon, double delta, Rect region)
  : plate_(std::move(plate)), epsilon_(epsilon), delta_(delta), region_(region)
{
  if (!(epsilon >= 0.0 && epsilon <= 1.0))
  {
    throw GeometryError("patch scale epsilon must lie in [0, 1]");
  }
  if (!(delta > 0.0) || !std::isfinite(delta))
  {
    throw GeometryError("lattice scale delta must be positive");
  }
  if (!(region.x1 > region.x0 && region.y1 > region.y0))
  {
    throw GeometryError("patch region must be a nondegenerate rectangle");
  }
  if (!plate_.fits_unit_cell())
  {
    throw GeometryError("plate does not fit the periodicity cell (-1,1)^2");
  }
}

bool PatchLayout::contains(Point2 x) const
{
  const double tol = 1e-12 * std::max({1.0, std::abs(region_.x0), std::abs(region_.x1),
                                       std::abs(region_.y0), std::abs(region_.y1)});
  if (!region_.contains(x, tol))
  {
    throw GeometryError("not on Γ₁");
  }
  if (empty())
  {
    return false;
  }
  const double period = 2.0 * delta_;
  const double cx = period * std::round(x.x / period);
  const double cy = period * std::round(x.y / period);
  const double scale = patch_scale();
  return plate_.contains({(x.x - cx) / scale, (x.y - cy) / scale});
}

double PatchLayout::area_fraction() const
{
  return epsilon_ * epsilon_ * plate_.area() / 4.0;
}

bool PatchLayout::mirror_symmetric_about(int axis, double c) const
{
  if (axis < 0 || axis > 1)
  {
    return false;
  }
  if (empty())
  {
    return true;
  }
  return plate_.mirror_symmetric() && near_integer(c / delta_);
}

bool patch_contains(const PatchLayout &layout, Point2 x)
{
  return layout.contains(x);
}

double patch_area_fraction(const PatchLayout &layout)
{
  return layout.area_fraction();
}

const char *to_string(BoundaryTag tag)
{
  switch (tag)
  {
  case BoundaryTag::Interior:
    return "Interior";
  case BoundaryTag::DirichletPatch:
    return "DirichletPatch";
  case BoundaryTag::RobinComplement:
    return "RobinComplement";
  case BoundaryTag::OuterDirichlet:
    return "OuterDirichlet";
  case BoundaryTag::NeumannScreen:
    return "NeumannScreen";
  case BoundaryTag::WindowInterior:
    return "WindowInterior";
  case BoundaryTag::AbsorbingOuter:
    return "AbsorbingOuter";
  }
  return "?";
}

}  // namespace screenlab
