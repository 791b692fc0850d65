#ifndef SCREENLAB_GEOMETRY_HPP
#define SCREENLAB_GEOMETRY_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace screenlab
{

struct Point2
{
  double x = 0.0;
  double y = 0.0;
};

struct Point3
{
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

// Closed axis-aligned rectangle in the plane x₃ = 0.
struct Rect
{
  double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0;

  bool contains(Point2 p, double tol = 0.0) const
  {
    return p.x >= x0 - tol && p.x <= x1 + tol && p.y >= y0 - tol && p.y <= y1 + tol;
  }
  bool contains_open(Point2 p, double tol) const
  {
    return p.x > x0 + tol && p.x < x1 - tol && p.y > y0 + tol && p.y < y1 - tol;
  }
  double area() const { return (x1 - x0) * (y1 - y0); }
};

// Closed axis-aligned box.
struct Box3
{
  std::array<double, 3> lo{};
  std::array<double, 3> hi{};

  bool contains(const Point3 &p, double tol = 0.0) const;
  double volume() const { return (hi[0] - lo[0]) * (hi[1] - lo[1]) * (hi[2] - lo[2]); }
  // Measure of the intersection with `other` (zero when disjoint).
  double overlap(const Box3 &other) const;
  bool strictly_inside(const Box3 &outer) const;
};

//
// The plate ω in cell coordinates. Bounded, open, contains the origin.
//
class PlateShape
{
public:
  enum class Kind
  {
    Disk,
    Square,
    Polygon
  };

  static PlateShape disk(double radius);
  static PlateShape square(double half_side);
  // Convex polygon; vertices may be given in either orientation.
  static PlateShape polygon(std::vector<Point2> vertices);

  Kind kind() const { return kind_; }
  std::string name() const;
  // Disk radius or square half-side; zero for polygons.
  double size() const { return size_; }
  const std::vector<Point2> &vertices() const { return vertices_; }

  // Open-set membership; points within roundoff of ∂ω resolve to false.
  bool contains(Point2 y) const;
  double area() const;
  // max |y| over the closure of ω.
  double max_radius() const;
  double diameter() const;
  // a·ω for a > 0.
  PlateShape scaled(double a) const;
  // True when closure(ω) ⊂ [−1, 1]², i.e. ω fits the periodicity cell.
  bool fits_unit_cell() const;
  // Invariance under y₁ → −y₁ and y₂ → −y₂.
  bool mirror_symmetric() const;

private:
  PlateShape(Kind kind, double size, std::vector<Point2> vertices);

  Kind kind_;
  double size_;
  std::vector<Point2> vertices_;  // CCW for polygons, corners for squares
};

bool plate_contains(const PlateShape &plate, Point2 y);

//
// Periodic Dirichlet/Neumann partition of Γ₁: patches c + δε·ω centred on the lattice
// {(2nδ, 2mδ)}. ε = 0 is accepted as the degenerate layout without patches.
//
class PatchLayout
{
public:
  PatchLayout(PlateShape plate, double epsilon, double delta, Rect region);

  const PlateShape &plate() const { return plate_; }
  double epsilon() const { return epsilon_; }
  double delta() const { return delta_; }
  const Rect &region() const { return region_; }
  // Patch radius scale δε in length units.
  double patch_scale() const { return epsilon_ * delta_; }
  bool empty() const { return epsilon_ == 0.0; }

  // Throws GeometryError("not on Γ₁") outside region.
  bool contains(Point2 x) const;
  // ε²·area(ω)/4, ignoring clipping at ∂Γ₁.
  double area_fraction() const;
  // Whether reflection about the line x_axis = c maps the pattern onto itself.
  bool mirror_symmetric_about(int axis, double c) const;

private:
  PlateShape plate_;
  double epsilon_;
  double delta_;
  Rect region_;
};

bool patch_contains(const PatchLayout &layout, Point2 x);
double patch_area_fraction(const PatchLayout &layout);

// Boundary role of a grid node. Every node carries exactly one tag.
enum class BoundaryTag : std::uint8_t
{
  Interior,
  DirichletPatch,
  RobinComplement,
  OuterDirichlet,
  NeumannScreen,
  WindowInterior,
  AbsorbingOuter,
};

const char *to_string(BoundaryTag tag);

// Which problem a classification is for: alternating Dirichlet/Robin conditions on Γ₁,
// a perforated screen with Dirichlet patches, or a Neumann screen whose patches are
// the open windows.
enum class ProblemKind
{
  MixedRobin,
  DirichletScreen,
  NeumannScreen,
};

}  // namespace screenlab

#endif  // SCREENLAB_GEOMETRY_HPP
