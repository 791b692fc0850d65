#ifndef SCREENLAB_CAPACITY_HPP
#define SCREENLAB_CAPACITY_HPP

#include <vector>

#include "screenlab/geometry.hpp"
#include "screenlab/sparse.hpp"

namespace screenlab
{

// A flat convex panel in the plane x₃ = 0.
struct Panel
{
  std::vector<Point2> vertices;  // counter-clockwise
  Point2 centroid;
  double area = 0.0;
};

struct PanelMesh
{
  std::vector<Panel> panels;

  std::size_t size() const { return panels.size(); }
  double area() const;
};

// Panel with area and centroid computed from its vertices; throws on zero area.
Panel make_panel(std::vector<Point2> vertices);

//
// Level-n mesh of ω. Disk: uniform polar rings, M = max(2, ⌊9·2ⁿ/4⌋) rings whose
// cells are close to square (n = 4 gives about 4000 panels). Square: 2ⁿ × 2ⁿ uniform
// cells. Polygon: fan triangles from the origin, each split into 4ⁿ similar triangles.
//
PanelMesh mesh_plate(const PlateShape &plate, int n);

// ∫ 1/|y − p| dy over a convex panel containing p.
double self_integral(const Panel &panel, Point2 p);

// Collocation matrix of the kernel 1/(2π|x − y|) at panel centroids.
DenseMatrix<double> assemble_single_layer(const PanelMesh &mesh);

struct CapacityResult
{
  double c_omega = 0.0;
  std::vector<double> density;
  Point2 dipole;  // c₁, c₂ of the expansion c r⁻¹ + Σ cᵢ ∂ᵢ r⁻¹
  std::size_t panels = 0;
  double error_estimate = 0.0;  // |c(n) − c(n−1)|/c(n)
  int level = 0;
  PanelMesh mesh;
};

// Single level without the refinement comparison (error_estimate left at 0).
CapacityResult solve_capacity(const PanelMesh &mesh, int level = 0);

// Unit-potential solve at level n, with the error estimate from level n − 1.
CapacityResult plate_capacity(const PlateShape &plate, int n);

// Aitken extrapolation of c(n) from three consecutive levels.
double extrapolated_capacity(const PlateShape &plate, int n_first);

struct FarFieldSample
{
  double potential = 0.0;
  double residual = 0.0;  // |X₀(x) − c_ω/|x||
};

// Far-field potential; the probe must satisfy |x| > 2·diam(ω) and x₃ ≤ 0.
FarFieldSample far_field_probe(const CapacityResult &result, const PanelMesh &mesh, Point3 x);

// On-plate potential X₀ at every centroid (should be 1).
std::vector<double> plate_potential(const CapacityResult &result);

}  // namespace screenlab

#endif  // SCREENLAB_CAPACITY_HPP
