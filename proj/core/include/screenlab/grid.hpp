#ifndef SCREENLAB_GRID_HPP
#define SCREENLAB_GRID_HPP

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "screenlab/geometry.hpp"

namespace screenlab
{

enum class Face : int
{
  XLo = 0,
  XHi,
  YLo,
  YHi,
  ZLo,
  ZHi,
};

// Boundary condition carried by a face of the computational box. Neumann is the
// natural condition of the finite-volume scheme and doubles as a mirror plane.
enum class FaceRole
{
  Dirichlet,
  Neumann,
  Gamma1,
  Absorbing,
};

using FaceRoles = std::array<FaceRole, 6>;

struct GridIndex
{
  std::size_t i = 0, j = 0, k = 0;
};

//
// Structured tensor-product box grid. Each axis carries its own node coordinates, so
// uniform grids and grids graded away from Γ₁ share one representation.
//
class BoxRegion
{
public:
  BoxRegion(std::array<std::vector<double>, 3> axes, FaceRoles roles);

  // Uniform spacing h; h must divide every extent to an integer node count.
  static BoxRegion uniform(const Box3 &box, double h, FaceRoles roles);

  const std::vector<double> &axis(int d) const { return axes_[d]; }
  std::size_t size(int d) const { return axes_[d].size(); }
  std::size_t node_count() const { return axes_[0].size() * axes_[1].size() * axes_[2].size(); }
  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const
  {
    return i + axes_[0].size() * (j + axes_[1].size() * k);
  }
  std::size_t index(GridIndex g) const { return index(g.i, g.j, g.k); }
  GridIndex unravel(std::size_t n) const;
  Point3 point(GridIndex g) const { return {axes_[0][g.i], axes_[1][g.j], axes_[2][g.k]}; }
  Box3 bounds() const;

  FaceRole role(Face f) const { return roles_[static_cast<int>(f)]; }
  const FaceRoles &roles() const { return roles_; }
  BoxRegion with_role(Face f, FaceRole r) const;
  bool on_face(Face f, GridIndex g) const;

  // Dual (control-volume) extent of node i along axis d, clipped to the box.
  double dual_lo(int d, std::size_t i) const;
  double dual_hi(int d, std::size_t i) const;
  double dual_width(int d, std::size_t i) const { return dual_hi(d, i) - dual_lo(d, i); }
  double max_spacing(int d) const;
  // Largest spacing among intervals that intersect [a, b].
  double max_spacing_in(int d, double a, double b) const;
  // Index of the node at coordinate x along axis d, if there is one.
  std::optional<std::size_t> find(int d, double x) const;
  // The nodes of this grid inside `box`; every face of `box` must be a grid plane.
  BoxRegion sub_region(const Box3 &box, FaceRoles roles) const;
  // Offsets of sub_region(box) inside this grid.
  GridIndex offset_of(const Box3 &box) const;

private:
  std::array<std::vector<double>, 3> axes_;
  FaceRoles roles_;
};

// Nodes a, a + h, ..., b; throws unless h divides b − a.
std::vector<double> uniform_axis(double a, double b, double h);

//
// Axis on [a, b] that is uniform with spacing ≤ h on [fine_lo, fine_hi] and grows
// geometrically by `ratio` (capped at h_max) outside it. Every breakpoint outside the
// fine zone becomes a node.
//
std::vector<double> graded_axis(double a, double b, double fine_lo, double fine_hi, double h,
                                double ratio, double h_max,
                                const std::vector<double> &breakpoints = {});

// Boundary role of one node. `inner` is Ω inside the computational box Ω̃ and is
// required exactly for the screen problems.
BoundaryTag classify_node(const PatchLayout &layout, const BoxRegion &domain, GridIndex node,
                          ProblemKind mode, const Box3 *inner = nullptr);

// classify_node over every node, in grid order.
std::vector<BoundaryTag> classify_grid(const PatchLayout &layout, const BoxRegion &domain,
                                       ProblemKind mode, const Box3 *inner = nullptr);

}  // namespace screenlab

#endif  // SCREENLAB_GRID_HPP
