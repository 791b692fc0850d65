#ifndef SCREENLAB_FV_SYSTEM_HPP
#define SCREENLAB_FV_SYSTEM_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "screenlab/grid.hpp"
#include "screenlab/sparse.hpp"

namespace screenlab
{

// Which copy of a split Neumann-screen node is meant. Unsplit nodes ignore it.
enum class Side
{
  Upper,
  Lower,
};

using ScalarSource = std::function<double(const Point3 &)>;

//
// Node-centred finite-volume discretization of −Δ on a tagged box grid.
//
// DirichletPatch and OuterDirichlet nodes are eliminated (homogeneous data).
// NeumannScreen nodes are split into an upper and a lower copy that only see their own
// side of the plane, so the screen is impermeable from both sides. Each remaining
// node copy owns one degree of freedom.
//
// The stiffness coupling between neighbours is (dual face area)/(spacing); on a
// uniform grid this is h times the 7-point Laplacian with ghost-node boundary rows.
//
class FvSystem
{
public:
  FvSystem(BoxRegion grid, std::vector<BoundaryTag> tags, double symmetry_factor = 1.0);

  const BoxRegion &grid() const { return grid_; }
  const std::vector<BoundaryTag> &tags() const { return tags_; }
  BoundaryTag tag(std::size_t node) const { return tags_[node]; }
  std::size_t dof_count() const { return volumes_.size(); }
  // Norms are scaled by this factor (squared) to stand for the unreduced domain.
  double symmetry_factor() const { return symmetry_factor_; }

  // Degree of freedom of a node copy, or −1 when the node is eliminated.
  std::int32_t dof(std::size_t node, Side side = Side::Upper) const;
  bool is_split(std::size_t node) const { return tags_[node] == BoundaryTag::NeumannScreen; }

  // Per-dof control-volume measure, area on Robin faces, area on absorbing faces.
  const std::vector<double> &volumes() const { return volumes_; }
  const std::vector<double> &robin_areas() const { return robin_areas_; }
  const std::vector<double> &absorbing_areas() const { return absorbing_areas_; }

  Box3 control_volume(std::size_t node, Side side) const;

  // Calls f(dof_a, dof_b, coefficient, edge_box) once per grid edge and copy pair;
  // eliminated endpoints are passed as −1. edge_box is the region whose gradient the
  // coupling represents.
  template <typename F>
  void for_each_coupling(F &&f) const;

  // K + diag(d) restricted to the free dofs.
  SparseMatrix<double> assemble(const std::vector<double> &d) const;
  SparseMatrix<Complex> assemble(const std::vector<Complex> &d) const;

  // Right-hand side −∫ f v for the problem −Δu = −f: entry −f(node)·volume.
  std::vector<double> load(const ScalarSource &f) const;

  // Value of u at a node copy (0 on eliminated nodes).
  template <typename T>
  T value(const std::vector<T> &u, std::size_t node, Side side = Side::Upper) const
  {
    const auto d = dof(node, side);
    return d < 0 ? T{} : u[static_cast<std::size_t>(d)];
  }

  // Grid index of the plane carrying split nodes, if any.
  std::size_t split_plane() const { return split_plane_; }
  bool has_split_nodes() const { return !lower_dof_.empty(); }

private:
  template <typename T>
  SparseMatrix<T> assemble_impl(const std::vector<T> &d) const;

  BoxRegion grid_;
  std::vector<BoundaryTag> tags_;
  double symmetry_factor_;
  std::vector<std::int32_t> dof_;        // per node; upper copy for split nodes
  std::vector<std::int32_t> lower_dof_;  // per node of the split plane
  std::size_t split_plane_ = 0;
  std::vector<double> volumes_;
  std::vector<double> robin_areas_;
  std::vector<double> absorbing_areas_;
};

template <typename F>
void FvSystem::for_each_coupling(F &&f) const
{
  const std::size_t nx = grid_.size(0), ny = grid_.size(1), nz = grid_.size(2);
  const auto &ax = grid_.axis(0);
  const auto &ay = grid_.axis(1);
  const auto &az = grid_.axis(2);
  const bool splits = has_split_nodes();

  for (std::size_t k = 0; k < nz; ++k)
  {
    const bool plane = splits && k == split_plane_;
    const double z_lo = grid_.dual_lo(2, k), z_hi = grid_.dual_hi(2, k), zk = az[k];
    for (std::size_t j = 0; j < ny; ++j)
    {
      const double y_lo = grid_.dual_lo(1, j), y_hi = grid_.dual_hi(1, j);
      for (std::size_t i = 0; i < nx; ++i)
      {
        const std::size_t n = grid_.index(i, j, k);
        const double x_lo = grid_.dual_lo(0, i), x_hi = grid_.dual_hi(0, i);

        // Lateral edges (x then y) may need splitting on the screen plane.
        for (int d = 0; d < 2; ++d)
        {
          const bool last = d == 0 ? i + 1 == nx : j + 1 == ny;
          if (last)
          {
            continue;
          }
          const std::size_t m = d == 0 ? n + 1 : n + nx;
          const double a0 = d == 0 ? ax[i] : ay[j];
          const double a1 = d == 0 ? ax[i + 1] : ay[j + 1];
          const double w = d == 0 ? (y_hi - y_lo) : (x_hi - x_lo);
          const double len = a1 - a0;
          auto edge = [&](double zl, double zh) {
            Box3 b;
            if (d == 0)
            {
              b = {{a0, y_lo, zl}, {a1, y_hi, zh}};
            }
            else
            {
              b = {{x_lo, a0, zl}, {x_hi, a1, zh}};
            }
            return b;
          };
          if (plane && (is_split(n) || is_split(m)))
          {
            f(dof(n, Side::Upper), dof(m, Side::Upper), w * (z_hi - zk) / len, edge(zk, z_hi));
            f(dof(n, Side::Lower), dof(m, Side::Lower), w * (zk - z_lo) / len, edge(z_lo, zk));
          }
          else
          {
            f(dof_[n], dof_[m], w * (z_hi - z_lo) / len, edge(z_lo, z_hi));
          }
        }
        if (k + 1 < nz)
        {
          const std::size_t m = n + nx * ny;
          const double len = az[k + 1] - zk;
          const Box3 b{{x_lo, y_lo, zk}, {x_hi, y_hi, az[k + 1]}};
          f(dof(n, Side::Upper), dof(m, Side::Lower), (x_hi - x_lo) * (y_hi - y_lo) / len, b);
        }
      }
    }
  }
}

//
// A discrete field on an FvSystem: one value per degree of freedom. Norms integrate
// piecewise-constant values over control volumes and piecewise-constant gradients
// over edge boxes, clipped to a box.
//
template <typename T>
class GridFieldT
{
public:
  GridFieldT() = default;
  GridFieldT(std::shared_ptr<const FvSystem> system, std::vector<T> values)
    : system_(std::move(system)), values_(std::move(values))
  {
  }

  const FvSystem &system() const { return *system_; }
  std::shared_ptr<const FvSystem> system_ptr() const { return system_; }
  const std::vector<T> &values() const { return values_; }
  std::vector<T> &values() { return values_; }
  T at(std::size_t node, Side side = Side::Upper) const
  {
    return system_->value(values_, node, side);
  }

  double l2_norm(const Box3 &region) const;
  double l2_norm() const { return l2_norm(system_->grid().bounds()); }
  // ‖∇u‖ over region.
  double h1_seminorm(const Box3 &region) const;
  double h1_norm(const Box3 &region) const;
  double h1_norm() const { return h1_norm(system_->grid().bounds()); }
  // L₂ norm of the trace on the plane x₃ = z over rect (lower copies of split nodes).
  double trace_norm(double z, const Rect &rect, Side side = Side::Lower) const;
  // L₂ norm of u_upper − u_lower over the split nodes.
  double jump_norm() const;

private:
  std::shared_ptr<const FvSystem> system_;
  std::vector<T> values_;
};

extern template class GridFieldT<double>;
extern template class GridFieldT<Complex>;

using GridField = GridFieldT<double>;
using ComplexField = GridFieldT<Complex>;

// a − b on whichever of the two systems can represent both (same grid required).
template <typename T>
GridFieldT<T> difference(const GridFieldT<T> &a, const GridFieldT<T> &b);

extern template GridFieldT<double> difference(const GridFieldT<double> &, const GridFieldT<double> &);
extern template GridFieldT<Complex> difference(const GridFieldT<Complex> &,
                                               const GridFieldT<Complex> &);

}  // namespace screenlab

#endif  // SCREENLAB_FV_SYSTEM_HPP
