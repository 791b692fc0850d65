#include "screenlab/fv_system.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "screenlab/error.hpp"

namespace screenlab
{

namespace
{

bool eliminated(BoundaryTag t)
{
  return t == BoundaryTag::DirichletPatch || t == BoundaryTag::OuterDirichlet;
}

double face_area(const BoxRegion &g, Face f, GridIndex n)
{
  switch (f)
  {
  case Face::XLo:
  case Face::XHi:
    return g.dual_width(1, n.j) * g.dual_width(2, n.k);
  case Face::YLo:
  case Face::YHi:
    return g.dual_width(0, n.i) * g.dual_width(2, n.k);
  case Face::ZLo:
  case Face::ZHi:
    return g.dual_width(0, n.i) * g.dual_width(1, n.j);
  }
  return 0.0;
}

}  // namespace

FvSystem::FvSystem(BoxRegion grid, std::vector<BoundaryTag> tags, double symmetry_factor)
  : grid_(std::move(grid)), tags_(std::move(tags)), symmetry_factor_(symmetry_factor)
{
  const std::size_t n = grid_.node_count();
  if (tags_.size() != n)
  {
    throw GeometryError("tag vector does not match the grid");
  }
  if (!(symmetry_factor_ >= 1.0))
  {
    throw ConfigError("symmetry factor must be at least 1");
  }
  const std::size_t nx = grid_.size(0), ny = grid_.size(1);
  const std::size_t plane_size = nx * ny;

  bool found_split = false;
  for (std::size_t node = 0; node < n; ++node)
  {
    if (tags_[node] != BoundaryTag::NeumannScreen)
    {
      continue;
    }
    const std::size_t k = node / plane_size;
    if (!found_split)
    {
      split_plane_ = k;
      found_split = true;
    }
    else if (k != split_plane_)
    {
      throw GeometryError("Neumann screen nodes must lie in one grid plane");
    }
    if (k == 0 || k + 1 == grid_.size(2))
    {
      throw GeometryError("Neumann screen plane must be interior to the grid");
    }
  }

  constexpr auto kMax = static_cast<std::size_t>(std::numeric_limits<std::int32_t>::max());
  dof_.assign(n, -1);
  if (found_split)
  {
    lower_dof_.assign(plane_size, -1);
  }
  std::size_t next = 0;
  for (std::size_t node = 0; node < n; ++node)
  {
    if (eliminated(tags_[node]))
    {
      continue;
    }
    dof_[node] = static_cast<std::int32_t>(next++);
    if (is_split(node))
    {
      lower_dof_[node % plane_size] = static_cast<std::int32_t>(next++);
    }
    if (next >= kMax)
    {
      throw ConfigError("grid too large for 32-bit degree-of-freedom indices");
    }
  }

  volumes_.assign(next, 0.0);
  robin_areas_.assign(next, 0.0);
  absorbing_areas_.assign(next, 0.0);
  static constexpr std::array<Face, 6> kFaces = {Face::XLo, Face::XHi, Face::YLo,
                                                 Face::YHi, Face::ZLo, Face::ZHi};
  for (std::size_t node = 0; node < n; ++node)
  {
    if (dof_[node] < 0)
    {
      continue;
    }
    const auto g = grid_.unravel(node);
    const auto up = static_cast<std::size_t>(dof_[node]);
    if (is_split(node))
    {
      const auto lo = static_cast<std::size_t>(lower_dof_[node % plane_size]);
      const double area = grid_.dual_width(0, g.i) * grid_.dual_width(1, g.j);
      const double zk = grid_.axis(2)[g.k];
      volumes_[up] = area * (grid_.dual_hi(2, g.k) - zk);
      volumes_[lo] = area * (zk - grid_.dual_lo(2, g.k));
      continue;
    }
    volumes_[up] = grid_.dual_width(0, g.i) * grid_.dual_width(1, g.j) * grid_.dual_width(2, g.k);
    if (tags_[node] == BoundaryTag::RobinComplement)
    {
      for (Face f : kFaces)
      {
        if (grid_.on_face(f, g) && grid_.role(f) == FaceRole::Gamma1)
        {
          robin_areas_[up] += face_area(grid_, f, g);
        }
      }
    }
    if (tags_[node] == BoundaryTag::AbsorbingOuter)
    {
      for (Face f : kFaces)
      {
        if (grid_.on_face(f, g) && grid_.role(f) == FaceRole::Absorbing)
        {
          absorbing_areas_[up] += face_area(grid_, f, g);
        }
      }
    }
  }
}

std::int32_t FvSystem::dof(std::size_t node, Side side) const
{
  if (side == Side::Lower && is_split(node))
  {
    return lower_dof_[node % (grid_.size(0) * grid_.size(1))];
  }
  return dof_[node];
}

Box3 FvSystem::control_volume(std::size_t node, Side side) const
{
  const auto g = grid_.unravel(node);
  Box3 b{{grid_.dual_lo(0, g.i), grid_.dual_lo(1, g.j), grid_.dual_lo(2, g.k)},
         {grid_.dual_hi(0, g.i), grid_.dual_hi(1, g.j), grid_.dual_hi(2, g.k)}};
  if (is_split(node))
  {
    const double zk = grid_.axis(2)[g.k];
    if (side == Side::Upper)
    {
      b.lo[2] = zk;
    }
    else
    {
      b.hi[2] = zk;
    }
  }
  return b;
}

template <typename T>
SparseMatrix<T> FvSystem::assemble_impl(const std::vector<T> &d) const
{
  const std::size_t n = dof_count();
  if (d.size() != n)
  {
    throw SolverError("diagonal term does not match the number of unknowns");
  }
  std::vector<std::int64_t> row_ptr(n + 1, 1);  // every row stores its diagonal
  row_ptr[0] = 0;
  for_each_coupling([&](std::int32_t a, std::int32_t b, double, const Box3 &) {
    if (a >= 0 && b >= 0)
    {
      ++row_ptr[static_cast<std::size_t>(a) + 1];
      ++row_ptr[static_cast<std::size_t>(b) + 1];
    }
  });
  for (std::size_t i = 0; i < n; ++i)
  {
    row_ptr[i + 1] += row_ptr[i];
  }
  const auto nnz = static_cast<std::size_t>(row_ptr[n]);
  std::vector<std::int32_t> cols(nnz);
  std::vector<T> vals(nnz, T{});
  std::vector<std::int64_t> fill(row_ptr.begin(), row_ptr.end() - 1);
  for (std::size_t i = 0; i < n; ++i)
  {
    cols[static_cast<std::size_t>(fill[i])] = static_cast<std::int32_t>(i);
    vals[static_cast<std::size_t>(fill[i])] = d[i];
    ++fill[i];
  }
  auto diag_add = [&](std::int32_t a, double c) {
    vals[static_cast<std::size_t>(row_ptr[static_cast<std::size_t>(a)])] += c;
  };
  for_each_coupling([&](std::int32_t a, std::int32_t b, double c, const Box3 &) {
    if (a >= 0)
    {
      diag_add(a, c);
    }
    if (b >= 0)
    {
      diag_add(b, c);
    }
    if (a >= 0 && b >= 0)
    {
      const auto ia = static_cast<std::size_t>(a), ib = static_cast<std::size_t>(b);
      cols[static_cast<std::size_t>(fill[ia])] = b;
      vals[static_cast<std::size_t>(fill[ia]++)] = T{-c};
      cols[static_cast<std::size_t>(fill[ib])] = a;
      vals[static_cast<std::size_t>(fill[ib]++)] = T{-c};
    }
  });
  // Sort each row by column; rows hold at most a dozen entries.
  std::vector<std::pair<std::int32_t, T>> row;
  for (std::size_t i = 0; i < n; ++i)
  {
    const auto b = static_cast<std::size_t>(row_ptr[i]);
    const auto e = static_cast<std::size_t>(row_ptr[i + 1]);
    row.clear();
    for (std::size_t p = b; p < e; ++p)
    {
      row.emplace_back(cols[p], vals[p]);
    }
    std::sort(row.begin(), row.end(),
              [](const auto &x, const auto &y) { return x.first < y.first; });
    for (std::size_t p = b; p < e; ++p)
    {
      cols[p] = row[p - b].first;
      vals[p] = row[p - b].second;
    }
  }
  return SparseMatrix<T>(n, std::move(row_ptr), std::move(cols), std::move(vals), true);
}

SparseMatrix<double> FvSystem::assemble(const std::vector<double> &d) const
{
  return assemble_impl(d);
}

SparseMatrix<Complex> FvSystem::assemble(const std::vector<Complex> &d) const
{
  return assemble_impl(d);
}

std::vector<double> FvSystem::load(const ScalarSource &f) const
{
  std::vector<double> b(dof_count(), 0.0);
  for (std::size_t node = 0; node < tags_.size(); ++node)
  {
    if (dof_[node] < 0)
    {
      continue;
    }
    const double fv = f(grid_.point(grid_.unravel(node)));
    if (!std::isfinite(fv))
    {
      throw ConfigError("source is not finite at a grid node");
    }
    const auto up = static_cast<std::size_t>(dof_[node]);
    b[up] = -fv * volumes_[up];
    if (is_split(node))
    {
      const auto lo = static_cast<std::size_t>(dof(node, Side::Lower));
      b[lo] = -fv * volumes_[lo];
    }
  }
  return b;
}

namespace
{

double sq(double v) { return v * v; }
double sq(Complex v) { return std::norm(v); }

template <typename T>
T at_dof(const std::vector<T> &u, std::int32_t d)
{
  return d < 0 ? T{} : u[static_cast<std::size_t>(d)];
}

}  // namespace

template <typename T>
double GridFieldT<T>::l2_norm(const Box3 &region) const
{
  const auto &sys = *system_;
  double s = 0.0;
  for (std::size_t node = 0; node < sys.tags().size(); ++node)
  {
    const auto up = sys.dof(node, Side::Upper);
    if (up < 0)
    {
      continue;
    }
    s += sq(values_[static_cast<std::size_t>(up)]) *
         sys.control_volume(node, Side::Upper).overlap(region);
    if (sys.is_split(node))
    {
      s += sq(values_[static_cast<std::size_t>(sys.dof(node, Side::Lower))]) *
           sys.control_volume(node, Side::Lower).overlap(region);
    }
  }
  return std::sqrt(s * sys.symmetry_factor());
}

template <typename T>
double GridFieldT<T>::h1_seminorm(const Box3 &region) const
{
  double s = 0.0;
  system_->for_each_coupling([&](std::int32_t a, std::int32_t b, double c, const Box3 &edge) {
    if (a < 0 && b < 0)
    {
      return;
    }
    const double frac = edge.overlap(region) / edge.volume();
    if (frac > 0.0)
    {
      s += c * frac * sq(at_dof(values_, a) - at_dof(values_, b));
    }
  });
  return std::sqrt(s * system_->symmetry_factor());
}

template <typename T>
double GridFieldT<T>::h1_norm(const Box3 &region) const
{
  return std::hypot(l2_norm(region), h1_seminorm(region));
}

template <typename T>
double GridFieldT<T>::trace_norm(double z, const Rect &rect, Side side) const
{
  const auto &sys = *system_;
  const auto &g = sys.grid();
  const auto k = g.find(2, z);
  if (!k)
  {
    throw GeometryError("trace plane is not a grid plane");
  }
  double s = 0.0;
  for (std::size_t j = 0; j < g.size(1); ++j)
  {
    const double y0 = std::max(g.dual_lo(1, j), rect.y0), y1 = std::min(g.dual_hi(1, j), rect.y1);
    if (y1 <= y0)
    {
      continue;
    }
    for (std::size_t i = 0; i < g.size(0); ++i)
    {
      const double x0 = std::max(g.dual_lo(0, i), rect.x0);
      const double x1 = std::min(g.dual_hi(0, i), rect.x1);
      if (x1 <= x0)
      {
        continue;
      }
      s += (x1 - x0) * (y1 - y0) * sq(sys.value(values_, g.index(i, j, *k), side));
    }
  }
  return std::sqrt(s * sys.symmetry_factor());
}

template <typename T>
double GridFieldT<T>::jump_norm() const
{
  const auto &sys = *system_;
  if (!sys.has_split_nodes())
  {
    return 0.0;
  }
  const auto &g = sys.grid();
  const std::size_t k = sys.split_plane();
  double s = 0.0;
  for (std::size_t j = 0; j < g.size(1); ++j)
  {
    for (std::size_t i = 0; i < g.size(0); ++i)
    {
      const std::size_t node = g.index(i, j, k);
      if (sys.is_split(node))
      {
        s += g.dual_width(0, i) * g.dual_width(1, j) *
             sq(sys.value(values_, node, Side::Upper) - sys.value(values_, node, Side::Lower));
      }
    }
  }
  return std::sqrt(s * sys.symmetry_factor());
}

template class GridFieldT<double>;
template class GridFieldT<Complex>;

namespace
{

// Whether every node copy of `other` has a counterpart in `target`: target eliminates
// no node that other keeps and splits every node that other splits.
bool embeds(const FvSystem &target, const FvSystem &other)
{
  for (std::size_t node = 0; node < target.tags().size(); ++node)
  {
    if (other.dof(node) >= 0 && target.dof(node) < 0)
    {
      return false;
    }
    if (other.is_split(node) && !target.is_split(node))
    {
      return false;
    }
  }
  return true;
}

template <typename T>
std::vector<T> transfer(const FvSystem &target, const GridFieldT<T> &f)
{
  std::vector<T> out(target.dof_count(), T{});
  for (std::size_t node = 0; node < target.tags().size(); ++node)
  {
    for (Side s : {Side::Upper, Side::Lower})
    {
      const auto d = target.dof(node, s);
      if (d >= 0)
      {
        out[static_cast<std::size_t>(d)] = f.at(node, s);
      }
    }
  }
  return out;
}

}  // namespace

template <typename T>
GridFieldT<T> difference(const GridFieldT<T> &a, const GridFieldT<T> &b)
{
  const auto &ga = a.system().grid();
  const auto &gb = b.system().grid();
  for (int d = 0; d < 3; ++d)
  {
    if (ga.axis(d) != gb.axis(d))
    {
      throw GeometryError("fields live on different grids");
    }
  }
  for (const auto &target : {a.system_ptr(), b.system_ptr()})
  {
    const auto &other = target == a.system_ptr() ? b.system() : a.system();
    if (!embeds(*target, other))
    {
      continue;
    }
    auto va = transfer(*target, a);
    const auto vb = transfer(*target, b);
    for (std::size_t i = 0; i < va.size(); ++i)
    {
      va[i] -= vb[i];
    }
    return GridFieldT<T>(target, std::move(va));
  }
  throw GeometryError("fields have incompatible boundary tags");
}

template GridFieldT<double> difference(const GridFieldT<double> &, const GridFieldT<double> &);
template GridFieldT<Complex> difference(const GridFieldT<Complex> &, const GridFieldT<Complex> &);

}  // namespace screenlab
