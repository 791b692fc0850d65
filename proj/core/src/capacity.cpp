#include "screenlab/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "screenlab/error.hpp"

namespace screenlab
{

namespace
{

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double distance(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

Point2 polar(double r, double theta) { return {r * std::cos(theta), r * std::sin(theta)}; }

Point2 lerp2(Point2 o, Point2 a, Point2 b, double s, double t)
{
  return {o.x + s * (a.x - o.x) + t * (b.x - o.x), o.y + s * (a.y - o.y) + t * (b.y - o.y)};
}

void check_level(int n)
{
  if (n < 0 || n > 8)
  {
    throw ConfigError("mesh level must lie in [0, 8]");
  }
}

PanelMesh disk_mesh(double radius, int n)
{
  const int rings = std::max(2, (9 << n) >> 2);
  const double dr = radius / rings;
  PanelMesh mesh;
  for (int k = 0; k < rings; ++k)
  {
    const double r0 = k * dr;
    const double r1 = (k + 1) * dr;
    const int sectors =
      std::max(4, static_cast<int>(std::lround(kTwoPi * (static_cast<double>(k) + 0.5))));
    for (int j = 0; j < sectors; ++j)
    {
      const double t0 = kTwoPi * j / sectors;
      const double t1 = kTwoPi * (j + 1) / sectors;
      if (k == 0)
      {
        mesh.panels.push_back(make_panel({{0.0, 0.0}, polar(r1, t0), polar(r1, t1)}));
      }
      else
      {
        mesh.panels.push_back(
          make_panel({polar(r0, t0), polar(r1, t0), polar(r1, t1), polar(r0, t1)}));
      }
    }
  }
  return mesh;
}

PanelMesh square_mesh(double half_side, int n)
{
  const int m = 1 << n;
  const double h = 2.0 * half_side / m;
  PanelMesh mesh;
  for (int j = 0; j < m; ++j)
  {
    for (int i = 0; i < m; ++i)
    {
      const double x0 = -half_side + i * h, y0 = -half_side + j * h;
      mesh.panels.push_back(make_panel({{x0, y0}, {x0 + h, y0}, {x0 + h, y0 + h}, {x0, y0 + h}}));
    }
  }
  return mesh;
}

PanelMesh polygon_mesh(const std::vector<Point2> &v, int n)
{
  const int m = 1 << n;
  const Point2 o{0.0, 0.0};
  PanelMesh mesh;
  for (std::size_t e = 0; e < v.size(); ++e)
  {
    const Point2 a = v[e];
    const Point2 b = v[(e + 1) % v.size()];
    auto node = [&](int s, int t) { return lerp2(o, a, b, static_cast<double>(s) / m, static_cast<double>(t) / m); };
    for (int s = 0; s < m; ++s)
    {
      for (int t = 0; s + t < m; ++t)
      {
        mesh.panels.push_back(make_panel({node(s, t), node(s + 1, t), node(s, t + 1)}));
        if (s + t + 2 <= m)
        {
          mesh.panels.push_back(make_panel({node(s + 1, t), node(s + 1, t + 1), node(s, t + 1)}));
        }
      }
    }
  }
  return mesh;
}

}  // namespace

double PanelMesh::area() const
{
  double a = 0.0;
  for (const auto &p : panels)
  {
    a += p.area;
  }
  return a;
}

Panel make_panel(std::vector<Point2> vertices)
{
  if (vertices.size() < 3)
  {
    throw GeometryError("panel needs at least three vertices");
  }
  double a = 0.0, cx = 0.0, cy = 0.0;
  for (std::size_t i = 0; i < vertices.size(); ++i)
  {
    const auto &p = vertices[i];
    const auto &q = vertices[(i + 1) % vertices.size()];
    const double cr = p.x * q.y - q.x * p.y;
    a += cr;
    cx += (p.x + q.x) * cr;
    cy += (p.y + q.y) * cr;
  }
  a *= 0.5;
  double scale = 0.0;
  for (const auto &p : vertices)
  {
    scale = std::max(scale, distance(p, vertices.front()));
  }
  if (!(std::abs(a) > 1e-14 * scale * scale))
  {
    throw GeometryError("degenerate panel with zero area");
  }
  Panel panel;
  panel.centroid = {cx / (6.0 * a), cy / (6.0 * a)};
  if (a < 0.0)
  {
    std::reverse(vertices.begin(), vertices.end());
  }
  panel.vertices = std::move(vertices);
  panel.area = std::abs(a);
  return panel;
}

PanelMesh mesh_plate(const PlateShape &plate, int n)
{
  check_level(n);
  switch (plate.kind())
  {
  case PlateShape::Kind::Disk:
    return disk_mesh(plate.size(), n);
  case PlateShape::Kind::Square:
    return square_mesh(plate.size(), n);
  case PlateShape::Kind::Polygon:
    return polygon_mesh(plate.vertices(), n);
  }
  return {};
}

double self_integral(const Panel &panel, Point2 p)
{
  // Split into triangles (p, a, b); each contributes d·(asinh(t₂/d) − asinh(t₁/d)) with
  // d the distance from p to the edge line and t the signed edge-tangent coordinates.
  double s = 0.0;
  const auto &v = panel.vertices;
  for (std::size_t i = 0; i < v.size(); ++i)
  {
    const Point2 a{v[i].x - p.x, v[i].y - p.y};
    const auto &w = v[(i + 1) % v.size()];
    const Point2 b{w.x - p.x, w.y - p.y};
    const Point2 e{b.x - a.x, b.y - a.y};
    const double len = std::hypot(e.x, e.y);
    const double d = std::abs(a.x * b.y - a.y * b.x) / len;
    if (d < 1e-15 * len)
    {
      continue;
    }
    const double t1 = (a.x * e.x + a.y * e.y) / len;
    const double t2 = (b.x * e.x + b.y * e.y) / len;
    s += d * (std::asinh(t2 / d) - std::asinh(t1 / d));
  }
  return s;
}

DenseMatrix<double> assemble_single_layer(const PanelMesh &mesh)
{
  const std::size_t n = mesh.size();
  if (n == 0)
  {
    throw GeometryError("empty panel mesh");
  }
  DenseMatrix<double> s(n, n);
  for (std::size_t i = 0; i < n; ++i)
  {
    const auto ci = mesh.panels[i].centroid;
    for (std::size_t j = 0; j < n; ++j)
    {
      const auto &pj = mesh.panels[j];
      s(i, j) = i == j ? self_integral(pj, ci) / kTwoPi
                       : pj.area / (kTwoPi * distance(ci, pj.centroid));
    }
  }
  return s;
}

CapacityResult solve_capacity(const PanelMesh &mesh, int level)
{
  const auto s = assemble_single_layer(mesh);
  CapacityResult r;
  r.density = dense_solve(s, std::vector<double>(mesh.size(), 1.0));
  double c = 0.0, d1 = 0.0, d2 = 0.0;
  for (std::size_t j = 0; j < mesh.size(); ++j)
  {
    const auto &p = mesh.panels[j];
    const double q = r.density[j] * p.area;
    c += q;
    d1 += q * p.centroid.x;
    d2 += q * p.centroid.y;
  }
  r.c_omega = c / kTwoPi;
  r.dipole = {-d1 / kTwoPi, -d2 / kTwoPi};
  r.panels = mesh.size();
  r.level = level;
  r.mesh = mesh;
  return r;
}

CapacityResult plate_capacity(const PlateShape &plate, int n)
{
  if (n < 1)
  {
    throw ConfigError("plate_capacity needs refinement level n >= 1");
  }
  auto fine = solve_capacity(mesh_plate(plate, n), n);
  const auto coarse = solve_capacity(mesh_plate(plate, n - 1), n - 1);
  fine.error_estimate = std::abs(fine.c_omega - coarse.c_omega) / fine.c_omega;
  return fine;
}

double extrapolated_capacity(const PlateShape &plate, int n_first)
{
  const double c0 = solve_capacity(mesh_plate(plate, n_first)).c_omega;
  const double c1 = solve_capacity(mesh_plate(plate, n_first + 1)).c_omega;
  const double c2 = solve_capacity(mesh_plate(plate, n_first + 2)).c_omega;
  const double d1 = c1 - c0;
  const double d2 = c2 - c1;
  if (std::abs(d1 - d2) < 1e-14 * c2)
  {
    return c2;
  }
  return c2 - d2 * d2 / (d2 - d1);
}

FarFieldSample far_field_probe(const CapacityResult &result, const PanelMesh &mesh, Point3 x)
{
  if (mesh.size() != result.density.size())
  {
    throw GeometryError("mesh does not match the capacity result");
  }
  double diam = 0.0;
  for (const auto &p : mesh.panels)
  {
    for (const auto &v : p.vertices)
    {
      diam = std::max(diam, 2.0 * std::hypot(v.x, v.y));
    }
  }
  const double r = std::sqrt(x.x * x.x + x.y * x.y + x.z * x.z);
  if (!(r > 2.0 * diam) || x.z > 0.0)
  {
    throw GeometryError("near-field probe");
  }
  double u = 0.0;
  for (std::size_t j = 0; j < mesh.size(); ++j)
  {
    const auto &c = mesh.panels[j].centroid;
    const double d = std::sqrt((x.x - c.x) * (x.x - c.x) + (x.y - c.y) * (x.y - c.y) + x.z * x.z);
    u += result.density[j] * mesh.panels[j].area / (kTwoPi * d);
  }
  return {u, std::abs(u - result.c_omega / r)};
}

std::vector<double> plate_potential(const CapacityResult &result)
{
  const auto s = assemble_single_layer(result.mesh);
  std::vector<double> u(result.mesh.size(), 0.0);
  for (std::size_t i = 0; i < u.size(); ++i)
  {
    for (std::size_t j = 0; j < u.size(); ++j)
    {
      u[i] += s(i, j) * result.density[j];
    }
  }
  return u;
}

}  // namespace screenlab
