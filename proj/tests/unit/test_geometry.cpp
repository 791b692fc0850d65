#include <cmath>
#include <numbers>

#include "doctest.h"
#include "screenlab/error.hpp"
#include "screenlab/grid.hpp"

using namespace screenlab;

namespace
{

// Shoelace area, independent of PlateShape.
double shoelace(const std::vector<Point2> &v)
{
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
  {
    const auto &a = v[i];
    const auto &b = v[(i + 1) % v.size()];
    s += a.x * b.y - a.y * b.x;
  }
  return 0.5 * std::abs(s);
}

FaceRoles mixed_roles()
{
  FaceRoles r;
  r.fill(FaceRole::Dirichlet);
  r[static_cast<int>(Face::ZHi)] = FaceRole::Gamma1;
  return r;
}

}  // namespace

TEST_CASE("plate shapes")
{
  const auto disk = PlateShape::disk(1.0);
  CHECK(disk.contains({0.5, 0.5}));
  CHECK_FALSE(disk.contains({1.0, 0.0}));
  CHECK(disk.area() == doctest::Approx(std::numbers::pi));
  CHECK(disk.max_radius() == doctest::Approx(1.0));
  CHECK(disk.scaled(2.0).area() == doctest::Approx(4.0 * std::numbers::pi));
  CHECK(disk.fits_unit_cell());
  CHECK(disk.mirror_symmetric());

  const auto sq = PlateShape::square(0.5);
  CHECK(sq.area() == doctest::Approx(1.0));
  CHECK(sq.contains({0.49, -0.49}));
  CHECK_FALSE(sq.contains({0.51, 0.0}));

  const std::vector<Point2> tri{{-0.5, -0.4}, {0.6, -0.3}, {0.0, 0.7}};
  const auto poly = PlateShape::polygon(tri);
  CHECK(poly.area() == doctest::Approx(shoelace(tri)));
  CHECK(poly.contains({0.0, 0.0}));
  CHECK_FALSE(poly.contains({0.5, 0.5}));
  CHECK_FALSE(poly.mirror_symmetric());
}

TEST_CASE("patch layout: membership and area fraction")
{
  const PatchLayout layout(PlateShape::disk(1.0), 0.5, 0.25, {0.0, 2.0, 0.0, 2.0});
  CHECK(layout.contains({0.5, 0.5}));    // lattice point (period 2δ = 1/2)
  CHECK_FALSE(layout.contains({0.25, 0.25}));
  CHECK_THROWS_AS(layout.contains({2.5, 0.0}), GeometryError);

  // Sampling oracle for the covered fraction of Γ₁.
  const int n = 800;
  int hits = 0;
  for (int i = 0; i < n; ++i)
  {
    for (int j = 0; j < n; ++j)
    {
      hits += layout.contains({2.0 * (i + 0.5) / n, 2.0 * (j + 0.5) / n}) ? 1 : 0;
    }
  }
  const double sampled = static_cast<double>(hits) / (n * n);
  CHECK(layout.area_fraction() == doctest::Approx(sampled).epsilon(0.02));
  CHECK(patch_area_fraction(layout) == doctest::Approx(0.25 * std::numbers::pi / 4.0));
}

TEST_CASE("axes")
{
  const auto u = uniform_axis(0.0, 1.0, 0.25);
  CHECK(u.size() == 5);
  CHECK_THROWS(uniform_axis(0.0, 1.0, 0.3));

  const auto g = graded_axis(-2.0, 1.0, -0.25, 0.25, 1.0 / 16.0, 1.3, 0.5, {-1.0});
  CHECK(g.front() == -2.0);
  CHECK(g.back() == 1.0);
  bool has_break = false;
  for (std::size_t i = 1; i < g.size(); ++i)
  {
    const double d = g[i] - g[i - 1];
    CHECK(d > 0.0);
    CHECK(d <= 0.5 + 1e-12);
    if (g[i] > -0.25 + 1e-12 && g[i - 1] < 0.25 - 1e-12)
    {
      CHECK(d <= 1.0 / 16.0 + 1e-12);
    }
    has_break = has_break || std::abs(g[i] + 1.0) < 1e-12;
  }
  CHECK(has_break);
}

TEST_CASE("grid indexing and sub regions")
{
  const Box3 box{{0.0, 0.0, -1.0}, {2.0, 2.0, 0.0}};
  const auto g = BoxRegion::uniform(box, 0.25, mixed_roles());
  CHECK(g.node_count() == 9 * 9 * 5);
  const auto idx = g.unravel(g.index(3, 4, 2));
  CHECK(idx.i == 3);
  CHECK(idx.j == 4);
  CHECK(idx.k == 2);
  CHECK(g.dual_width(0, 0) == doctest::Approx(0.125));
  CHECK(g.dual_width(0, 4) == doctest::Approx(0.25));
  const auto sub = g.sub_region({{0.5, 0.5, -0.5}, {1.5, 1.5, 0.0}}, mixed_roles());
  CHECK(sub.node_count() == 5 * 5 * 3);
  CHECK(g.offset_of({{0.5, 0.5, -0.5}, {1.5, 1.5, 0.0}}).i == 2);
  CHECK_THROWS(g.sub_region({{0.3, 0.5, -0.5}, {1.5, 1.5, 0.0}}, mixed_roles()));
}

TEST_CASE("classification tags every node once, consistently")
{
  const Box3 box{{0.0, 0.0, -1.0}, {2.0, 2.0, 0.0}};
  const auto g = BoxRegion::uniform(box, 0.125, mixed_roles());
  const PatchLayout layout(PlateShape::disk(1.0), 1.0, 0.5, {0.0, 2.0, 0.0, 2.0});
  const auto tags = classify_grid(layout, g, ProblemKind::MixedRobin);
  REQUIRE(tags.size() == g.node_count());
  for (std::size_t n = 0; n < tags.size(); ++n)
  {
    const auto ix = g.unravel(n);
    const auto p = g.point(ix);
    const bool wall = ix.i == 0 || ix.j == 0 || ix.k == 0 || ix.i + 1 == g.size(0) ||
                      ix.j + 1 == g.size(1);
    const bool top = ix.k + 1 == g.size(2);
    BoundaryTag want = BoundaryTag::Interior;
    if (wall)
    {
      want = BoundaryTag::OuterDirichlet;
    }
    else if (top)
    {
      want = layout.contains({p.x, p.y}) ? BoundaryTag::DirichletPatch
                                         : BoundaryTag::RobinComplement;
    }
    CHECK(tags[n] == want);
    CHECK(classify_node(layout, g, ix, ProblemKind::MixedRobin) == tags[n]);
  }
}

TEST_CASE("screened classification needs Ω and rejects Γ₁ faces")
{
  const Box3 box{{0.0, 0.0, -1.0}, {2.0, 2.0, 0.0}};
  const auto g = BoxRegion::uniform(box, 0.25, mixed_roles());
  const PatchLayout layout(PlateShape::disk(1.0), 1.0, 0.5, {0.0, 2.0, 0.0, 2.0});
  CHECK_THROWS_AS(classify_grid(layout, g, ProblemKind::NeumannScreen), ConfigError);
  CHECK_THROWS_AS(classify_grid(layout, g, ProblemKind::MixedRobin, &box), ConfigError);
}
