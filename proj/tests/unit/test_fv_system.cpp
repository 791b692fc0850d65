#include <cmath>
#include <numbers>

#include "doctest.h"
#include "screenlab/fv_system.hpp"
#include "screenlab/sparse.hpp"

using namespace screenlab;

namespace
{

constexpr double kPi = std::numbers::pi;
const Box3 kOmega{{0.0, 0.0, -1.0}, {2.0, 2.0, 0.0}};

double mode(const Point3 &x)
{
  return std::sin(kPi * x.x / 2.0) * std::sin(kPi * x.y / 2.0) * std::sin(kPi * (x.z + 1.0));
}

// All-Dirichlet system on Ω: boundary nodes eliminated.
std::shared_ptr<FvSystem> dirichlet_box(double h)
{
  FaceRoles roles;
  roles.fill(FaceRole::Dirichlet);
  auto g = BoxRegion::uniform(kOmega, h, roles);
  std::vector<BoundaryTag> tags(g.node_count(), BoundaryTag::Interior);
  for (std::size_t n = 0; n < tags.size(); ++n)
  {
    const auto ix = g.unravel(n);
    if (ix.i == 0 || ix.j == 0 || ix.k == 0 || ix.i + 1 == g.size(0) || ix.j + 1 == g.size(1) ||
        ix.k + 1 == g.size(2))
    {
      tags[n] = BoundaryTag::OuterDirichlet;
    }
  }
  return std::make_shared<FvSystem>(std::move(g), std::move(tags));
}

// Relative L2 error of the discrete solution of Δu = −1.5π²·mode against u = mode.
double manufactured_error(double h)
{
  auto sys = dirichlet_box(h);
  const auto a = sys->assemble(std::vector<double>(sys->dof_count(), 0.0));
  const auto x = cg_solve(a, sys->load([](const Point3 &p) { return -1.5 * kPi * kPi * mode(p); }),
                          1e-12)
                   .x;
  GridField u(sys, x);
  std::vector<double> exact(sys->dof_count());
  for (std::size_t n = 0; n < sys->grid().node_count(); ++n)
  {
    const auto d = sys->dof(n);
    if (d >= 0)
    {
      exact[static_cast<std::size_t>(d)] = mode(sys->grid().point(sys->grid().unravel(n)));
    }
  }
  GridField e(sys, exact);
  return difference(u, e).l2_norm() / e.l2_norm();
}

}  // namespace

TEST_CASE("manufactured solution converges at second order")
{
  const double e1 = manufactured_error(1.0 / 8.0);
  const double e2 = manufactured_error(1.0 / 16.0);
  CHECK(e1 < 0.05);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("norms of a sampled mode approach the continuous values")
{
  auto sys = dirichlet_box(1.0 / 16.0);
  std::vector<double> v(sys->dof_count());
  for (std::size_t n = 0; n < sys->grid().node_count(); ++n)
  {
    const auto d = sys->dof(n);
    if (d >= 0)
    {
      v[static_cast<std::size_t>(d)] = mode(sys->grid().point(sys->grid().unravel(n)));
    }
  }
  GridField u(sys, v);
  // ∫ mode² = 2·2·1/8 and ∫|∇mode|² = 1.5π² of that.
  CHECK(u.l2_norm() == doctest::Approx(std::sqrt(0.5)).epsilon(0.01));
  CHECK(u.h1_seminorm(kOmega) == doctest::Approx(std::sqrt(0.75) * kPi).epsilon(0.01));
  CHECK(u.jump_norm() == 0.0);
}

TEST_CASE("stiffness matrix is symmetric with zero row sums in the interior")
{
  auto sys = dirichlet_box(0.25);
  const auto a = sys->assemble(std::vector<double>(sys->dof_count(), 0.0));
  CHECK(a.symmetric());
  const auto ix = sys->grid().index(4, 4, 2);  // away from the eliminated walls
  const auto d = static_cast<std::size_t>(sys->dof(ix));
  double sum = 0.0;
  for (auto k = a.row_ptr()[d]; k < a.row_ptr()[d + 1]; ++k)
  {
    sum += a.values()[static_cast<std::size_t>(k)];
  }
  CHECK(std::abs(sum) < 1e-12);
  CHECK(a.at(d, d) == doctest::Approx(6.0 * 0.25));
}
