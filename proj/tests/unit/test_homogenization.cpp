#include <cmath>
#include <numbers>

#include "doctest.h"
#include "screenlab/error.hpp"
#include "screenlab/homogenization.hpp"

using namespace screenlab;

namespace
{

constexpr double kPi = std::numbers::pi;

GridOptions uniform_options(double h)
{
  GridOptions o;
  o.z_ratio = 1.0;
  o.z_max = h;
  o.tol = 1e-11;
  return o;
}

// Δu = −mode has u = mode/(1.5π²) on the default Ω with Dirichlet data everywhere.
double mode(const Point3 &x)
{
  return std::sin(kPi * x.x / 2.0) * std::sin(kPi * x.y / 2.0) * std::sin(kPi * (x.z + 1.0));
}

}  // namespace

TEST_CASE("schedules")
{
  CHECK(regime_delta(Regime::PInfinity, 0.5, 1.0) == 0.25);
  CHECK(regime_delta(Regime::PZero, 0.25, 1.0) == 0.5);
  CHECK(regime_delta(Regime::PFixed, 0.25, 2.0) == 0.125);
  CHECK(parse_regime("p0") == Regime::PZero);
  CHECK_THROWS_AS(parse_regime("p1"), ConfigError);
  // min(εδ/4, h_max) rounded down to 1/integer.
  CHECK(study_spacing(0.5, 0.25, 1.0 / 16.0) == doctest::Approx(1.0 / 32.0));
  CHECK(study_spacing(1.0 / 3.0, 1.0 / 9.0, 1.0) == doctest::Approx(1.0 / 108.0));
  CHECK(study_spacing(0.5, 1.0, 1.0 / 16.0) == doctest::Approx(1.0 / 16.0));
}

TEST_CASE("named sources")
{
  const auto box = default_omega();
  const auto s = named_source("sine", box);
  CHECK(s({1.0, 1.0, -0.5}) == doctest::Approx(-1.0));
  CHECK(std::abs(s({0.0, 1.0, -0.5})) < 1e-15);
  CHECK(named_source("constant", box)({0.3, 0.2, -0.1}) == -1.0);
  CHECK(named_source("bump", box)({1.0, 1.0, -0.5}) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(named_source("wave", box), ConfigError);
  const auto r1 = named_source("random:3", box);
  const auto r2 = random_source(3, box);
  CHECK(r1({0.7, 1.2, -0.3}) == r2({0.7, 1.2, -0.3}));
  CHECK(random_source(4, box)({0.7, 1.2, -0.3}) != r2({0.7, 1.2, -0.3}));
}

TEST_CASE("dirichlet limit reproduces the analytic mode")
{
  const double h = 1.0 / 16.0;
  const auto f = [](const Point3 &x) { return -mode(x); };
  const auto g = prepare_grid(default_omega(), h, 1.0, f, nullptr, uniform_options(h));
  CHECK(g.symmetry_factor == 4.0);
  const auto u = solve_dirichlet_limit(g, f, 1e-11);
  const double exact = std::sqrt(0.5) / (1.5 * kPi * kPi);
  CHECK(u.l2_norm(default_omega()) == doctest::Approx(exact).epsilon(0.01));
}

TEST_CASE("robin limit: monotone in Q and consistent with the perturbed solve")
{
  const double h = 1.0 / 8.0;
  const auto f = named_source("sine", default_omega());
  const auto g = prepare_grid(default_omega(), h, 1.0, f, nullptr, uniform_options(h));
  const double n0 = solve_robin_limit(g, f, 0.0, 1e-11).l2_norm(default_omega());
  const double n1 = solve_robin_limit(g, f, 1.0, 1e-11).l2_norm(default_omega());
  const double n9 = solve_robin_limit(g, f, 1e9, 1e-11).l2_norm(default_omega());
  const double nd = solve_dirichlet_limit(g, f, 1e-11).l2_norm(default_omega());
  CHECK(n0 > n1);
  CHECK(n1 > n9);
  CHECK(n9 == doctest::Approx(nd).epsilon(1e-6));

  // Without patches the perturbed problem is the Robin problem with Q = q.
  MixedBvpSpec spec;
  spec.layout = PatchLayout(PlateShape::disk(1.0), 0.0, 1.0, {0.0, 2.0, 0.0, 2.0});
  spec.q = 1.0;
  spec.f = f;
  spec.h = h;
  spec.grid = uniform_options(h);
  const auto u = solve_perturbed(spec, g);
  CHECK(u.l2_norm(default_omega()) == doctest::Approx(n1).epsilon(1e-8));
}

TEST_CASE("unresolved patches are rejected")
{
  MixedBvpSpec spec;
  spec.layout = PatchLayout(PlateShape::disk(1.0), 0.5, 0.25, {0.0, 2.0, 0.0, 2.0});
  spec.f = named_source("sine", spec.omega);
  spec.h = 1.0 / 16.0;  // εδ/4 = 1/32
  CHECK_THROWS_AS(solve_perturbed(spec), ResolutionError);
}

TEST_CASE("fit recovers a known Robin coefficient")
{
  const double h = 1.0 / 8.0;
  const auto f = named_source("sine", default_omega());
  const auto g = prepare_grid(default_omega(), h, 1.0, f, nullptr, uniform_options(h));
  const auto u = solve_robin_limit(g, f, 3.0, 1e-11);
  FitOptions o;
  o.rel_tol = 1e-4;
  o.tol = 1e-11;
  const auto fit = fit_effective_Q(u, g, f, 0.0, o, 2.0, 4.0);
  CHECK(fit.q_emp == doctest::Approx(3.0).epsilon(1e-3));
  CHECK(fit.residual < 1e-4);
  CHECK(fit.dist_capacity == doctest::Approx(std::abs(fit.q_emp - 2.0)));
}

TEST_CASE("study validation")
{
  StudySpec s;
  s.f = named_source("sine", s.omega);
  CHECK_THROWS_AS(validate_study(s), ConfigError);  // empty list
  s.epsilons = {0.5};
  s.q = -1.0;
  CHECK_THROWS_AS(validate_study(s), ConfigError);
  s.q = 0.0;
  s.epsilons = {1.0 / 64.0};
  CHECK_THROWS_AS(validate_study(s), ConfigError);  // infeasible node budget
}

TEST_CASE("a small p0 study runs end to end")
{
  StudySpec s;
  s.regime = Regime::PZero;
  s.q = 1.0;
  s.epsilons = {0.5};
  s.f = named_source("sine", s.omega);
  s.h_max = 1.0 / 8.0;
  const auto rep = convergence_study(s);
  REQUIRE(rep.rows.size() == 1);
  const auto &r = rep.rows.front();
  CHECK(r.delta == doctest::Approx(std::sqrt(0.5)));
  CHECK(r.l2_err > 0.0);
  CHECK(r.l2_err < 1.0);
  CHECK(r.unknowns > 0);
}

TEST_CASE("trace ratios are finite and positive")
{
  const PatchLayout layout(PlateShape::disk(1.0), 0.5, 0.5, {0.0, 2.0, 0.0, 2.0});
  const auto t = trace_ratio_check(layout, default_omega(), 1.0 / 16.0, 10, 1);
  REQUIRE(t.ratios.size() == 10);
  for (double r : t.ratios)
  {
    CHECK(r > 0.0);
    CHECK(std::isfinite(r));
  }
  CHECK(t.max_ratio >= t.min_ratio);
}
