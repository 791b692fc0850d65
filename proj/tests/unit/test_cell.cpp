#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "screenlab/cell_steklov.hpp"
#include "screenlab/error.hpp"

using namespace screenlab;

TEST_CASE("cell eigenvalue agrees with the dense pencil oracle")
{
  const auto cell = assemble_cell(PlateShape::disk(1.0), 1.0, 4.0, 0.25);
  REQUIRE(cell.a.size() <= 500);
  const auto r = cell_eigenvalue(cell);
  CHECK(r.lambda == doctest::Approx(oracle::dense_pencil_min(cell.a, cell.b)).epsilon(1e-6));
  CHECK(r.residual < 1e-6);
}

TEST_CASE("the trial function bounds the eigenvalue from above")
{
  const auto cell = assemble_cell(PlateShape::disk(1.0), 0.5, 4.0, 1.0 / 16.0);
  const auto r = cell_eigenvalue(cell);
  CHECK(r.lambda > 0.0);
  CHECK(trial_quotient(cell) >= r.lambda);
}

TEST_CASE("quarter and full cells give the same eigenvalue")
{
  CellOptions full;
  full.use_symmetry = false;
  const auto q = cell_eigenvalue(PlateShape::disk(1.0), 0.5, 4.0, 1.0 / 16.0);
  const auto f = cell_eigenvalue(PlateShape::disk(1.0), 0.5, 4.0, 1.0 / 16.0, full);
  CHECK(q.lambda == doctest::Approx(f.lambda).epsilon(1e-6));
  CHECK(q.unknowns < f.unknowns);
}

TEST_CASE("cell input validation")
{
  CHECK_THROWS_AS(assemble_cell(PlateShape::disk(1.0), 0.0, 4.0, 0.125), ResolutionError);
  CHECK_THROWS_AS(assemble_cell(PlateShape::disk(1.0), 0.5, 2.0, 0.125), ConfigError);
  CHECK_THROWS_AS(assemble_cell(PlateShape::disk(1.0), 1.5, 4.0, 0.125), ConfigError);
}

TEST_CASE("cutoff")
{
  CHECK(cutoff(0.0) == 1.0);
  CHECK(cutoff(1.0 / 3.0) == 1.0);
  CHECK(cutoff(2.0 / 3.0) == 0.0);
  CHECK(cutoff(0.5) == doctest::Approx(0.5));
}

TEST_CASE("intercepts")
{
  const std::vector<double> x{0.5, 0.25, 0.125};
  const std::vector<double> y{2.0, 1.5, 1.25};  // y = 1 + 2x
  CHECK(linear_intercept(x, y) == doctest::Approx(1.0));
  CHECK(two_point_intercept(x, y) == doctest::Approx(1.0));
  CHECK(std::isnan(two_point_intercept({0.5}, {1.0})));
}

TEST_CASE("sweep rows are ordered and consistent")
{
  const auto s = cell_sweep(PlateShape::disk(1.0), {0.5, 1.0}, 4.0,
                            [](double e) { return e / 8.0; });
  REQUIRE(s.rows.size() == 2);
  CHECK(s.rows[0].epsilon == 0.5);  // input order is kept
  CHECK(s.rows[0].lambda_over_eps == doctest::Approx(s.rows[0].lambda / s.rows[0].epsilon));
}
