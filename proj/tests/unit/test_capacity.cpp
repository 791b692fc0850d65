#include <cmath>
#include <numbers>

#include "doctest.h"
#include "screenlab/capacity.hpp"
#include "screenlab/error.hpp"

using namespace screenlab;

TEST_CASE("self integral over a square panel")
{
  // ∫ 1/r over a square of side a about its centre is 4a·ln(1 + √2).
  const auto p = make_panel({{-0.5, -0.5}, {0.5, -0.5}, {0.5, 0.5}, {-0.5, 0.5}});
  CHECK(p.area == doctest::Approx(1.0));
  CHECK(self_integral(p, {0.0, 0.0}) == doctest::Approx(4.0 * std::log(1.0 + std::sqrt(2.0))));
  CHECK_THROWS(make_panel({{0.0, 0.0}, {1.0, 0.0}, {2.0, 0.0}}));
}

TEST_CASE("disk capacity approaches 2/π")
{
  const auto r3 = plate_capacity(PlateShape::disk(1.0), 3);
  const double exact = 2.0 / std::numbers::pi;
  CHECK(std::abs(r3.c_omega - exact) / exact < 0.01);
  const auto r2 = plate_capacity(PlateShape::disk(1.0), 2);
  CHECK(std::abs(r3.c_omega - exact) < std::abs(r2.c_omega - exact));
  CHECK(r3.error_estimate > 0.0);
  // Mirror symmetry kills the dipole moment.
  CHECK(std::abs(r3.dipole.x) < 1e-6);
  CHECK(std::abs(r3.dipole.y) < 1e-6);
}

TEST_CASE("collocation reproduces unit potential on the plate")
{
  const auto r = plate_capacity(PlateShape::square(1.0), 2);
  for (double v : plate_potential(r))
  {
    CHECK(v == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("capacity is linear in the plate size")
{
  for (const auto &plate : {PlateShape::disk(1.0), PlateShape::square(1.0)})
  {
    const double c1 = plate_capacity(plate, 3).c_omega;
    const double c2 = plate_capacity(plate.scaled(2.0), 3).c_omega;
    CHECK(std::abs(c2 - 2.0 * c1) <= 0.02 * c1);
  }
}

TEST_CASE("square as a polygon agrees with the square plate")
{
  const auto poly = PlateShape::polygon({{-1.0, -1.0}, {1.0, -1.0}, {1.0, 1.0}, {-1.0, 1.0}});
  const double cp = plate_capacity(poly, 3).c_omega;
  const double cs = plate_capacity(PlateShape::square(1.0), 4).c_omega;
  CHECK(cp == doctest::Approx(cs).epsilon(0.02));
}

TEST_CASE("far field decays like c/r")
{
  const auto r = plate_capacity(PlateShape::disk(1.0), 3);
  const auto s = far_field_probe(r, r.mesh, {0.0, 0.0, -20.0});
  CHECK(s.residual < 1e-3 * r.c_omega / 20.0);
  CHECK_THROWS(far_field_probe(r, r.mesh, {0.5, 0.0, -0.5}));
}
