#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "screenlab/error.hpp"
#include "screenlab/sparse.hpp"

using namespace screenlab;

namespace
{

SparseMatrix<double> laplace_1d(std::int32_t n)
{
  std::vector<Triplet<double>> t;
  for (std::int32_t i = 0; i < n; ++i)
  {
    t.push_back({i, i, 2.0});
    if (i > 0)
    {
      t.push_back({i, i - 1, -1.0});
      t.push_back({i - 1, i, -1.0});
    }
  }
  return SparseMatrix<double>::from_triplets(static_cast<std::size_t>(n), t, true);
}

}  // namespace

TEST_CASE("csr construction")
{
  auto a = SparseMatrix<double>::from_triplets(2, {{0, 1, 1.0}, {0, 1, 2.0}, {1, 0, 3.0}}, true);
  CHECK(a.at(0, 1) == 3.0);
  CHECK(a.at(0, 0) == 0.0);
  CHECK(a.nnz() == 2);
  CHECK_THROWS(SparseMatrix<double>::from_triplets(2, {{0, 1, 1.0}}, true));
  const auto y = a * std::vector<double>{1.0, 2.0};
  CHECK(y[0] == 6.0);
  CHECK(y[1] == 3.0);
}

TEST_CASE("cg on trivial systems")
{
  const std::vector<double> b{3.0, -1.0, 0.5};
  CHECK(cg_solve(SparseMatrix<double>::identity(3), b, 1e-12).x == b);
  const auto x = cg_solve(SparseMatrix<double>::diagonal({2.0, 2.0}), {4.0, 6.0}, 1e-12).x;
  CHECK(x[0] == doctest::Approx(2.0));
  CHECK(x[1] == doctest::Approx(3.0));
}

TEST_CASE("cg matches the dense oracle on a 1D Laplacian")
{
  const auto a = laplace_1d(3);
  const std::vector<double> b{1.0, 1.0, 1.0};
  const auto sol = cg_solve(a, b, 1e-13);
  CHECK(oracle::relative_difference(sol.x, dense_solve(to_dense(a), b)) < 1e-10);
  CHECK(sol.stats.residual <= 1e-13);
  // Hand elimination: x = (3/2, 2, 3/2).
  CHECK(sol.x[1] == doctest::Approx(2.0));
}

TEST_CASE("cg reports non-convergence with its best iterate")
{
  const auto a = laplace_1d(200);
  IterativeOptions<double> o;
  o.max_iterations = 3;
  try
  {
    cg_solve(a, std::vector<double>(200, 1.0), 1e-12, o);
    FAIL("expected NonConvergence");
  }
  catch (const NonConvergence<double> &e)
  {
    CHECK(e.best_iterate().size() == 200);
    CHECK(e.stats().iterations == 3);
  }
}

TEST_CASE("cg is deterministic")
{
  const auto a = laplace_1d(100);
  const std::vector<double> b(100, 1.0);
  CHECK(cg_solve(a, b, 1e-10).x == cg_solve(a, b, 1e-10).x);
}

TEST_CASE("bicgstab trivial cases")
{
  const Complex i{0.0, 1.0};
  const auto a = SparseMatrix<Complex>::diagonal({i, i});
  const auto x = bicgstab_solve(a, {1.0, 0.0}, 1e-12).x;
  CHECK(std::abs(x[0] - (-i)) < 1e-12);
  CHECK(std::abs(x[1]) < 1e-12);

  const auto zero = bicgstab_solve(a, {0.0, 0.0}, 1e-12);
  CHECK(zero.stats.iterations == 0);
  CHECK(zero.x[0] == Complex{});
}

TEST_CASE("bicgstab matches the dense oracle on a random dominant system")
{
  const auto cases = oracle::complex_cases();
  const auto &c = cases.front();
  REQUIRE(c.a.size() == 50);
  const auto x = bicgstab_solve(c.a, c.b, 1e-12).x;
  CHECK(oracle::relative_difference(x, dense_solve(to_dense(c.a), c.b)) < 1e-8);
}

TEST_CASE("dense solve rejects singular matrices")
{
  DenseMatrix<double> a(2, 2);
  a(0, 0) = 1.0;
  a(0, 1) = 2.0;
  a(1, 0) = 2.0;
  a(1, 1) = 4.0;
  CHECK_THROWS_AS(dense_solve(a, {1.0, 1.0}), SolverError);
}

TEST_CASE("every assembled oracle system agrees with the dense solve")
{
  for (const auto &c : oracle::compare_iterative_with_dense())
  {
    INFO(c.name);
    CHECK(c.unknowns <= 1000);
    CHECK(c.rel_err <= 1e-8);
  }
}

TEST_CASE("steklov pair of a diagonal pencil")
{
  // A = diag(1, 4, 9), B = diag(1, 1, 0): the third dof is massless, λ_min = 1.
  const auto a = SparseMatrix<double>::diagonal({1.0, 4.0, 9.0});
  const auto p = smallest_steklov_pair(a, {1.0, 1.0, 0.0}, 1e-12);
  CHECK(p.lambda == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(p.v[0]) == doctest::Approx(1.0));
}

TEST_CASE("steklov pair matches the dense pencil oracle on cell systems")
{
  for (const auto &c : oracle::compare_steklov_with_dense())
  {
    INFO(c.name);
    CHECK(c.unknowns <= 500);
    CHECK(c.rel_err <= 1e-6);
  }
}
