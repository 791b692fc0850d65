// Timing of the kernels that dominate the experiments: the two Krylov solvers on
// 7-point stencils, single-layer assembly for the capacity solver and one cell eigenpair.

#include <benchmark/benchmark.h>

#include "screenlab/capacity.hpp"
#include "screenlab/cell_steklov.hpp"
#include "screenlab/sparse.hpp"

namespace
{

using namespace screenlab;

// Dirichlet Laplacian on an m³ grid of interior nodes plus `shift` on the diagonal.
template <typename T>
SparseMatrix<T> stencil(int m, T shift)
{
  std::vector<Triplet<T>> e;
  auto id = [m](int i, int j, int k) { return static_cast<std::int32_t>((k * m + j) * m + i); };
  for (int k = 0; k < m; ++k)
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < m; ++i)
      {
        const auto r = id(i, j, k);
        e.push_back({r, r, T(6.0) + shift});
        if (i > 0) e.push_back({r, id(i - 1, j, k), T(-1.0)});
        if (i + 1 < m) e.push_back({r, id(i + 1, j, k), T(-1.0)});
        if (j > 0) e.push_back({r, id(i, j - 1, k), T(-1.0)});
        if (j + 1 < m) e.push_back({r, id(i, j + 1, k), T(-1.0)});
        if (k > 0) e.push_back({r, id(i, j, k - 1), T(-1.0)});
        if (k + 1 < m) e.push_back({r, id(i, j, k + 1), T(-1.0)});
      }
  return SparseMatrix<T>::from_triplets(static_cast<std::size_t>(m) * m * m, std::move(e), true);
}

void BM_Cg(benchmark::State &state)
{
  const int m = static_cast<int>(state.range(0));
  const auto a = stencil<double>(m, 0.0);
  const std::vector<double> b(a.size(), 1.0);
  std::size_t iterations = 0;
  for (auto _ : state)
  {
    auto s = cg_solve(a, b, 1e-8);
    iterations = s.stats.iterations;
    benchmark::DoNotOptimize(s.x.data());
  }
  state.counters["unknowns"] = static_cast<double>(a.size());
  state.counters["iterations"] = static_cast<double>(iterations);
}
BENCHMARK(BM_Cg)->Arg(16)->Arg(32)->Arg(48)->Unit(benchmark::kMillisecond);

// Helmholtz-like shift −k²h² with a small absorbing part.
void BM_Bicgstab(benchmark::State &state)
{
  const int m = static_cast<int>(state.range(0));
  const double kh = 2.8 / (m + 1);
  const auto a = stencil<Complex>(m, Complex(-kh * kh, -0.05 * kh));
  const std::vector<Complex> b(a.size(), Complex(1.0, 0.0));
  std::size_t iterations = 0;
  for (auto _ : state)
  {
    auto s = bicgstab_solve(a, b, 1e-8);
    iterations = s.stats.iterations;
    benchmark::DoNotOptimize(s.x.data());
  }
  state.counters["unknowns"] = static_cast<double>(a.size());
  state.counters["iterations"] = static_cast<double>(iterations);
}
BENCHMARK(BM_Bicgstab)->Arg(16)->Arg(32)->Arg(48)->Unit(benchmark::kMillisecond);

void BM_SingleLayerAssembly(benchmark::State &state)
{
  const auto mesh = mesh_plate(PlateShape::disk(1.0), static_cast<int>(state.range(0)));
  for (auto _ : state)
  {
    auto v = assemble_single_layer(mesh);
    benchmark::DoNotOptimize(v);
  }
  state.counters["panels"] = static_cast<double>(mesh.size());
}
BENCHMARK(BM_SingleLayerAssembly)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

void BM_CellEigenvalue(benchmark::State &state)
{
  const double eps = 1.0 / static_cast<double>(state.range(0));
  double lambda = 0.0;
  for (auto _ : state)
  {
    lambda = cell_eigenvalue(PlateShape::disk(1.0), eps, 4.0, eps / 8.0).lambda;
  }
  state.counters["lambda_over_eps"] = lambda / eps;
}
BENCHMARK(BM_CellEigenvalue)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
