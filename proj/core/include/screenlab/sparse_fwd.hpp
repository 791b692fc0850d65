#ifndef SCREENLAB_SPARSE_FWD_HPP
#define SCREENLAB_SPARSE_FWD_HPP

#include <complex>
#include <cstddef>

namespace screenlab
{

using Complex = std::complex<double>;

// Statistics of one iterative solve. `residual` is ‖Ax − b‖/‖b‖.
struct SolveStats
{
  std::size_t iterations = 0;
  double residual = 0.0;
  double seconds = 0.0;
};

template <typename T>
class SparseMatrix;

}  // namespace screenlab

#endif  // SCREENLAB_SPARSE_FWD_HPP
