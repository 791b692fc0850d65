#ifndef SCREENLAB_SPARSE_HPP
#define SCREENLAB_SPARSE_HPP

#include <cstdint>
#include <vector>

#include "screenlab/sparse_fwd.hpp"

namespace screenlab
{

template <typename T>
struct Triplet
{
  std::int32_t row = 0;
  std::int32_t col = 0;
  T value{};
};

//
// Square CSR matrix. Column indices are sorted within each row and never repeat.
// The symmetric flag asserts A = Aᵀ entrywise (not Hermitian) and is checked on
// construction.
//
template <typename T>
class SparseMatrix
{
public:
  SparseMatrix() = default;
  SparseMatrix(std::size_t n, std::vector<std::int64_t> row_ptr, std::vector<std::int32_t> cols,
               std::vector<T> values, bool symmetric);

  // Duplicate entries are summed.
  static SparseMatrix from_triplets(std::size_t n, std::vector<Triplet<T>> entries,
                                    bool symmetric);
  static SparseMatrix identity(std::size_t n);
  static SparseMatrix diagonal(const std::vector<T> &d);

  std::size_t size() const { return n_; }
  std::size_t nnz() const { return values_.size(); }
  bool symmetric() const { return symmetric_; }
  const std::vector<std::int64_t> &row_ptr() const { return row_ptr_; }
  const std::vector<std::int32_t> &cols() const { return cols_; }
  const std::vector<T> &values() const { return values_; }

  // A(i, j), zero when not stored.
  T at(std::size_t i, std::size_t j) const;
  std::vector<T> diagonal_entries() const;

  void multiply(const T *x, T *y) const;
  std::vector<T> operator*(const std::vector<T> &x) const;

private:
  std::size_t n_ = 0;
  std::vector<std::int64_t> row_ptr_{0};
  std::vector<std::int32_t> cols_;
  std::vector<T> values_;
  bool symmetric_ = false;
};

extern template class SparseMatrix<double>;
extern template class SparseMatrix<Complex>;

// Row-major dense matrix for oracles and the boundary-element systems.
template <typename T>
struct DenseMatrix
{
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<T> data;

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, T{}) {}

  T &operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  const T &operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

DenseMatrix<double> to_dense(const SparseMatrix<double> &a);
DenseMatrix<Complex> to_dense(const SparseMatrix<Complex> &a);

template <typename T>
struct Solution
{
  std::vector<T> x;
  SolveStats stats;
};

// Initial guess and iteration cap of an iterative solve. A cap of 0 means 50·√n.
template <typename T>
struct IterativeOptions
{
  std::size_t max_iterations = 0;
  const std::vector<T> *initial_guess = nullptr;
};

// Jacobi-preconditioned conjugate gradients for SPD A. Throws NonConvergence<double>
// carrying the best iterate when the cap is hit.
Solution<double> cg_solve(const SparseMatrix<double> &a, const std::vector<double> &b, double tol,
                          const IterativeOptions<double> &options = {});

// Jacobi-preconditioned BiCGSTAB for nonsingular complex A. Throws NonConvergence<Complex>
// on breakdown or when the cap is hit.
Solution<Complex> bicgstab_solve(const SparseMatrix<Complex> &a, const std::vector<Complex> &b,
                                 double tol, const IterativeOptions<Complex> &options = {});

// Partial-pivoting LU. Throws SolverError when A is singular to working precision.
std::vector<double> dense_solve(const DenseMatrix<double> &a, const std::vector<double> &b);
std::vector<Complex> dense_solve(const DenseMatrix<Complex> &a, const std::vector<Complex> &b);

struct SteklovPair
{
  double lambda = 0.0;
  std::vector<double> v;  // normalized so that vᵀBv = 1
  std::size_t outer_iterations = 0;
  std::size_t inner_iterations = 0;
  double residual = 0.0;  // ‖Av − λBv‖/‖Av‖
};

struct SteklovOptions
{
  std::size_t max_outer = 500;
  const std::vector<double> *initial_guess = nullptr;
};

// Smallest λ of Av = λBv with B = diag(b_diag) ⪰ 0, by power iteration on A⁻¹B.
SteklovPair smallest_steklov_pair(const SparseMatrix<double> &a, const std::vector<double> &b_diag,
                                  double tol, const SteklovOptions &options = {});

}  // namespace screenlab

#endif  // SCREENLAB_SPARSE_HPP
