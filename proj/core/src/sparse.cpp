#include "screenlab/sparse.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "screenlab/error.hpp"

namespace screenlab
{

namespace
{

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double abs2(double v) { return v * v; }
double abs2(Complex v) { return std::norm(v); }

template <typename T>
double norm2(const std::vector<T> &v)
{
  double s = 0.0;
  for (const auto &x : v)
  {
    s += abs2(x);
  }
  return std::sqrt(s);
}

double dot(const std::vector<double> &a, const std::vector<double> &b)
{
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
  {
    s += a[i] * b[i];
  }
  return s;
}

// Conjugate-linear in the first argument.
Complex cdot(const std::vector<Complex> &a, const std::vector<Complex> &b)
{
  Complex s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
  {
    s += std::conj(a[i]) * b[i];
  }
  return s;
}

std::size_t default_cap(std::size_t n, std::size_t requested)
{
  if (requested > 0)
  {
    return requested;
  }
  return std::max<std::size_t>(10, static_cast<std::size_t>(50.0 * std::sqrt(static_cast<double>(n))));
}

template <typename T>
std::vector<T> inverse_diagonal(const SparseMatrix<T> &a)
{
  auto d = a.diagonal_entries();
  for (auto &v : d)
  {
    if (v == T{})
    {
      throw SolverError("zero diagonal entry; Jacobi preconditioner undefined");
    }
    v = T{1.0} / v;
  }
  return d;
}

template <typename T>
void residual(const SparseMatrix<T> &a, const std::vector<T> &x, const std::vector<T> &b,
              std::vector<T> &r)
{
  a.multiply(x.data(), r.data());
  for (std::size_t i = 0; i < r.size(); ++i)
  {
    r[i] = b[i] - r[i];
  }
}

}  // namespace

template <typename T>
SparseMatrix<T>::SparseMatrix(std::size_t n, std::vector<std::int64_t> row_ptr,
                              std::vector<std::int32_t> cols, std::vector<T> values, bool symmetric)
  : n_(n), row_ptr_(std::move(row_ptr)), cols_(std::move(cols)), values_(std::move(values)),
    symmetric_(symmetric)
{
  if (n_ > static_cast<std::size_t>(std::numeric_limits<std::int32_t>::max()))
  {
    throw SolverError("matrix dimension exceeds 32-bit column indices");
  }
  if (row_ptr_.size() != n_ + 1 || row_ptr_.front() != 0 ||
      static_cast<std::size_t>(row_ptr_.back()) != cols_.size() || cols_.size() != values_.size())
  {
    throw SolverError("inconsistent CSR arrays");
  }
  for (std::size_t i = 0; i < n_; ++i)
  {
    if (row_ptr_[i + 1] < row_ptr_[i])
    {
      throw SolverError("CSR row pointers must be nondecreasing");
    }
    for (auto p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p)
    {
      if (cols_[p] < 0 || static_cast<std::size_t>(cols_[p]) >= n_)
      {
        throw SolverError("CSR column index out of range");
      }
      if (p > row_ptr_[i] && cols_[p] <= cols_[p - 1])
      {
        throw SolverError("CSR columns must be sorted without duplicates in row " +
                          std::to_string(i));
      }
    }
  }
  if (symmetric_)
  {
    for (std::size_t i = 0; i < n_; ++i)
    {
      for (auto p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p)
      {
        if (at(static_cast<std::size_t>(cols_[p]), i) != values_[p])
        {
          throw SolverError("matrix flagged symmetric is not");
        }
      }
    }
  }
}

template <typename T>
SparseMatrix<T> SparseMatrix<T>::from_triplets(std::size_t n, std::vector<Triplet<T>> entries,
                                               bool symmetric)
{
  std::sort(entries.begin(), entries.end(), [](const Triplet<T> &a, const Triplet<T> &b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<std::int64_t> row_ptr(n + 1, 0);
  std::vector<std::int32_t> cols;
  std::vector<T> values;
  cols.reserve(entries.size());
  values.reserve(entries.size());
  for (std::size_t e = 0; e < entries.size(); ++e)
  {
    const auto &t = entries[e];
    if (t.row < 0 || t.col < 0 || static_cast<std::size_t>(t.row) >= n ||
        static_cast<std::size_t>(t.col) >= n)
    {
      throw SolverError("triplet index out of range");
    }
    if (e > 0 && entries[e - 1].row == t.row && entries[e - 1].col == t.col)
    {
      values.back() += t.value;
      continue;
    }
    cols.push_back(t.col);
    values.push_back(t.value);
    ++row_ptr[static_cast<std::size_t>(t.row) + 1];
  }
  for (std::size_t i = 0; i < n; ++i)
  {
    row_ptr[i + 1] += row_ptr[i];
  }
  return SparseMatrix(n, std::move(row_ptr), std::move(cols), std::move(values), symmetric);
}

template <typename T>
SparseMatrix<T> SparseMatrix<T>::identity(std::size_t n)
{
  return diagonal(std::vector<T>(n, T{1.0}));
}

template <typename T>
SparseMatrix<T> SparseMatrix<T>::diagonal(const std::vector<T> &d)
{
  const std::size_t n = d.size();
  std::vector<std::int64_t> row_ptr(n + 1);
  std::vector<std::int32_t> cols(n);
  for (std::size_t i = 0; i < n; ++i)
  {
    row_ptr[i + 1] = static_cast<std::int64_t>(i + 1);
    cols[i] = static_cast<std::int32_t>(i);
  }
  return SparseMatrix(n, std::move(row_ptr), std::move(cols), d, true);
}

template <typename T>
T SparseMatrix<T>::at(std::size_t i, std::size_t j) const
{
  const auto first = cols_.begin() + row_ptr_[i];
  const auto last = cols_.begin() + row_ptr_[i + 1];
  const auto it = std::lower_bound(first, last, static_cast<std::int32_t>(j));
  if (it != last && static_cast<std::size_t>(*it) == j)
  {
    return values_[static_cast<std::size_t>(it - cols_.begin())];
  }
  return T{};
}

template <typename T>
std::vector<T> SparseMatrix<T>::diagonal_entries() const
{
  std::vector<T> d(n_);
  for (std::size_t i = 0; i < n_; ++i)
  {
    d[i] = at(i, i);
  }
  return d;
}

template <typename T>
void SparseMatrix<T>::multiply(const T *x, T *y) const
{
  for (std::size_t i = 0; i < n_; ++i)
  {
    T s{};
    for (auto p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p)
    {
      s += values_[p] * x[cols_[p]];
    }
    y[i] = s;
  }
}

template <typename T>
std::vector<T> SparseMatrix<T>::operator*(const std::vector<T> &x) const
{
  if (x.size() != n_)
  {
    throw SolverError("dimension mismatch in matrix-vector product");
  }
  std::vector<T> y(n_);
  multiply(x.data(), y.data());
  return y;
}

template class SparseMatrix<double>;
template class SparseMatrix<Complex>;

namespace
{

template <typename T>
DenseMatrix<T> to_dense_impl(const SparseMatrix<T> &a)
{
  DenseMatrix<T> d(a.size(), a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
  {
    for (auto p = a.row_ptr()[i]; p < a.row_ptr()[i + 1]; ++p)
    {
      d(i, static_cast<std::size_t>(a.cols()[p])) = a.values()[p];
    }
  }
  return d;
}

template <typename T>
std::vector<T> dense_solve_impl(const DenseMatrix<T> &a, const std::vector<T> &b)
{
  using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;
  if (a.rows != a.cols || a.rows != b.size())
  {
    throw SolverError("dense_solve: dimension mismatch");
  }
  if (a.rows == 0)
  {
    return {};
  }
  const Eigen::Map<const Mat> m(a.data.data(), static_cast<Eigen::Index>(a.rows),
                                static_cast<Eigen::Index>(a.cols));
  const Eigen::PartialPivLU<Mat> lu(m);
  const double rcond = lu.rcond();
  if (!(rcond > 64.0 * std::numeric_limits<double>::epsilon()))
  {
    throw SolverError("dense_solve: matrix is singular to working precision");
  }
  const Eigen::Map<const Vec> rhs(b.data(), static_cast<Eigen::Index>(b.size()));
  const Vec x = lu.solve(rhs);
  return {x.data(), x.data() + x.size()};
}

}  // namespace

DenseMatrix<double> to_dense(const SparseMatrix<double> &a) { return to_dense_impl(a); }
DenseMatrix<Complex> to_dense(const SparseMatrix<Complex> &a) { return to_dense_impl(a); }

std::vector<double> dense_solve(const DenseMatrix<double> &a, const std::vector<double> &b)
{
  return dense_solve_impl(a, b);
}

std::vector<Complex> dense_solve(const DenseMatrix<Complex> &a, const std::vector<Complex> &b)
{
  return dense_solve_impl(a, b);
}

Solution<double> cg_solve(const SparseMatrix<double> &a, const std::vector<double> &b, double tol,
                          const IterativeOptions<double> &options)
{
  const auto t0 = Clock::now();
  const std::size_t n = a.size();
  if (b.size() != n)
  {
    throw SolverError("cg_solve: dimension mismatch");
  }
  if (!(tol > 0.0 && tol < 1.0))
  {
    throw SolverError("cg_solve: tolerance must lie in (0, 1)");
  }
  Solution<double> out;
  out.x.assign(n, 0.0);
  const double bnorm = norm2(b);
  if (bnorm == 0.0)
  {
    out.stats.seconds = seconds_since(t0);
    return out;
  }
  if (options.initial_guess != nullptr && options.initial_guess->size() == n)
  {
    out.x = *options.initial_guess;
  }
  const auto dinv = inverse_diagonal(a);
  const std::size_t cap = default_cap(n, options.max_iterations);

  std::vector<double> r(n), z(n), p(n), q(n);
  auto &x = out.x;
  residual(a, x, b, r);
  double rel = norm2(r) / bnorm;
  std::size_t it = 0;

  // The recurrence residual drifts from the true one; on apparent convergence the true
  // residual is recomputed and the iteration restarted from it if it still fails.
  while (rel > tol && it < cap)
  {
    for (std::size_t i = 0; i < n; ++i)
    {
      z[i] = dinv[i] * r[i];
    }
    p = z;
    double rz = dot(r, z);
    while (it < cap)
    {
      a.multiply(p.data(), q.data());
      const double pq = dot(p, q);
      if (!(pq > 0.0))
      {
        throw NonConvergence<double>("cg_solve: matrix is not positive definite", x,
                                     {it, rel, seconds_since(t0)});
      }
      const double alpha = rz / pq;
      double rr = 0.0;
      for (std::size_t i = 0; i < n; ++i)
      {
        x[i] += alpha * p[i];
        r[i] -= alpha * q[i];
        rr += r[i] * r[i];
      }
      ++it;
      rel = std::sqrt(rr) / bnorm;
      if (rel <= tol)
      {
        break;
      }
      for (std::size_t i = 0; i < n; ++i)
      {
        z[i] = dinv[i] * r[i];
      }
      const double rz_new = dot(r, z);
      const double beta = rz_new / rz;
      rz = rz_new;
      for (std::size_t i = 0; i < n; ++i)
      {
        p[i] = z[i] + beta * p[i];
      }
    }
    residual(a, x, b, r);
    rel = norm2(r) / bnorm;
  }
  out.stats = {it, rel, seconds_since(t0)};
  if (rel > tol)
  {
    throw NonConvergence<double>("cg_solve: iteration cap " + std::to_string(cap) +
                                   " reached at relative residual " + std::to_string(rel),
                                 std::move(out.x), out.stats);
  }
  return out;
}

Solution<Complex> bicgstab_solve(const SparseMatrix<Complex> &a, const std::vector<Complex> &b,
                                 double tol, const IterativeOptions<Complex> &options)
{
  const auto t0 = Clock::now();
  const std::size_t n = a.size();
  if (b.size() != n)
  {
    throw SolverError("bicgstab_solve: dimension mismatch");
  }
  if (!(tol > 0.0 && tol < 1.0))
  {
    throw SolverError("bicgstab_solve: tolerance must lie in (0, 1)");
  }
  Solution<Complex> out;
  out.x.assign(n, Complex{});
  const double bnorm = norm2(b);
  if (bnorm == 0.0)
  {
    out.stats.seconds = seconds_since(t0);
    return out;
  }
  if (options.initial_guess != nullptr && options.initial_guess->size() == n)
  {
    out.x = *options.initial_guess;
  }
  const auto dinv = inverse_diagonal(a);
  const std::size_t cap = default_cap(n, options.max_iterations);
  constexpr double kBreakdown = 1e-300;

  auto &x = out.x;
  std::vector<Complex> r(n), rhat(n), p(n, Complex{}), v(n, Complex{}), s(n), t(n), y(n), zz(n);
  residual(a, x, b, r);
  double rel = norm2(r) / bnorm;
  std::vector<Complex> best = x;
  double best_rel = rel;
  std::size_t it = 0;
  bool broke_down = false;

  while (rel > tol && it < cap && !broke_down)
  {
    rhat = r;
    Complex rho = 1.0, alpha = 1.0, omega = 1.0;
    std::fill(p.begin(), p.end(), Complex{});
    std::fill(v.begin(), v.end(), Complex{});
    while (it < cap)
    {
      const Complex rho_new = cdot(rhat, r);
      if (std::abs(rho_new) < kBreakdown * std::max(1.0, bnorm * bnorm))
      {
        broke_down = true;
        break;
      }
      const Complex beta = (rho_new / rho) * (alpha / omega);
      rho = rho_new;
      for (std::size_t i = 0; i < n; ++i)
      {
        p[i] = r[i] + beta * (p[i] - omega * v[i]);
        y[i] = dinv[i] * p[i];
      }
      a.multiply(y.data(), v.data());
      const Complex rv = cdot(rhat, v);
      if (std::abs(rv) == 0.0)
      {
        broke_down = true;
        break;
      }
      alpha = rho / rv;
      for (std::size_t i = 0; i < n; ++i)
      {
        s[i] = r[i] - alpha * v[i];
      }
      ++it;
      if (norm2(s) / bnorm <= tol)
      {
        for (std::size_t i = 0; i < n; ++i)
        {
          x[i] += alpha * y[i];
        }
        break;
      }
      for (std::size_t i = 0; i < n; ++i)
      {
        zz[i] = dinv[i] * s[i];
      }
      a.multiply(zz.data(), t.data());
      const double tt = norm2(t);
      if (tt == 0.0)
      {
        broke_down = true;
        break;
      }
      omega = cdot(t, s) / (tt * tt);
      double rr = 0.0;
      for (std::size_t i = 0; i < n; ++i)
      {
        x[i] += alpha * y[i] + omega * zz[i];
        r[i] = s[i] - omega * t[i];
        rr += std::norm(r[i]);
      }
      rel = std::sqrt(rr) / bnorm;
      if (rel < best_rel)
      {
        best_rel = rel;
        best = x;
      }
      if (rel <= tol || std::abs(omega) == 0.0)
      {
        broke_down = std::abs(omega) == 0.0 && rel > tol;
        break;
      }
    }
    residual(a, x, b, r);
    rel = norm2(r) / bnorm;
    if (rel < best_rel)
    {
      best_rel = rel;
      best = x;
    }
  }
  out.stats = {it, rel, seconds_since(t0)};
  if (rel > tol)
  {
    const std::string why = broke_down ? "breakdown" : "iteration cap " + std::to_string(cap);
    throw NonConvergence<Complex>("bicgstab_solve: " + why + " at relative residual " +
                                    std::to_string(best_rel),
                                  std::move(best), {it, best_rel, out.stats.seconds});
  }
  return out;
}

SteklovPair smallest_steklov_pair(const SparseMatrix<double> &a, const std::vector<double> &b_diag,
                                  double tol, const SteklovOptions &options)
{
  const std::size_t n = a.size();
  if (b_diag.size() != n)
  {
    throw SolverError("smallest_steklov_pair: dimension mismatch");
  }
  if (!(tol > 0.0 && tol < 1.0))
  {
    throw SolverError("smallest_steklov_pair: tolerance must lie in (0, 1)");
  }
  double bmax = 0.0;
  for (double v : b_diag)
  {
    if (v < 0.0)
    {
      throw SolverError("smallest_steklov_pair: B must be positive semidefinite");
    }
    bmax = std::max(bmax, v);
  }
  if (bmax == 0.0)
  {
    throw SolverError("empty trace");
  }

  auto b_norm = [&](const std::vector<double> &x) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
      s += b_diag[i] * x[i] * x[i];
    }
    return std::sqrt(s);
  };

  SteklovPair out;
  std::vector<double> v(n, 1.0);
  if (options.initial_guess != nullptr && options.initial_guess->size() == n)
  {
    v = *options.initial_guess;
  }
  {
    const double s = b_norm(v);
    if (s == 0.0)
    {
      throw SolverError("smallest_steklov_pair: initial vector has no trace");
    }
    for (auto &x : v)
    {
      x /= s;
    }
  }

  const double inner_tol = std::max(1e-2 * tol, 1e-14);
  std::vector<double> rhs(n), guess, av(n);
  double lambda = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t outer = 1; outer <= options.max_outer; ++outer)
  {
    for (std::size_t i = 0; i < n; ++i)
    {
      rhs[i] = b_diag[i] * v[i];
    }
    IterativeOptions<double> cg_opts;
    if (std::isfinite(lambda))
    {
      // A⁻¹Bv ≈ v/λ once the iteration has settled.
      guess = v;
      for (auto &x : guess)
      {
        x /= lambda;
      }
      cg_opts.initial_guess = &guess;
    }
    auto sol = cg_solve(a, rhs, inner_tol, cg_opts);
    out.inner_iterations += sol.stats.iterations;
    auto &y = sol.x;
    // Rayleigh quotient yᵀAy / yᵀBy with Ay = Bv.
    const double ybv = dot(y, rhs);
    const double yby = b_norm(y);
    const double lambda_new = ybv / (yby * yby);
    for (std::size_t i = 0; i < n; ++i)
    {
      v[i] = y[i] / yby;
    }
    a.multiply(v.data(), av.data());
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
      res += abs2(av[i] - lambda_new * b_diag[i] * v[i]);
    }
    res = std::sqrt(res) / norm2(av);
    const bool settled = std::isfinite(lambda) && std::abs(lambda_new - lambda) < tol * lambda_new;
    lambda = lambda_new;
    out.outer_iterations = outer;
    out.residual = res;
    if (settled && res <= tol)
    {
      out.lambda = lambda;
      out.v = std::move(v);
      return out;
    }
  }
  throw NonConvergence<double>("smallest_steklov_pair: no convergence in " +
                                 std::to_string(options.max_outer) +
                                 " outer iterations, eigen-residual " +
                                 std::to_string(out.residual),
                               v, {out.outer_iterations, out.residual, 0.0});
}

}  // namespace screenlab
