#ifndef SCREENLAB_ERROR_HPP
#define SCREENLAB_ERROR_HPP

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "screenlab/sparse_fwd.hpp"

namespace screenlab
{

// Base class of every error raised by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// Invalid parameters, inconsistent mode/face combinations, unknown config keys.
class ConfigError : public Error
{
public:
  using Error::Error;
};

// Geometric preconditions (points off Γ₁, boxes not nested, degenerate panels).
class GeometryError : public Error
{
public:
  using Error::Error;
};

// The grid does not resolve the patch structure it is asked to represent.
class ResolutionError : public Error
{
public:
  using Error::Error;
};

// Singular or otherwise unsolvable linear systems.
class SolverError : public Error
{
public:
  using Error::Error;
};

// Files that cannot be read or written.
class IoError : public Error
{
public:
  using Error::Error;
};

// An iterative method stopped without meeting its tolerance. Carries the best
// iterate so callers close to a pole can still use it.
template <typename T>
class NonConvergence : public SolverError
{
public:
  NonConvergence(const std::string &what, std::vector<T> best, SolveStats stats)
    : SolverError(what), best_(std::move(best)), stats_(stats)
  {
  }

  const std::vector<T> &best_iterate() const { return best_; }
  const SolveStats &stats() const { return stats_; }

private:
  std::vector<T> best_;
  SolveStats stats_;
};

}  // namespace screenlab

#endif  // SCREENLAB_ERROR_HPP
