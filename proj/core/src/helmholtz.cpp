#include "screenlab/helmholtz.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "screenlab/error.hpp"

namespace screenlab
{

namespace
{

constexpr double kPi = std::numbers::pi;
constexpr double kWindowFloor = -0.5;  // lowest Im k of the continuation window

// Tags of the screened problem; same validation as the two-domain solver.
std::vector<BoundaryTag> scatter_tags(const ScatterSpec &spec, const PreparedGrid &g)
{
  auto tags = classify_grid(spec.layout, g.grid, problem_kind(spec.mode), &g.omega);
  const auto &layout = spec.layout;
  if (!layout.empty())
  {
    if (g.h > 0.25 * layout.patch_scale() * (1.0 + 1e-9))
    {
      throw ResolutionError("unresolved patch: h exceeds εδ/4");
    }
    const auto patch_tag = spec.mode == ScreenMode::DirichletScreen ? BoundaryTag::DirichletPatch
                                                                    : BoundaryTag::WindowInterior;
    if (std::find(tags.begin(), tags.end(), patch_tag) == tags.end())
    {
      throw ResolutionError("unresolved patch: no grid node lies in a patch");
    }
  }
  return tags;
}

double max_spacing(const BoxRegion &g)
{
  return std::max({g.max_spacing(0), g.max_spacing(1), g.max_spacing(2)});
}

// One assembled operator per grid; only the diagonal depends on k.
struct Operator
{
  std::shared_ptr<const FvSystem> sys;
  std::vector<Complex> rhs;
};

Operator make_operator(const ScatterSpec &spec, const PreparedGrid &grid)
{
  if (!spec.F)
  {
    throw ConfigError("source F is not set");
  }
  auto sys = std::make_shared<FvSystem>(grid.grid, scatter_tags(spec, grid), grid.symmetry_factor);
  const auto load = sys->load(spec.F);
  return {std::move(sys), std::vector<Complex>(load.begin(), load.end())};
}

ComplexField solve_with(const Operator &op, const PreparedGrid &grid, Complex k, double tol,
                        const std::vector<Complex> *guess)
{
  if (k.imag() < kWindowFloor)
  {
    throw ConfigError("Im k below the continuation window (Im k >= -0.5)");
  }
  if (k.real() > 0.0 && max_spacing(grid.grid) > 0.1 * 2.0 * kPi / k.real() * (1.0 + 1e-9))
  {
    throw ResolutionError("grid spacing exceeds a tenth of the wavelength");
  }
  const auto &vol = op.sys->volumes();
  const auto &abs = op.sys->absorbing_areas();
  std::vector<Complex> d(vol.size());
  const Complex ik{0.0, 1.0};
  for (std::size_t i = 0; i < d.size(); ++i)
  {
    d[i] = -k * k * vol[i] - ik * k * abs[i];
  }
  const auto a = op.sys->assemble(d);
  IterativeOptions<Complex> opts;
  opts.initial_guess = guess;
  auto sol = bicgstab_solve(a, op.rhs, tol, opts);
  return ComplexField(op.sys, std::move(sol.x));
}

Complex pairing(const Operator &op, const ComplexField &u)
{
  Complex s{};
  const auto &x = u.values();
  for (std::size_t i = 0; i < x.size(); ++i)
  {
    s += op.rhs[i] * x[i];
  }
  return s * op.sys->symmetry_factor();
}

}  // namespace

double reference_eigenfrequency(const Box3 &inner, ScreenMode mode)
{
  const double a = inner.hi[0] - inner.lo[0];
  const double b = inner.hi[1] - inner.lo[1];
  const double c = inner.hi[2] - inner.lo[2];
  if (!(a > 0.0 && b > 0.0 && c > 0.0))
  {
    throw ConfigError("Ω must be a nondegenerate box");
  }
  // Vertical wavenumber π/c with Dirichlet at both ends, π/(2c) with a Neumann top.
  const double kz = mode == ScreenMode::DirichletScreen ? kPi / c : kPi / (2.0 * c);
  return std::sqrt(kPi * kPi / (a * a) + kPi * kPi / (b * b) + kz * kz);
}

Box3 truncation_box(const ScatterSpec &spec)
{
  Box3 box;
  for (int d = 0; d < 3; ++d)
  {
    const double c = 0.5 * (spec.inner.lo[d] + spec.inner.hi[d]);
    box.lo[d] = c - spec.L;
    box.hi[d] = c + spec.L;
  }
  return box;
}

PreparedGrid scatter_grid(const ScatterSpec &spec, double k_max)
{
  if (!(k_max > 0.0))
  {
    throw ConfigError("k_max must be positive");
  }
  const Box3 box = truncation_box(spec);
  for (int d = 0; d < 3; ++d)
  {
    if (spec.inner.lo[d] - box.lo[d] < 1.0 - 1e-12 || box.hi[d] - spec.inner.hi[d] < 1.0 - 1e-12)
    {
      throw GeometryError("truncation box must clear Ω by at least 1 on every side");
    }
  }
  GridOptions o = spec.grid;
  o.z_max = std::min(o.z_max, 0.1 * 2.0 * kPi / k_max);
  if (spec.h > o.z_max)
  {
    throw ResolutionError("grid spacing exceeds a tenth of the wavelength");
  }
  return screen_grid(box, spec.inner, spec.layout, spec.F, spec.h, o, FaceRole::Absorbing);
}

ComplexField solve_helmholtz(const ScatterSpec &spec, const PreparedGrid &grid, Complex k,
                             double tol)
{
  return solve_with(make_operator(spec, grid), grid, k, tol, nullptr);
}

ResonanceScan response_scan(const ScatterSpec &spec, const PreparedGrid &grid,
                            const std::vector<double> &k_values)
{
  if (k_values.empty())
  {
    throw ConfigError("empty k list");
  }
  for (std::size_t i = 0; i < k_values.size(); ++i)
  {
    if (!(k_values[i] > 0.0) || (i > 0 && !(k_values[i] > k_values[i - 1])))
    {
      throw ConfigError("k values must be positive and increasing");
    }
  }
  const auto op = make_operator(spec, grid);
  ResonanceScan scan;
  scan.k = k_values;
  std::vector<Complex> guess;
  for (double k : k_values)
  {
    try
    {
      const auto u = solve_with(op, grid, k, 1e-8, guess.empty() ? nullptr : &guess);
      scan.amplitude.push_back(u.l2_norm(grid.omega));
      scan.failed.push_back(false);
      guess = u.values();
    }
    catch (const NonConvergence<Complex> &)
    {
      scan.amplitude.push_back(std::numeric_limits<double>::quiet_NaN());
      scan.failed.push_back(true);
    }
  }
  std::size_t peak = k_values.size();
  for (std::size_t i = 0; i < k_values.size(); ++i)
  {
    if (!scan.failed[i] && (peak == k_values.size() || scan.amplitude[i] > scan.amplitude[peak]))
    {
      peak = i;
    }
  }
  if (peak == k_values.size())
  {
    throw SolverError("every solve of the scan failed");
  }
  scan.peak_k = k_values[peak];
  scan.peak_fit = scan.peak_k;
  const auto usable = [&](std::size_t i) { return i < k_values.size() && !scan.failed[i]; };
  if (k_values.size() < 5)
  {
    scan.note = "insufficient resolution: fewer than 5 samples";
    return scan;
  }
  if (peak == 0 || !usable(peak - 1) || !usable(peak + 1))
  {
    scan.note = "insufficient resolution: peak at the end of the scan";
    return scan;
  }
  // A Lorentzian amplitude² = C/((k − k_c)² + γ²) makes 1/amplitude² a parabola.
  const double x0 = k_values[peak - 1], x1 = k_values[peak], x2 = k_values[peak + 1];
  const double y0 = 1.0 / (scan.amplitude[peak - 1] * scan.amplitude[peak - 1]);
  const double y1 = 1.0 / (scan.amplitude[peak] * scan.amplitude[peak]);
  const double y2 = 1.0 / (scan.amplitude[peak + 1] * scan.amplitude[peak + 1]);
  const double d01 = (y1 - y0) / (x1 - x0);
  const double d12 = (y2 - y1) / (x2 - x1);
  const double a = (d12 - d01) / (x2 - x0);
  if (!(a > 0.0))
  {
    scan.note = "insufficient resolution: no curvature at the peak";
    return scan;
  }
  const double b = d01 - a * (x0 + x1);  // y = a x² + b x + c
  const double kc = -b / (2.0 * a);
  const double ymin = y1 - a * (x1 - kc) * (x1 - kc);
  if (!(ymin > 0.0) || kc < x0 || kc > x2)
  {
    scan.note = "insufficient resolution: fit vertex outside the peak bracket";
    return scan;
  }
  scan.peak_fit = kc;
  scan.half_width = std::sqrt(ymin / a);
  scan.resolved = true;
  return scan;
}

PoleEstimate locate_pole(const ScatterSpec &spec, const PreparedGrid &grid, Complex k0_guess)
{
  const auto op = make_operator(spec, grid);
  std::vector<Complex> guess;
  auto evaluate = [&](Complex k, double *amplitude) {
    if (k.imag() < kWindowFloor)
    {
      throw SolverError("pole too deep: iterate left the window Im k >= -0.5");
    }
    ComplexField u;
    try
    {
      u = solve_with(op, grid, k, 1e-8, guess.empty() ? nullptr : &guess);
    }
    catch (const NonConvergence<Complex> &e)
    {
      // Close to the pole the system is nearly singular; the best iterate is still
      // dominated by the resonant mode.
      u = ComplexField(op.sys, e.best_iterate());
    }
    guess = u.values();
    if (amplitude != nullptr)
    {
      *amplitude = u.l2_norm(grid.omega);
    }
    const Complex l = pairing(op, u);
    if (l == Complex{})
    {
      throw SolverError("pole functional vanishes: F does not excite Ω");
    }
    return 1.0 / l;
  };

  PoleEstimate out;
  out.k0 = reference_eigenfrequency(spec.inner, spec.mode);
  double amp0 = 0.0;
  Complex k_prev = k0_guess;
  Complex g_prev = evaluate(k_prev, &amp0);
  const Complex g_start = g_prev;
  Complex k = k0_guess * Complex{1.0, -0.01};
  double last_amp = 0.0;
  Complex g = evaluate(k, &last_amp);
  constexpr std::size_t kMaxSteps = 40;
  auto converged = [&](Complex tau) {
    out.tau = tau;
    out.residual = std::abs(g) / std::abs(g_start);
    out.amplitude_ratio = amp0 / last_amp;
    return out;
  };
  for (std::size_t it = 1; it <= kMaxSteps; ++it)
  {
    const Complex dg = g - g_prev;
    if (dg == Complex{})
    {
      // A warm-started solve returns its guess once that already meets the tolerance,
      // so g stops changing when the step is below what the solves resolve.
      if (std::abs(k - k_prev) > 1e-6 * std::abs(k))
      {
        throw SolverError("secant step undefined: g(k) is flat");
      }
      return converged(k);
    }
    const Complex k_next = k - g * (k - k_prev) / dg;
    out.iterations = it;
    // The step is the error estimate. Solving at k_next would only cost a nearly
    // singular system for a digit the 1e-8 solves cannot deliver.
    if (std::abs(k_next - k) <= 1e-8 * std::abs(k))
    {
      return converged(k_next);
    }
    k_prev = k;
    g_prev = g;
    k = k_next;
    g = evaluate(k, &last_amp);
  }
  throw SolverError("pole search did not converge in 40 secant steps");
}

}  // namespace screenlab
