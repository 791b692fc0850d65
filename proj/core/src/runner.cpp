#include "screenlab/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "screenlab/capacity.hpp"
#include "screenlab/csv.hpp"
#include "screenlab/error.hpp"

namespace screenlab
{

namespace
{

namespace fs = std::filesystem;
using nlohmann::json;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Everything a study produces before it is written out.
struct Bundle
{
  struct Table
  {
    std::vector<std::string> header;
    std::map<std::size_t, std::vector<std::vector<double>>> rows;  // by job index
  };
  std::map<std::string, Table> tables;
  json summary = json::object();
  std::vector<std::string> log;
  std::mutex mutex;

  // Rows land as soon as their job finishes, so a failed run keeps them.
  void add_rows(const std::string &name, const std::vector<std::string> &header, std::size_t job,
                std::vector<std::vector<double>> rows)
  {
    std::lock_guard lock(mutex);
    auto &t = tables[name];
    t.header = header;
    t.rows[job] = std::move(rows);
  }

  void note(const std::string &line, const RunOptions &o)
  {
    std::lock_guard lock(mutex);
    log.push_back(line);
    if (o.log)
    {
      o.log(line);
    }
  }
};

// Raised inside the job phase; the bundle written so far is kept.
struct JobFailure
{
  std::exception_ptr error;
};

// Runs job(i) for i < n on up to `jobs` threads. Results are stored by index, so the
// outcome does not depend on scheduling. Rethrows the failure of the lowest index.
template <typename Job>
void parallel_for(std::size_t n, unsigned jobs, Job job)
{
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++)
    {
      try
      {
        job(i);
      }
      catch (...)
      {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t)
  {
    pool.emplace_back(worker);
  }
  worker();
  for (auto &t : pool)
  {
    t.join();
  }
  for (auto &e : errors)
  {
    if (e)
    {
      throw JobFailure{e};
    }
  }
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double x) { return format_number(x); }

Rect top_face(const Box3 &b) { return {b.lo[0], b.hi[0], b.lo[1], b.hi[1]}; }

bool strictly_decreasing(const std::vector<double> &v)
{
  for (std::size_t i = 1; i < v.size(); ++i)
  {
    if (!(v[i] < v[i - 1]))
    {
      return false;
    }
  }
  return true;
}

std::vector<double> sorted_desc(std::vector<double> v)
{
  std::sort(v.begin(), v.end(), std::greater<>());
  return v;
}

// ---------------------------------------------------------------------------- capacity

void run_capacity(const CapacityConfig &c, const RunOptions &o, Bundle &b)
{
  const auto plate = make_plate(c.plate);
  if (c.scales.empty())
  {
    throw ConfigError("scale list is empty");
  }
  for (double s : c.scales)
  {
    if (!(s > 0.0))
    {
      throw ConfigError("scales must be positive");
    }
  }
  if (c.level < 1 || c.level > 8 || (c.extrapolate && c.level < 2))
  {
    throw ConfigError("capacity level must lie in [1, 8] (>= 2 to extrapolate)");
  }
  std::vector<std::vector<double>> rows(c.scales.size());
  parallel_for(c.scales.size(), o.jobs, [&](std::size_t i) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto scaled = plate.scaled(c.scales[i]);
    const auto r = plate_capacity(scaled, c.level);
    const double extra = c.extrapolate ? extrapolated_capacity(scaled, c.level - 2) : kNaN;
    rows[i] = {c.scales[i], static_cast<double>(c.level), static_cast<double>(r.panels), r.c_omega,
               r.error_estimate, extra, r.dipole.x, r.dipole.y};
    b.add_rows("capacity",
               {"scale", "level", "panels", "c_omega", "error_estimate", "c_extrapolated",
                "dipole_1", "dipole_2"},
               i, {rows[i]});
    b.note("capacity scale " + fmt(c.scales[i]) + ": " + std::to_string(r.panels) + " panels, c = " +
             fmt(r.c_omega) + " (" + fmt(seconds_since(t0)) + " s)",
           o);
  });
  auto &s = b.summary;
  s["plate"] = plate.name();
  s["level"] = c.level;
  json per_scale = json::array();
  for (const auto &r : rows)
  {
    per_scale.push_back({{"scale", r[0]}, {"c_omega", r[3]}, {"c_extrapolated", r[5]}});
  }
  s["capacities"] = per_scale;
  if (plate.kind() == PlateShape::Kind::Disk)
  {
    s["disk_reference"] = 2.0 * plate.size() / std::numbers::pi;
  }
  // Linearity defects |c(2a) − 2c(a)|/c(a) for every pair of scales a, 2a.
  json defects = json::array();
  for (const auto &r1 : rows)
  {
    for (const auto &r2 : rows)
    {
      if (std::abs(r2[0] - 2.0 * r1[0]) < 1e-12 * r1[0])
      {
        defects.push_back({{"scale", r1[0]}, {"defect", std::abs(r2[3] - 2.0 * r1[3]) / r1[3]}});
      }
    }
  }
  s["scaling_defects"] = defects;
}

// -------------------------------------------------------------------------------- cell

void run_cell(const CellConfig &c, const RunOptions &o, Bundle &b)
{
  const auto plate = make_plate(c.plate);
  if (c.epsilons.empty())
  {
    throw ConfigError("epsilon list is empty");
  }
  if (!(c.h_divisor >= 8.0))
  {
    throw ConfigError("h_divisor must be at least 8 (h <= epsilon/8)");
  }
  const auto eps = sorted_desc(c.epsilons);
  for (double e : eps)
  {
    if (!(e > 0.0 && e <= 1.0))
    {
      throw ConfigError("epsilon values must lie in (0, 1]");
    }
  }
  if (!(c.R >= 4.0))
  {
    throw ConfigError("cell truncation depth R must be at least 4");
  }
  std::vector<std::vector<double>> rows(eps.size());
  parallel_for(eps.size(), o.jobs, [&](std::size_t i) {
    const auto t0 = std::chrono::steady_clock::now();
    const double h = eps[i] / c.h_divisor;
    const auto cell = assemble_cell(plate, eps[i], c.R, h, c.options);
    const auto r = cell_eigenvalue(cell, c.options);
    const double trial = trial_quotient(cell);
    rows[i] = {eps[i], c.R, h, r.lambda, r.lambda / eps[i], r.residual, trial,
               static_cast<double>(r.unknowns)};
    b.add_rows("cell",
               {"eps", "R", "h", "lambda", "lambda_over_eps", "residual", "trial_quotient",
                "unknowns"},
               i, {rows[i]});
    b.note("cell eps " + fmt(eps[i]) + ": lambda/eps = " + fmt(r.lambda / eps[i]) + ", " +
             std::to_string(r.outer_iterations) + " outer / " +
             std::to_string(r.inner_iterations) + " inner iterations (" +
             fmt(seconds_since(t0)) + " s)",
           o);
  });
  std::vector<double> xs, ys;
  for (const auto &r : rows)
  {
    xs.push_back(r[0]);
    ys.push_back(r[4]);
  }
  auto &s = b.summary;
  s["plate"] = plate.name();
  s["extrapolated"] = two_point_intercept(xs, ys);
  s["extrapolated_lsq"] = linear_intercept(xs, ys);
  if (c.capacity_level > 0)
  {
    const double cw = c.capacity_extrapolate ? extrapolated_capacity(plate, c.capacity_level - 2)
                                             : plate_capacity(plate, c.capacity_level).c_omega;
    const double ref = 0.5 * std::numbers::pi * cw;
    s["c_omega"] = cw;
    s["reference"] = ref;
    std::vector<double> dev;
    for (double y : ys)
    {
      dev.push_back(std::abs(y - ref));
    }
    s["deviation_decreasing"] = strictly_decreasing(dev);
    s["extrapolation_relative_error"] = std::abs(s["extrapolated"].get<double>() - ref) / ref;
  }
}

// ----------------------------------------------------------------------- homogenization

void run_trace(const HomogConfig &c, const RunOptions &o, Bundle &b)
{
  const auto plate = make_plate(c.plate);
  if (c.trace_pairs.empty() || c.trace_pairs.size() % 2 != 0)
  {
    throw ConfigError("trace_pairs needs an even, nonzero count of values (eps delta ...)");
  }
  const Box3 omega = default_omega();
  const std::size_t n = c.trace_pairs.size() / 2;
  std::vector<PatchLayout> layouts;
  std::vector<double> hs;
  for (std::size_t i = 0; i < n; ++i)
  {
    const double eps = c.trace_pairs[2 * i], delta = c.trace_pairs[2 * i + 1];
    if (!(eps > 0.0 && eps <= 1.0) || !(delta > 0.0))
    {
      throw ConfigError("trace pairs need 0 < eps <= 1 and delta > 0");
    }
    layouts.emplace_back(plate, eps, delta, top_face(omega));
    hs.push_back(study_spacing(eps, delta, c.h_max));
  }
  std::vector<TraceCheck> checks(n);
  parallel_for(n, o.jobs, [&](std::size_t i) {
    const auto t0 = std::chrono::steady_clock::now();
    checks[i] = trace_ratio_check(layouts[i], omega, hs[i], c.samples, c.seed, c.grid);
    const auto &l = layouts[i];
    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < checks[i].ratios.size(); ++k)
    {
      rows.push_back({l.epsilon(), l.delta(), l.delta() / l.epsilon(), hs[i],
                      static_cast<double>(c.seed + k), checks[i].ratios[k]});
    }
    b.add_rows("trace", {"eps", "delta", "delta_over_eps", "h", "seed", "ratio"}, i,
               std::move(rows));
    b.note("trace eps " + fmt(layouts[i].epsilon()) + " delta " + fmt(layouts[i].delta()) +
             ": ratios in [" + fmt(checks[i].min_ratio) + ", " + fmt(checks[i].max_ratio) + "] (" +
             fmt(seconds_since(t0)) + " s)",
           o);
  });
  // The constant of the bound is estimated per pair by the largest ratio; the smallest
  // ratios only reflect sources that barely reach Γ₁.
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  double lo_max = std::numeric_limits<double>::infinity();
  json pair_max = json::array();
  for (const auto &ch : checks)
  {
    lo = std::min(lo, ch.min_ratio);
    hi = std::max(hi, ch.max_ratio);
    lo_max = std::min(lo_max, ch.max_ratio);
    pair_max.push_back(ch.max_ratio);
  }
  b.summary["min_ratio"] = lo;
  b.summary["max_ratio"] = hi;
  b.summary["variation_factor"] = hi / lo;
  b.summary["pair_max_ratios"] = pair_max;
  b.summary["pair_max_variation"] = hi / lo_max;
  b.summary["samples"] = c.samples;
}

void run_homog(const HomogConfig &c, const RunOptions &o, Bundle &b)
{
  if (c.task == "trace")
  {
    run_trace(c, o, b);
    return;
  }
  if (c.task != "convergence")
  {
    throw ConfigError("unknown homog task '" + c.task + "' (convergence, trace)");
  }
  const auto plate = make_plate(c.plate);
  const bool finite = c.regime == Regime::PFixed;
  const std::vector<double> ps = finite ? c.p : std::vector<double>{kNaN};
  if (ps.empty())
  {
    throw ConfigError("p list is empty");
  }
  const auto eps = sorted_desc(c.epsilons);

  // Validate every study before the first solve.
  std::vector<StudySpec> specs;
  for (double p : ps)
  {
    StudySpec s;
    s.regime = c.regime;
    s.p = finite ? p : 1.0;
    s.epsilons = eps;
    s.q = c.q;
    s.plate = plate;
    s.f = named_source(c.source, s.omega);
    s.h_max = c.h_max;
    s.grid = c.grid;
    s.fit_q = c.fit_q;
    validate_study(s);
    specs.push_back(std::move(s));
  }
  double c_omega = c.c_omega;
  if (finite && !std::isfinite(c_omega))
  {
    c_omega = plate_capacity(plate, c.capacity_level).c_omega;
    b.note("c_omega = " + fmt(c_omega) + " from the capacity solver at level " +
             std::to_string(c.capacity_level),
           o);
  }
  for (auto &s : specs)
  {
    s.c_omega = c_omega;
  }

  const std::size_t n = specs.size() * eps.size();
  std::vector<ConvergenceRow> rows(n);
  parallel_for(n, o.jobs, [&](std::size_t j) {
    const auto t0 = std::chrono::steady_clock::now();
    auto s = specs[j / eps.size()];
    s.epsilons = {eps[j % eps.size()]};
    rows[j] = convergence_study(s).rows.front();
    const auto &r = rows[j];
    b.add_rows("homog",
               {"p", "eps", "delta", "h", "l2_err", "h1_err", "trace_norm", "q_emp",
                "q_cand_capacity", "q_cand_flux", "l2_err_flux", "unknowns"},
               j,
               {{ps[j / eps.size()], r.eps, r.delta, r.h, r.l2_err, r.h1_err, r.trace_norm,
                 r.q_emp, r.q_cand_capacity, r.q_cand_flux, r.l2_err_flux,
                 static_cast<double>(r.unknowns)}});
    b.note("homog " + to_string(c.regime) + (finite ? " p " + fmt(s.p) : "") + " eps " +
             fmt(rows[j].eps) + ": l2 " + fmt(rows[j].l2_err) + ", " +
             std::to_string(rows[j].unknowns) + " unknowns (" + fmt(seconds_since(t0)) + " s)",
           o);
  });

  json studies = json::array();
  std::vector<double> q_over_p;
  for (std::size_t i = 0; i < specs.size(); ++i)
  {
    std::vector<double> l2;
    for (std::size_t k = 0; k < eps.size(); ++k)
    {
      l2.push_back(rows[i * eps.size() + k].l2_err);
    }
    const auto &last = rows[i * eps.size() + eps.size() - 1];
    json st{{"monotone", strictly_decreasing(l2)}, {"final_l2_err", last.l2_err}};
    if (finite)
    {
      st["p"] = ps[i];
      if (c.fit_q)
      {
        st["q_emp"] = last.q_emp;
        st["q_emp_over_p"] = (last.q_emp - c.q) / ps[i];
        q_over_p.push_back((last.q_emp - c.q) / ps[i]);
      }
    }
    studies.push_back(st);
  }
  auto &s = b.summary;
  s["regime"] = to_string(c.regime);
  s["source"] = c.source;
  s["q"] = c.q;
  s["studies"] = studies;
  if (finite)
  {
    s["c_omega"] = c_omega;
    s["candidate_capacity_per_p"] = c_omega;
    s["candidate_flux_per_p"] = 0.5 * std::numbers::pi * c_omega;
  }
  if (!q_over_p.empty())
  {
    const auto [mn, mx] = std::minmax_element(q_over_p.begin(), q_over_p.end());
    double mean = 0.0;
    for (double v : q_over_p)
    {
      mean += v;
    }
    mean /= static_cast<double>(q_over_p.size());
    const double width = *mx - *mn;
    s["q_emp_over_p_mean"] = mean;
    s["relative_spread"] = width / mean;
    s["capacity_within_two_spreads"] = std::abs(c_omega - mean) <= 2.0 * width;
    s["flux_within_two_spreads"] = std::abs(0.5 * std::numbers::pi * c_omega - mean) <= 2.0 * width;
    s["closer_candidate"] =
      std::abs(c_omega - mean) < std::abs(0.5 * std::numbers::pi * c_omega - mean) ? "capacity"
                                                                                     : "flux";
  }
}

// ----------------------------------------------------------------------------- screens

Regime perforated_regime(const PerforatedConfig &c)
{
  if (!c.regime.empty())
  {
    return parse_regime(c.regime);
  }
  return c.mode == ScreenMode::DirichletScreen ? Regime::PInfinity : Regime::PZero;
}

void run_perforated(const PerforatedConfig &c, const RunOptions &o, Bundle &b)
{
  DecouplingSpec spec;
  spec.mode = c.mode;
  spec.regime = perforated_regime(c);
  spec.p = c.p;
  spec.epsilons = sorted_desc(c.epsilons);
  spec.plate = make_plate(c.plate);
  spec.F = named_source(c.source, spec.outer);
  spec.h_max = c.h_max;
  spec.grid = c.grid;
  spec.allow_exploratory = c.allow_exploratory;
  validate_decoupling(spec);

  std::vector<DecouplingRow> rows(spec.epsilons.size());
  bool exploratory = false;
  parallel_for(rows.size(), o.jobs, [&](std::size_t i) {
    const auto t0 = std::chrono::steady_clock::now();
    auto s = spec;
    s.epsilons = {spec.epsilons[i]};
    const auto rep = decoupling_study(s);
    rows[i] = rep.rows.front();
    exploratory = rep.exploratory;
    const auto &r = rows[i];
    b.add_rows("perforated",
               {"eps", "delta", "inner_err", "outer_err", "screen_trace_or_jump", "limit_jump",
                "area_fraction", "h", "unknowns"},
               i,
               {{r.eps, r.delta, r.inner_err, r.outer_err, r.screen_trace_or_jump, r.limit_jump,
                 r.area_fraction, r.h, static_cast<double>(r.unknowns)}});
    b.note("perforated " + to_string(c.mode) + " eps " + fmt(rows[i].eps) + ": inner " +
             fmt(rows[i].inner_err) + ", outer " + fmt(rows[i].outer_err) + ", " +
             std::to_string(rows[i].unknowns) + " unknowns (" + fmt(seconds_since(t0)) + " s)",
           o);
  });
  std::vector<double> inner, outer, trace, area;
  double min_jump_ratio = std::numeric_limits<double>::infinity();
  for (const auto &r : rows)
  {
    inner.push_back(r.inner_err);
    outer.push_back(r.outer_err);
    trace.push_back(r.screen_trace_or_jump);
    area.push_back(r.area_fraction);
    if (r.limit_jump > 0.0)
    {
      min_jump_ratio = std::min(min_jump_ratio, r.screen_trace_or_jump / r.limit_jump);
    }
  }
  auto &s = b.summary;
  s["mode"] = to_string(c.mode);
  s["regime"] = to_string(spec.regime);
  s["source"] = c.source;
  s["exploratory"] = exploratory;
  if (exploratory)
  {
    s["note"] = "exploratory pair, no limit claimed";
  }
  s["inner_err_decreasing"] = strictly_decreasing(inner);
  s["outer_err_decreasing"] = strictly_decreasing(outer);
  s["area_fraction_decreasing"] = strictly_decreasing(area);
  if (c.mode == ScreenMode::DirichletScreen)
  {
    s["screen_trace_decreasing"] = strictly_decreasing(trace);
  }
  else
  {
    bool nondecreasing = true;
    for (std::size_t i = 1; i < trace.size(); ++i)
    {
      nondecreasing = nondecreasing && trace[i] >= trace[i - 1];
    }
    s["jump_nondecreasing"] = nondecreasing;
    s["min_jump_over_limit_jump"] = min_jump_ratio;
  }
}

void run_resonance(const ResonanceConfig &c, const RunOptions &o, Bundle &b)
{
  const auto plate = make_plate(c.plate);
  const auto eps = sorted_desc(c.epsilons);
  if (eps.empty())
  {
    throw ConfigError("epsilon list is empty");
  }
  if (c.k_steps < 1)
  {
    throw ConfigError("k_steps must be at least 1");
  }
  const Box3 inner = default_omega();
  const double k0 = reference_eigenfrequency(inner, c.mode);
  const double k_min = c.k_min > 0.0 ? c.k_min : 0.9 * k0;
  const double k_max = c.k_max > 0.0 ? c.k_max : 1.1 * k0;
  if (!(k_max >= k_min) || (c.k_steps > 1 && !(k_max > k_min)))
  {
    throw ConfigError("need k_min < k_max");
  }
  std::vector<double> ks;
  for (int i = 0; i < c.k_steps; ++i)
  {
    ks.push_back(c.k_steps == 1 ? k_min : k_min + (k_max - k_min) * i / (c.k_steps - 1));
  }
  std::vector<ScatterSpec> specs;
  std::vector<PreparedGrid> grids;
  for (double e : eps)
  {
    if (!(e > 0.0 && e <= 1.0))
    {
      throw ConfigError("epsilon values must lie in (0, 1]");
    }
    const double delta = regime_delta(c.regime, e, c.p);
    ScatterSpec s;
    s.L = c.L;
    s.inner = inner;
    s.layout = PatchLayout(plate, e, delta, top_face(inner));
    s.mode = c.mode;
    s.F = named_source(c.source, inner);
    s.h = study_spacing(e, delta, c.h_max);
    s.grid = c.grid;
    grids.push_back(scatter_grid(s, k_max));
    specs.push_back(std::move(s));
  }

  std::vector<ResonanceScan> scans(eps.size());
  std::vector<PoleEstimate> poles(eps.size());
  parallel_for(eps.size(), o.jobs, [&](std::size_t i) {
    auto t0 = std::chrono::steady_clock::now();
    scans[i] = response_scan(specs[i], grids[i], ks);
    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < ks.size(); ++k)
    {
      rows.push_back({eps[i], ks[k], 0.0, scans[i].amplitude[k]});
    }
    b.add_rows("resonance", {"eps", "k_re", "k_im", "amplitude"}, i, std::move(rows));
    b.note("resonance eps " + fmt(eps[i]) + ": peak " + fmt(scans[i].peak_fit) + " (" +
             fmt(seconds_since(t0)) + " s, " + std::to_string(grids[i].grid.node_count()) +
             " nodes)",
           o);
    if (c.locate_pole)
    {
      t0 = std::chrono::steady_clock::now();
      poles[i] = locate_pole(specs[i], grids[i], Complex(scans[i].peak_fit, 0.0));
      const auto &p = poles[i];
      const auto &sc = scans[i];
      b.add_rows("poles",
                 {"eps", "delta", "h", "tau_re", "tau_im", "k0", "residual", "iterations",
                  "peak_k", "peak_fit", "half_width"},
                 i,
                 {{eps[i], specs[i].layout.delta(), specs[i].h, p.tau.real(), p.tau.imag(), k0,
                   p.residual,
                   static_cast<double>(p.iterations), sc.peak_k, sc.peak_fit, sc.half_width}});
      b.note("resonance eps " + fmt(eps[i]) + ": pole " + fmt(poles[i].tau.real()) + " " +
               fmt(poles[i].tau.imag()) + "i after " + std::to_string(poles[i].iterations) +
               " secant steps (" + fmt(seconds_since(t0)) + " s)",
             o);
    }
  });

  json per_eps = json::array();
  for (std::size_t i = 0; i < eps.size(); ++i)
  {
    const auto &sc = scans[i];
    json e{{"eps", eps[i]},
           {"k0", k0},
           {"peak_k", sc.peak_k},
           {"peak_fit", sc.peak_fit},
           {"half_width", sc.half_width},
           {"resolved", sc.resolved},
           {"note", sc.note}};
    if (c.locate_pole)
    {
      const auto &p = poles[i];
      e["tau_re"] = p.tau.real();
      e["tau_im"] = p.tau.imag();
      e["residual"] = p.residual;
      e["iterations"] = p.iterations;
    }
    per_eps.push_back(e);
  }
  if (c.locate_pole)
  {
    std::vector<double> dist;
    for (const auto &p : poles)
    {
      dist.push_back(std::abs(p.tau - Complex(k0, 0.0)));
    }
    b.summary["pole_distance_decreasing"] = strictly_decreasing(dist);
  }
  b.summary["mode"] = to_string(c.mode);
  b.summary["k0"] = k0;
  b.summary["results"] = per_eps;
}

// ------------------------------------------------------------------------------ bundle

void write_text(const fs::path &path, const std::string &text)
{
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f << text;
  if (!f)
  {
    throw IoError("cannot write " + path.string());
  }
}

void write_bundle(Bundle &b, const fs::path &out, const std::string &study,
                  const std::string &failure)
{
  if (out.empty())
  {
    throw ConfigError("output directory is not set");
  }
  const fs::path parent = out.has_parent_path() ? out.parent_path() : fs::path(".");
  fs::create_directories(parent);
  const fs::path tmp = parent / (out.filename().string() + ".partial");
  fs::remove_all(tmp);
  fs::create_directories(tmp);
  for (const auto &[name, table] : b.tables)
  {
    CsvTable t{table.header, {}};
    for (const auto &[job, rows] : table.rows)
    {
      t.rows.insert(t.rows.end(), rows.begin(), rows.end());
    }
    emit_csv(t, tmp / (name + ".csv"));
  }
  b.summary["study"] = study;
  write_text(tmp / "summary.json", b.summary.dump(2) + "\n");
  std::string log;
  for (const auto &line : b.log)
  {
    log += line + "\n";
  }
  write_text(tmp / "log.txt", log);
  if (!failure.empty())
  {
    write_text(tmp / "failure.txt", failure + "\n");
  }
  fs::remove_all(out);
  fs::rename(tmp, out);
}

int exit_code_for(const std::exception_ptr &e, std::string &message)
{
  try
  {
    std::rethrow_exception(e);
  }
  catch (const ConfigError &x)
  {
    message = x.what();
    return 2;
  }
  catch (const GeometryError &x)
  {
    message = x.what();
    return 2;
  }
  catch (const ResolutionError &x)
  {
    message = x.what();
    return 2;
  }
  catch (const std::exception &x)
  {
    message = x.what();
    return 3;
  }
  catch (...)
  {
    message = "unknown failure";
    return 3;
  }
}

}  // namespace

PlateShape make_plate(const PlateConfig &c)
{
  if (c.kind == "disk")
  {
    return PlateShape::disk(c.size);
  }
  if (c.kind == "square")
  {
    return PlateShape::square(c.size);
  }
  if (c.kind == "polygon")
  {
    if (c.vertices.size() < 6 || c.vertices.size() % 2 != 0)
    {
      throw ConfigError("polygon needs at least three x y vertex pairs");
    }
    std::vector<Point2> v;
    for (std::size_t i = 0; i < c.vertices.size(); i += 2)
    {
      v.push_back({c.vertices[i], c.vertices[i + 1]});
    }
    return PlateShape::polygon(std::move(v));
  }
  throw ConfigError("unknown plate '" + c.kind + "' (disk, square, polygon)");
}

std::string study_name(const ExperimentConfig &c)
{
  static const char *names[] = {"capacity", "cell", "homog", "perforated", "resonance"};
  return names[c.index()];
}

RunResult run(const ExperimentConfig &config, const RunOptions &options)
{
  Bundle bundle;
  RunResult result;
  const auto study = study_name(config);
  RunOptions o = options;
  o.jobs = std::max(1u, o.jobs);
  try
  {
    std::visit(
      [&](const auto &c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, CapacityConfig>)
        {
          run_capacity(c, o, bundle);
        }
        else if constexpr (std::is_same_v<T, CellConfig>)
        {
          run_cell(c, o, bundle);
        }
        else if constexpr (std::is_same_v<T, HomogConfig>)
        {
          run_homog(c, o, bundle);
        }
        else if constexpr (std::is_same_v<T, PerforatedConfig>)
        {
          run_perforated(c, o, bundle);
        }
        else
        {
          run_resonance(c, o, bundle);
        }
      },
      config);
  }
  catch (const JobFailure &f)
  {
    // Solves had started: keep what finished.
    result.exit_code = exit_code_for(f.error, result.message);
    try
    {
      write_bundle(bundle, o.out, study, result.message);
    }
    catch (const std::exception &e)
    {
      result.message += "; bundle not written: " + std::string(e.what());
    }
    return result;
  }
  catch (...)
  {
    result.exit_code = exit_code_for(std::current_exception(), result.message);
    return result;
  }
  try
  {
    write_bundle(bundle, o.out, study, "");
  }
  catch (const std::exception &e)
  {
    result.exit_code = 3;
    result.message = std::string("bundle not written: ") + e.what();
  }
  return result;
}

}  // namespace screenlab
