#include "command_line.hpp"

#include <charconv>
#include <cstdio>
#include <thread>

#include "CLI11.hpp"
#include "screenlab/error.hpp"

namespace screenlab::cli
{

namespace
{

double parse_number(const std::string &s)
{
  double x = 0.0;
  const auto *end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, x);
  if (ec != std::errc{} || ptr != end)
  {
    throw ConfigError("not a number: '" + s + "'");
  }
  return x;
}

// Rewrites a fraction into a decimal the option parser understands.
const CLI::Validator kReal(
  [](std::string &s) -> std::string {
    try
    {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", parse_real(s));
      s = buf;
      return {};
    }
    catch (const ConfigError &e)
    {
      return e.what();
    }
  },
  "REAL");

void add_real(CLI::App *app, const std::string &name, double &target, const std::string &help)
{
  app->add_option(name, target, help)->transform(kReal)->capture_default_str();
}

void add_reals(CLI::App *app, const std::string &name, std::vector<double> &target,
               const std::string &help)
{
  app->add_option(name, target, help)->transform(kReal)->delimiter(',');
}

void add_plate(CLI::App *app, PlateConfig &p)
{
  app->add_option("--plate", p.kind, "plate shape")
    ->check(CLI::IsMember({"disk", "square", "polygon"}))
    ->capture_default_str();
  add_real(app, "--plate_size", p.size, "disk radius or square half-side");
  add_reals(app, "--plate_vertices", p.vertices, "polygon vertices x0,y0,x1,y1,...");
}

void add_grid(CLI::App *app, GridOptions &g)
{
  add_real(app, "--grid_fine_depth", g.fine_depth, "fine layer depth in units of δ");
  add_real(app, "--grid_z_ratio", g.z_ratio, "geometric growth of the coarse spacing");
  add_real(app, "--grid_z_max", g.z_max, "largest coarse spacing");
  app->add_flag("--grid_symmetry,!--no-grid_symmetry", g.use_symmetry,
                "solve on a quarter when the data are mirror symmetric");
  add_real(app, "--grid_tol", g.tol, "relative residual of the linear solves");
  app->add_option("--grid_max_nodes", g.max_nodes, "node budget per solve")
    ->capture_default_str();
}

void add_mode(CLI::App *app, std::string &mode)
{
  app->add_option("--mode", mode, "screen condition")
    ->check(CLI::IsMember({"dirichlet", "neumann"}))
    ->capture_default_str();
}

void add_regime(CLI::App *app, std::string &regime)
{
  app->add_option("--regime", regime, "δ schedule")
    ->check(CLI::IsMember({"pinf", "p0", "pfix"}));
}

}  // namespace

double parse_real(const std::string &text)
{
  const auto slash = text.find('/');
  if (slash == std::string::npos)
  {
    return parse_number(text);
  }
  const double den = parse_number(text.substr(slash + 1));
  if (den == 0.0)
  {
    throw ConfigError("zero denominator in '" + text + "'");
  }
  return parse_number(text.substr(0, slash)) / den;
}

ParseOutcome parse_command_line(const std::vector<std::string> &args)
{
  CLI::App app{"Numerical experiments on perforated screens and periodic Dirichlet patches",
               "screenlab"};
  app.require_subcommand(1);
  app.fallthrough();
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.set_config("--config", "", "INI file; one section per subcommand");

  std::string out;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  app.add_option("--out", out, "bundle directory (default: <subcommand>_out)");
  app.add_option("--jobs", jobs, "parallel jobs")->check(CLI::PositiveNumber)->capture_default_str();

  CapacityConfig capacity;
  auto *cap = app.add_subcommand("capacity", "plate capacity by the boundary element method");
  add_plate(cap, capacity.plate);
  cap->add_option("--level", capacity.level, "refinement level")->capture_default_str();
  add_reals(cap, "--scales", capacity.scales, "plate scale factors");
  cap->add_flag("--extrapolate", capacity.extrapolate, "three-level extrapolation");

  CellConfig cell;
  auto *cel = app.add_subcommand("cell", "Steklov cell problem");
  add_plate(cel, cell.plate);
  add_reals(cel, "--epsilons", cell.epsilons, "cell scales ε");
  add_real(cel, "--R", cell.R, "truncation depth");
  add_real(cel, "--h_divisor", cell.h_divisor, "h = ε / h_divisor");
  cel->add_flag("--symmetry,!--no-symmetry", cell.options.use_symmetry, "quarter cell");
  add_real(cel, "--fine_depth", cell.options.fine_depth, "fine layer depth");
  add_real(cel, "--z_ratio", cell.options.z_ratio, "vertical growth factor");
  add_real(cel, "--z_max", cell.options.z_max, "largest vertical spacing");
  add_real(cel, "--tol", cell.options.tol, "eigenpair tolerance");
  cel->add_option("--capacity_level", cell.capacity_level, "compare with the capacity solver");
  cel->add_flag("--capacity_extrapolate", cell.capacity_extrapolate, "extrapolated capacity");

  HomogConfig homog;
  std::string homog_regime = "pinf";
  auto *hom = app.add_subcommand("homog", "homogenization of periodic Dirichlet patches");
  hom->add_option("--task", homog.task, "convergence or trace")
    ->check(CLI::IsMember({"convergence", "trace"}))
    ->capture_default_str();
  add_regime(hom, homog_regime);
  add_reals(hom, "--p", homog.p, "finite-p values");
  add_reals(hom, "--epsilons", homog.epsilons, "ε values");
  add_real(hom, "--q", homog.q, "Robin coefficient on Γ₁");
  add_plate(hom, homog.plate);
  hom->add_option("--source", homog.source, "sine, constant, bump or random:N");
  add_real(hom, "--h_max", homog.h_max, "coarsest fine spacing");
  add_grid(hom, homog.grid);
  hom->add_flag("--fit_q", homog.fit_q, "fit the effective Robin coefficient");
  add_real(hom, "--c_omega", homog.c_omega, "plate capacity (default: computed)");
  hom->add_option("--capacity_level", homog.capacity_level, "level for the computed capacity");
  add_reals(hom, "--trace_pairs", homog.trace_pairs, "trace task: ε0,δ0,ε1,δ1,...");
  hom->add_option("--samples", homog.samples, "trace task: random sources per pair");
  hom->add_option("--seed", homog.seed, "trace task: first seed");

  PerforatedConfig perf;
  std::string perf_mode = "neumann";
  auto *per = app.add_subcommand("perforated", "transmission through a perforated screen");
  add_mode(per, perf_mode);
  add_regime(per, perf.regime);
  add_real(per, "--p", perf.p, "finite-p value");
  add_reals(per, "--epsilons", perf.epsilons, "ε values");
  add_plate(per, perf.plate);
  per->add_option("--source", perf.source, "sine, constant, bump or random:N");
  add_real(per, "--h_max", perf.h_max, "coarsest fine spacing");
  add_grid(per, perf.grid);
  per->add_flag("--allow_exploratory", perf.allow_exploratory, "allow unproven mode/regime pairs");

  ResonanceConfig res;
  std::string res_mode = "neumann", res_regime = "p0";
  auto *rsn = app.add_subcommand("resonance", "Helmholtz resonator response and poles");
  add_mode(rsn, res_mode);
  add_regime(rsn, res_regime);
  add_real(rsn, "--p", res.p, "finite-p value");
  add_reals(rsn, "--epsilons", res.epsilons, "ε values");
  add_plate(rsn, res.plate);
  add_real(rsn, "--L", res.L, "half-size of the truncation box");
  add_real(rsn, "--k_min", res.k_min, "scan start (0: 0.9·k₀)");
  add_real(rsn, "--k_max", res.k_max, "scan end (0: 1.1·k₀)");
  rsn->add_option("--k_steps", res.k_steps, "scan samples")->capture_default_str();
  add_real(rsn, "--h_max", res.h_max, "coarsest fine spacing");
  rsn->add_option("--source", res.source, "sine, constant, bump or random:N");
  rsn->add_flag("--locate_pole,!--no-locate_pole", res.locate_pole, "secant search for τ_ε");
  add_grid(rsn, res.grid);

  ParseOutcome outcome;
  try
  {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  }
  catch (const CLI::ParseError &e)
  {
    outcome.exit_code = e.get_exit_code() == 0 ? 0 : 2;
    outcome.message = e.get_exit_code() == 0 ? app.help() : std::string(e.what());
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp")
    {
      const auto *sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
      outcome.message = sub->help();
    }
    return outcome;
  }

  try
  {
    Command cmd;
    const auto *sub = app.get_subcommands().front();
    if (sub == cap)
    {
      cmd.config = capacity;
    }
    else if (sub == cel)
    {
      cmd.config = cell;
    }
    else if (sub == hom)
    {
      homog.regime = parse_regime(homog_regime);
      cmd.config = homog;
    }
    else if (sub == per)
    {
      perf.mode = parse_screen_mode(perf_mode);
      cmd.config = perf;
    }
    else
    {
      res.mode = parse_screen_mode(res_mode);
      res.regime = parse_regime(res_regime);
      cmd.config = res;
    }
    cmd.options.out = out.empty() ? sub->get_name() + "_out" : out;
    cmd.options.jobs = jobs;
    outcome.command = std::move(cmd);
  }
  catch (const ConfigError &e)
  {
    outcome.exit_code = 2;
    outcome.message = e.what();
  }
  return outcome;
}

}  // namespace screenlab::cli
