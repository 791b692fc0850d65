#include <filesystem>
#include <fstream>
#include <sstream>

#include "command_line.hpp"
#include "doctest.h"
#include "screenlab/csv.hpp"
#include "screenlab/error.hpp"
#include "screenlab/runner.hpp"

using namespace screenlab;
namespace fs = std::filesystem;

namespace
{

fs::path scratch(const std::string &name)
{
  const auto dir = fs::temp_directory_path() / "screenlab_runner_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir.parent_path());
  return dir;
}

std::string slurp(const fs::path &p)
{
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

RunOptions options(const fs::path &out)
{
  RunOptions o;
  o.out = out;
  o.jobs = 2;
  return o;
}

}  // namespace

TEST_CASE("capacity study writes a complete bundle")
{
  CapacityConfig c;
  c.level = 2;
  const auto out = scratch("capacity");
  const auto r = run(c, options(out));
  REQUIRE(r.exit_code == 0);
  CHECK(fs::exists(out / "summary.json"));
  CHECK(fs::exists(out / "log.txt"));
  CHECK_FALSE(fs::exists(out / "failure.txt"));
  CHECK_FALSE(fs::exists(fs::path(out.string() + ".partial")));
  const auto t = read_csv(out / "capacity.csv");
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0][0] == 1.0);
  CHECK(t.rows[1][0] == 2.0);
}

TEST_CASE("reruns give identical tables")
{
  CellConfig c;
  c.epsilons = {1.0, 0.5};
  const auto a = scratch("cell_a"), b = scratch("cell_b");
  REQUIRE(run(c, options(a)).exit_code == 0);
  auto o = options(b);
  o.jobs = 1;
  REQUIRE(run(c, o).exit_code == 0);
  CHECK(slurp(a / "cell.csv") == slurp(b / "cell.csv"));
  CHECK(slurp(a / "summary.json") == slurp(b / "summary.json"));
}

TEST_CASE("invalid configurations exit with 2 and write nothing")
{
  const auto out = scratch("invalid");
  CellConfig c;
  c.epsilons.clear();
  auto r = run(c, options(out));
  CHECK(r.exit_code == 2);
  CHECK(r.message.find("empty") != std::string::npos);
  CHECK_FALSE(fs::exists(out));

  PerforatedConfig p;
  p.mode = ScreenMode::DirichletScreen;
  p.regime = "p0";
  r = run(p, options(out));
  CHECK(r.exit_code == 2);
  CHECK(r.message.find("mismatch") != std::string::npos);

  PlateConfig bad;
  bad.kind = "hexagon";
  CHECK_THROWS_AS(make_plate(bad), ConfigError);
}

TEST_CASE("solver failures exit with 3 and keep a partial bundle")
{
  const auto out = scratch("failure");
  HomogConfig h;
  h.regime = Regime::PZero;
  h.q = 1.0;
  h.epsilons = {0.5};
  h.h_max = 1.0 / 8.0;
  h.grid.tol = 1e-300;  // unreachable: CG stops at its iteration cap
  const auto r = run(h, options(out));
  CHECK(r.exit_code == 3);
  REQUIRE(fs::exists(out / "failure.txt"));
  CHECK(fs::exists(out / "log.txt"));
  CHECK(slurp(out / "failure.txt").find(r.message) != std::string::npos);
}

TEST_CASE("a rerun replaces the previous bundle")
{
  const auto out = scratch("replace");
  fs::create_directories(out);
  std::ofstream(out / "stale.txt") << "old";
  CapacityConfig c;
  c.level = 1;
  c.scales = {1.0};
  REQUIRE(run(c, options(out)).exit_code == 0);
  CHECK_FALSE(fs::exists(out / "stale.txt"));
}

TEST_CASE("command line: config file, overrides and errors")
{
  const auto dir = scratch("cli");
  fs::create_directories(dir);
  const auto ini = dir / "c.ini";
  std::ofstream(ini) << "out = " << (dir / "bundle").string()
                     << "\n[homog]\nregime = p0\nepsilons = 1/2, 1/3\nq = 1\n\n[cell]\nR = 6\n";
  auto p = cli::parse_command_line({"homog", "--config", ini.string(), "--q", "2", "--jobs", "1"});
  REQUIRE(p.command);
  const auto &h = std::get<HomogConfig>(p.command->config);
  CHECK(h.regime == Regime::PZero);
  REQUIRE(h.epsilons.size() == 2);
  CHECK(h.epsilons[1] == 1.0 / 3.0);
  CHECK(h.q == 2.0);
  CHECK(p.command->options.jobs == 1);
  CHECK(p.command->options.out == dir / "bundle");

  p = cli::parse_command_line({"cell", "--config", ini.string()});
  REQUIRE(p.command);
  CHECK(std::get<CellConfig>(p.command->config).R == 6.0);

  std::ofstream(dir / "bad.ini") << "[capacity]\nlevels = 3\n";
  p = cli::parse_command_line({"capacity", "--config", (dir / "bad.ini").string()});
  CHECK_FALSE(p.command);
  CHECK(p.exit_code == 2);

  p = cli::parse_command_line({"capacity", "--config", (dir / "missing.ini").string()});
  CHECK(p.exit_code == 2);
  p = cli::parse_command_line({"perforated", "--mode", "robin"});
  CHECK(p.exit_code == 2);
  p = cli::parse_command_line({});
  CHECK(p.exit_code == 2);
  p = cli::parse_command_line({"capacity", "--help"});
  CHECK(p.exit_code == 0);
  CHECK(p.message.find("--level") != std::string::npos);
}

TEST_CASE("fractions")
{
  CHECK(cli::parse_real("1/3") == 1.0 / 3.0);
  CHECK(cli::parse_real("0.25") == 0.25);
  CHECK(cli::parse_real("-1/16") == -0.0625);
  CHECK_THROWS_AS(cli::parse_real("1/0"), ConfigError);
  CHECK_THROWS_AS(cli::parse_real("abc"), ConfigError);
}

TEST_CASE("every example config parses")
{
  const fs::path dir = SCREENLAB_EXAMPLES_DIR;
  int count = 0;
  for (const auto &e : fs::directory_iterator(dir))
  {
    if (e.path().extension() != ".ini")
    {
      continue;
    }
    std::ifstream in(e.path());
    std::string line, section;
    while (std::getline(in, line))
    {
      if (!line.empty() && line.front() == '[')
      {
        section = line.substr(1, line.find(']') - 1);
      }
    }
    INFO(e.path().string());
    const auto p = cli::parse_command_line({section, "--config", e.path().string()});
    CHECK(p.command);
    ++count;
  }
  CHECK(count >= 11);
}
