#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "screenlab/csv.hpp"
#include "screenlab/error.hpp"

using namespace screenlab;
namespace fs = std::filesystem;

namespace
{

std::string slurp(const fs::path &p)
{
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string &name)
{
  auto dir = fs::temp_directory_path() / "screenlab_csv_test";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("number formatting")
{
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(format_number(-2.0) == "-2");
  CHECK(format_number(1e-20) == "1e-20");
  CHECK(format_number(std::nan("")) == "nan");
  CHECK(format_number(-INFINITY) == "-inf");
}

TEST_CASE("row counts")
{
  const auto one = scratch("one.csv");
  emit_csv({{"a", "b"}, {{1.0, 2.0}}}, one);
  CHECK(slurp(one) == "a,b\n1,2\n");
  const auto none = scratch("none.csv");
  emit_csv({{"a", "b"}, {}}, none);
  CHECK(slurp(none) == "a,b\n");
}

TEST_CASE("round trip at 12 digits")
{
  CsvTable t{{"x", "y", "z"}, {}};
  for (int i = 1; i <= 20; ++i)
  {
    t.rows.push_back({1.0 / i, std::exp(static_cast<double>(i)), -std::sqrt(i * 1e-7)});
  }
  const auto back = parse_csv(to_csv(t));
  REQUIRE(back.header == t.header);
  REQUIRE(back.rows.size() == t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r)
  {
    for (std::size_t c = 0; c < 3; ++c)
    {
      // Parsing the printed value and printing again is the identity.
      CHECK(format_number(back.rows[r][c]) == format_number(t.rows[r][c]));
      CHECK(std::abs(back.rows[r][c] - t.rows[r][c]) <= 5e-12 * std::abs(t.rows[r][c]));
    }
  }
}

TEST_CASE("csv errors")
{
  CHECK_THROWS_AS(emit_csv({{"a", "b"}, {{1.0}}}, scratch("ragged.csv")), ConfigError);
  CHECK_THROWS_AS(emit_csv({{"a"}, {}}, "/nonexistent_dir/x/y.csv"), IoError);
  CHECK_THROWS_AS(read_csv("/nonexistent_dir/x/y.csv"), IoError);
}
