#include "screenlab/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "screenlab/error.hpp"

namespace screenlab
{

namespace
{

std::vector<std::string> split(const std::string &line)
{
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true)
  {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos)
    {
      return out;
    }
    start = comma + 1;
  }
}

double parse_number(const std::string &s)
{
  if (s == "nan")
  {
    return std::numeric_limits<double>::quiet_NaN();
  }
  if (s == "inf" || s == "-inf")
  {
    return s[0] == '-' ? -std::numeric_limits<double>::infinity()
                       : std::numeric_limits<double>::infinity();
  }
  double x = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc{} || end != s.data() + s.size())
  {
    throw ConfigError("not a number in CSV: '" + s + "'");
  }
  return x;
}

}  // namespace

std::string format_number(double x)
{
  if (std::isnan(x))
  {
    return "nan";
  }
  if (std::isinf(x))
  {
    return x > 0 ? "inf" : "-inf";
  }
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 12);
  if (ec != std::errc{})
  {
    throw Error("number formatting failed");
  }
  return std::string(buf, end);
}

std::string to_csv(const CsvTable &table)
{
  std::string out;
  for (std::size_t i = 0; i < table.header.size(); ++i)
  {
    out += (i ? "," : "") + table.header[i];
  }
  out += '\n';
  for (const auto &row : table.rows)
  {
    if (row.size() != table.header.size())
    {
      throw ConfigError("CSV row has " + std::to_string(row.size()) + " values for " +
                        std::to_string(table.header.size()) + " columns");
    }
    for (std::size_t i = 0; i < row.size(); ++i)
    {
      out += (i ? "," : "") + format_number(row[i]);
    }
    out += '\n';
  }
  return out;
}

void emit_csv(const CsvTable &table, const std::filesystem::path &path)
{
  const auto text = to_csv(table);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f)
  {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  f << text;
  f.close();
  if (!f)
  {
    throw IoError("write to " + path.string() + " failed");
  }
}

CsvTable parse_csv(const std::string &text)
{
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line))
  {
    throw ConfigError("empty CSV");
  }
  t.header = split(line);
  while (std::getline(in, line))
  {
    if (line.empty())
    {
      continue;
    }
    const auto cells = split(line);
    if (cells.size() != t.header.size())
    {
      throw ConfigError("ragged CSV row");
    }
    std::vector<double> row;
    for (const auto &c : cells)
    {
      row.push_back(parse_number(c));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable read_csv(const std::filesystem::path &path)
{
  std::ifstream f(path, std::ios::binary);
  if (!f)
  {
    throw IoError("cannot open " + path.string());
  }
  std::ostringstream s;
  s << f.rdbuf();
  return parse_csv(s.str());
}

}  // namespace screenlab
