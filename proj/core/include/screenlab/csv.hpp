#ifndef SCREENLAB_CSV_HPP
#define SCREENLAB_CSV_HPP

#include <filesystem>
#include <string>
#include <vector>

namespace screenlab
{

// Numeric table with a header row. Every row has one value per column.
struct CsvTable
{
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

// 12 significant digits in the style of %.12g, independent of the locale.
// NaN and infinities print as nan, inf, -inf.
std::string format_number(double x);

// Header line plus one line per row, comma separated, '\n' terminated.
std::string to_csv(const CsvTable &table);

// Throws ConfigError for ragged rows and IoError when the file cannot be written.
void emit_csv(const CsvTable &table, const std::filesystem::path &path);

CsvTable parse_csv(const std::string &text);
CsvTable read_csv(const std::filesystem::path &path);

}  // namespace screenlab

#endif  // SCREENLAB_CSV_HPP
