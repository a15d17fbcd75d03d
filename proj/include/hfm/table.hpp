#pragma once

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace hfm {

/// Plain column table written as CSV. Numbers use a fixed "%.12g"-style
/// format with |x| < 1e-13 snapped to 0, so output is byte-stable.
struct Table {
  using Cell = std::variant<double, long long, std::string>;

  std::string tag;  // optional "# tag" line before the header
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row) { rows.push_back(std::move(row)); }

  void write_csv(std::ostream& os) const;
  /// Two whitespace-separated columns with a '#' header, for gnuplot.
  void write_columns(std::ostream& os, std::size_t x, std::size_t y) const;
};

std::string format_number(double value);

}  // namespace hfm
