#include "hfm/table.hpp"

#include <cmath>
#include <ostream>

#include <fmt/format.h>

namespace hfm {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (std::abs(value) < 1e-13) value = 0.0;
  return fmt::format("{:.12g}", value);
}

namespace {

std::string render(const Table::Cell& cell) {
  if (const auto* d = std::get_if<double>(&cell)) return format_number(*d);
  if (const auto* i = std::get_if<long long>(&cell)) return std::to_string(*i);
  return std::get<std::string>(cell);
}

}  // namespace

void Table::write_csv(std::ostream& os) const {
  if (!tag.empty()) os << "# " << tag << '\n';
  for (std::size_t c = 0; c < header.size(); ++c) os << (c ? "," : "") << header[c];
  os << '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << render(row[c]);
    os << '\n';
  }
}

void Table::write_columns(std::ostream& os, std::size_t x, std::size_t y) const {
  os << "# " << header.at(x) << ' ' << header.at(y) << '\n';
  for (const auto& row : rows) os << render(row.at(x)) << ' ' << render(row.at(y)) << '\n';
}

}  // namespace hfm
