#pragma once
// Mission history plots: one SVG with five stacked panels sharing the time
// axis (altitude, true airspeed, mass, thrust, cumulative energy per source).

#include <string>
#include <string_view>
#include <vector>

namespace fastsize {

struct HistoryTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  // Index of a column; ParseError when absent.
  std::size_t column(std::string_view name) const;
  std::vector<double> series(std::string_view name) const;
  // Source ids from the e_<id>_j columns, in file order.
  std::vector<std::string> energy_sources() const;
};

// Parses a history CSV as written by the mission module. A header with no
// data rows throws ValidationError "no samples".
HistoryTable parse_history_csv(std::string_view text);

// Byte-for-byte deterministic for identical input.
std::string plot_history_svg(const HistoryTable& history, std::string_view title = "mission history");

}  // namespace fastsize
