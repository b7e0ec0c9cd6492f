#include "fastsize/plot.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "fastsize/error.hpp"

namespace fastsize {

namespace {

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto comma = line.find(',', start);
    out.emplace_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Round-number tick spacing giving about `target` intervals.
double tick_step(double span, int target) {
  if (!(span > 0.0)) return 1.0;
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
    if (raw <= m * mag) return m * mag;
  }
  return 10.0 * mag;
}

struct Range {
  double lo;
  double hi;
};

Range padded_range(const std::vector<std::vector<double>>& series) {
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& s : series) {
    for (double v : s) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!(hi > lo)) {
    double pad = std::max(1.0, std::abs(lo) * 0.05);
    return {lo - pad, hi + pad};
  }
  double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

}  // namespace

std::size_t HistoryTable::column(std::string_view name) const {
  auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw ParseError("history csv: missing column '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - columns.begin());
}

std::vector<double> HistoryTable::series(std::string_view name) const {
  const std::size_t c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[c]);
  return out;
}

std::vector<std::string> HistoryTable::energy_sources() const {
  std::vector<std::string> out;
  for (const auto& c : columns) {
    if (c.size() > 4 && c.rfind("e_", 0) == 0 && c.compare(c.size() - 2, 2, "_j") == 0) {
      out.push_back(c.substr(2, c.size() - 4));
    }
  }
  return out;
}

HistoryTable parse_history_csv(std::string_view text) {
  HistoryTable t;
  std::size_t pos = 0;
  int line_no = 0;
  bool header = true;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    std::string_view line = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    pos = end == std::string_view::npos ? text.size() : end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (header) {
      t.columns = std::move(cells);
      header = false;
      continue;
    }
    if (cells.size() != t.columns.size()) {
      throw ParseError("history csv line " + std::to_string(line_no) + ": expected " +
                       std::to_string(t.columns.size()) + " cells, got " + std::to_string(cells.size()));
    }
    std::vector<double> row;
    for (const auto& cell : cells) {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
        throw ParseError("history csv line " + std::to_string(line_no) + ": '" + cell + "' is not a number");
      }
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  if (header) throw ParseError("history csv: empty file");
  for (const char* required : {"time_s", "altitude_m", "tas_ms", "mass_kg", "thrust_n"}) t.column(required);
  if (t.rows.empty()) throw ValidationError("history csv: no samples");
  return t;
}

std::string plot_history_svg(const HistoryTable& h, std::string_view title) {
  struct Panel {
    std::string label;
    std::vector<std::string> names;
    std::vector<std::vector<double>> series;
  };
  std::vector<Panel> panels;
  panels.push_back({"altitude [m]", {"altitude"}, {h.series("altitude_m")}});
  panels.push_back({"true airspeed [m/s]", {"TAS"}, {h.series("tas_ms")}});
  panels.push_back({"mass [kg]", {"mass"}, {h.series("mass_kg")}});
  panels.push_back({"thrust [kN]", {"thrust"}, {h.series("thrust_n")}});
  for (double& v : panels.back().series[0]) v /= 1000.0;
  Panel energy{"cumulative energy [MJ]", {}, {}};
  for (const auto& id : h.energy_sources()) {
    auto s = h.series("e_" + id + "_j");
    for (double& v : s) v /= 1e6;
    energy.names.push_back(id);
    energy.series.push_back(std::move(s));
  }
  panels.push_back(std::move(energy));

  const std::vector<double> time = h.series("time_s");
  const double t0 = time.front(), t1 = std::max(time.back(), time.front() + 1e-9);

  constexpr double kWidth = 760.0, kLeft = 90.0, kRight = 150.0, kTop = 50.0;
  constexpr double kPanelHeight = 150.0, kPanelGap = 40.0;
  const double plot_w = kWidth - kLeft - kRight;
  const double height = kTop + 5 * (kPanelHeight + kPanelGap) + 20.0;

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt("%.0f", kWidth) << "\" height=\""
      << fmt("%.0f", height) << "\" viewBox=\"0 0 " << fmt("%.0f", kWidth) << ' ' << fmt("%.0f", height)
      << "\" font-family=\"sans-serif\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << fmt("%.1f", kWidth / 2) << "\" y=\"28\" font-size=\"16\" text-anchor=\"middle\">";
  out << xml_escape(title) << "</text>\n";

  const double tstep = tick_step(t1 - t0, 6);
  for (std::size_t p = 0; p < panels.size(); ++p) {
    const Panel& panel = panels[p];
    const double y0 = kTop + static_cast<double>(p) * (kPanelHeight + kPanelGap);
    Range r = panel.series.empty() ? Range{0.0, 1.0} : padded_range(panel.series);
    auto px = [&](double t) { return kLeft + plot_w * (t - t0) / (t1 - t0); };
    auto py = [&](double v) { return y0 + kPanelHeight * (r.hi - v) / (r.hi - r.lo); };

    out << "<g class=\"panel\" id=\"panel-" << p << "\">\n";
    out << "<rect x=\"" << fmt("%.3f", kLeft) << "\" y=\"" << fmt("%.3f", y0) << "\" width=\"" << fmt("%.3f", plot_w)
        << "\" height=\"" << fmt("%.3f", kPanelHeight) << "\" fill=\"none\" stroke=\"#444\"/>\n";
    out << "<text x=\"14\" y=\"" << fmt("%.3f", y0 + kPanelHeight / 2) << "\" font-size=\"12\" transform=\"rotate(-90 14 "
        << fmt("%.3f", y0 + kPanelHeight / 2) << ")\" text-anchor=\"middle\">" << panel.label << "</text>\n";

    const double vstep = tick_step(r.hi - r.lo, 4);
    for (double v = std::ceil(r.lo / vstep) * vstep; v <= r.hi + 1e-12 * std::abs(r.hi); v += vstep) {
      out << "<line x1=\"" << fmt("%.3f", kLeft) << "\" y1=\"" << fmt("%.3f", py(v)) << "\" x2=\""
          << fmt("%.3f", kLeft + plot_w) << "\" y2=\"" << fmt("%.3f", py(v)) << "\" stroke=\"#ddd\"/>\n";
      out << "<text x=\"" << fmt("%.3f", kLeft - 6) << "\" y=\"" << fmt("%.3f", py(v) + 4)
          << "\" font-size=\"10\" text-anchor=\"end\">" << fmt("%g", std::abs(v) < 1e-12 * vstep ? 0.0 : v)
          << "</text>\n";
    }
    for (double t = std::ceil(t0 / tstep) * tstep; t <= t1 + 1e-9; t += tstep) {
      out << "<text x=\"" << fmt("%.3f", px(t)) << "\" y=\"" << fmt("%.3f", y0 + kPanelHeight + 14)
          << "\" font-size=\"10\" text-anchor=\"middle\">" << fmt("%g", t) << "</text>\n";
    }
    for (std::size_t s = 0; s < panel.series.size(); ++s) {
      const char* color = kPalette[s % (sizeof kPalette / sizeof kPalette[0])];
      out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t k = 0; k < time.size(); ++k) {
        out << (k ? " " : "") << fmt("%.3f", px(time[k])) << ',' << fmt("%.3f", py(panel.series[s][k]));
      }
      out << "\"/>\n";
      out << "<text x=\"" << fmt("%.3f", kLeft + plot_w + 10) << "\" y=\"" << fmt("%.3f", y0 + 14 + 14.0 * s)
          << "\" font-size=\"11\" fill=\"" << color << "\">" << xml_escape(panel.names[s]) << "</text>\n";
    }
    out << "</g>\n";
  }
  out << "<text x=\"" << fmt("%.1f", kLeft + plot_w / 2) << "\" y=\"" << fmt("%.1f", height - 8)
      << "\" font-size=\"12\" text-anchor=\"middle\">time [s]</text>\n";
  out << "</svg>\n";
  return out.str();
}

}  // namespace fastsize
