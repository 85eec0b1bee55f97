#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "swaptest/errors.hpp"
#include "swaptest/experiment.hpp"

namespace swaptest::experiment {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

void write_csv(const Table& t, std::ostream& out) {
  for (std::size_t k = 0; k < t.columns.size(); ++k) out << (k ? "," : "") << t.columns[k];
  out << '\n';
  for (const auto& row : t.rows) {
    if (row.size() != t.columns.size()) throw LayoutError("row width does not match header in " + t.name);
    for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << format_number(row[k]);
    out << '\n';
  }
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    out.push_back(cell);
  }
  return out;
}

}  // namespace

Table read_csv(std::istream& in, const std::string& name) {
  Table t;
  t.name = name;
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty CSV " + name);
  t.columns = split(line);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto cells = split(line);
    if (cells.size() != t.columns.size())
      throw ConfigError(name + ":" + std::to_string(lineno) + ": expected " + std::to_string(t.columns.size()) +
                        " fields");
    std::vector<double> row;
    for (const auto& c : cells) {
      char* end = nullptr;
      const double v = std::strtod(c.c_str(), &end);
      if (end == c.c_str() || *end != '\0')
        throw ConfigError(name + ":" + std::to_string(lineno) + ": not a number '" + c + "'");
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  return read_csv(in, path);
}

void write_svg(const Table& t, std::ostream& out) {
  constexpr double W = 640, H = 400, L = 60, R = 150, T = 20, B = 40;
  static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2"};
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& r : t.rows) {
    x0 = std::min(x0, r[0]);
    x1 = std::max(x1, r[0]);
    for (std::size_t k = 1; k < r.size(); ++k)
      if (std::isfinite(r[k])) {
        y0 = std::min(y0, r[k]);
        y1 = std::max(y1, r[k]);
      }
  }
  if (!(x1 > x0)) x1 = x0 + 1;
  if (!(y1 > y0)) y1 = y0 + 1;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };
  char buf[128];
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  std::snprintf(buf, sizeof buf, "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"none\" stroke=\"black\"/>\n",
                L, T, W - L - R, H - T - B);
  out << buf;
  std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" font-size=\"11\">%.3g</text>\n", L, H - B + 15, x0);
  out << buf;
  std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" font-size=\"11\" text-anchor=\"end\">%.3g</text>\n",
                W - R, H - B + 15, x1);
  out << buf;
  std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" font-size=\"11\" text-anchor=\"end\">%.3g</text>\n",
                L - 4, H - B, y0);
  out << buf;
  std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" font-size=\"11\" text-anchor=\"end\">%.3g</text>\n",
                L - 4, T + 10, y1);
  out << buf;
  out << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 8 << "\" font-size=\"12\">" << t.columns[0]
      << "</text>\n";
  for (std::size_t k = 1; k < t.columns.size(); ++k) {
    const char* color = colors[(k - 1) % std::size(colors)];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& r : t.rows) {
      if (!std::isfinite(r[k])) continue;
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(r[0]), py(r[k]));
      out << buf;
    }
    out << "\"/>\n";
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" font-size=\"11\" fill=\"%s\">", W - R + 8,
                  T + 14.0 * static_cast<double>(k), color);
    out << buf << t.columns[k] << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace swaptest::experiment
