#include "mscp/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <thread>

namespace mscp {

namespace {

std::string format_value(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, result.ptr);
}

std::string svg_escape(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (const char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
constexpr int kPaletteSize = 8;

}  // namespace

void emit_csv(const MetricsReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("emit_csv: cannot open '" + path + "'");
  out << "task,method,grid_key,alpha,replications,mcp,pfi,medl_or_size,runtime_seconds\n";
  for (const MetricsRow& row : report.rows) {
    out << row.task << ',' << row.method << ',' << row.grid_key << ','
        << format_value(row.alpha) << ',' << row.replications << ','
        << format_value(row.mcp) << ',' << format_value(row.pfi) << ','
        << format_value(row.medl_or_size) << ','
        << format_value(row.runtime_seconds) << '\n';
  }
  if (!out) throw std::runtime_error("emit_csv: write failed for '" + path + "'");
}

void emit_svg(const MetricsReport& report, const std::string& path) {
  std::vector<std::string> grid_keys;
  std::vector<std::string> methods;
  for (const MetricsRow& row : report.rows) {
    if (std::find(grid_keys.begin(), grid_keys.end(), row.grid_key) == grid_keys.end()) {
      grid_keys.push_back(row.grid_key);
    }
    if (std::find(methods.begin(), methods.end(), row.method) == methods.end()) {
      methods.push_back(row.method);
    }
  }

  const auto value_at = [&](const std::string& method, const std::string& key,
                            int metric) -> double {
    for (const MetricsRow& row : report.rows) {
      if (row.method == method && row.grid_key == key) {
        switch (metric) {
          case 0: return row.mcp;
          case 1: return row.pfi;
          default: return row.medl_or_size;
        }
      }
    }
    return std::numeric_limits<double>::quiet_NaN();
  };

  const double panel_w = 360.0;
  const double panel_h = 300.0;
  const double margin_left = 58.0;
  const double margin_bottom = 92.0;
  const double margin_top = 48.0;
  const double gap = 36.0;
  const double width = 3 * panel_w + 2 * gap + margin_left + 24.0;
  const double legend_h = 26.0 + 16.0 * static_cast<double>(methods.size());
  const double height = margin_top + panel_h + margin_bottom + legend_h;

  const char* panel_titles[3] = {"coverage", "finite fraction", "length / size"};

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("emit_svg: cannot open '" + path + "'");
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << coord(width)
      << "\" height=\"" << coord(height) << "\" viewBox=\"0 0 " << coord(width)
      << ' ' << coord(height) << "\" font-family=\"sans-serif\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (int metric = 0; metric < 3; ++metric) {
    const double left = margin_left + metric * (panel_w + gap);
    const double top = margin_top;
    const double bottom = top + panel_h;

    double lo = 0.0;
    double hi = 1.0;
    if (metric == 2) {
      lo = std::numeric_limits<double>::infinity();
      hi = -std::numeric_limits<double>::infinity();
      for (const MetricsRow& row : report.rows) {
        if (std::isfinite(row.medl_or_size)) {
          lo = std::min(lo, row.medl_or_size);
          hi = std::max(hi, row.medl_or_size);
        }
      }
      if (!(lo < hi)) {
        lo = std::isfinite(lo) ? lo - 0.5 : 0.0;
        hi = std::isfinite(hi) ? hi + 0.5 : 1.0;
      }
      const double pad = 0.05 * (hi - lo);
      lo -= pad;
      hi += pad;
    }

    const auto x_of = [&](int key_index) {
      if (grid_keys.size() == 1) return left + panel_w / 2.0;
      return left + panel_w * static_cast<double>(key_index) /
                        static_cast<double>(grid_keys.size() - 1);
    };
    const auto y_of = [&](double v) { return bottom - panel_h * (v - lo) / (hi - lo); };

    out << "<rect x=\"" << coord(left) << "\" y=\"" << coord(top) << "\" width=\""
        << coord(panel_w) << "\" height=\"" << coord(panel_h)
        << "\" fill=\"none\" stroke=\"#333\"/>\n";
    out << "<text x=\"" << coord(left + panel_w / 2.0) << "\" y=\"" << coord(top - 12.0)
        << "\" text-anchor=\"middle\" font-size=\"14\">" << panel_titles[metric]
        << "</text>\n";

    for (int tick = 0; tick <= 4; ++tick) {
      const double v = lo + (hi - lo) * tick / 4.0;
      const double y = y_of(v);
      out << "<line x1=\"" << coord(left - 4.0) << "\" y1=\"" << coord(y) << "\" x2=\""
          << coord(left) << "\" y2=\"" << coord(y) << "\" stroke=\"#333\"/>\n";
      out << "<text x=\"" << coord(left - 7.0) << "\" y=\"" << coord(y + 3.5)
          << "\" text-anchor=\"end\" font-size=\"9\">" << coord(v) << "</text>\n";
    }
    for (std::size_t k = 0; k < grid_keys.size(); ++k) {
      const double x = x_of(static_cast<int>(k));
      out << "<line x1=\"" << coord(x) << "\" y1=\"" << coord(bottom) << "\" x2=\""
          << coord(x) << "\" y2=\"" << coord(bottom + 4.0) << "\" stroke=\"#333\"/>\n";
      out << "<text x=\"" << coord(x) << "\" y=\"" << coord(bottom + 12.0)
          << "\" text-anchor=\"end\" font-size=\"9\" transform=\"rotate(-40 " << coord(x)
          << ' ' << coord(bottom + 12.0) << ")\">" << svg_escape(grid_keys[k])
          << "</text>\n";
    }

    for (std::size_t m = 0; m < methods.size(); ++m) {
      const char* color = kPalette[m % kPaletteSize];
      std::string points;
      std::string markers;
      for (std::size_t k = 0; k < grid_keys.size(); ++k) {
        const double v = value_at(methods[m], grid_keys[k], metric);
        if (!std::isfinite(v)) continue;
        const double x = x_of(static_cast<int>(k));
        const double y = y_of(v);
        if (!points.empty()) points += ' ';
        points += coord(x) + "," + coord(y);
        markers += "<circle cx=\"" + coord(x) + "\" cy=\"" + coord(y) +
                   "\" r=\"2.2\" fill=\"" + color + "\"/>\n";
      }
      if (!points.empty()) {
        out << "<polyline points=\"" << points << "\" fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"1.5\"/>\n"
            << markers;
      }
    }
  }

  const double legend_top = margin_top + panel_h + margin_bottom;
  out << "<text x=\"" << coord(margin_left) << "\" y=\"" << coord(legend_top)
      << "\" font-size=\"12\">methods</text>\n";
  for (std::size_t m = 0; m < methods.size(); ++m) {
    const double y = legend_top + 16.0 * static_cast<double>(m + 1);
    const char* color = kPalette[m % kPaletteSize];
    out << "<line x1=\"" << coord(margin_left) << "\" y1=\"" << coord(y - 3.5)
        << "\" x2=\"" << coord(margin_left + 26.0) << "\" y2=\"" << coord(y - 3.5)
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << coord(margin_left + 32.0) << "\" y=\"" << coord(y)
        << "\" font-size=\"11\">" << svg_escape(methods[m]) << "</text>\n";
  }
  out << "</svg>\n";
  if (!out) throw std::runtime_error("emit_svg: write failed for '" + path + "'");
}

int worker_count() {
  if (const char* env = std::getenv("MSCP_THREADS")) {
    char* end = nullptr;
    const long parsed = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && parsed >= 1) return static_cast<int>(parsed);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw >= 1 ? static_cast<int>(hw) : 1;
}

}  // namespace mscp
