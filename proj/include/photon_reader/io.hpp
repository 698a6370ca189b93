// Output writers: locale-independent CSV with #-prefixed metadata lines, and
// a small self-contained SVG line plotter (axes, log scales, legend) for the
// curve and contour commands. CSV is the canonical artifact; SVG is a
// convenience rendering with no plotting dependency.
#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace photon_reader::io {

// Shortest round-trip decimal form, independent of the global locale.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, ptr);
}

// One CSV cell, quoting only when the content requires it.
inline std::string csv_escape(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}

  void metadata(std::string_view key, std::string_view value) {
    os_ << "# " << key << "=" << value << "\n";
  }
  void metadata(std::string_view key, double value) { metadata(key, format_double(value)); }

  void header(const std::vector<std::string>& cols) { write_row(cols); }

  void row(const std::vector<std::string>& cells) { write_row(cells); }

 private:
  void write_row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os_ << ',';
      os_ << csv_escape(cells[i]);
    }
    os_ << '\n';
  }
  std::ostream& os_;
};

// ---------------------------------------------------------------------------
// Minimal SVG line plots

struct SvgSeries {
  std::string label;
  std::string color = "#000000";
  bool dashed = false;
  std::vector<std::pair<double, double>> points;  // (x, y)
};

class SvgPlot {
 public:
  SvgPlot(std::string title, std::string x_label, std::string y_label)
      : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

  void set_log_x(bool v) { log_x_ = v; }
  void set_log_y(bool v) { log_y_ = v; }
  void add_series(SvgSeries s) { series_.push_back(std::move(s)); }

  void render(std::ostream& os) const {
    constexpr double w = 880, h = 560;
    constexpr double ml = 80, mr = 180, mt = 48, mb = 64;  // margins
    const double pw = w - ml - mr, ph = h - mt - mb;

    double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
    double y_lo = x_lo, y_hi = -x_lo;
    for (const auto& s : series_)
      for (auto [x, y] : s.points) {
        if (!usable(x, log_x_) || !usable(y, log_y_)) continue;
        x_lo = std::min(x_lo, x); x_hi = std::max(x_hi, x);
        y_lo = std::min(y_lo, y); y_hi = std::max(y_hi, y);
      }
    if (!(x_lo < x_hi)) { x_lo = log_x_ ? 0.1 : 0.0; x_hi = 1.0; }
    if (!(y_lo < y_hi)) { y_hi = y_lo + 1.0; }
    if (!log_y_) {
      const double pad = 0.05 * (y_hi - y_lo);
      y_lo -= pad; y_hi += pad;
      if (y_lo > 0.0 && y_lo < 0.25 * (y_hi - y_lo)) y_lo = 0.0;
    }

    const auto sx = [&](double x) {
      const double t = log_x_ ? (std::log10(x) - std::log10(x_lo)) / (std::log10(x_hi) - std::log10(x_lo))
                              : (x - x_lo) / (x_hi - x_lo);
      return ml + t * pw;
    };
    const auto sy = [&](double y) {
      const double t = log_y_ ? (std::log10(y) - std::log10(y_lo)) / (std::log10(y_hi) - std::log10(y_lo))
                              : (y - y_lo) / (y_hi - y_lo);
      return mt + (1.0 - t) * ph;
    };

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
       << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
    os << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"#ffffff\"/>\n";
    os << "<text x=\"" << (ml + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" "
          "font-family=\"sans-serif\" font-size=\"16\">" << title_ << "</text>\n";

    // gridlines and tick labels
    os << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333333\">\n";
    for (double x : ticks(x_lo, x_hi, log_x_)) {
      const double px = sx(x);
      os << "<line x1=\"" << px << "\" y1=\"" << mt << "\" x2=\"" << px << "\" y2=\"" << (mt + ph)
         << "\" stroke=\"#dddddd\"/>\n";
      os << "<text x=\"" << px << "\" y=\"" << (mt + ph + 18) << "\" text-anchor=\"middle\">"
         << tick_label(x) << "</text>\n";
    }
    for (double y : ticks(y_lo, y_hi, log_y_)) {
      const double py = sy(y);
      os << "<line x1=\"" << ml << "\" y1=\"" << py << "\" x2=\"" << (ml + pw) << "\" y2=\"" << py
         << "\" stroke=\"#dddddd\"/>\n";
      os << "<text x=\"" << (ml - 8) << "\" y=\"" << (py + 4) << "\" text-anchor=\"end\">"
         << tick_label(y) << "</text>\n";
    }
    os << "</g>\n";

    // frame + axis labels
    os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"#333333\"/>\n";
    os << "<text x=\"" << (ml + pw / 2) << "\" y=\"" << (h - 16)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << x_label_
       << "</text>\n";
    os << "<text x=\"20\" y=\"" << (mt + ph / 2)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 20 "
       << (mt + ph / 2) << ")\">" << y_label_ << "</text>\n";

    // curves
    for (const auto& s : series_) {
      os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.8\"";
      if (s.dashed) os << " stroke-dasharray=\"6 4\"";
      os << " points=\"";
      bool any = false;
      for (auto [x, y] : s.points) {
        if (!usable(x, log_x_) || !usable(y, log_y_)) continue;
        const double cx = std::clamp(sx(x), ml, ml + pw);
        const double cy = std::clamp(sy(y), mt, mt + ph);
        os << cx << ',' << cy << ' ';
        any = true;
      }
      os << "\"/>\n";
      if (!any) continue;
    }

    // legend
    double ly = mt + 10;
    os << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
    for (const auto& s : series_) {
      const double lx = ml + pw + 12;
      os << "<line x1=\"" << lx << "\" y1=\"" << (ly - 4) << "\" x2=\"" << (lx + 26) << "\" y2=\""
         << (ly - 4) << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"";
      if (s.dashed) os << " stroke-dasharray=\"6 4\"";
      os << "/>\n";
      os << "<text x=\"" << (lx + 32) << "\" y=\"" << ly << "\">" << s.label << "</text>\n";
      ly += 18;
    }
    os << "</g>\n</svg>\n";
  }

 private:
  static bool usable(double v, bool log_scale) {
    return std::isfinite(v) && (!log_scale || v > 0.0);
  }

  static std::vector<double> ticks(double lo, double hi, bool log_scale) {
    std::vector<double> out;
    if (log_scale) {
      const int e_lo = static_cast<int>(std::ceil(std::log10(lo) - 1e-9));
      const int e_hi = static_cast<int>(std::floor(std::log10(hi) + 1e-9));
      for (int e = e_lo; e <= e_hi; ++e) out.push_back(std::pow(10.0, e));
      if (out.empty()) out = {lo, hi};
      return out;
    }
    const double span = hi - lo;
    const double raw = span / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double mult : {1.0, 2.0, 5.0, 10.0})
      if (mag * mult >= raw) { step = mag * mult; break; }
    const double first = std::ceil(lo / step) * step;
    for (double v = first; v <= hi + 1e-9 * span; v += step) out.push_back(v);
    return out;
  }

  static std::string tick_label(double v) {
    const double a = std::abs(v);
    if (v != 0.0 && (a < 1e-3 || a >= 1e4)) {
      const int e = static_cast<int>(std::floor(std::log10(a) + 1e-12));
      const double mant = v / std::pow(10.0, e);
      const double r = std::round(mant * 100) / 100;
      return format_double(r) + "e" + std::to_string(e);
    }
    return format_double(std::round(v * 1e6) / 1e6);
  }

  std::string title_, x_label_, y_label_;
  bool log_x_ = false, log_y_ = false;
  std::vector<SvgSeries> series_;
};

}  // namespace photon_reader::io
