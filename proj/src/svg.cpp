#include "phenocurve/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "phenocurve/errors.hpp"

namespace phenocurve {

namespace {

constexpr std::array<const char*, 12> kMonths = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                                 "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
// Day of year of the first of each month (non-leap year).
constexpr std::array<int, 12> kMonthStart = {1, 32, 60, 91, 121, 152, 182, 213, 244, 274, 305, 335};

// Fixed precision keeps the output byte-stable.
std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", std::abs(v) < 0.005 ? 0.0 : v);
  return buf;
}

std::string header(double width, double height, std::string_view title) {
  std::string s = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" + num(height) +
       "\" viewBox=\"0 0 " + num(width) + " " + num(height) + "\">\n";
  s += "<title>" + xml_escape(title) + "</title>\n";
  s += "<rect x=\"0\" y=\"0\" width=\"" + num(width) + "\" height=\"" + num(height) +
       "\" fill=\"#ffffff\"/>\n";
  return s;
}

void legend(std::string& s, double x, double y) {
  for (std::size_t i = 0; i < kPhases.size(); ++i) {
    const double yy = y + 16.0 * static_cast<double>(i);
    s += "<circle cx=\"" + num(x) + "\" cy=\"" + num(yy) + "\" r=\"4.00\" fill=\"" +
         std::string(kPhaseColors[i]) + "\"/>";
    s += "<text x=\"" + num(x + 10.0) + "\" y=\"" + num(yy + 4.0) +
         "\" font-family=\"sans-serif\" font-size=\"11\">" + std::string(phase_code(kPhases[i])) +
         "</text>\n";
  }
}

}  // namespace

std::string xml_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

SpiralPoint spiral_point(int loop, int doy, const SpiralStyle& style) {
  const double frac = static_cast<double>(doy) / 365.0;
  return {2.0 * std::numbers::pi * frac, style.r0 + style.b * (loop + frac)};
}

std::string render_spiral(const std::vector<PhenoDates>& dates, const SpiralStyle& style) {
  require(!dates.empty(), "render_spiral: no date records");
  require(style.r0 >= 0.0 && style.b > 0.0, "render_spiral: r0 must be >= 0 and b > 0");
  require(style.segments_per_loop >= 8, "render_spiral: segments_per_loop must be >= 8");

  const int loops = static_cast<int>(dates.size());
  const double outer = style.r0 + style.b * (loops + 1);
  const double label_ring = outer + 14.0;
  const double half = label_ring + style.margin;
  const double legend_width = 70.0;
  const double width = 2.0 * half + legend_width;
  const double height = 2.0 * half;
  const double cx = half;
  const double cy = half;
  auto xy = [&](const SpiralPoint& p) {
    return std::make_pair(cx + p.radius * std::sin(p.angle), cy - p.radius * std::cos(p.angle));
  };

  std::string s = header(width, height, style.title);

  // Month ticks and labels.
  for (std::size_t m = 0; m < kMonths.size(); ++m) {
    const double a = 2.0 * std::numbers::pi * (kMonthStart[m] - 1) / 365.0;
    const double x0 = cx + style.r0 * std::sin(a), y0 = cy - style.r0 * std::cos(a);
    const double x1 = cx + outer * std::sin(a), y1 = cy - outer * std::cos(a);
    const double lx = cx + label_ring * std::sin(a), ly = cy - label_ring * std::cos(a);
    s += "<line x1=\"" + num(x0) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(x1) + "\" y2=\"" + num(y1) +
         "\" stroke=\"#dddddd\" stroke-width=\"0.50\"/>";
    s += "<text x=\"" + num(lx) + "\" y=\"" + num(ly + 4.0) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" + kMonths[m] +
         "</text>\n";
  }

  // Spiral backbone.
  s += "<path d=\"";
  const int steps = loops * style.segments_per_loop;
  for (int i = 0; i <= steps; ++i) {
    const double turns = static_cast<double>(i) / style.segments_per_loop;
    const SpiralPoint p{2.0 * std::numbers::pi * turns, style.r0 + style.b * turns};
    const auto [x, y] = xy(p);
    s += (i == 0 ? "M" : " L") + num(x) + " " + num(y);
  }
  s += "\" fill=\"none\" stroke=\"#999999\" stroke-width=\"0.60\"/>\n";

  for (int k = 0; k < loops; ++k) {
    const auto& rec = dates[static_cast<std::size_t>(k)];
    for (std::size_t i = 0; i < kPhases.size(); ++i) {
      const auto& d = rec[kPhases[i]];
      if (!d) continue;
      const auto [x, y] = xy(spiral_point(k, d->doy, style));
      s += "<circle cx=\"" + num(x) + "\" cy=\"" + num(y) + "\" r=\"" + num(style.marker_radius) +
           "\" fill=\"" + std::string(kPhaseColors[i]) + "\"><title>pixel " + std::to_string(k + 1) +
           " " + std::string(phase_code(kPhases[i])) + " DoY " + std::to_string(d->doy) +
           "</title></circle>\n";
    }
  }

  legend(s, 2.0 * half + 10.0, style.margin);
  s += "</svg>\n";
  return s;
}

std::string render_profile(const CurveMatrix& curves, const TrendCurve& trend, const PhenoDates* dates,
                           const ProfileStyle& style) {
  require(curves.grid_n() >= 2 || trend.grid_n() >= 2, "render_profile: nothing to draw");
  require(style.width > 2.0 * style.margin + 80.0 && style.height > 2.0 * style.margin,
          "render_profile: plot area too small");

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  auto extend = [&](double v) {
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  };
  for (Eigen::Index i = 0; i < curves.samples.size(); ++i) extend(curves.samples.data()[i]);
  for (Eigen::Index i = 0; i < trend.values.size(); ++i) extend(trend.values(i));
  require(std::isfinite(lo), "render_profile: no finite values");
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;

  const double legend_width = 70.0;
  const double x0 = style.margin, x1 = style.width - style.margin - legend_width;
  const double y0 = style.height - style.margin, y1 = style.margin;
  auto px = [&](double doy) { return x0 + (x1 - x0) * doy / 365.0; };
  auto py = [&](double v) { return y0 + (y1 - y0) * (v - lo) / (hi - lo); };
  auto polyline = [&](const auto& column, int n) {
    std::string pts;
    for (int i = 0; i < n; ++i) {
      const double doy = 365.0 * i / (n - 1);
      if (i > 0) pts += ' ';
      pts += num(px(doy)) + "," + num(py(column(i)));
    }
    return pts;
  };

  std::string s = header(style.width, style.height, style.title);

  // Axes, month ticks and value ticks.
  s += "<line x1=\"" + num(x0) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(x1) + "\" y2=\"" + num(y0) +
       "\" stroke=\"#000000\" stroke-width=\"1.00\"/>\n";
  s += "<line x1=\"" + num(x0) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(x0) + "\" y2=\"" + num(y1) +
       "\" stroke=\"#000000\" stroke-width=\"1.00\"/>\n";
  for (std::size_t m = 0; m < kMonths.size(); ++m) {
    const double x = px(kMonthStart[m] - 1);
    s += "<line x1=\"" + num(x) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(x) + "\" y2=\"" + num(y0 + 5.0) +
         "\" stroke=\"#000000\" stroke-width=\"1.00\"/>";
    s += "<text x=\"" + num(x + 12.0) + "\" y=\"" + num(y0 + 18.0) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" + kMonths[m] +
         "</text>\n";
  }
  for (int k = 0; k <= 4; ++k) {
    const double v = lo + (hi - lo) * k / 4.0;
    s += "<text x=\"" + num(x0 - 6.0) + "\" y=\"" + num(py(v) + 3.0) +
         "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" + num(v) + "</text>\n";
  }
  s += "<text x=\"" + num(0.5 * (x0 + x1)) + "\" y=\"" + num(style.height - 10.0) +
       "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">Day of year</text>\n";

  for (int j = 0; j < curves.curves(); ++j) {
    const auto col = curves.samples.col(j);
    s += "<polyline points=\"" + polyline([&](int i) { return col(i); }, curves.grid_n()) +
         "\" fill=\"none\" stroke=\"#8c8c8c\" stroke-opacity=\"0.60\" stroke-width=\"0.80\">";
    if (static_cast<std::size_t>(j) < curves.season_labels.size()) {
      s += "<title>" + xml_escape(curves.season_labels[static_cast<std::size_t>(j)]) + "</title>";
    }
    s += "</polyline>\n";
  }
  if (trend.grid_n() >= 2) {
    s += "<polyline points=\"" + polyline([&](int i) { return trend.values(i); }, trend.grid_n()) +
         "\" fill=\"none\" stroke=\"#000000\" stroke-width=\"2.50\"><title>trend</title></polyline>\n";
  }

  if (dates) {
    for (std::size_t i = 0; i < kPhases.size(); ++i) {
      const auto& d = (*dates)[kPhases[i]];
      if (!d) continue;
      const double x = px(d->doy);
      s += "<line x1=\"" + num(x) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(x) + "\" y2=\"" + num(y1) +
           "\" stroke=\"" + std::string(kPhaseColors[i]) +
           "\" stroke-width=\"1.20\" stroke-dasharray=\"4 3\"><title>" +
           std::string(phase_code(kPhases[i])) + " DoY " + std::to_string(d->doy) + "</title></line>\n";
    }
  }

  legend(s, x1 + 20.0, style.margin);
  s += "</svg>\n";
  return s;
}

}  // namespace phenocurve
