#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace chemlab::svg {

struct Series {
  std::string name;
  std::vector<double> y;
};

/// Minimal line chart: axes with min/max labels, one polyline per series, legend.
/// With log_y, nonpositive samples are dropped from their polyline.
inline std::string line_chart(const std::vector<double>& t, const std::vector<Series>& series, bool log_y,
                              const std::string& title = "") {
  constexpr double W = 800, H = 480, L = 70, R = 160, T = 40, B = 50;
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

  auto ty = [log_y](double y) { return log_y ? std::log10(y) : y; };
  double tmin = t.empty() ? 0.0 : t.front(), tmax = t.empty() ? 1.0 : t.back();
  if (tmax <= tmin) tmax = tmin + 1.0;
  double ymin = std::numeric_limits<double>::infinity(), ymax = -ymin;
  for (const auto& s : series)
    for (double y : s.y)
      if (std::isfinite(y) && (!log_y || y > 0)) {
        ymin = std::min(ymin, ty(y));
        ymax = std::max(ymax, ty(y));
      }
  if (!std::isfinite(ymin)) ymin = 0.0, ymax = 1.0;
  if (ymax <= ymin) ymax = ymin + 1.0;

  auto px = [&](double x) { return L + (x - tmin) / (tmax - tmin) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - ymin) / (ymax - ymin) * (H - T - B); };
  auto num = [](double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", x);
    return std::string(buf);
  };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title.empty()) o << "<text x=\"" << L << "\" y=\"24\" font-size=\"16\">" << title << "</text>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
    << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  const std::string ylo = log_y ? "1e" + num(ymin) : num(ymin);
  const std::string yhi = log_y ? "1e" + num(ymax) : num(ymax);
  o << "<text x=\"" << L - 6 << "\" y=\"" << H - B << "\" font-size=\"11\" text-anchor=\"end\">" << ylo << "</text>\n";
  o << "<text x=\"" << L - 6 << "\" y=\"" << T + 4 << "\" font-size=\"11\" text-anchor=\"end\">" << yhi << "</text>\n";
  o << "<text x=\"" << L << "\" y=\"" << H - B + 18 << "\" font-size=\"11\">" << num(tmin) << "</text>\n";
  o << "<text x=\"" << W - R << "\" y=\"" << H - B + 18 << "\" font-size=\"11\" text-anchor=\"end\">" << num(tmax)
    << "</text>\n";
  o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" font-size=\"12\">t</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* color = colors[k % 6];
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < t.size() && i < series[k].y.size(); ++i) {
      const double y = series[k].y[i];
      if (!std::isfinite(y) || (log_y && y <= 0)) continue;
      o << num(px(t[i])) << ',' << num(py(ty(y))) << ' ';
    }
    o << "\"/>\n";
    const double ly = T + 16.0 * static_cast<double>(k);
    o << "<line x1=\"" << W - R + 12 << "\" y1=\"" << ly << "\" x2=\"" << W - R + 32 << "\" y2=\"" << ly
      << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << W - R + 38 << "\" y=\"" << ly + 4 << "\" font-size=\"12\">" << series[k].name << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace chemlab::svg
