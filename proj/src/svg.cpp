#include "gsbm/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace gsbm {

namespace {

constexpr double kMargin = 40.0;

std::string shade(double t) {
  t = std::clamp(t, 0.0, 1.0);
  const auto mix = [t](int a, int b) {
    return static_cast<int>(std::lround(a + (b - a) * t));
  };
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", mix(255, 8), mix(255, 48), mix(255, 107));
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string heatmap_svg(std::span<const double> values, std::size_t n,
                        std::span<const std::size_t> order, double lo, double hi,
                        const std::string& title) {
  if (values.size() != n * n || order.size() != n)
    throw std::invalid_argument("heatmap: size mismatch");
  const double cell = std::max(2.0, 600.0 / static_cast<double>(std::max<std::size_t>(n, 1)));
  const double side = cell * static_cast<double>(n);
  const double span = hi > lo ? hi - lo : 1.0;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << side + 2 * kMargin
     << "\" height=\"" << side + 2 * kMargin << "\">\n";
  os << "<text x=\"" << kMargin << "\" y=\"" << kMargin / 2
     << "\" font-family=\"sans-serif\" font-size=\"14\">" << escape(title) << "</text>\n";
  os << "<g transform=\"translate(" << kMargin << ',' << kMargin << ")\" shape-rendering=\"crispEdges\">\n";
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      const double v = values[order[r] * n + order[c]];
      os << "<rect x=\"" << cell * c << "\" y=\"" << cell * r << "\" width=\"" << cell
         << "\" height=\"" << cell << "\" fill=\"" << shade((v - lo) / span) << "\"/>\n";
    }
  os << "<rect x=\"0\" y=\"0\" width=\"" << side << "\" height=\"" << side
     << "\" fill=\"none\" stroke=\"black\"/>\n</g>\n</svg>\n";
  return os.str();
}

std::string trace_svg(std::span<const std::size_t> series, const std::string& title,
                      std::size_t burn_in) {
  const double w = 800.0, h = 300.0;
  const std::size_t top = series.empty() ? 1 : *std::max_element(series.begin(), series.end()) + 1;
  const double xs = series.size() > 1 ? w / static_cast<double>(series.size() - 1) : w;
  const double ys = h / static_cast<double>(top);
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w + 2 * kMargin
     << "\" height=\"" << h + 2 * kMargin << "\">\n";
  os << "<text x=\"" << kMargin << "\" y=\"" << kMargin / 2
     << "\" font-family=\"sans-serif\" font-size=\"14\">" << escape(title) << "</text>\n";
  os << "<g transform=\"translate(" << kMargin << ',' << kMargin << ")\" font-family=\"sans-serif\" font-size=\"10\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << w << "\" height=\"" << h
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  const std::size_t step = std::max<std::size_t>(1, top / 10);
  for (std::size_t k = 0; k <= top; k += step)
    os << "<text x=\"-6\" y=\"" << h - ys * k + 3 << "\" text-anchor=\"end\">" << k << "</text>\n";
  if (burn_in > 0 && burn_in < series.size())
    os << "<line x1=\"" << xs * burn_in << "\" y1=\"0\" x2=\"" << xs * burn_in << "\" y2=\"" << h
       << "\" stroke=\"grey\" stroke-dasharray=\"4 4\"/>\n";
  os << "<polyline fill=\"none\" stroke=\"#08306b\" stroke-width=\"1\" points=\"";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const double y = h - ys * static_cast<double>(series[s]);
    if (s) os << ' ' << xs * s << ',' << h - ys * static_cast<double>(series[s - 1]);
    os << ' ' << xs * s << ',' << y;
  }
  os << "\"/>\n</g>\n</svg>\n";
  return os.str();
}

std::vector<std::size_t> order_by_label(std::span<const std::size_t> labels) {
  std::vector<std::size_t> order(labels.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return labels[a] < labels[b]; });
  return order;
}

}  // namespace gsbm
