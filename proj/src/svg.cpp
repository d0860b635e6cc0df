#include "ssir/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace ssir::svg {

namespace {

constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 55.0;

std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string tick_label(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// "--" may not appear inside an XML comment.
std::string comment_safe(std::string text) {
  for (std::size_t pos = text.find("--"); pos != std::string::npos; pos = text.find("--", pos)) {
    text.replace(pos, 2, "- -");
  }
  return text;
}

struct Frame {
  double x_min, x_max, y_min, y_max;
  double width, height;

  double px(double x) const { return kLeft + (x - x_min) / (x_max - x_min) * (width - kLeft - kRight); }
  double py(double y) const { return height - kBottom - (y - y_min) / (y_max - y_min) * (height - kTop - kBottom); }
};

void pad_range(double& lo, double& hi) {
  if (!(hi > lo)) {
    const double mid = std::isfinite(lo) ? lo : 0.0;
    lo = mid - 1.0;
    hi = mid + 1.0;
    return;
  }
  const double pad = 0.04 * (hi - lo);
  lo -= pad;
  hi += pad;
}

void header(std::ostream& os, const PlotSpec& spec) {
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<!-- provenance: " << comment_safe(spec.provenance) << " -->\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\"" << spec.height
     << "\" viewBox=\"0 0 " << spec.width << ' ' << spec.height << "\" font-family=\"sans-serif\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << spec.width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
     << escape(spec.title) << "</text>\n";
}

void axes(std::ostream& os, const PlotSpec& spec, const Frame& f) {
  const double x0 = kLeft, x1 = spec.width - kRight;
  const double y0 = spec.height - kBottom, y1 = kTop;
  os << "<g stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n"
     << "<rect x=\"" << fixed(x0) << "\" y=\"" << fixed(y1) << "\" width=\"" << fixed(x1 - x0) << "\" height=\""
     << fixed(y0 - y1) << "\"/>\n";
  constexpr int ticks = 5;
  for (int k = 0; k <= ticks; ++k) {
    const double xv = f.x_min + (f.x_max - f.x_min) * k / ticks;
    const double yv = f.y_min + (f.y_max - f.y_min) * k / ticks;
    os << "<line x1=\"" << fixed(f.px(xv)) << "\" y1=\"" << fixed(y0) << "\" x2=\"" << fixed(f.px(xv))
       << "\" y2=\"" << fixed(y0 + 5) << "\"/>\n"
       << "<line x1=\"" << fixed(x0 - 5) << "\" y1=\"" << fixed(f.py(yv)) << "\" x2=\"" << fixed(x0)
       << "\" y2=\"" << fixed(f.py(yv)) << "\"/>\n";
  }
  os << "</g>\n<g font-size=\"11\" fill=\"black\">\n";
  for (int k = 0; k <= ticks; ++k) {
    const double xv = f.x_min + (f.x_max - f.x_min) * k / ticks;
    const double yv = f.y_min + (f.y_max - f.y_min) * k / ticks;
    os << "<text x=\"" << fixed(f.px(xv)) << "\" y=\"" << fixed(y0 + 18) << "\" text-anchor=\"middle\">"
       << tick_label(xv) << "</text>\n"
       << "<text x=\"" << fixed(x0 - 8) << "\" y=\"" << fixed(f.py(yv) + 4) << "\" text-anchor=\"end\">"
       << tick_label(yv) << "</text>\n";
  }
  os << "</g>\n"
     << "<text x=\"" << fixed((x0 + x1) / 2) << "\" y=\"" << spec.height - 12
     << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(spec.x_label) << "</text>\n"
     << "<text transform=\"translate(18 " << fixed((y0 + y1) / 2)
     << ") rotate(-90)\" text-anchor=\"middle\" font-size=\"13\">" << escape(spec.y_label) << "</text>\n";
}

}  // namespace

void write_line_plot(std::ostream& os, const PlotSpec& spec, const std::vector<Series>& series) {
  Frame f{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
          static_cast<double>(spec.width), static_cast<double>(spec.height)};
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) throw std::invalid_argument("svg series: x and y sizes differ");
    for (Eigen::Index k = 0; k < s.x.size(); ++k) {
      if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
      f.x_min = std::min(f.x_min, s.x[k]);
      f.x_max = std::max(f.x_max, s.x[k]);
      f.y_min = std::min(f.y_min, s.y[k]);
      f.y_max = std::max(f.y_max, s.y[k]);
    }
  }
  if (!std::isfinite(f.x_min)) f.x_min = f.x_max = f.y_min = f.y_max = 0.0;
  if (!(f.x_max > f.x_min)) pad_range(f.x_min, f.x_max);
  pad_range(f.y_min, f.y_max);

  header(os, spec);
  axes(os, spec, f);
  for (const auto& s : series) {
    const Eigen::Index n = s.x.size();
    const Eigen::Index stride = std::max<Eigen::Index>(1, (n + spec.max_points - 1) / spec.max_points);
    os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.2\"";
    if (s.dashed) os << " stroke-dasharray=\"6 4\"";
    os << " points=\"";
    bool first = true;
    for (Eigen::Index k = 0; k < n; k += stride) {
      if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
      if (!first) os << ' ';
      os << fixed(f.px(s.x[k])) << ',' << fixed(f.py(s.y[k]));
      first = false;
    }
    os << "\"/>\n";
  }
  // legend
  double ly = kTop + 16;
  for (const auto& s : series) {
    const double lx = spec.width - kRight - 150;
    os << "<line x1=\"" << fixed(lx) << "\" y1=\"" << fixed(ly - 4) << "\" x2=\"" << fixed(lx + 24) << "\" y2=\""
       << fixed(ly - 4) << "\" stroke=\"" << s.color << "\" stroke-width=\"2\""
       << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>\n"
       << "<text x=\"" << fixed(lx + 30) << "\" y=\"" << fixed(ly) << "\" font-size=\"12\">" << escape(s.label)
       << "</text>\n";
    ly += 18;
  }
  os << "</svg>\n";
}

void write_heatmap(std::ostream& os, const PlotSpec& spec, const Histogram2D& hist) {
  const auto& g = hist.grid;
  Frame f{g.s_min, g.s_max, g.i_min, g.i_max, static_cast<double>(spec.width), static_cast<double>(spec.height)};
  header(os, spec);
  const double peak = hist.mass.size() > 0 ? hist.mass.maxCoeff() : 0.0;
  const double cw = (g.s_max - g.s_min) / static_cast<double>(g.s_bins);
  const double ch = (g.i_max - g.i_min) / static_cast<double>(g.i_bins);
  os << "<g stroke=\"none\">\n";
  for (Eigen::Index a = 0; a < hist.mass.rows(); ++a) {
    for (Eigen::Index b = 0; b < hist.mass.cols(); ++b) {
      const double m = hist.mass(a, b);
      if (!(m > 0.0) || !(peak > 0.0)) continue;
      const double level = std::sqrt(m / peak);
      // white → dark blue
      const int r = static_cast<int>(std::lround(255.0 * (1.0 - 0.9 * level)));
      const int gg = static_cast<int>(std::lround(255.0 * (1.0 - 0.75 * level)));
      const int bl = static_cast<int>(std::lround(255.0 * (1.0 - 0.35 * level)));
      const double x0 = f.px(g.s_min + cw * static_cast<double>(a));
      const double x1 = f.px(g.s_min + cw * static_cast<double>(a + 1));
      const double y0 = f.py(g.i_min + ch * static_cast<double>(b + 1));
      const double y1 = f.py(g.i_min + ch * static_cast<double>(b));
      os << "<rect x=\"" << fixed(x0) << "\" y=\"" << fixed(y0) << "\" width=\"" << fixed(x1 - x0)
         << "\" height=\"" << fixed(y1 - y0) << "\" fill=\"rgb(" << r << ',' << gg << ',' << bl << ")\"/>\n";
    }
  }
  os << "</g>\n";
  axes(os, spec, f);
  os << "</svg>\n";
}

}  // namespace ssir::svg
