#include "denjoy/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace denjoy::cli::svg {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void settle() {
    if (!(lo <= hi)) {
      lo = 0.0;
      hi = 1.0;
    }
    if (hi - lo < 1e-300) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
};

}  // namespace

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
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

std::string LinePlot::render(int width, int height) const {
  const double left = 70, right = 20, top = 40, bottom = 50;
  const double pw = width - left - right;
  const double ph = height - top - bottom;
  auto tx = [&](double v) { return log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return log_y ? std::log10(v) : v; };

  Range rx, ry;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if ((log_x && s.x[i] <= 0) || (log_y && s.y[i] <= 0)) continue;
      rx.add(tx(s.x[i]));
      ry.add(ty(s.y[i]));
    }
  }
  rx.settle();
  ry.settle();
  auto px = [&](double v) { return left + (tx(v) - rx.lo) / (rx.hi - rx.lo) * pw; };
  auto py = [&](double v) { return top + ph - (ty(v) - ry.lo) / (ry.hi - ry.lo) * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
     << xml_escape(title) << "</text>\n";
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"#333\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double fx = rx.lo + (rx.hi - rx.lo) * t / 4.0;
    const double fy = ry.lo + (ry.hi - ry.lo) * t / 4.0;
    const double gx = left + pw * t / 4.0;
    const double gy = top + ph - ph * t / 4.0;
    os << "<text x=\"" << num(gx) << "\" y=\"" << num(top + ph + 16) << "\" text-anchor=\"middle\">"
       << num(log_x ? std::pow(10.0, fx) : fx) << "</text>\n";
    os << "<text x=\"" << num(left - 6) << "\" y=\"" << num(gy + 4) << "\" text-anchor=\"end\">"
       << num(log_y ? std::pow(10.0, fy) : fy) << "</text>\n";
  }
  os << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << height - 12 << "\" text-anchor=\"middle\">"
     << xml_escape(x_label) << (log_x ? " (log)" : "") << "</text>\n";
  os << "<text transform=\"translate(16," << num(top + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
     << xml_escape(y_label) << (log_y ? " (log)" : "") << "</text>\n";

  int legend_row = 0;
  for (const auto& s : series) {
    std::ostringstream pts;
    const std::size_t n = std::min(s.x.size(), s.y.size());
    for (std::size_t i = 0; i < n; ++i) {
      if ((log_x && s.x[i] <= 0) || (log_y && s.y[i] <= 0)) continue;
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      pts << num(px(s.x[i])) << "," << num(py(s.y[i])) << " ";
      if (s.markers) {
        os << "<circle cx=\"" << num(px(s.x[i])) << "\" cy=\"" << num(py(s.y[i]))
           << "\" r=\"2\" fill=\"" << s.color << "\"/>\n";
      }
    }
    if (!s.markers) {
      os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\""
         << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << " points=\"" << pts.str() << "\"/>\n";
    }
    const double ly = top + 14 + 16 * legend_row++;
    os << "<line x1=\"" << num(left + 10) << "\" y1=\"" << num(ly - 4) << "\" x2=\"" << num(left + 30)
       << "\" y2=\"" << num(ly - 4) << "\" stroke=\"" << s.color << "\" stroke-width=\"2\""
       << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << "/>\n";
    os << "<text x=\"" << num(left + 36) << "\" y=\"" << num(ly) << "\">" << xml_escape(s.label)
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string circle_sketch(const std::string& title, const std::vector<Circle>& circles,
                          const std::vector<Marker>& markers, int size) {
  Range rx, ry;
  for (const auto& c : circles) {
    rx.add(c.cx - c.r);
    rx.add(c.cx + c.r);
    ry.add(c.cy - c.r);
    ry.add(c.cy + c.r);
  }
  for (const auto& m : markers) {
    rx.add(m.x);
    ry.add(m.y);
  }
  rx.settle();
  ry.settle();
  const double span = 1.1 * std::max(rx.hi - rx.lo, ry.hi - ry.lo);
  const double mx = 0.5 * (rx.lo + rx.hi);
  const double my = 0.5 * (ry.lo + ry.hi);
  const double margin = 40;
  const double scale = (size - 2 * margin) / span;
  auto px = [&](double x) { return margin + (x - mx + span / 2) * scale; };
  auto py = [&](double y) { return size - margin - (y - my + span / 2) * scale; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << size / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
     << xml_escape(title) << "</text>\n";
  int row = 0;
  for (const auto& c : circles) {
    os << "<circle cx=\"" << num(px(c.cx)) << "\" cy=\"" << num(py(c.cy)) << "\" r=\""
       << num(c.r * scale) << "\" fill=\"none\" stroke=\"" << c.color << "\" stroke-width=\"1.5\""
       << (c.dashed ? " stroke-dasharray=\"6,4\"" : "") << "/>\n";
    if (!c.label.empty()) {
      os << "<text x=\"10\" y=\"" << size - 10 - 16 * row++ << "\" fill=\"" << c.color << "\">"
         << xml_escape(c.label) << "</text>\n";
    }
  }
  for (const auto& m : markers) {
    os << "<circle cx=\"" << num(px(m.x)) << "\" cy=\"" << num(py(m.y)) << "\" r=\"3\" fill=\""
       << m.color << "\"/>\n";
    if (!m.label.empty()) {
      os << "<text x=\"" << num(px(m.x) + 6) << "\" y=\"" << num(py(m.y) - 6) << "\" fill=\"" << m.color
         << "\">" << xml_escape(m.label) << "</text>\n";
    }
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace denjoy::cli::svg
