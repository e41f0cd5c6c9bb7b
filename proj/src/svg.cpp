#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "eccmark/io.hpp"

namespace eccmark::io {

namespace {

constexpr const char* kBlue = "#1f5fbf";
constexpr const char* kRed = "#c0392b";

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string label(double v) {
  char buf[32];
  if (v != 0.0 && (std::abs(v) >= 1e4 || std::abs(v) < 1e-2)) {
    std::snprintf(buf, sizeof buf, "%.2g", v);
  } else {
    std::snprintf(buf, sizeof buf, "%.3g", v);
  }
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
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

struct Rgb {
  double r, g, b;
};

std::string hex(Rgb c) {
  char buf[8];
  auto byte = [](double v) { return static_cast<int>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)); };
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", byte(c.r), byte(c.g), byte(c.b));
  return buf;
}

Rgb mix(Rgb a, Rgb b, double t) { return {a.r + (b.r - a.r) * t, a.g + (b.g - a.g) * t, a.b + (b.b - a.b) * t}; }

// Sequential palette for marks, t in [0, 1].
std::string sequential(double t) {
  constexpr std::array<Rgb, 4> stops{{{0.27, 0.00, 0.33}, {0.23, 0.32, 0.55}, {0.13, 0.57, 0.55}, {0.99, 0.91, 0.14}}};
  t = std::clamp(t, 0.0, 1.0) * static_cast<double>(stops.size() - 1);
  const auto k = std::min(static_cast<std::size_t>(t), stops.size() - 2);
  return hex(mix(stops[k], stops[k + 1], t - static_cast<double>(k)));
}

// Diverging palette for Z-scores, blue below zero and red above, saturating at |z| = 3.
std::string diverging(double z) {
  const double t = std::clamp(z / 3.0, -1.0, 1.0);
  const Rgb white{0.97, 0.97, 0.97};
  return t < 0 ? hex(mix(white, {0.13, 0.40, 0.67}, -t)) : hex(mix(white, {0.70, 0.09, 0.17}, t));
}

class Svg {
 public:
  Svg(double width, double height) : width_(width), height_(height) {}

  void raw(const std::string& s) { body_ << s << '\n'; }

  void text(double x, double y, const std::string& s, int size = 12, const char* anchor = "start") {
    body_ << "<text x=\"" << px(x) << "\" y=\"" << px(y) << "\" font-size=\"" << size << "\" text-anchor=\""
          << anchor << "\">" << escape(s) << "</text>\n";
  }

  void rect(double x, double y, double w, double h, const std::string& stroke, const std::string& fill) {
    body_ << "<rect x=\"" << px(x) << "\" y=\"" << px(y) << "\" width=\"" << px(w) << "\" height=\"" << px(h)
          << "\" stroke=\"" << stroke << "\" fill=\"" << fill << "\"/>\n";
  }

  void circle(double x, double y, double r, const std::string& fill) {
    body_ << "<circle cx=\"" << px(x) << "\" cy=\"" << px(y) << "\" r=\"" << px(r) << "\" fill=\"" << fill
          << "\" stroke=\"#333\" stroke-width=\"0.4\"/>\n";
  }

  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& color, double width,
                bool dashed) {
    body_ << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << px(width) << "\"";
    if (dashed) body_ << " stroke-dasharray=\"5,3\"";
    body_ << " points=\"";
    for (const auto& [x, y] : pts) body_ << px(x) << ',' << px(y) << ' ';
    body_ << "\"/>\n";
  }

  void polygon(const std::vector<std::pair<double, double>>& pts, const std::string& color, double opacity) {
    body_ << "<polygon fill=\"" << color << "\" fill-opacity=\"" << px(opacity) << "\" stroke=\"none\" points=\"";
    for (const auto& [x, y] : pts) body_ << px(x) << ',' << px(y) << ' ';
    body_ << "\"/>\n";
  }

  std::string str() const {
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px(width_) << "\" height=\"" << px(height_)
        << "\" viewBox=\"0 0 " << px(width_) << ' ' << px(height_) << "\" font-family=\"sans-serif\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << body_.str() << "</svg>\n";
    return out.str();
  }

 private:
  double width_, height_;
  std::ostringstream body_;
};

// Data-to-pixel mapping for one plotting area.
struct Frame {
  double left, top, width, height;
  double x0, x1, y0, y1;

  double sx(double x) const { return left + (x - x0) / (x1 - x0) * width; }
  double sy(double y) const { return top + height - (y - y0) / (y1 - y0) * height; }

  void draw(Svg& svg, const std::string& title, const std::string& xlabel, const std::string& ylabel) const {
    svg.rect(left, top, width, height, "#444", "none");
    svg.text(left + width / 2, top - 8, title, 13, "middle");
    svg.text(left + width / 2, top + height + 30, xlabel, 11, "middle");
    svg.text(left - 34, top + height / 2, ylabel, 11, "middle");
    svg.text(left, top + height + 14, label(x0), 10, "start");
    svg.text(left + width, top + height + 14, label(x1), 10, "end");
    svg.text(left - 4, top + height, label(y0), 10, "end");
    svg.text(left - 4, top + 10, label(y1), 10, "end");
  }
};

Frame fit(double left, double top, double width, double height, double x0, double x1, double y0, double y1) {
  if (!(x1 > x0)) x1 = x0 + 1.0;
  if (!(y1 > y0)) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  const double pad = 0.04 * (y1 - y0);
  return {left, top, width, height, x0, x1, y0 - pad, y1 + pad};
}

Frame window_frame(const Window& w, double left, double top, double size) {
  const double span = std::max(w.x_max() - w.x_min(), w.y_max() - w.y_min());
  const double pw = size * (w.x_max() - w.x_min()) / span;
  const double ph = size * (w.y_max() - w.y_min()) / span;
  return {left, top, pw, ph, w.x_min(), w.x_max(), w.y_min(), w.y_max()};
}

void envelope_panel(Svg& svg, const Frame& f, const EnvelopeReport& r, const char* color, bool dashed) {
  std::vector<std::pair<double, double>> band;
  for (std::size_t t = 0; t < r.grid.size(); ++t) band.emplace_back(f.sx(r.grid[t]), f.sy(r.upper[t]));
  for (std::size_t t = r.grid.size(); t-- > 0;) band.emplace_back(f.sx(r.grid[t]), f.sy(r.lower[t]));
  svg.polygon(band, color, 0.22);
  std::vector<std::pair<double, double>> obs;
  for (std::size_t t = 0; t < r.grid.size(); ++t) obs.emplace_back(f.sx(r.grid[t]), f.sy(r.observed[t]));
  svg.polyline(obs, color, 1.8, dashed);
  const double xc = f.sx(r.epsilon_crit);
  svg.polyline({{xc, f.top}, {xc, f.top + f.height}}, "#777", 0.8, true);
  svg.text(f.left + f.width - 4, f.top + 14, "p = " + label(r.p_value), 11, "end");
}

Frame report_frame(const EnvelopeReport& r, double left, double top, double width, double height) {
  double lo = 0.0;
  double hi = 0.0;
  for (std::size_t t = 0; t < r.grid.size(); ++t) {
    lo = std::min({lo, r.lower[t], static_cast<double>(r.observed[t])});
    hi = std::max({hi, r.upper[t], static_cast<double>(r.observed[t])});
  }
  return fit(left, top, width, height, r.grid.front(), r.grid.back(), lo, hi);
}

}  // namespace

std::string scenario_svg(const MarkedPointPattern& pattern, const EnvelopeReport* csr, const EnvelopeReport* marked,
                         const ZScoreMap* z, const std::string& title) {
  const double width = 900;
  const double row = 330;
  Svg svg(width, 40 + 3 * row);
  svg.text(width / 2, 24, title, 16, "middle");

  // Row 1: locations coloured by mark.
  {
    const Frame f = window_frame(pattern.window(), width / 2 - 140, 70, 260);
    f.draw(svg, "Marked pattern", "x", "y");
    const auto [lo, hi] = std::minmax_element(pattern.marks().begin(), pattern.marks().end());
    const double span = pattern.size() ? *hi - *lo : 0.0;
    for (std::size_t i = 0; i < pattern.size(); ++i) {
      const Point& p = pattern.points()[i];
      const double t = span > 0 ? (pattern.marks()[i] - *lo) / span : 0.5;
      svg.circle(f.sx(p.x), f.sy(p.y), 4.0, sequential(t));
    }
    if (pattern.size()) {
      svg.text(f.left + f.width + 16, f.top + 12, "mark " + label(*lo) + " to " + label(*hi), 11);
      for (int k = 0; k <= 10; ++k) svg.rect(f.left + f.width + 16 + 8 * k, f.top + 20, 8, 10, "none", sequential(k / 10.0));
    }
  }

  // Row 2: ECCs against their envelopes.
  {
    const double top = 40 + row + 30;
    const double panel_w = 340;
    const double panel_h = 240;
    if (csr) {
      const Frame f = report_frame(*csr, 90, top, panel_w, panel_h);
      f.draw(svg, "Unmarked ECC, CSR envelope", "epsilon", "chi");
      envelope_panel(svg, f, *csr, kBlue, true);
    }
    if (marked) {
      const Frame f = report_frame(*marked, 90 + panel_w + 100, top, panel_w, panel_h);
      f.draw(svg, "Mark-weighted ECC, random-labeling envelope", "epsilon", "chi");
      envelope_panel(svg, f, *marked, kRed, false);
    }
  }

  // Row 3: local Z-scores.
  if (z && z->scores.size() == pattern.size()) {
    const Frame f = window_frame(pattern.window(), width / 2 - 140, 40 + 2 * row + 30, 260);
    f.draw(svg, "Z-scores at epsilon_crit = " + label(z->epsilon_crit), "x", "y");
    for (std::size_t i = 0; i < pattern.size(); ++i) {
      const Point& p = pattern.points()[i];
      svg.circle(f.sx(p.x), f.sy(p.y), 4.0, diverging(z->scores[i]));
    }
    svg.text(f.left + f.width + 16, f.top + 12, "Z from -3 to 3", 11);
    for (int k = 0; k <= 12; ++k) svg.rect(f.left + f.width + 16 + 8 * k, f.top + 20, 8, 10, "none", diverging(-3.0 + k * 0.5));
  }
  return svg.str();
}

std::string bands_svg(const std::vector<BandPanel>& panels, std::size_t columns) {
  columns = std::max<std::size_t>(columns, 1);
  const std::size_t rows = (panels.size() + columns - 1) / columns;
  const double cell_w = 320;
  const double cell_h = 270;
  Svg svg(columns * cell_w + 20, rows * cell_h + 60);
  svg.text(30, 24, "Unmarked (blue, dashed) and mark-weighted (red, solid) ECC bands; x in units of each grid's end",
           12);

  for (std::size_t k = 0; k < panels.size(); ++k) {
    const auto& p = panels[k];
    const double left = 70 + static_cast<double>(k % columns) * cell_w;
    const double top = 70 + static_cast<double>(k / columns) * cell_h;
    double lo = 0.0;
    double hi = 0.0;
    for (const Band* b : {&p.bands.plain, &p.bands.marked}) {
      for (double v : b->lo) lo = std::min(lo, v);
      for (double v : b->hi) hi = std::max(hi, v);
    }
    const Frame f = fit(left, top, cell_w - 100, cell_h - 90, 0.0, 1.0, lo, hi);
    f.draw(svg, p.title, "epsilon / epsilon_max", "chi");

    auto draw = [&](const Band& b, const char* color, bool dashed) {
      if (b.grid.empty()) return;
      const double end = b.grid.back() > 0 ? b.grid.back() : 1.0;
      std::vector<std::pair<double, double>> band;
      std::vector<std::pair<double, double>> med;
      for (std::size_t t = 0; t < b.grid.size(); ++t) {
        band.emplace_back(f.sx(b.grid[t] / end), f.sy(b.hi[t]));
        med.emplace_back(f.sx(b.grid[t] / end), f.sy(b.median[t]));
      }
      for (std::size_t t = b.grid.size(); t-- > 0;) band.emplace_back(f.sx(b.grid[t] / end), f.sy(b.lo[t]));
      svg.polygon(band, color, 0.2);
      svg.polyline(med, color, 1.6, dashed);
    };
    draw(p.bands.plain, kBlue, true);
    draw(p.bands.marked, kRed, false);
    if (!p.bands.plain.grid.empty() && !p.bands.marked.grid.empty()) {
      svg.text(f.left + f.width - 4, f.top + 14, "plain end " + label(p.bands.plain.grid.back()), 9, "end");
      svg.text(f.left + f.width - 4, f.top + 26, "marked end " + label(p.bands.marked.grid.back()), 9, "end");
    }
  }
  return svg.str();
}

}  // namespace eccmark::io
