#include "lierec/svg_plot.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>

#include "lierec/error.hpp"

namespace lierec::plot {

namespace {

constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 150.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 55.0;

std::string num(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string coord(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string & s)
{
  std::string out;
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

struct Range
{
  double lo{std::numeric_limits<double>::infinity()};
  double hi{-std::numeric_limits<double>::infinity()};

  void add(double v)
  {
    if (!std::isfinite(v)) { return; }
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }

  void finish()
  {
    if (!(lo <= hi)) {
      lo = 0.0;
      hi = 1.0;
    }
    if (hi - lo < 1e-12) {
      const double pad = std::max(std::abs(lo) * 0.1, 0.5);
      lo -= pad;
      hi += pad;
    }
  }
};

// 1-2-5 tick step giving roughly `target` intervals.
double nice_step(double span, int target)
{
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double f = raw / mag;
  const double nice = f < 1.5 ? 1.0 : f < 3.5 ? 2.0 : f < 7.5 ? 5.0 : 10.0;
  return nice * mag;
}

}  // namespace

std::string palette(std::size_t i)
{
  static const char * colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
    "#e377c2", "#7f7f7f"};
  return colors[i % (sizeof colors / sizeof *colors)];
}

std::string render_svg(const Figure & fig)
{
  Range xr, yr;
  for (const auto & s : fig.series) {
    if (s.x.size() != s.y.size()) { throw DimensionError("plot series '" + s.label + "' has x/y length mismatch"); }
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (std::isfinite(s.x[i]) && std::isfinite(s.y[i])) {
        xr.add(s.x[i]);
        yr.add(s.y[i]);
      }
    }
  }
  if (fig.diagonal) {
    const double lo = std::min(xr.lo, yr.lo);
    const double hi = std::max(xr.hi, yr.hi);
    xr.lo = yr.lo = lo;
    xr.hi = yr.hi = hi;
  }
  xr.finish();
  yr.finish();

  const double pw = fig.width - kMarginLeft - kMarginRight;
  const double ph = fig.height - kMarginTop - kMarginBottom;
  auto sx = [&](double x) { return kMarginLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto sy = [&](double y) { return kMarginTop + ph - (y - yr.lo) / (yr.hi - yr.lo) * ph; };

  std::string o;
  o += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  o += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(fig.width) + "\" height=\""
     + num(fig.height) + "\" viewBox=\"0 0 " + num(fig.width) + " " + num(fig.height) + "\">\n";
  o += "<rect x=\"0\" y=\"0\" width=\"" + num(fig.width) + "\" height=\"" + num(fig.height)
     + "\" fill=\"white\"/>\n";
  o += "<text x=\"" + coord(kMarginLeft + pw / 2) + "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
     + escape(fig.title) + "</text>\n";

  // axes box
  o += "<rect x=\"" + coord(kMarginLeft) + "\" y=\"" + coord(kMarginTop) + "\" width=\"" + coord(pw)
     + "\" height=\"" + coord(ph) + "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";

  o += "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"black\">\n";
  const double xs = nice_step(xr.hi - xr.lo, 6);
  for (double t = std::ceil(xr.lo / xs) * xs; t <= xr.hi + 1e-9 * xs; t += xs) {
    const double px = sx(t);
    o += "<line x1=\"" + coord(px) + "\" y1=\"" + coord(kMarginTop + ph) + "\" x2=\"" + coord(px)
       + "\" y2=\"" + coord(kMarginTop + ph + 5) + "\" stroke=\"black\"/>\n";
    o += "<text x=\"" + coord(px) + "\" y=\"" + coord(kMarginTop + ph + 18)
       + "\" text-anchor=\"middle\">" + num(std::abs(t) < 1e-12 * xs ? 0.0 : t) + "</text>\n";
  }
  const double ys = nice_step(yr.hi - yr.lo, 6);
  for (double t = std::ceil(yr.lo / ys) * ys; t <= yr.hi + 1e-9 * ys; t += ys) {
    const double py = sy(t);
    o += "<line x1=\"" + coord(kMarginLeft - 5) + "\" y1=\"" + coord(py) + "\" x2=\""
       + coord(kMarginLeft) + "\" y2=\"" + coord(py) + "\" stroke=\"black\"/>\n";
    o += "<text x=\"" + coord(kMarginLeft - 8) + "\" y=\"" + coord(py + 4)
       + "\" text-anchor=\"end\">" + num(std::abs(t) < 1e-12 * ys ? 0.0 : t) + "</text>\n";
  }
  o += "<text x=\"" + coord(kMarginLeft + pw / 2) + "\" y=\"" + coord(fig.height - 12)
     + "\" text-anchor=\"middle\" font-size=\"13\">" + escape(fig.x_label) + "</text>\n";
  o += "<text x=\"16\" y=\"" + coord(kMarginTop + ph / 2) + "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
     + coord(kMarginTop + ph / 2) + ")\">" + escape(fig.y_label) + "</text>\n";
  o += "</g>\n";

  if (fig.diagonal) {
    o += "<line x1=\"" + coord(sx(xr.lo)) + "\" y1=\"" + coord(sy(xr.lo)) + "\" x2=\""
       + coord(sx(xr.hi)) + "\" y2=\"" + coord(sy(xr.hi))
       + "\" stroke=\"#999999\" stroke-dasharray=\"4 4\"/>\n";
  }

  for (const auto & s : fig.series) {
    if (s.line && !s.x.empty()) {
      o += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.5\"";
      if (s.dashed) { o += " stroke-dasharray=\"6 3\""; }
      o += " points=\"";
      bool first = true;
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) { continue; }
        if (!first) { o += ' '; }
        o += coord(sx(s.x[i])) + "," + coord(sy(s.y[i]));
        first = false;
      }
      o += "\"/>\n";
    }
    if (s.markers) {
      o += "<g fill=\"" + s.color + "\" fill-opacity=\"0.7\">\n";
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) { continue; }
        o += "<circle cx=\"" + coord(sx(s.x[i])) + "\" cy=\"" + coord(sy(s.y[i])) + "\" r=\"2.5\"/>\n";
      }
      o += "</g>\n";
    }
  }

  // legend
  o += "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  double ly = kMarginTop + 10;
  const double lx = kMarginLeft + pw + 12;
  for (const auto & s : fig.series) {
    if (s.label.empty()) { continue; }
    o += "<line x1=\"" + coord(lx) + "\" y1=\"" + coord(ly) + "\" x2=\"" + coord(lx + 18) + "\" y2=\""
       + coord(ly) + "\" stroke=\"" + s.color + "\" stroke-width=\"2\"";
    if (s.dashed) { o += " stroke-dasharray=\"6 3\""; }
    o += "/>\n";
    o += "<text x=\"" + coord(lx + 24) + "\" y=\"" + coord(ly + 4) + "\">" + escape(s.label) + "</text>\n";
    ly += 16;
  }
  o += "</g>\n</svg>\n";
  return o;
}

std::string render_csv(const Figure & fig)
{
  std::string o = "series,x,y\n";
  auto shortest = [](double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
  };
  for (const auto & s : fig.series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      o += s.label + "," + shortest(s.x[i]) + "," + shortest(s.y[i]) + "\n";
    }
  }
  return o;
}

}  // namespace lierec::plot
