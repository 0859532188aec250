#pragma once

#include <string>
#include <vector>

namespace lierec::plot {

struct Series
{
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color{"#1f77b4"};
  bool line{true};      ///< draw a polyline through the points
  bool markers{false};  ///< draw a circle at every point
  bool dashed{false};
};

struct Figure
{
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  bool diagonal{false};  ///< dashed y = x reference line
  double width{640.0};
  double height{480.0};
};

/// Standalone SVG document: axes, ticks, labels, one <polyline> per line series.
std::string render_svg(const Figure & fig);

/// Long-format backing data: header "series,x,y", one row per point, shortest round-trip decimals.
std::string render_csv(const Figure & fig);

/// Categorical color for series index i.
std::string palette(std::size_t i);

}  // namespace lierec::plot
