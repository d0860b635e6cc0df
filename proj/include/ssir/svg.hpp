#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ssir/analysis.hpp"

namespace ssir::svg {

struct Series {
  std::string label;
  std::string color;
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  bool dashed = false;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  /// Written verbatim into the leading <!-- provenance: ... --> comment.
  std::string provenance;
  int width = 720;
  int height = 440;
  /// Series longer than this are thinned by a fixed stride.
  Eigen::Index max_points = 2500;
};

/// Standalone SVG line chart. Output depends only on the inputs (no
/// timestamps), so identical data gives identical bytes.
void write_line_plot(std::ostream& os, const PlotSpec& spec, const std::vector<Series>& series);

/// Cell map of a 2-D histogram, S on the horizontal axis, I vertical.
void write_heatmap(std::ostream& os, const PlotSpec& spec, const Histogram2D& hist);

}  // namespace ssir::svg
