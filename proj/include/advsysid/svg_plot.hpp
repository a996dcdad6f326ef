#pragma once

#include <string>
#include <utility>
#include <vector>

#include "advsysid/experiments.hpp"

namespace advsysid {

struct PlotSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;  // (x, y); non-positive or non-finite y is skipped
};

struct PlotSpec {
  std::string title;
  std::string x_label = "T";
  std::string y_label = "Frobenius error";
  std::vector<PlotSeries> series;
};

/// Standalone SVG document with a log-scale y axis, one polyline per series
/// and a legend.
std::string render_log_plot(const PlotSpec& spec);

/// Median error across trials at each checkpoint, one series per estimator.
PlotSpec error_plot(const RecoveryReport& report, const std::string& title);

}  // namespace advsysid
