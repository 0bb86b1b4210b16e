#pragma once

// Static SVG line charts for sweep, curve and consistency CSV files.

#include <filesystem>
#include <string>
#include <vector>

namespace shmm {

struct ChartPoint {
  double x = 0.0;
  double y = 0.0;
  double y_min = 0.0;  // whisker extent; equal to y when there is no spread
  double y_max = 0.0;
};

struct ChartSeries {
  std::string name;
  std::vector<ChartPoint> points;
};

struct LineChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool whiskers = false;
  std::vector<ChartSeries> series;
};

/// Deterministic SVG document for the chart.
std::string render_svg(const LineChart& chart);

/// Reads a metrics, likelihood-curve or consistency CSV and writes one SVG per
/// metric into output_dir. Metrics files produce `<experiment_id>_<metric>.svg`;
/// the other two kinds use the CSV file stem. Returns the written paths.
std::vector<std::filesystem::path> render_charts(const std::filesystem::path& csv_path,
                                                 const std::filesystem::path& output_dir);

}  // namespace shmm
