#pragma once

// Trace files and plots.
//
// CSV: header `t,x,x_d,x_e,xe_tilde,u`, one row per grid node, values in
// %.12g, LF line endings. SVG: standalone static line charts.

#include "fogpss/simkit.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace fogpss {

inline constexpr const char* kTraceHeader = "t,x,x_d,x_e,xe_tilde,u";

std::string format_trace_csv(const SimTrace& trace);
SimTrace parse_trace_csv(const std::string& text);

void write_trace_csv(const std::filesystem::path& path, const SimTrace& trace);
SimTrace read_trace_csv(const std::filesystem::path& path);

/// Rounds to 12 significant digits, i.e. the value a CSV round trip yields.
double round_to_csv(double value);

struct PlotSeries {
  std::string label;
  std::vector<double> y;
};

struct LinePlot {
  std::string title;
  std::string x_label = "t [s]";
  std::string y_label;
  std::vector<double> x;
  std::vector<PlotSeries> series;
  /// Horizontal dashed guides, e.g. +/- a bound radius.
  std::vector<double> guides;
};

std::string render_svg(const LinePlot& plot);
void write_svg(const std::filesystem::path& path, const LinePlot& plot);

/// Writes text with LF line endings, creating parent directories.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace fogpss
