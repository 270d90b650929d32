#pragma once

// Static SVG figures. Output bytes depend only on the input data.

#include <optional>
#include <string>
#include <vector>

#include "oemsync/analysis.hpp"
#include "oemsync/records.hpp"

namespace oemsync {

enum class FigureKind { timeseries_sx, timeseries_q, bloch_projection, phase_portrait, phase_vs_phase, ensemble_decay };

FigureKind parse_figure_kind(const std::string& s);
std::string to_string(FigureKind k);

struct FigureInput {
  ObservableSeries obs;
  std::vector<Branch> labels;  // optional; colors points by branch
  std::optional<PhaseRecord> phases;
  std::optional<ObservableSeries> std_error;
};

struct PlotSeries {
  enum class Style { points, line, band } style = Style::points;
  std::vector<double> x, y;
  std::vector<double> y_low;  // band only
  std::vector<std::string> colors;  // per point, or a single entry
};

struct Panel {
  std::string title, x_label, y_label;
  double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;
  std::vector<PlotSeries> series;
};

struct Figure {
  std::string title;
  std::vector<Panel> panels;  // laid out in a grid, two per row
};

/// Throws std::invalid_argument when the input lacks a series the kind needs.
Figure build_figure(FigureKind kind, const FigureInput& in);
std::string to_svg(const Figure& fig);
void emit_figure(FigureKind kind, const FigureInput& in, const std::string& path);

}  // namespace oemsync
