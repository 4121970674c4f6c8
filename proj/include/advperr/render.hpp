#pragma once

#include <string>
#include <vector>

#include "advperr/search.hpp"
#include "advperr/world.hpp"

namespace advperr {

struct ChartSeries {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

// Self-contained SVG line chart, one polyline per series.
std::string svg_line_chart(const std::vector<ChartSeries>& series, const std::string& title,
                           const std::string& x_label, const std::string& y_label);

// Generic CSV-to-chart: first column is x, every other column a polyline.
std::string render_csv_chart(const std::string& csv_text, const std::string& title);

// Top-down snapshot of one rollout frame: map lanes, ego box, ground-truth
// agents, perceived boxes.
std::string render_frame_svg(const Scenario& scenario, const Rollout& r, int frame);

}  // namespace advperr
