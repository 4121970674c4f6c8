#include "advperr/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace advperr {

namespace {

constexpr int kWidth = 640;
constexpr int kHeight = 420;
constexpr int kMargin = 50;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

std::string svg_line_chart(const std::vector<ChartSeries>& series, const std::string& title,
                           const std::string& x_label, const std::string& y_label) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const ChartSeries& s : series) {
    for (const auto& [x, y] : s.points) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  if (!(xmin <= xmax)) {
    xmin = 0;
    xmax = 1;
    ymin = 0;
    ymax = 1;
  }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;

  auto px = [&](double x) { return kMargin + (x - xmin) / (xmax - xmin) * (kWidth - 2 * kMargin); };
  auto py = [&](double y) {
    return kHeight - kMargin - (y - ymin) / (ymax - ymin) * (kHeight - 2 * kMargin);
  };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
      << title << "</text>\n";
  // Axes.
  out << "<line x1=\"" << kMargin << "\" y1=\"" << kHeight - kMargin << "\" x2=\""
      << kWidth - kMargin << "\" y2=\"" << kHeight - kMargin << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << kMargin << "\" y1=\"" << kMargin << "\" x2=\"" << kMargin << "\" y2=\""
      << kHeight - kMargin << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 10
      << "\" text-anchor=\"middle\" font-size=\"12\">" << x_label << "</text>\n";
  out << "<text x=\"14\" y=\"" << kHeight / 2 << "\" text-anchor=\"middle\" font-size=\"12\" "
      << "transform=\"rotate(-90 14 " << kHeight / 2 << ")\">" << y_label << "</text>\n";
  // Tick labels at the extremes.
  out << "<text x=\"" << kMargin << "\" y=\"" << kHeight - kMargin + 16
      << "\" font-size=\"10\" text-anchor=\"middle\">" << fmt(xmin) << "</text>\n";
  out << "<text x=\"" << kWidth - kMargin << "\" y=\"" << kHeight - kMargin + 16
      << "\" font-size=\"10\" text-anchor=\"middle\">" << fmt(xmax) << "</text>\n";
  out << "<text x=\"" << kMargin - 6 << "\" y=\"" << kHeight - kMargin
      << "\" font-size=\"10\" text-anchor=\"end\">" << fmt(ymin) << "</text>\n";
  out << "<text x=\"" << kMargin - 6 << "\" y=\"" << kMargin + 4
      << "\" font-size=\"10\" text-anchor=\"end\">" << fmt(ymax) << "</text>\n";

  int ci = 0;
  for (const ChartSeries& s : series) {
    const char* color = kPalette[ci % 6];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : s.points) out << fmt(px(x)) << ',' << fmt(py(y)) << ' ';
    out << "\"/>\n";
    out << "<text x=\"" << kWidth - kMargin + 4 << "\" y=\"" << kMargin + 14 * ci
        << "\" font-size=\"10\" fill=\"" << color << "\">" << s.name << "</text>\n";
    ++ci;
  }
  out << "</svg>\n";
  return out.str();
}

std::string render_csv_chart(const std::string& csv_text, const std::string& title) {
  std::istringstream in(csv_text);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("render: empty csv");
  std::vector<std::string> headers;
  {
    std::istringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) headers.push_back(cell);
  }
  if (headers.size() < 2) throw std::runtime_error("render: need an x column and one series");
  std::vector<ChartSeries> series(headers.size() - 1);
  for (std::size_t i = 1; i < headers.size(); ++i) series[i - 1].name = headers[i];
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ls, cell, ',')) row.push_back(cell.empty() ? 0.0 : std::stod(cell));
    if (row.size() != headers.size()) continue;
    for (std::size_t i = 1; i < row.size(); ++i) series[i - 1].points.emplace_back(row[0], row[i]);
  }
  return svg_line_chart(series, title, headers[0], "");
}

namespace {

void emit_box(std::ostringstream& out, const OrientedBox& b, const char* fill, const char* stroke,
              double opacity) {
  const auto c = b.corners();
  out << "<polygon points=\"";
  for (const Vec2& p : c) out << fmt(p.x) << ',' << fmt(-p.y) << ' ';
  out << "\" fill=\"" << fill << "\" stroke=\"" << stroke << "\" stroke-width=\"0.15\" opacity=\""
      << opacity << "\"/>\n";
}

}  // namespace

std::string render_frame_svg(const Scenario& scenario, const Rollout& r, int frame) {
  if (frame < 0 || frame >= static_cast<int>(r.ego_trajectory.size()))
    throw std::out_of_range("render_frame_svg: frame out of range");
  const auto agents = generate_agent_states(scenario);

  // World bounds from the route and scripts.
  double xmin = 1e18, xmax = -1e18, ymin = 1e18, ymax = -1e18;
  auto grow = [&](const Vec2& p) {
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  };
  for (const Vec2& p : scenario.ego_route.route) grow(p);
  for (const auto& sc : scenario.agent_scripts)
    for (const Vec2& p : sc.waypoints) grow(p);
  const double pad = 12.0;
  xmin -= pad;
  xmax += pad;
  ymin -= pad;
  ymax += pad;

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"480\" height=\"480\" viewBox=\""
      << fmt(xmin) << ' ' << fmt(-ymax) << ' ' << fmt(xmax - xmin) << ' ' << fmt(ymax - ymin)
      << "\">\n<rect x=\"" << fmt(xmin) << "\" y=\"" << fmt(-ymax) << "\" width=\""
      << fmt(xmax - xmin) << "\" height=\"" << fmt(ymax - ymin) << "\" fill=\"#f4f4f4\"/>\n";

  for (const auto& lane : scenario.map) {
    out << "<polyline fill=\"none\" stroke=\"#bbbbbb\" stroke-width=\"0.3\" "
           "stroke-dasharray=\"1,1\" points=\"";
    for (const Vec2& p : lane) out << fmt(p.x) << ',' << fmt(-p.y) << ' ';
    out << "\"/>\n";
  }
  // Ego route.
  out << "<polyline fill=\"none\" stroke=\"#70b070\" stroke-width=\"0.25\" points=\"";
  for (const Vec2& p : scenario.ego_route.route) out << fmt(p.x) << ',' << fmt(-p.y) << ' ';
  out << "\"/>\n";

  for (const AgentState& a : agents[frame]) emit_box(out, a.box(), "#ffffff", "#333333", 1.0);
  for (const Detection& d : r.perceived.frames[frame])
    emit_box(out, OrientedBox{d.position, d.heading, d.length, d.width}, "none", "#2ca02c", 0.9);
  emit_box(out, r.ego_trajectory[frame].box(), "#d62728", "#7f0000", 1.0);

  out << "<text x=\"" << fmt(xmin + 2) << "\" y=\"" << fmt(-ymin - 2)
      << "\" font-size=\"3\">t=" << fmt(frame * scenario.dt)
      << "s  min_sep=" << fmt(r.frame_min_separation[frame]) << "</text>\n";
  out << "</svg>\n";
  return out.str();
}

}  // namespace advperr
