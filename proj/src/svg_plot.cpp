#include "plcmine/svg_plot.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>

#include "plcmine/errors.hpp"

namespace plcmine {

namespace {

constexpr double kWidth = 900.0;
constexpr double kLeft = 60.0;
constexpr double kRight = 20.0;
constexpr double kLevelTop = 40.0;
constexpr double kLevelHeight = 220.0;
constexpr double kLaneHeight = 50.0;
constexpr double kLaneGap = 20.0;
constexpr std::array<const char*, 4> kColours{"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '&') out += "&amp;";
    else if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else out += c;
  }
  return out;
}

}  // namespace

std::string trajectory_svg(const std::vector<PlotSeries>& series, const std::string& title,
                           double capacity) {
  double t_max = 0.0;
  for (const auto& s : series)
    if (s.trajectory && !s.trajectory->empty()) t_max = std::max(t_max, s.trajectory->back().time_s);
  if (t_max <= 0.0) t_max = 1.0;
  const double plot_w = kWidth - kLeft - kRight;
  const double lanes_top = kLevelTop + kLevelHeight + 2 * kLaneGap;
  const double height = lanes_top + 3 * (kLaneHeight + kLaneGap) + 30.0;
  auto x_of = [&](double t) { return kLeft + plot_w * t / t_max; };

  std::ostringstream svg;
  svg.setf(std::ios::fixed);
  svg.precision(2);
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kLeft << "\" y=\"20\" font-size=\"14\">" << escape(title) << "</text>\n";

  // Level panel
  svg << "<rect x=\"" << kLeft << "\" y=\"" << kLevelTop << "\" width=\"" << plot_w
      << "\" height=\"" << kLevelHeight << "\" fill=\"none\" stroke=\"#888\"/>\n";
  for (double v : {0.0, 10.0, 50.0, 90.0, capacity}) {
    const double y = kLevelTop + kLevelHeight * (1.0 - v / capacity);
    svg << "<line x1=\"" << kLeft << "\" x2=\"" << kLeft + plot_w << "\" y1=\"" << y << "\" y2=\""
        << y << "\" stroke=\"#ddd\"/>\n";
    svg << "<text x=\"" << kLeft - 8 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">" << v
        << "</text>\n";
  }
  svg << "<text x=\"10\" y=\"" << kLevelTop + kLevelHeight / 2 << "\">level</text>\n";

  const std::array<const char*, 3> lane_names{"LLS", "ULS", "MLS"};
  for (std::size_t lane = 0; lane < 3; ++lane) {
    const double top = lanes_top + static_cast<double>(lane) * (kLaneHeight + kLaneGap);
    svg << "<rect x=\"" << kLeft << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\""
        << kLaneHeight << "\" fill=\"none\" stroke=\"#888\"/>\n";
    svg << "<text x=\"10\" y=\"" << top + kLaneHeight / 2 + 4 << "\">" << lane_names[lane]
        << "</text>\n";
  }

  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto* traj = series[i].trajectory;
    if (!traj || traj->empty()) continue;
    const char* colour = kColours[i % kColours.size()];
    svg << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1\" points=\"";
    for (const auto& p : *traj)
      svg << x_of(p.time_s) << ',' << kLevelTop + kLevelHeight * (1.0 - p.level / capacity) << ' ';
    svg << "\"/>\n";
    for (std::size_t lane = 0; lane < 3; ++lane) {
      const double top = lanes_top + static_cast<double>(lane) * (kLaneHeight + kLaneGap);
      svg << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1\" points=\"";
      bool prev = false;
      bool first = true;
      for (const auto& p : *traj) {
        const bool v = lane == 0 ? p.sensors.lls : lane == 1 ? p.sensors.uls : p.sensors.mls;
        const double y = top + (v ? 5.0 : kLaneHeight - 5.0);
        if (!first && v != prev)
          svg << x_of(p.time_s) << ',' << top + (prev ? 5.0 : kLaneHeight - 5.0) << ' ';
        if (first || v != prev) svg << x_of(p.time_s) << ',' << y << ' ';
        prev = v;
        first = false;
      }
      const auto& last = traj->back();
      svg << x_of(last.time_s) << ',' << top + (prev ? 5.0 : kLaneHeight - 5.0);
      svg << "\"/>\n";
    }
    svg << "<text x=\"" << kLeft + 10 + 150.0 * static_cast<double>(i) << "\" y=\"" << height - 10
        << "\" fill=\"" << colour << "\">" << escape(series[i].name) << "</text>\n";
  }
  svg << "<text x=\"" << kLeft + plot_w << "\" y=\"" << height - 10
      << "\" text-anchor=\"end\">time [s] 0 .. " << t_max << "</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

void write_trajectory_svg(const std::vector<PlotSeries>& series, const std::string& title,
                          const std::filesystem::path& path, double capacity) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << trajectory_svg(series, title, capacity);
}

}  // namespace plcmine
