#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "plcmine/plant.hpp"

namespace plcmine {

struct PlotSeries {
  std::string name;
  const Trajectory* trajectory = nullptr;
};

/// Static SVG: tank level on top, then LLS, ULS and MLS lanes. Several series
/// are overlaid in different colours.
std::string trajectory_svg(const std::vector<PlotSeries>& series, const std::string& title,
                           double capacity = 100.0);
void write_trajectory_svg(const std::vector<PlotSeries>& series, const std::string& title,
                          const std::filesystem::path& path, double capacity = 100.0);

}  // namespace plcmine
