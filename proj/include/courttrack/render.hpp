#pragma once

#include <string>

#include "courttrack/tracker.hpp"

namespace courttrack {

/// Static top-view SVG: court outline, both world trajectories as polylines,
/// interpolated points marked with dashed circles.
std::string render_tracks_svg(const Track& near, const Track& far,
                              const std::vector<Point2>& court_world);

}  // namespace courttrack
