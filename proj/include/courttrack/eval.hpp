#pragma once

#include <string>
#include <vector>

#include "courttrack/tracker.hpp"

namespace courttrack {

struct ErrorReport {
    Player player = Player::Near;
    std::vector<std::pair<std::int64_t, double>> per_frame;  // (frame_id, error)
    double mean_px = 0.0;
    double mean_cm = 0.0;
    double max_px = 0.0;
};

enum class ComparePlane { Camera, World };

/// One ground-truth position stream, same shape as a Track but with only one
/// position per frame.
struct GroundTruthTrack {
    Player player = Player::Near;
    std::vector<std::pair<std::int64_t, Point2>> points;
};

/// Per-frame Euclidean distance between the estimated and ground-truth
/// positions over the common frame range. Frames missing from either side are
/// skipped. Throws NoOverlap when no frame is shared.
ErrorReport compare_trajectories(const Track& est, const GroundTruthTrack& gt,
                                 ComparePlane plane, double cm_per_px = 2.5);

/// Converts a pixel discrepancy to centimeters at the session's scale
/// (about 2.5 cm per pixel for the reference setup).
double px_to_cm(double err_px, double cm_per_px = 2.5);

/// Ground-truth CSV: `frame,player,x,y` (header optional).
std::pair<GroundTruthTrack, GroundTruthTrack> load_ground_truth_csv(const std::string& path);

std::string report_to_json(const std::vector<ErrorReport>& reports);

std::string report_to_table(const std::vector<ErrorReport>& reports);

/// Discrepancy-vs-frame curve as a static SVG.
std::string error_curve_svg(const std::vector<ErrorReport>& reports);

}  // namespace courttrack
