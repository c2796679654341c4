#pragma once

#include <set>
#include <vector>

#include "courttrack/model.hpp"

namespace courttrack {

struct CropRegion {
    BBox bbox;
    bool clamped = false;
};

struct PoseSequence {
    Player player = Player::Near;
    std::vector<Pose3D> poses;  // ordered by frame_id
    std::set<std::int64_t> outliers;
    /// Frames whose pose was replaced by interpolation during repair.
    std::set<std::int64_t> repaired;
};

struct FeatureVector {
    std::array<double, 3 * kNumKeypoints> values{};
};

/// Expands a detection box by `margin` pixels on all four sides, then clamps
/// to the image. The clamped flag records whether clamping occurred.
CropRegion expand_bbox(const BBox& b, double margin, int width, int height);

/// Flags outlier frames: invalid poses, plus frames where some keypoint moves
/// more than vmax units per frame relative to BOTH the previous and the next
/// clean neighbor. A sustained fast motion in one direction only trips one
/// side of the test and is not flagged. Throws AllFramesOutliers when fewer
/// than two clean keyframes remain.
std::set<std::int64_t> detect_outlier_frames(const PoseSequence& seq, double vmax);

/// Repairs every outlier frame by recursive keyframe inbetweening: the frame
/// nearest the midpoint of a gap is filled first (time-weighted linear
/// interpolation between the gap's keyframes), promoted to a keyframe, and
/// the two halves are filled recursively. Outlier frames at the sequence
/// boundary are trimmed. Unflagged frames are never modified.
PoseSequence inbetween(const PoseSequence& seq, const std::set<std::int64_t>& outliers);

FeatureVector pose_features(const Pose3D& p);

Pose3D pose_from_features(std::int64_t frame_id, const FeatureVector& f);

struct PoseConfig {
    double vmax = 0.15;    // model units per frame
    double margin = 30.0;  // px
};

void save_features_csv(const std::string& path, const std::vector<Pose3D>& poses);

}  // namespace courttrack
