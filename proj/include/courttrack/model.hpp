#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "courttrack/errors.hpp"
#include "courttrack/geometry.hpp"

namespace courttrack {

/// Keypoint order is the 17-point COCO convention: nose, left/right eye,
/// left/right ear, left/right shoulder, left/right elbow, left/right wrist,
/// left/right hip, left/right knee, left/right ankle.
inline constexpr int kNumKeypoints = 17;

enum class Player { Near, Far };

std::string to_string(Player p);
Player player_from_string(const std::string& s);

struct BBox {
    double x = 0.0;  // left, px
    double y = 0.0;  // top, px
    double w = 0.0;  // > 0
    double h = 0.0;  // > 0

    friend bool operator==(const BBox&, const BBox&) = default;
};

/// Ground-contact estimate of a detection: bottom-center of its box. Only
/// this point transforms correctly under a ground-plane homography.
Point2 foot_point(const BBox& b);

struct Detection {
    BBox bbox;
    double score = 0.0;  // [0, 1]
    std::string class_label;
};

struct FrameDetections {
    std::int64_t frame_id = 0;
    std::vector<Detection> detections;
    int width = 0;   // px
    int height = 0;  // px
};

struct Keypoint3 {
    double x = 0.0, y = 0.0, z = 0.0;

    friend bool operator==(const Keypoint3&, const Keypoint3&) = default;
};

struct Pose3D {
    std::int64_t frame_id = 0;
    std::array<Keypoint3, kNumKeypoints> keypoints{};
    bool valid = true;
};

struct Keypoint2 {
    double x = 0.0, y = 0.0;
    double confidence = 0.0;  // [0, 1]
};

struct Pose2D {
    std::int64_t frame_id = 0;
    std::array<Keypoint2, kNumKeypoints> keypoints{};
};

struct PlayerPoses {
    std::vector<Pose3D> near;
    std::vector<Pose3D> far;
};

/// Loads a detections.jsonl stream (one frame object per line). Frames must
/// arrive strictly increasing by frame id; bboxes are clamped to the image
/// bounds on ingest. Throws ParseError, DuplicateFrame, NonMonotonicFrameIds.
std::vector<FrameDetections> load_detections(const std::string& path);

/// Loads a poses.jsonl stream into per-player sequences, enforcing the
/// 17-keypoint arity. Frame ids must be strictly increasing per player.
PlayerPoses load_poses(const std::string& path);

void save_detections(const std::string& path, const std::vector<FrameDetections>& frames);

struct PoseStream {
    Player player = Player::Near;
    std::vector<Pose3D> poses;
    /// Empty (everything "detected") or parallel to `poses`, each entry
    /// "detected" or "interpolated".
    std::vector<std::string> sources;
};

void save_poses(const std::string& path, const std::vector<PoseStream>& streams);

}  // namespace courttrack
