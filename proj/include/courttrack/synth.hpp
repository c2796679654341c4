#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "courttrack/geometry.hpp"
#include "courttrack/model.hpp"
#include "courttrack/pose.hpp"

namespace courttrack {

/// Parameters for the synthetic verification scene. Everything downstream is
/// a pure function of this record.
struct SceneConfig {
    std::uint64_t seed = 1;
    int n_frames = 300;
    std::vector<Point2> court_world = default_court_world();  // meters, 4 corners
    Homography camera_h = default_camera_homography();        // world -> camera
    int image_width = 852;
    int image_height = 472;
    double jitter_sigma = 0.0;          // px
    double miss_rate = 0.0;             // [0,1]
    double fp_rate = 0.0;               // [0,1]
    double pose_spike_rate = 0.0;       // [0,1]
    double pose_spike_magnitude = 1.0;  // model units
    double max_speed = 0.05;            // m/frame

    /// 20 ft x 44 ft court, meters: (0,0) (6.096,0) (6.096,13.411) (0,13.411).
    static std::vector<Point2> default_court_world();
    /// Plausible broadcast-style view of the default court in an 852x472 frame.
    static Homography default_camera_homography();
};

struct GroundTruth {
    /// Per-frame world positions, frame ids 0..n_frames-1, [0]=near [1]=far.
    std::vector<Point2> world_tracks[2];
    /// Clean pose sequences, [0]=near [1]=far.
    PoseSequence poses[2];
    /// Frames where a pose spike was injected, per player.
    std::set<std::int64_t> injected_outlier_frames[2];
};

struct Scene {
    SceneConfig config;
    GroundTruth truth;
    std::vector<FrameDetections> detections;
    std::vector<PoseStream> pose_streams;  // with spikes applied
};

Scene generate_scene(const SceneConfig& cfg);

/// Writes detections.jsonl, poses.jsonl, ground_truth.csv, calibration.txt,
/// court.txt and a scene_config.json echo into `dir`.
void write_scene(const std::string& dir, const Scene& scene);

SceneConfig load_scene_config(const std::string& path);
void save_scene_config(const std::string& path, const SceneConfig& cfg);

}  // namespace courttrack
