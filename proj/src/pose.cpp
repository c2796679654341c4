#include "courttrack/pose.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace courttrack {

namespace {

double keypoint_dist(const Keypoint3& a, const Keypoint3& b) {
    return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) +
                     (a.z - b.z) * (a.z - b.z));
}

// True when some keypoint of b moved more than vmax * dt away from a.
bool improbable_step(const Pose3D& a, const Pose3D& b, double vmax) {
    double dt = static_cast<double>(std::abs(b.frame_id - a.frame_id));
    for (int k = 0; k < kNumKeypoints; ++k) {
        if (keypoint_dist(a.keypoints[k], b.keypoints[k]) > vmax * dt) return true;
    }
    return false;
}

Pose3D lerp_pose(const Pose3D& a, const Pose3D& b, std::int64_t frame_id) {
    double t = static_cast<double>(frame_id - a.frame_id) /
               static_cast<double>(b.frame_id - a.frame_id);
    Pose3D out;
    out.frame_id = frame_id;
    out.valid = true;
    for (int k = 0; k < kNumKeypoints; ++k) {
        out.keypoints[k] = {a.keypoints[k].x + t * (b.keypoints[k].x - a.keypoints[k].x),
                            a.keypoints[k].y + t * (b.keypoints[k].y - a.keypoints[k].y),
                            a.keypoints[k].z + t * (b.keypoints[k].z - a.keypoints[k].z)};
    }
    return out;
}

}  // namespace

CropRegion expand_bbox(const BBox& b, double margin, int width, int height) {
    if (margin < 0.0) throw InvalidConfig("margin must be nonnegative");
    double x0 = b.x - margin;
    double y0 = b.y - margin;
    double x1 = b.x + b.w + margin;
    double y1 = b.y + b.h + margin;
    CropRegion out;
    double cx0 = std::clamp(x0, 0.0, static_cast<double>(width));
    double cy0 = std::clamp(y0, 0.0, static_cast<double>(height));
    double cx1 = std::clamp(x1, 0.0, static_cast<double>(width));
    double cy1 = std::clamp(y1, 0.0, static_cast<double>(height));
    out.clamped = cx0 != x0 || cy0 != y0 || cx1 != x1 || cy1 != y1;
    out.bbox = BBox{cx0, cy0, cx1 - cx0, cy1 - cy0};
    return out;
}

std::set<std::int64_t> detect_outlier_frames(const PoseSequence& seq, double vmax) {
    if (vmax <= 0.0) throw InvalidConfig("vmax must be positive");
    std::set<std::int64_t> flagged;
    const auto& poses = seq.poses;

    // Invalid poses are outliers outright and never serve as neighbors.
    std::vector<size_t> valid_idx;
    for (size_t i = 0; i < poses.size(); ++i) {
        if (poses[i].valid) {
            valid_idx.push_back(i);
        } else {
            flagged.insert(poses[i].frame_id);
        }
    }

    // Left-to-right scan: `prev` is the last frame accepted as clean; a frame
    // is flagged only when the jump is improbable on both sides.
    size_t clean = 0;
    const Pose3D* prev = nullptr;
    for (size_t vi = 0; vi < valid_idx.size(); ++vi) {
        const Pose3D& cur = poses[valid_idx[vi]];
        if (prev == nullptr) {
            prev = &cur;
            ++clean;
            continue;
        }
        bool spike = false;
        if (improbable_step(*prev, cur, vmax) && vi + 1 < valid_idx.size()) {
            const Pose3D& next = poses[valid_idx[vi + 1]];
            spike = improbable_step(cur, next, vmax);
        }
        if (spike) {
            flagged.insert(cur.frame_id);
        } else {
            prev = &cur;
            ++clean;
        }
    }
    if (clean < 2) {
        throw AllFramesOutliers("fewer than 2 clean keyframes in sequence");
    }
    return flagged;
}

PoseSequence inbetween(const PoseSequence& seq, const std::set<std::int64_t>& outliers) {
    PoseSequence out = seq;
    out.outliers.clear();
    out.repaired.clear();

    // Trim flagged frames at the boundaries; they have no keyframe on one side.
    auto& poses = out.poses;
    while (!poses.empty() && outliers.count(poses.front().frame_id)) poses.erase(poses.begin());
    while (!poses.empty() && outliers.count(poses.back().frame_id)) poses.pop_back();
    if (poses.size() < 2) {
        throw UnfillableGap("fewer than 2 keyframes after trimming boundary outliers");
    }

    // Recursive midpoint fill between keyframes ka < kb. The frame closest to
    // floor((ta+tb)/2) is filled, becomes a keyframe, and both halves recurse.
    // Fill values are time-weighted, so the visit order cannot change them.
    auto fill = [&](auto&& self, size_t ka, size_t kb) -> void {
        if (kb <= ka + 1) return;
        std::int64_t mid = (poses[ka].frame_id + poses[kb].frame_id) / 2;
        size_t best = ka + 1;
        for (size_t i = ka + 1; i < kb; ++i) {
            if (std::llabs(poses[i].frame_id - mid) < std::llabs(poses[best].frame_id - mid)) {
                best = i;
            }
        }
        poses[best] = lerp_pose(poses[ka], poses[kb], poses[best].frame_id);
        out.repaired.insert(poses[best].frame_id);
        self(self, ka, best);
        self(self, best, kb);
    };

    size_t last_key = 0;
    for (size_t i = 1; i < poses.size(); ++i) {
        if (!outliers.count(poses[i].frame_id)) {
            fill(fill, last_key, i);
            last_key = i;
        }
    }
    return out;
}

FeatureVector pose_features(const Pose3D& p) {
    if (!p.valid) throw InvalidPose("cannot extract features from an invalid pose");
    FeatureVector f;
    for (int k = 0; k < kNumKeypoints; ++k) {
        f.values[3 * k] = p.keypoints[k].x;
        f.values[3 * k + 1] = p.keypoints[k].y;
        f.values[3 * k + 2] = p.keypoints[k].z;
    }
    return f;
}

Pose3D pose_from_features(std::int64_t frame_id, const FeatureVector& f) {
    Pose3D p;
    p.frame_id = frame_id;
    p.valid = true;
    for (int k = 0; k < kNumKeypoints; ++k) {
        p.keypoints[k] = {f.values[3 * k], f.values[3 * k + 1], f.values[3 * k + 2]};
    }
    return p;
}

void save_features_csv(const std::string& path, const std::vector<Pose3D>& poses) {
    std::ofstream out(path);
    if (!out) throw FileError("cannot write " + path);
    for (const auto& p : poses) {
        auto f = pose_features(p);
        out << p.frame_id;
        char buf[32];
        for (double v : f.values) {
            std::snprintf(buf, sizeof(buf), ",%.10g", v);
            out << buf;
        }
        out << '\n';
    }
}

}  // namespace courttrack
