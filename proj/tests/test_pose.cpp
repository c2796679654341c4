#include <doctest.h>

#include <cmath>

#include "courttrack/pose.hpp"
#include "courttrack/rng.hpp"

using namespace courttrack;

namespace {

Pose3D constant_pose(std::int64_t frame, double value) {
    Pose3D p;
    p.frame_id = frame;
    for (auto& k : p.keypoints) k = {value, value, value};
    return p;
}

PoseSequence make_seq(std::vector<Pose3D> poses) {
    PoseSequence s;
    s.poses = std::move(poses);
    return s;
}

// Direct linear interpolation, the oracle the recursive fill must match.
Pose3D direct_lerp(const Pose3D& a, const Pose3D& b, std::int64_t frame) {
    double t = double(frame - a.frame_id) / double(b.frame_id - a.frame_id);
    Pose3D out;
    out.frame_id = frame;
    for (int k = 0; k < kNumKeypoints; ++k) {
        out.keypoints[k] = {a.keypoints[k].x + t * (b.keypoints[k].x - a.keypoints[k].x),
                            a.keypoints[k].y + t * (b.keypoints[k].y - a.keypoints[k].y),
                            a.keypoints[k].z + t * (b.keypoints[k].z - a.keypoints[k].z)};
    }
    return out;
}

double pose_dist(const Pose3D& a, const Pose3D& b) {
    double worst = 0.0;
    for (int k = 0; k < kNumKeypoints; ++k) {
        worst = std::max(worst, std::hypot(a.keypoints[k].x - b.keypoints[k].x,
                                           a.keypoints[k].y - b.keypoints[k].y,
                                           a.keypoints[k].z - b.keypoints[k].z));
    }
    return worst;
}

}  // namespace

TEST_CASE("expand_bbox grows 30 px each way and clamps at the frame") {
    auto c1 = expand_bbox({100, 100, 50, 80}, 30, 852, 472);
    CHECK(c1.bbox == BBox{70, 70, 110, 140});
    CHECK(!c1.clamped);

    auto c2 = expand_bbox({10, 10, 50, 80}, 30, 852, 472);
    CHECK(c2.bbox == BBox{0, 0, 90, 120});
    CHECK(c2.clamped);

    auto c3 = expand_bbox({100, 100, 50, 80}, 0, 852, 472);
    CHECK(c3.bbox == BBox{100, 100, 50, 80});
    CHECK(!c3.clamped);
}

TEST_CASE("detect_outlier_frames: constant sequence is clean") {
    std::vector<Pose3D> poses;
    for (int t = 0; t < 10; ++t) poses.push_back(constant_pose(t, 1.0));
    CHECK(detect_outlier_frames(make_seq(poses), 0.15).empty());
}

TEST_CASE("detect_outlier_frames flags a single-keypoint spike") {
    const double vmax = 0.15;
    std::vector<Pose3D> poses;
    for (int t = 0; t < 10; ++t) poses.push_back(constant_pose(t, 0.0));
    poses[4].keypoints[7].x = 10.0 * vmax;
    auto flagged = detect_outlier_frames(make_seq(poses), vmax);
    CHECK(flagged == std::set<std::int64_t>{4});
}

TEST_CASE("detect_outlier_frames: sustained fast motion is not a spike") {
    // A large step held in one direction fails the two-sided test.
    std::vector<Pose3D> poses;
    for (int t = 0; t < 10; ++t) poses.push_back(constant_pose(t, t < 5 ? 0.0 : 5.0));
    auto flagged = detect_outlier_frames(make_seq(poses), 0.15);
    CHECK(flagged.empty());
}

TEST_CASE("detect_outlier_frames: invalid poses are outliers") {
    std::vector<Pose3D> poses;
    for (int t = 0; t < 6; ++t) poses.push_back(constant_pose(t, 1.0));
    poses[2].valid = false;
    auto flagged = detect_outlier_frames(make_seq(poses), 0.15);
    CHECK(flagged == std::set<std::int64_t>{2});
}

TEST_CASE("detect_outlier_frames throws when nothing clean remains") {
    std::vector<Pose3D> poses;
    for (int t = 0; t < 4; ++t) {
        poses.push_back(constant_pose(t, 0.0));
        poses.back().valid = false;
    }
    poses[1].valid = true;
    CHECK_THROWS_AS(detect_outlier_frames(make_seq(poses), 0.15), AllFramesOutliers);
}

TEST_CASE("inbetween: midpoint and even-gap examples") {
    std::vector<Pose3D> poses = {constant_pose(0, 0.0), constant_pose(1, 99.0),
                                 constant_pose(2, 2.0)};
    auto fixed = inbetween(make_seq(poses), {1});
    CHECK(pose_dist(fixed.poses[1], constant_pose(1, 1.0)) < 1e-12);
    CHECK(fixed.repaired == std::set<std::int64_t>{1});
    CHECK(fixed.outliers.empty());

    std::vector<Pose3D> poses2 = {constant_pose(0, 0.0), constant_pose(1, -5), constant_pose(2, 7),
                                  constant_pose(3, 9), constant_pose(4, 1.0)};
    auto fixed2 = inbetween(make_seq(poses2), {1, 2, 3});
    CHECK(pose_dist(fixed2.poses[1], constant_pose(1, 0.25)) < 1e-12);
    CHECK(pose_dist(fixed2.poses[2], constant_pose(2, 0.5)) < 1e-12);
    CHECK(pose_dist(fixed2.poses[3], constant_pose(3, 0.75)) < 1e-12);
}

TEST_CASE("inbetween never touches keyframes and matches direct lerp") {
    Rng rng(2718);
    for (int trial = 0; trial < 50; ++trial) {
        int gap = 1 + static_cast<int>(rng.uniform() * 7.0);  // 1..7
        Pose3D a, b;
        a.frame_id = 0;
        b.frame_id = gap + 1;
        for (int k = 0; k < kNumKeypoints; ++k) {
            a.keypoints[k] = {rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
            b.keypoints[k] = {rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
        }
        std::vector<Pose3D> poses = {a};
        std::set<std::int64_t> outliers;
        for (int t = 1; t <= gap; ++t) {
            poses.push_back(constant_pose(t, 1e6));  // garbage to be replaced
            outliers.insert(t);
        }
        poses.push_back(b);

        auto fixed = inbetween(make_seq(poses), outliers);
        CHECK(pose_dist(fixed.poses.front(), a) == 0.0);  // keyframes bit-exact
        CHECK(pose_dist(fixed.poses.back(), b) == 0.0);
        for (int t = 1; t <= gap; ++t) {
            CHECK(pose_dist(fixed.poses[t], direct_lerp(a, b, t)) < 1e-9);
        }
    }
}

TEST_CASE("inbetween keeps monotone gaps monotone") {
    Pose3D a = constant_pose(0, 0.0);
    Pose3D b = constant_pose(6, 3.0);
    std::vector<Pose3D> poses = {a};
    std::set<std::int64_t> outliers;
    for (int t = 1; t <= 5; ++t) {
        poses.push_back(constant_pose(t, -1.0));
        outliers.insert(t);
    }
    poses.push_back(b);
    auto fixed = inbetween(make_seq(poses), outliers);
    for (size_t i = 1; i < fixed.poses.size(); ++i) {
        for (int k = 0; k < kNumKeypoints; ++k) {
            CHECK(fixed.poses[i].keypoints[k].x >= fixed.poses[i - 1].keypoints[k].x);
        }
    }
}

TEST_CASE("inbetween trims boundary outliers and reports unfillable sequences") {
    std::vector<Pose3D> poses = {constant_pose(0, 50.0), constant_pose(1, 1.0),
                                 constant_pose(2, 1.0), constant_pose(3, 50.0)};
    auto fixed = inbetween(make_seq(poses), {0, 3});
    REQUIRE(fixed.poses.size() == 2);
    CHECK(fixed.poses.front().frame_id == 1);
    CHECK(fixed.poses.back().frame_id == 2);

    std::vector<Pose3D> hopeless = {constant_pose(0, 0.0), constant_pose(1, 1.0)};
    CHECK_THROWS_AS(inbetween(make_seq(hopeless), {0}), UnfillableGap);
}

TEST_CASE("detect then inbetween is idempotent") {
    const double vmax = 0.15;
    std::vector<Pose3D> poses;
    for (int t = 0; t < 30; ++t) poses.push_back(constant_pose(t, 0.01 * t));
    poses[7].keypoints[3].y += 5.0;
    poses[19].keypoints[11].z -= 4.0;
    auto seq = make_seq(poses);
    auto flagged = detect_outlier_frames(seq, vmax);
    CHECK(flagged == std::set<std::int64_t>{7, 19});
    auto fixed = inbetween(seq, flagged);
    CHECK(detect_outlier_frames(fixed, vmax).empty());
}

TEST_CASE("pose_features flattens in keypoint order") {
    Pose3D zero = constant_pose(0, 0.0);
    auto f0 = pose_features(zero);
    for (double v : f0.values) CHECK(v == 0.0);

    Pose3D p = constant_pose(0, 0.0);
    p.keypoints[0] = {1, 2, 3};
    auto f = pose_features(p);
    CHECK(f.values[0] == 1.0);
    CHECK(f.values[1] == 2.0);
    CHECK(f.values[2] == 3.0);
    CHECK(f.values[3] == 0.0);
    CHECK(f.values.size() == 51);

    Pose3D invalid = constant_pose(0, 0.0);
    invalid.valid = false;
    CHECK_THROWS_AS(pose_features(invalid), InvalidPose);
}

TEST_CASE("feature round trip") {
    Rng rng(101);
    for (int trial = 0; trial < 10; ++trial) {
        Pose3D p;
        p.frame_id = trial;
        for (auto& k : p.keypoints) k = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
        Pose3D back = pose_from_features(p.frame_id, pose_features(p));
        CHECK(pose_dist(p, back) == 0.0);
    }
}
