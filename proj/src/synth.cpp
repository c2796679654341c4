#include "courttrack/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "courttrack/rng.hpp"

namespace courttrack {

using nlohmann::json;

std::vector<Point2> SceneConfig::default_court_world() {
    return {{0.0, 0.0}, {6.096, 0.0}, {6.096, 13.411}, {0.0, 13.411}};
}

Homography SceneConfig::default_camera_homography() {
    // Near baseline wide at the bottom of the frame, far baseline narrow and
    // higher up.
    std::vector<Correspondence> c = {
        {{0.0, 0.0}, {150.0, 430.0}},
        {{6.096, 0.0}, {700.0, 430.0}},
        {{6.096, 13.411}, {600.0, 120.0}},
        {{0.0, 13.411}, {250.0, 120.0}},
    };
    return estimate_homography(c);
}

namespace {

void validate(const SceneConfig& cfg) {
    if (cfg.n_frames <= 0) throw InvalidConfig("n_frames must be positive");
    if (cfg.court_world.size() != 4) throw InvalidConfig("court_world must have 4 corners");
    if (cfg.max_speed <= 0.0) throw InvalidConfig("max_speed must be positive");
    if (cfg.jitter_sigma < 0.0) throw InvalidConfig("jitter_sigma must be nonnegative");
    for (double r : {cfg.miss_rate, cfg.fp_rate, cfg.pose_spike_rate}) {
        if (r < 0.0 || r > 1.0) throw InvalidConfig("rates must lie in [0,1]");
    }
    if (cfg.image_width <= 0 || cfg.image_height <= 0) {
        throw InvalidConfig("image size must be positive");
    }
}

struct Box2 {
    double xmin, xmax, ymin, ymax;
    Point2 sample(Rng& rng) const {
        return {rng.uniform(xmin, xmax), rng.uniform(ymin, ymax)};
    }
};

// Random-waypoint walk: move toward the current waypoint at 80% of the speed
// budget, picking a fresh waypoint on arrival. Steps never exceed max_speed.
std::vector<Point2> waypoint_trajectory(Rng& rng, const Box2& box, int n_frames,
                                        double max_speed) {
    double step = 0.8 * max_speed;
    std::vector<Point2> out;
    out.reserve(n_frames);
    Point2 pos = box.sample(rng);
    Point2 target = box.sample(rng);
    out.push_back(pos);
    while (static_cast<int>(out.size()) < n_frames) {
        double d = distance(pos, target);
        if (d <= step) {
            pos = target;
            target = box.sample(rng);
        } else {
            pos.x += step * (target.x - pos.x) / d;
            pos.y += step * (target.y - pos.y) / d;
        }
        out.push_back(pos);
    }
    return out;
}

// Coarse humanoid rest pose, model units, hip-centered.
const std::array<Keypoint3, kNumKeypoints>& rest_skeleton() {
    static const std::array<Keypoint3, kNumKeypoints> kRest = {{
        {0.00, 1.70, 0.00},   // nose
        {0.04, 1.74, 0.02},   // left eye
        {-0.04, 1.74, 0.02},  // right eye
        {0.09, 1.70, 0.00},   // left ear
        {-0.09, 1.70, 0.00},  // right ear
        {0.20, 1.45, 0.00},   // left shoulder
        {-0.20, 1.45, 0.00},  // right shoulder
        {0.28, 1.15, 0.05},   // left elbow
        {-0.28, 1.15, 0.05},  // right elbow
        {0.30, 0.90, 0.10},   // left wrist
        {-0.30, 0.90, 0.10},  // right wrist
        {0.12, 0.95, 0.00},   // left hip
        {-0.12, 0.95, 0.00},  // right hip
        {0.14, 0.50, 0.02},   // left knee
        {-0.14, 0.50, 0.02},  // right knee
        {0.15, 0.05, 0.00},   // left ankle
        {-0.15, 0.05, 0.00},  // right ankle
    }};
    return kRest;
}

}  // namespace

Scene generate_scene(const SceneConfig& cfg) {
    validate(cfg);
    Scene scene;
    scene.config = cfg;

    double xmin = cfg.court_world[0].x, xmax = cfg.court_world[0].x;
    double ymin = cfg.court_world[0].y, ymax = cfg.court_world[0].y;
    for (const auto& p : cfg.court_world) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
    double ymid = 0.5 * (ymin + ymax);
    const double margin = 0.6;
    Box2 near_half{xmin + margin, xmax - margin, ymin + margin, ymid - margin};
    Box2 far_half{xmin + margin, xmax - margin, ymid + margin, ymax - margin};

    // Independent substreams per stage so that e.g. changing the pose noise
    // does not reshuffle the trajectories.
    Rng traj_rng(cfg.seed ^ 0x72616a6563746f72ULL);
    Rng det_rng(cfg.seed ^ 0x64657465637431ULL);
    Rng pose_rng(cfg.seed ^ 0x706f736573726e67ULL);

    scene.truth.world_tracks[0] = waypoint_trajectory(traj_rng, near_half, cfg.n_frames,
                                                      cfg.max_speed);
    scene.truth.world_tracks[1] = waypoint_trajectory(traj_rng, far_half, cfg.n_frames,
                                                      cfg.max_speed);

    // Detections: project each foot point through the world->camera map, add
    // jitter, wrap a depth-scaled box around it.
    auto make_detection = [&](const Point2& world, double score_lo, double score_hi) {
        Point2 cam = cfg.camera_h.apply(world);
        if (cfg.jitter_sigma > 0.0) {
            cam.x += det_rng.normal(0.0, cfg.jitter_sigma);
            cam.y += det_rng.normal(0.0, cfg.jitter_sigma);
        }
        double depth = (world.y - ymin) / (ymax - ymin);  // 0 near, 1 far
        double h = det_rng.uniform(100.0, 140.0) / (1.0 + depth);
        double w = 0.45 * h;
        Detection d;
        d.bbox = BBox{cam.x - w / 2.0, cam.y - h, w, h};
        d.score = det_rng.uniform(score_lo, score_hi);
        d.class_label = "person";
        return d;
    };

    for (int t = 0; t < cfg.n_frames; ++t) {
        FrameDetections fd;
        fd.frame_id = t;
        fd.width = cfg.image_width;
        fd.height = cfg.image_height;
        for (int pi = 0; pi < 2; ++pi) {
            bool miss = det_rng.bernoulli(cfg.miss_rate);
            if (!miss) {
                fd.detections.push_back(
                    make_detection(scene.truth.world_tracks[pi][t], 0.9, 1.0));
            }
        }
        if (det_rng.bernoulli(cfg.fp_rate)) {
            Point2 spurious{det_rng.uniform(xmin + margin, xmax - margin),
                            det_rng.uniform(ymin + margin, ymax - margin)};
            fd.detections.push_back(make_detection(spurious, 0.5, 0.9));
        }
        scene.detections.push_back(std::move(fd));
    }

    // Poses: periodic limb motion around the rest skeleton, slow enough that
    // no clean frame can trip the outlier test, plus injected spikes. Spikes
    // never land on the first/last frame or on adjacent frames, so the
    // flagged set is exactly recoverable.
    const double amplitude = 0.25, omega = 0.12;
    for (int pi = 0; pi < 2; ++pi) {
        PoseSequence& clean = scene.truth.poses[pi];
        clean.player = pi == 0 ? Player::Near : Player::Far;
        std::array<std::array<double, 3>, kNumKeypoints> phase;
        for (auto& kp : phase)
            for (auto& v : kp) v = pose_rng.uniform(0.0, 2.0 * std::numbers::pi);

        PoseStream stream;
        stream.player = clean.player;
        for (int t = 0; t < cfg.n_frames; ++t) {
            Pose3D pose;
            pose.frame_id = t;
            for (int k = 0; k < kNumKeypoints; ++k) {
                const Keypoint3& r = rest_skeleton()[k];
                pose.keypoints[k] = {r.x + amplitude * std::sin(omega * t + phase[k][0]),
                                     r.y + amplitude * std::sin(omega * t + phase[k][1]),
                                     r.z + amplitude * std::sin(omega * t + phase[k][2])};
            }
            clean.poses.push_back(pose);

            bool spiked = t > 0 && t < cfg.n_frames - 1 &&
                          !scene.truth.injected_outlier_frames[pi].count(t - 1) &&
                          pose_rng.bernoulli(cfg.pose_spike_rate);
            if (spiked) {
                scene.truth.injected_outlier_frames[pi].insert(t);
                Pose3D bad = pose;
                for (int k = 0; k < kNumKeypoints; ++k) {
                    double dx = pose_rng.normal(), dy = pose_rng.normal(), dz = pose_rng.normal();
                    double n = std::sqrt(dx * dx + dy * dy + dz * dz);
                    if (n < 1e-12) {
                        dx = 1.0;
                        n = 1.0;
                    }
                    bad.keypoints[k].x += cfg.pose_spike_magnitude * dx / n;
                    bad.keypoints[k].y += cfg.pose_spike_magnitude * dy / n;
                    bad.keypoints[k].z += cfg.pose_spike_magnitude * dz / n;
                }
                stream.poses.push_back(bad);
            } else {
                stream.poses.push_back(pose);
            }
        }
        scene.pose_streams.push_back(std::move(stream));
    }
    return scene;
}

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

}  // namespace

void write_scene(const std::string& dir, const Scene& scene) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const SceneConfig& cfg = scene.config;

    save_detections((fs::path(dir) / "detections.jsonl").string(), scene.detections);
    save_poses((fs::path(dir) / "poses.jsonl").string(), scene.pose_streams);
    save_scene_config((fs::path(dir) / "scene_config.json").string(), cfg);

    std::ofstream gt(fs::path(dir) / "ground_truth.csv");
    if (!gt) throw FileError("cannot write ground_truth.csv in " + dir);
    gt << "frame,player,world_x,world_y\n";
    for (int pi = 0; pi < 2; ++pi) {
        const char* name = pi == 0 ? "near" : "far";
        for (size_t t = 0; t < scene.truth.world_tracks[pi].size(); ++t) {
            const Point2& p = scene.truth.world_tracks[pi][t];
            gt << t << ',' << name << ',' << fmt(p.x) << ',' << fmt(p.y) << '\n';
        }
    }

    // Court corner correspondences double as the calibration fixture and, in
    // camera space, as the court polygon.
    std::ofstream calib(fs::path(dir) / "calibration.txt");
    std::ofstream court(fs::path(dir) / "court.txt");
    if (!calib || !court) throw FileError("cannot write calibration files in " + dir);
    calib << "# cam_x cam_y world_x world_y\n";
    for (const auto& corner : cfg.court_world) {
        Point2 cam = cfg.camera_h.apply(corner);
        calib << fmt(cam.x) << ' ' << fmt(cam.y) << ' ' << fmt(corner.x) << ' ' << fmt(corner.y)
              << '\n';
        court << fmt(cam.x) << ' ' << fmt(cam.y) << '\n';
    }
}

SceneConfig load_scene_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileError("cannot open " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ParseError("invalid JSON in " + path);
    SceneConfig cfg;
    cfg.seed = j.value("seed", cfg.seed);
    cfg.n_frames = j.value("n_frames", cfg.n_frames);
    if (j.contains("court_world")) {
        cfg.court_world.clear();
        for (const auto& p : j["court_world"]) {
            cfg.court_world.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
        }
    }
    if (j.contains("camera_h")) {
        const auto& a = j["camera_h"];
        if (!a.is_array() || a.size() != 9) throw ParseError("camera_h must be 9 values");
        Eigen::Matrix3d m;
        for (int i = 0; i < 9; ++i) m(i / 3, i % 3) = a[i].get<double>();
        cfg.camera_h = Homography(m);
    }
    if (j.contains("image_size")) {
        cfg.image_width = j["image_size"].at(0).get<int>();
        cfg.image_height = j["image_size"].at(1).get<int>();
    }
    cfg.jitter_sigma = j.value("jitter_sigma", cfg.jitter_sigma);
    cfg.miss_rate = j.value("miss_rate", cfg.miss_rate);
    cfg.fp_rate = j.value("fp_rate", cfg.fp_rate);
    cfg.pose_spike_rate = j.value("pose_spike_rate", cfg.pose_spike_rate);
    cfg.pose_spike_magnitude = j.value("pose_spike_magnitude", cfg.pose_spike_magnitude);
    cfg.max_speed = j.value("max_speed", cfg.max_speed);
    validate(cfg);
    return cfg;
}

void save_scene_config(const std::string& path, const SceneConfig& cfg) {
    json j;
    j["seed"] = cfg.seed;
    j["n_frames"] = cfg.n_frames;
    j["court_world"] = json::array();
    for (const auto& p : cfg.court_world) j["court_world"].push_back({p.x, p.y});
    j["camera_h"] = json::array();
    for (int i = 0; i < 9; ++i) j["camera_h"].push_back(cfg.camera_h.matrix()(i / 3, i % 3));
    j["image_size"] = {cfg.image_width, cfg.image_height};
    j["jitter_sigma"] = cfg.jitter_sigma;
    j["miss_rate"] = cfg.miss_rate;
    j["fp_rate"] = cfg.fp_rate;
    j["pose_spike_rate"] = cfg.pose_spike_rate;
    j["pose_spike_magnitude"] = cfg.pose_spike_magnitude;
    j["max_speed"] = cfg.max_speed;
    std::ofstream out(path);
    if (!out) throw FileError("cannot write " + path);
    out << j.dump(2) << '\n';
}

}  // namespace courttrack
