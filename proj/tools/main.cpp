#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "courttrack/eval.hpp"
#include "courttrack/geometry.hpp"
#include "courttrack/model.hpp"
#include "courttrack/pose.hpp"
#include "courttrack/render.hpp"
#include "courttrack/synth.hpp"
#include "courttrack/tracker.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace courttrack;

namespace {

// Lets a JSON file supply any flag of the chosen subcommand. `--config` is
// stripped from argv and each key becomes an appended `--key value` pair,
// skipped when the flag was already given explicitly so the command line
// wins. Unknown keys then fail CLI11 parsing like any unknown flag would.
std::vector<std::string> expand_config(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string cfg_path;
    for (auto it = args.begin(); it != args.end();) {
        if (*it == "--config") {
            if (std::next(it) == args.end()) throw ParseError("--config expects a file path");
            cfg_path = *std::next(it);
            it = args.erase(it, it + 2);
        } else if (it->rfind("--config=", 0) == 0) {
            cfg_path = it->substr(9);
            it = args.erase(it);
        } else {
            ++it;
        }
    }
    if (cfg_path.empty()) return args;

    std::ifstream in(cfg_path);
    if (!in) throw FileError("cannot open " + cfg_path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw ParseError("config file " + cfg_path + " must hold a JSON object");
    }
    std::set<std::string> given;
    for (const auto& a : args) {
        if (a.rfind("--", 0) == 0) given.insert(a.substr(0, a.find('=')));
    }
    for (const auto& [key, value] : j.items()) {
        std::string flag = "--" + key;
        if (given.count(flag)) continue;
        auto push = [&](const json& v) {
            args.push_back(flag);
            args.push_back(v.is_string() ? v.get<std::string>() : v.dump());
        };
        if (value.is_array()) {
            for (const auto& e : value) push(e);
        } else {
            push(value);
        }
    }
    return args;
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw FileError("cannot write " + path);
    out << content;
}

void write_homography_json(const std::string& path, const Homography& h,
                           const ReprojStats& stats) {
    json j;
    j["h"] = json::array();
    for (int i = 0; i < 9; ++i) j["h"].push_back(h.matrix()(i / 3, i % 3));
    j["reprojection"] = {{"rms", stats.rms},
                         {"max", stats.max},
                         {"mean", stats.mean},
                         {"per_point", stats.per_point}};
    write_text(path, json(j).dump(2) + "\n");
}

struct LoadedHomography {
    Homography h;
    double max_reproj = 0.0;
};

LoadedHomography load_homography_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileError("cannot open " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ParseError("invalid JSON in " + path);
    const auto& a = j.at("h");
    if (!a.is_array() || a.size() != 9) throw ParseError("\"h\" must hold 9 values in " + path);
    Eigen::Matrix3d m;
    for (int i = 0; i < 9; ++i) m(i / 3, i % 3) = a[i].get<double>();
    LoadedHomography out{Homography(m), 0.0};
    if (j.contains("reprojection")) out.max_reproj = j["reprojection"].value("max", 0.0);
    return out;
}

// --- stage implementations shared by the subcommands and `pipeline` ---

void do_calibrate(const std::string& points_path, const std::string& out_path) {
    auto correspondences = load_correspondences(points_path);
    Homography h = estimate_homography(correspondences);
    ReprojStats stats = reprojection_error(h, correspondences);
    write_homography_json(out_path, h, stats);
}

void do_track(const std::string& h_path, const std::string& court_path,
              const std::string& det_path, const std::string& out_path, double max_disp,
              double max_reproj_px) {
    auto loaded = load_homography_json(h_path);
    if (loaded.max_reproj > max_reproj_px) {
        throw DomainError("calibration reprojection error " + std::to_string(loaded.max_reproj) +
                          " px exceeds --max-reproj-px " + std::to_string(max_reproj_px));
    }
    auto court = CourtRegion::load(court_path);
    auto frames = load_detections(det_path);
    auto [near, far] = track_players(frames, court, loaded.h, TrackerConfig{max_disp});
    save_tracks_csv(out_path, near, far);
}

void do_repair(const std::string& poses_path, const std::string& out_path, double vmax,
               const std::string& features_path) {
    PlayerPoses loaded = load_poses(poses_path);
    std::vector<PoseStream> repaired_streams;
    std::vector<Pose3D> all_repaired;
    for (auto [player, poses] :
         {std::pair{Player::Near, &loaded.near}, std::pair{Player::Far, &loaded.far}}) {
        if (poses->empty()) continue;
        PoseSequence seq;
        seq.player = player;
        seq.poses = *poses;
        auto outliers = detect_outlier_frames(seq, vmax);
        PoseSequence fixed = inbetween(seq, outliers);
        PoseStream stream;
        stream.player = player;
        stream.poses = fixed.poses;
        for (const auto& p : fixed.poses) {
            stream.sources.push_back(fixed.repaired.count(p.frame_id) ? "interpolated"
                                                                      : "detected");
        }
        all_repaired.insert(all_repaired.end(), fixed.poses.begin(), fixed.poses.end());
        repaired_streams.push_back(std::move(stream));
    }
    save_poses(out_path, repaired_streams);
    if (!features_path.empty()) save_features_csv(features_path, all_repaired);
}

std::vector<ErrorReport> do_evaluate(const std::string& tracks_path, const std::string& gt_path,
                                     const std::string& out_path, ComparePlane plane,
                                     double cm_per_px, const std::string& svg_path) {
    auto [near, far] = load_tracks_csv(tracks_path);
    auto [gt_near, gt_far] = load_ground_truth_csv(gt_path);
    std::vector<ErrorReport> reports;
    reports.push_back(compare_trajectories(near, gt_near, plane, cm_per_px));
    reports.push_back(compare_trajectories(far, gt_far, plane, cm_per_px));
    if (!out_path.empty()) write_text(out_path, report_to_json(reports) + "\n");
    if (!svg_path.empty()) write_text(svg_path, error_curve_svg(reports));
    return reports;
}

void do_render(const std::string& tracks_path, const std::string& out_path,
               const std::vector<Point2>& court_world) {
    auto [near, far] = load_tracks_csv(tracks_path);
    write_text(out_path, render_tracks_svg(near, far, court_world));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Player positioning and pose post-processing pipeline"};
    app.require_subcommand(1);

    // calibrate
    std::string points_path, h_out;
    auto* calibrate = app.add_subcommand("calibrate", "Estimate the court homography");
    calibrate->add_option("--points", points_path, "calibration correspondences file")->required();
    calibrate->add_option("--out", h_out, "output homography JSON")->required();

    // track
    std::string h_path, court_path, det_path, tracks_out;
    double max_disp = 60.0, max_reproj_px = 3.0;
    auto* track = app.add_subcommand("track", "Tracking-by-detection over a detections stream");
    track->add_option("--homography", h_path, "homography JSON from calibrate")->required();
    track->add_option("--court", court_path, "court polygon file")->required();
    track->add_option("--detections", det_path, "detections.jsonl")->required();
    track->add_option("--out", tracks_out, "output tracks CSV")->required();
    track->add_option("--max-disp", max_disp, "max displacement px per frame gap");
    track->add_option("--max-reproj-px", max_reproj_px, "refuse calibrations worse than this");

    // repair-poses
    std::string poses_path, poses_out, features_out;
    double vmax = 0.15;
    auto* repair = app.add_subcommand("repair-poses", "Outlier detection and inbetweening");
    repair->add_option("--poses", poses_path, "poses.jsonl")->required();
    repair->add_option("--out", poses_out, "repaired poses.jsonl")->required();
    repair->add_option("--vmax", vmax, "max keypoint speed, model units per frame");
    repair->add_option("--features", features_out, "optional 51-feature CSV export");

    // evaluate
    std::string eval_tracks, gt_path, report_out, curve_svg;
    std::string plane = "camera";
    double cm_per_px = 2.5;
    auto* evaluate = app.add_subcommand("evaluate", "Compare tracks against ground truth");
    evaluate->add_option("--tracks", eval_tracks, "tracks CSV")->required();
    evaluate->add_option("--ground-truth", gt_path, "ground truth CSV (frame,player,x,y)")
        ->required();
    evaluate->add_option("--out", report_out, "report JSON");
    evaluate->add_option("--plane", plane, "comparison plane")
        ->check(CLI::IsMember({"camera", "world"}));
    evaluate->add_option("--cm-per-px", cm_per_px, "centimeters per pixel");
    evaluate->add_option("--svg", curve_svg, "optional error-vs-frame SVG");

    // synth
    std::string scene_cfg_path, out_dir;
    std::int64_t seed_override = -1;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic verification scene");
    synth->add_option("--scene", scene_cfg_path, "scene config JSON (defaults when omitted)");
    synth->add_option("--out-dir", out_dir, "output directory")->required();
    synth->add_option("--seed", seed_override, "override the scene seed");

    // render
    std::string render_tracks, render_out;
    auto* render = app.add_subcommand("render", "Emit a top-view SVG of the tracks");
    render->add_option("--tracks", render_tracks, "tracks CSV")->required();
    render->add_option("--out", render_out, "output SVG")->required();

    // pipeline
    std::string pipe_scene, pipe_dir;
    double pipe_max_disp = 60.0, pipe_vmax = 0.15, pipe_cm_per_px = 2.5, pipe_max_reproj = 3.0;
    std::int64_t pipe_seed = -1;
    auto* pipeline = app.add_subcommand(
        "pipeline", "Synthesize a scene and run calibrate/track/repair/evaluate/render");
    pipeline->add_option("--scene", pipe_scene, "scene config JSON (defaults when omitted)");
    pipeline->add_option("--out-dir", pipe_dir, "output directory")->required();
    pipeline->add_option("--max-disp", pipe_max_disp, "max displacement px per frame gap");
    pipeline->add_option("--vmax", pipe_vmax, "max keypoint speed, model units per frame");
    pipeline->add_option("--cm-per-px", pipe_cm_per_px, "centimeters per pixel");
    pipeline->add_option("--max-reproj-px", pipe_max_reproj, "calibration quality gate");
    pipeline->add_option("--seed", pipe_seed, "override the scene seed");

    try {
        std::vector<std::string> args = expand_config(argc, argv);
        std::reverse(args.begin(), args.end());  // CLI11 consumes args back to front
        app.parse(args);

        if (*calibrate) {
            do_calibrate(points_path, h_out);
        } else if (*track) {
            do_track(h_path, court_path, det_path, tracks_out, max_disp, max_reproj_px);
        } else if (*repair) {
            do_repair(poses_path, poses_out, vmax, features_out);
        } else if (*evaluate) {
            auto reports = do_evaluate(eval_tracks, gt_path, report_out,
                                       plane == "world" ? ComparePlane::World
                                                        : ComparePlane::Camera,
                                       cm_per_px, curve_svg);
            std::cout << report_to_table(reports);
        } else if (*synth) {
            SceneConfig cfg =
                scene_cfg_path.empty() ? SceneConfig{} : load_scene_config(scene_cfg_path);
            if (seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(seed_override);
            write_scene(out_dir, generate_scene(cfg));
        } else if (*render) {
            do_render(render_tracks, render_out, SceneConfig::default_court_world());
        } else if (*pipeline) {
            SceneConfig cfg = pipe_scene.empty() ? SceneConfig{} : load_scene_config(pipe_scene);
            if (pipe_seed >= 0) cfg.seed = static_cast<std::uint64_t>(pipe_seed);
            fs::create_directories(pipe_dir);
            auto path = [&](const char* name) { return (fs::path(pipe_dir) / name).string(); };
            write_scene(pipe_dir, generate_scene(cfg));
            do_calibrate(path("calibration.txt"), path("H.json"));
            do_track(path("H.json"), path("court.txt"), path("detections.jsonl"),
                     path("tracks.csv"), pipe_max_disp, pipe_max_reproj);
            do_repair(path("poses.jsonl"), path("repaired_poses.jsonl"), pipe_vmax,
                      path("features.csv"));
            auto reports =
                do_evaluate(path("tracks.csv"), path("ground_truth.csv"), path("report.json"),
                            ComparePlane::World, pipe_cm_per_px, path("error_curve.svg"));
            do_render(path("tracks.csv"), path("trajectories.svg"), cfg.court_world);
            std::cout << report_to_table(reports);
        }
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << "error: " << e.what() << std::endl;
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 2;
    }
    return 0;
}
