#include "courttrack/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

namespace courttrack {

using nlohmann::json;

std::string to_string(Player p) { return p == Player::Near ? "near" : "far"; }

Player player_from_string(const std::string& s) {
    if (s == "near") return Player::Near;
    if (s == "far") return Player::Far;
    throw ParseError("unknown player label '" + s + "'");
}

Point2 foot_point(const BBox& b) { return Point2{b.x + b.w / 2.0, b.y + b.h}; }

namespace {

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileError("cannot open " + path);
    return in;
}

double finite_number(const json& j, const char* what, long line_no) {
    if (!j.is_number()) throw ParseError(std::string(what) + " is not a number", line_no);
    double v = j.get<double>();
    if (!std::isfinite(v)) throw ParseError(std::string(what) + " is not finite", line_no);
    return v;
}

BBox clamp_bbox(const BBox& b, int width, int height, long line_no) {
    double x0 = std::clamp(b.x, 0.0, static_cast<double>(width));
    double y0 = std::clamp(b.y, 0.0, static_cast<double>(height));
    double x1 = std::clamp(b.x + b.w, 0.0, static_cast<double>(width));
    double y1 = std::clamp(b.y + b.h, 0.0, static_cast<double>(height));
    if (x1 - x0 <= 0.0 || y1 - y0 <= 0.0) {
        throw ParseError("bbox lies entirely outside the image", line_no);
    }
    return BBox{x0, y0, x1 - x0, y1 - y0};
}

}  // namespace

std::vector<FrameDetections> load_detections(const std::string& path) {
    auto in = open_or_throw(path);
    std::vector<FrameDetections> frames;
    std::string line;
    long line_no = 0;
    std::int64_t last_frame = -1;
    bool have_last = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) throw ParseError("invalid JSON in " + path, line_no);
        if (!j.contains("frame") || !j["frame"].is_number_integer()) {
            throw ParseError("missing integer \"frame\"", line_no);
        }
        FrameDetections fd;
        fd.frame_id = j["frame"].get<std::int64_t>();
        if (fd.frame_id < 0) throw ParseError("negative frame id", line_no);
        if (have_last) {
            if (fd.frame_id == last_frame)
                throw DuplicateFrame("duplicate frame " + std::to_string(fd.frame_id) + " in " +
                                     path);
            if (fd.frame_id < last_frame)
                throw NonMonotonicFrameIds("frame ids not increasing at line " +
                                           std::to_string(line_no) + " in " + path);
        }
        last_frame = fd.frame_id;
        have_last = true;

        if (!j.contains("image_size") || !j["image_size"].is_array() ||
            j["image_size"].size() != 2) {
            throw ParseError("missing \"image_size\" [w,h]", line_no);
        }
        fd.width = j["image_size"][0].get<int>();
        fd.height = j["image_size"][1].get<int>();
        if (fd.width <= 0 || fd.height <= 0) throw ParseError("non-positive image size", line_no);

        for (const auto& dj : j.value("detections", json::array())) {
            Detection d;
            const auto& bj = dj.at("bbox");
            if (!bj.is_array() || bj.size() != 4) throw ParseError("bbox must be [x,y,w,h]", line_no);
            BBox raw{finite_number(bj[0], "bbox.x", line_no), finite_number(bj[1], "bbox.y", line_no),
                     finite_number(bj[2], "bbox.w", line_no), finite_number(bj[3], "bbox.h", line_no)};
            if (raw.w <= 0.0 || raw.h <= 0.0) throw ParseError("bbox has non-positive extent", line_no);
            d.bbox = clamp_bbox(raw, fd.width, fd.height, line_no);
            d.score = finite_number(dj.at("score"), "score", line_no);
            if (d.score < 0.0 || d.score > 1.0) {
                throw ParseError("score out of [0,1]", line_no);
            }
            d.class_label = dj.value("class", "person");
            fd.detections.push_back(std::move(d));
        }
        frames.push_back(std::move(fd));
    }
    return frames;
}

PlayerPoses load_poses(const std::string& path) {
    auto in = open_or_throw(path);
    PlayerPoses out;
    std::string line;
    long line_no = 0;
    std::int64_t last_frame[2] = {-1, -1};
    bool have_last[2] = {false, false};
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) throw ParseError("invalid JSON in " + path, line_no);
        if (!j.contains("frame") || !j["frame"].is_number_integer()) {
            throw ParseError("missing integer \"frame\"", line_no);
        }
        Player player = player_from_string(j.at("player").get<std::string>());
        int pi = player == Player::Near ? 0 : 1;

        Pose3D pose;
        pose.frame_id = j["frame"].get<std::int64_t>();
        if (have_last[pi]) {
            if (pose.frame_id == last_frame[pi])
                throw DuplicateFrame("duplicate frame " + std::to_string(pose.frame_id) +
                                     " for player " + to_string(player) + " in " + path);
            if (pose.frame_id < last_frame[pi])
                throw NonMonotonicFrameIds("frame ids not increasing at line " +
                                           std::to_string(line_no) + " in " + path);
        }
        last_frame[pi] = pose.frame_id;
        have_last[pi] = true;

        const auto& kj = j.at("keypoints3d");
        if (!kj.is_array() || kj.size() != kNumKeypoints) {
            throw ParseError("keypoints3d must have exactly 17 entries", line_no);
        }
        pose.valid = j.value("valid", true);
        for (int k = 0; k < kNumKeypoints; ++k) {
            const auto& t = kj[k];
            if (!t.is_array() || t.size() != 3) throw ParseError("keypoint must be [x,y,z]", line_no);
            pose.keypoints[k] = {t[0].get<double>(), t[1].get<double>(), t[2].get<double>()};
            if (pose.valid && (!std::isfinite(pose.keypoints[k].x) ||
                               !std::isfinite(pose.keypoints[k].y) ||
                               !std::isfinite(pose.keypoints[k].z))) {
                throw ParseError("non-finite keypoint in valid pose", line_no);
            }
        }
        (pi == 0 ? out.near : out.far).push_back(pose);
    }
    return out;
}

void save_detections(const std::string& path, const std::vector<FrameDetections>& frames) {
    std::ofstream out(path);
    if (!out) throw FileError("cannot write " + path);
    for (const auto& fd : frames) {
        json j;
        j["frame"] = fd.frame_id;
        j["image_size"] = {fd.width, fd.height};
        j["detections"] = json::array();
        for (const auto& d : fd.detections) {
            j["detections"].push_back({{"bbox", {d.bbox.x, d.bbox.y, d.bbox.w, d.bbox.h}},
                                       {"score", d.score},
                                       {"class", d.class_label}});
        }
        out << j.dump() << '\n';
    }
}

void save_poses(const std::string& path, const std::vector<PoseStream>& streams) {
    std::ofstream out(path);
    if (!out) throw FileError("cannot write " + path);
    for (const auto& s : streams) {
        if (!s.sources.empty() && s.sources.size() != s.poses.size()) {
            throw InvalidConfig("sources must be empty or parallel to poses");
        }
        for (size_t i = 0; i < s.poses.size(); ++i) {
            const auto& p = s.poses[i];
            json j;
            j["frame"] = p.frame_id;
            j["player"] = to_string(s.player);
            json kps = json::array();
            for (const auto& k : p.keypoints) kps.push_back({k.x, k.y, k.z});
            j["keypoints3d"] = std::move(kps);
            if (!p.valid) j["valid"] = false;
            if (!s.sources.empty()) j["source"] = s.sources[i];
            out << j.dump() << '\n';
        }
    }
}

}  // namespace courttrack
