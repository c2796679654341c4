#include "courttrack/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace courttrack {

namespace {

double cross(const Point2& o, const Point2& a, const Point2& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool on_segment(const Point2& p, const Point2& a, const Point2& b) {
    double len = distance(a, b);
    if (len == 0.0) return distance(p, a) < 1e-9;
    if (std::abs(cross(a, b, p)) > 1e-9 * len) return false;
    double t = ((p.x - a.x) * (b.x - a.x) + (p.y - a.y) * (b.y - a.y)) / (len * len);
    return t >= -1e-12 && t <= 1.0 + 1e-12;
}

bool segments_intersect(const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
    double d1 = cross(c, d, a);
    double d2 = cross(c, d, b);
    double d3 = cross(a, b, c);
    double d4 = cross(a, b, d);
    return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

double polygon_area2(const std::vector<Point2>& poly) {
    double s = 0.0;
    for (size_t i = 0; i < poly.size(); ++i) {
        const Point2& a = poly[i];
        const Point2& b = poly[(i + 1) % poly.size()];
        s += a.x * b.y - b.x * a.y;
    }
    return s;
}

}  // namespace

CourtRegion::CourtRegion(std::vector<Point2> polygon) : polygon_(std::move(polygon)) {
    const size_t n = polygon_.size();
    if (n < 3) throw InvalidConfig("court polygon needs at least 3 vertices");
    for (const auto& p : polygon_) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
            throw InvalidConfig("court polygon has non-finite vertex");
        }
    }
    if (std::abs(polygon_area2(polygon_)) <= 0.0) {
        throw InvalidConfig("court polygon has zero area");
    }
    // Non-adjacent edge pairs must not cross.
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            if (j == i + 1 || (i == 0 && j == n - 1)) continue;
            if (segments_intersect(polygon_[i], polygon_[(i + 1) % n], polygon_[j],
                                   polygon_[(j + 1) % n])) {
                throw InvalidConfig("court polygon is self-intersecting");
            }
        }
    }
}

bool CourtRegion::contains(const Point2& p) const {
    const size_t n = polygon_.size();
    for (size_t i = 0; i < n; ++i) {
        if (on_segment(p, polygon_[i], polygon_[(i + 1) % n])) return true;
    }
    // Crossing number against a ray in +x.
    bool inside = false;
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        const Point2& a = polygon_[i];
        const Point2& b = polygon_[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            double xi = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if (p.x < xi) inside = !inside;
        }
    }
    return inside;
}

CourtRegion CourtRegion::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileError("cannot open " + path);
    std::vector<Point2> poly;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ls(line);
        Point2 p;
        if (!(ls >> p.x)) continue;
        if (!(ls >> p.y)) throw ParseError("expected `x y` in " + path, line_no);
        poly.push_back(p);
    }
    return CourtRegion(std::move(poly));
}

FrameDetections filter_by_court(const FrameDetections& frame, const CourtRegion& court) {
    FrameDetections out = frame;
    out.detections.clear();
    for (const auto& d : frame.detections) {
        if (d.class_label == "person" && court.contains(foot_point(d.bbox))) {
            out.detections.push_back(d);
        }
    }
    return out;
}

namespace {

// Exhaustive minimal-total-cost one-to-one matching for two players. Prefers
// more matches over fewer, then lower total distance, then higher score sum,
// then lower candidate indices.
std::pair<std::optional<Detection>, std::optional<Detection>> assign_two(
    const Point2& prev_near, const Point2& prev_far, const FrameDetections& frame,
    double max_near, double max_far) {
    const auto& cand = frame.detections;
    const int n = static_cast<int>(cand.size());
    int best_count = -1;
    double best_cost = 0.0, best_score = 0.0;
    int best_i = -1, best_j = -1;  // candidate index for near / far, -1 = miss

    for (int i = -1; i < n; ++i) {
        double cost_i = 0.0, score_i = 0.0;
        if (i >= 0) {
            cost_i = distance(foot_point(cand[i].bbox), prev_near);
            if (cost_i > max_near) continue;
            score_i = cand[i].score;
        }
        for (int j = -1; j < n; ++j) {
            if (j >= 0 && j == i) continue;
            double cost = cost_i, score = score_i;
            if (j >= 0) {
                double cj = distance(foot_point(cand[j].bbox), prev_far);
                if (cj > max_far) continue;
                cost += cj;
                score += cand[j].score;
            }
            int count = (i >= 0) + (j >= 0);
            bool better = false;
            if (count != best_count) {
                better = count > best_count;
            } else if (std::abs(cost - best_cost) > 1e-12) {
                better = cost < best_cost;
            } else if (std::abs(score - best_score) > 1e-12) {
                better = score > best_score;
            } else {
                better = std::pair(i, j) < std::pair(best_i, best_j);
            }
            if (better) {
                best_count = count;
                best_cost = cost;
                best_score = score;
                best_i = i;
                best_j = j;
            }
        }
    }
    std::pair<std::optional<Detection>, std::optional<Detection>> out;
    if (best_i >= 0) out.first = cand[best_i];
    if (best_j >= 0) out.second = cand[best_j];
    return out;
}

Track build_track(Player player, const std::vector<FrameAssignment>& assignments) {
    // Detected points, trimmed to the first..last detection.
    std::vector<TrackPoint> detected;
    for (const auto& a : assignments) {
        const auto& d = player == Player::Near ? a.near : a.far;
        if (d) {
            detected.push_back(
                TrackPoint{a.frame_id, foot_point(d->bbox), Point2{}, PointSource::Detected});
        }
    }
    if (detected.empty()) {
        throw EmptyTrack("player " + to_string(player) + " was never detected");
    }
    Track track;
    track.player = player;
    for (size_t i = 0; i + 1 < detected.size(); ++i) {
        const TrackPoint& a = detected[i];
        const TrackPoint& b = detected[i + 1];
        track.points.push_back(a);
        for (std::int64_t f = a.frame_id + 1; f < b.frame_id; ++f) {
            double t = static_cast<double>(f - a.frame_id) /
                       static_cast<double>(b.frame_id - a.frame_id);
            track.points.push_back(TrackPoint{f,
                                              Point2{a.cam.x + t * (b.cam.x - a.cam.x),
                                                     a.cam.y + t * (b.cam.y - a.cam.y)},
                                              Point2{}, PointSource::Interpolated});
        }
    }
    track.points.push_back(detected.back());
    return track;
}

}  // namespace

std::pair<std::optional<Detection>, std::optional<Detection>> associate(
    const Point2& prev_near, const Point2& prev_far, const FrameDetections& frame,
    double max_disp) {
    if (max_disp <= 0.0) throw InvalidConfig("max_disp must be positive");
    return assign_two(prev_near, prev_far, frame, max_disp, max_disp);
}

std::pair<Track, Track> enforce_two_players(const std::vector<FrameAssignment>& assignments) {
    return {build_track(Player::Near, assignments), build_track(Player::Far, assignments)};
}

Track positions_to_world(Track track, const Homography& h) {
    for (auto& p : track.points) p.world = h.apply(p.cam);
    return track;
}

std::pair<Track, Track> track_players(const std::vector<FrameDetections>& frames,
                                      const CourtRegion& court, const Homography& h,
                                      const TrackerConfig& cfg) {
    if (cfg.max_disp <= 0.0) throw InvalidConfig("max_disp must be positive");

    std::vector<FrameDetections> filtered;
    filtered.reserve(frames.size());
    for (const auto& f : frames) filtered.push_back(filter_by_court(f, court));

    // Identity seeding: first frame with exactly two in-court detections; the
    // one lower on screen (greater image y) is the near player.
    size_t seed = filtered.size();
    for (size_t i = 0; i < filtered.size(); ++i) {
        if (filtered[i].detections.size() == 2) {
            seed = i;
            break;
        }
    }
    if (seed == filtered.size()) {
        throw EmptyTrack("no frame with exactly two in-court detections to seed identities");
    }

    std::vector<FrameAssignment> assignments;
    const auto& d0 = filtered[seed].detections[0];
    const auto& d1 = filtered[seed].detections[1];
    bool first_is_near = foot_point(d0.bbox).y >= foot_point(d1.bbox).y;
    FrameAssignment a0;
    a0.frame_id = filtered[seed].frame_id;
    a0.near = first_is_near ? d0 : d1;
    a0.far = first_is_near ? d1 : d0;
    assignments.push_back(a0);

    Point2 prev_near = foot_point(a0.near->bbox);
    Point2 prev_far = foot_point(a0.far->bbox);
    std::int64_t last_near = a0.frame_id, last_far = a0.frame_id;

    for (size_t i = seed + 1; i < filtered.size(); ++i) {
        const auto& frame = filtered[i];
        // The displacement budget scales with the number of frames since the
        // player was last seen.
        double max_near = cfg.max_disp * static_cast<double>(frame.frame_id - last_near);
        double max_far = cfg.max_disp * static_cast<double>(frame.frame_id - last_far);
        auto [dn, df] = assign_two(prev_near, prev_far, frame, max_near, max_far);
        FrameAssignment a;
        a.frame_id = frame.frame_id;
        a.near = dn;
        a.far = df;
        if (dn) {
            prev_near = foot_point(dn->bbox);
            last_near = frame.frame_id;
        }
        if (df) {
            prev_far = foot_point(df->bbox);
            last_far = frame.frame_id;
        }
        assignments.push_back(std::move(a));
    }

    auto [near, far] = enforce_two_players(assignments);
    return {positions_to_world(std::move(near), h), positions_to_world(std::move(far), h)};
}

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

void write_track(std::ofstream& out, const Track& t) {
    for (const auto& p : t.points) {
        out << p.frame_id << ',' << to_string(t.player) << ',' << fmt(p.cam.x) << ','
            << fmt(p.cam.y) << ',' << fmt(p.world.x) << ',' << fmt(p.world.y) << ','
            << (p.source == PointSource::Detected ? "detected" : "interpolated") << '\n';
    }
}

}  // namespace

void save_tracks_csv(const std::string& path, const Track& near, const Track& far) {
    std::ofstream out(path);
    if (!out) throw FileError("cannot write " + path);
    out << "frame,player,cam_x,cam_y,world_x,world_y,source\n";
    write_track(out, near);
    write_track(out, far);
}

std::pair<Track, Track> load_tracks_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileError("cannot open " + path);
    Track near, far;
    near.player = Player::Near;
    far.player = Player::Far;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && line.rfind("frame,", 0) == 0) continue;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ls, field, ',')) fields.push_back(field);
        if (fields.size() != 7) throw ParseError("expected 7 CSV fields in " + path, line_no);
        TrackPoint p;
        try {
            p.frame_id = std::stoll(fields[0]);
            p.cam = {std::stod(fields[2]), std::stod(fields[3])};
            p.world = {std::stod(fields[4]), std::stod(fields[5])};
        } catch (const std::exception&) {
            throw ParseError("bad numeric field in " + path, line_no);
        }
        if (fields[6] == "detected") {
            p.source = PointSource::Detected;
        } else if (fields[6] == "interpolated") {
            p.source = PointSource::Interpolated;
        } else {
            throw ParseError("bad source field in " + path, line_no);
        }
        (player_from_string(fields[1]) == Player::Near ? near : far).points.push_back(p);
    }
    return {std::move(near), std::move(far)};
}

}  // namespace courttrack
