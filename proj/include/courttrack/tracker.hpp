#pragma once

#include <optional>
#include <vector>

#include "courttrack/geometry.hpp"
#include "courttrack/model.hpp"

namespace courttrack {

/// Camera-frame polygon around the playable court area. Points on the
/// boundary count as inside (players stand on the lines).
class CourtRegion {
  public:
    explicit CourtRegion(std::vector<Point2> polygon);

    const std::vector<Point2>& polygon() const { return polygon_; }

    bool contains(const Point2& p) const;

    static CourtRegion load(const std::string& path);

  private:
    std::vector<Point2> polygon_;
};

enum class PointSource { Detected, Interpolated };

struct TrackPoint {
    std::int64_t frame_id = 0;
    Point2 cam;    // px
    Point2 world;  // meters
    PointSource source = PointSource::Detected;
};

struct Track {
    Player player = Player::Near;
    std::vector<TrackPoint> points;  // ordered by frame_id, one per frame
};

/// Per-frame result of the association step: at most one detection per player.
struct FrameAssignment {
    std::int64_t frame_id = 0;
    std::optional<Detection> near;
    std::optional<Detection> far;
};

/// Heuristic (i): keeps "person" detections whose foot point lies inside or
/// on the boundary of the court polygon. Order preserved.
FrameDetections filter_by_court(const FrameDetections& frame, const CourtRegion& court);

/// Heuristic (ii): minimal-total-cost one-to-one assignment of candidates to
/// the two players, cost = foot-point distance to each player's previous
/// position. Pairings farther than max_disp are rejected; at most two players,
/// so all matchings are enumerated exactly. Ties break by higher detection
/// score, then lower candidate index.
std::pair<std::optional<Detection>, std::optional<Detection>> associate(
    const Point2& prev_near, const Point2& prev_far, const FrameDetections& frame,
    double max_disp);

/// Heuristic (iii): trims leading/trailing misses from each player's span and
/// fills every interior miss by time-weighted linear interpolation between
/// the nearest detected neighbors. Throws EmptyTrack if a player was never
/// detected.
std::pair<Track, Track> enforce_two_players(const std::vector<FrameAssignment>& assignments);

/// Sets every point's world position to apply_homography(h, cam).
Track positions_to_world(Track track, const Homography& h);

struct TrackerConfig {
    double max_disp = 60.0;  // px per frame gap
};

/// Full tracking-by-detection pass: court filter, identity seeding (first
/// frame with exactly two in-court detections; the lower-on-screen one is
/// Near), association, gap filling, world projection.
std::pair<Track, Track> track_players(const std::vector<FrameDetections>& frames,
                                      const CourtRegion& court, const Homography& h,
                                      const TrackerConfig& cfg = {});

void save_tracks_csv(const std::string& path, const Track& near, const Track& far);

std::pair<Track, Track> load_tracks_csv(const std::string& path);

}  // namespace courttrack
