#include <doctest.h>

#include <fstream>

#include "courttrack/eval.hpp"
#include "courttrack/rng.hpp"

using namespace courttrack;

namespace {

Track make_track(Player player, const std::vector<Point2>& positions) {
    Track t;
    t.player = player;
    for (size_t i = 0; i < positions.size(); ++i) {
        t.points.push_back({static_cast<std::int64_t>(i), positions[i], positions[i],
                            PointSource::Detected});
    }
    return t;
}

GroundTruthTrack make_gt(Player player, const std::vector<Point2>& positions) {
    GroundTruthTrack g;
    g.player = player;
    for (size_t i = 0; i < positions.size(); ++i) {
        g.points.emplace_back(static_cast<std::int64_t>(i), positions[i]);
    }
    return g;
}

}  // namespace

TEST_CASE("px_to_cm matches the reported scale") {
    CHECK(px_to_cm(13.0, 2.5) == doctest::Approx(32.5));
    CHECK(px_to_cm(25.0, 2.5) == doctest::Approx(62.5));
    CHECK(px_to_cm(0.0) == doctest::Approx(0.0));
    CHECK_THROWS_AS(px_to_cm(-1.0, 2.5), InvalidConfig);
    CHECK_THROWS_AS(px_to_cm(1.0, 0.0), InvalidConfig);
}

TEST_CASE("compare_trajectories: identical, offset, and disjoint tracks") {
    std::vector<Point2> path = {{0, 0}, {1, 1}, {2, 0}, {3, 2}};
    auto est = make_track(Player::Near, path);
    auto gt = make_gt(Player::Near, path);
    auto same = compare_trajectories(est, gt, ComparePlane::Camera);
    CHECK(same.mean_px == doctest::Approx(0.0));
    CHECK(same.max_px == doctest::Approx(0.0));

    std::vector<Point2> shifted;
    for (const auto& p : path) shifted.push_back({p.x + 5, p.y + 12});
    auto off = compare_trajectories(make_track(Player::Near, shifted), gt, ComparePlane::Camera);
    for (const auto& [frame, e] : off.per_frame) CHECK(e == doctest::Approx(13.0));
    CHECK(off.mean_px == doctest::Approx(13.0));
    CHECK(off.mean_cm == doctest::Approx(32.5));

    GroundTruthTrack disjoint;
    disjoint.points.emplace_back(100, Point2{0, 0});
    CHECK_THROWS_AS(compare_trajectories(est, disjoint, ComparePlane::Camera), NoOverlap);
}

TEST_CASE("compare_trajectories skips frames missing from ground truth") {
    auto est = make_track(Player::Far, {{0, 0}, {1, 0}, {2, 0}});
    GroundTruthTrack gt;
    gt.player = Player::Far;
    gt.points.emplace_back(0, Point2{0, 0});
    gt.points.emplace_back(2, Point2{5, 0});
    auto r = compare_trajectories(est, gt, ComparePlane::Camera);
    REQUIRE(r.per_frame.size() == 2);
    CHECK(r.per_frame[1].second == doctest::Approx(3.0));
    CHECK(r.mean_px == doctest::Approx(1.5));
}

TEST_CASE("error metric is symmetric and scale-equivariant") {
    Rng rng(7);
    std::vector<Point2> a_pts, b_pts, a_scaled, b_scaled;
    const double s = 3.5;
    for (int i = 0; i < 40; ++i) {
        Point2 pa{rng.uniform(-10, 10), rng.uniform(-10, 10)};
        Point2 pb{rng.uniform(-10, 10), rng.uniform(-10, 10)};
        a_pts.push_back(pa);
        b_pts.push_back(pb);
        a_scaled.push_back({s * pa.x, s * pa.y});
        b_scaled.push_back({s * pb.x, s * pb.y});
    }
    auto ab = compare_trajectories(make_track(Player::Near, a_pts),
                                   make_gt(Player::Near, b_pts), ComparePlane::Camera);
    auto ba = compare_trajectories(make_track(Player::Near, b_pts),
                                   make_gt(Player::Near, a_pts), ComparePlane::Camera);
    for (size_t i = 0; i < ab.per_frame.size(); ++i) {
        CHECK(ab.per_frame[i].second == doctest::Approx(ba.per_frame[i].second).epsilon(1e-12));
    }
    auto scaled = compare_trajectories(make_track(Player::Near, a_scaled),
                                       make_gt(Player::Near, b_scaled), ComparePlane::Camera);
    CHECK(scaled.mean_px == doctest::Approx(s * ab.mean_px).epsilon(1e-9));
    CHECK(scaled.max_px == doctest::Approx(s * ab.max_px).epsilon(1e-9));
}

TEST_CASE("mean error matches a brute-force recomputation") {
    Rng rng(123);
    std::vector<Point2> truth, noisy;
    for (int i = 0; i < 200; ++i) {
        Point2 p{rng.uniform(0, 100), rng.uniform(0, 100)};
        truth.push_back(p);
        noisy.push_back({p.x + rng.normal(0, 2.0), p.y + rng.normal(0, 2.0)});
    }
    auto r = compare_trajectories(make_track(Player::Near, noisy),
                                  make_gt(Player::Near, truth), ComparePlane::Camera);
    double sum = 0.0, worst = 0.0;
    for (size_t i = 0; i < truth.size(); ++i) {
        double e = distance(noisy[i], truth[i]);
        sum += e;
        worst = std::max(worst, e);
    }
    CHECK(r.mean_px == doctest::Approx(sum / 200.0).epsilon(1e-12));
    CHECK(r.max_px == doctest::Approx(worst).epsilon(1e-12));
}

TEST_CASE("ground truth CSV loads both players") {
    {
        std::ofstream out("gt_test.csv");
        out << "frame,player,x,y\n";
        out << "0,near,1.5,2.5\n";
        out << "0,far,3,4\n";
        out << "1,near,1.6,2.6\n";
    }
    auto [near, far] = load_ground_truth_csv("gt_test.csv");
    REQUIRE(near.points.size() == 2);
    REQUIRE(far.points.size() == 1);
    CHECK(near.points[0].second.x == doctest::Approx(1.5));
    CHECK(far.points[0].second.y == doctest::Approx(4.0));
}

TEST_CASE("reports serialize to JSON, table, and SVG") {
    auto est = make_track(Player::Near, {{0, 0}, {1, 1}});
    auto gt = make_gt(Player::Near, {{0, 1}, {1, 1}});
    auto r = compare_trajectories(est, gt, ComparePlane::Camera);
    auto j = report_to_json({r});
    CHECK(j.find("\"player\": \"near\"") != std::string::npos);
    CHECK(j.find("mean_px") != std::string::npos);
    auto table = report_to_table({r});
    CHECK(table.find("near") != std::string::npos);
    auto svg = error_curve_svg({r});
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("polyline") != std::string::npos);
}
