#include <doctest.h>

#include <cmath>
#include <fstream>

#include "courttrack/geometry.hpp"
#include "courttrack/rng.hpp"

using namespace courttrack;

namespace {

// Well-conditioned random homography: translation * rotation * scale * mild
// projective part, built directly so the tests do not depend on the DLT.
Eigen::Matrix3d random_well_conditioned(Rng& rng) {
    double theta = rng.uniform(-0.5, 0.5);
    double s = rng.uniform(0.6, 1.8);
    double tx = rng.uniform(-5.0, 5.0), ty = rng.uniform(-5.0, 5.0);
    // Keep the projective part mild enough that the horizon line w = 0 stays
    // far outside the [0, 100]^2 camera domains the tests sample from.
    double p1 = rng.uniform(-0.001, 0.001), p2 = rng.uniform(-0.001, 0.001);
    Eigen::Matrix3d t;
    t << 1, 0, tx, 0, 1, ty, 0, 0, 1;
    Eigen::Matrix3d r;
    r << std::cos(theta), -std::sin(theta), 0, std::sin(theta), std::cos(theta), 0, 0, 0, 1;
    Eigen::Matrix3d sc = Eigen::Vector3d(s, s, 1.0).asDiagonal();
    Eigen::Matrix3d p;
    p << 1, 0, 0, 0, 1, 0, p1, p2, 1;
    return t * r * sc * p;
}

std::vector<Correspondence> square_to(const std::vector<Point2>& world) {
    std::vector<Point2> cam = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    std::vector<Correspondence> c;
    for (size_t i = 0; i < 4; ++i) c.push_back({cam[i], world[i]});
    return c;
}

}  // namespace

TEST_CASE("estimate_homography: unit square to itself is the identity") {
    auto h = estimate_homography(square_to({{0, 0}, {1, 0}, {1, 1}, {0, 1}}));
    const double d = 1.0 / std::sqrt(3.0);  // canonical unit-Frobenius scale
    Eigen::Matrix3d expected = Eigen::Vector3d(d, d, d).asDiagonal();
    CHECK((h.matrix() - expected).norm() < 1e-9);
}

TEST_CASE("estimate_homography: pure translation") {
    auto h = estimate_homography(square_to({{3, 5}, {4, 5}, {4, 6}, {3, 6}}));
    CHECK(std::abs(h.matrix()(2, 0)) < 1e-9);
    CHECK(std::abs(h.matrix()(2, 1)) < 1e-9);
    Point2 p = h.apply({0.25, 0.75});
    CHECK(p.x == doctest::Approx(3.25).epsilon(1e-9));
    CHECK(p.y == doctest::Approx(5.75).epsilon(1e-9));
}

TEST_CASE("estimate_homography: court corner calibration is exact") {
    // 20 ft x 44 ft court = 6.096 m x 13.411 m.
    std::vector<Correspondence> corners = {
        {{150, 430}, {0, 0}},
        {{700, 430}, {6.096, 0}},
        {{600, 120}, {6.096, 13.411}},
        {{250, 120}, {0, 13.411}},
    };
    auto h = estimate_homography(corners);
    auto stats = reprojection_error(h, corners);
    CHECK(stats.max < 1e-9);
}

TEST_CASE("estimate_homography: error cases") {
    CHECK_THROWS_AS(estimate_homography({{{0, 0}, {0, 0}},
                                         {{1, 0}, {1, 0}},
                                         {{1, 1}, {1, 1}}}),
                    InsufficientPoints);
    // Three collinear camera points.
    CHECK_THROWS_AS(estimate_homography({{{0, 0}, {0, 0}},
                                         {{1, 1}, {1, 0}},
                                         {{2, 2}, {1, 1}},
                                         {{0, 1}, {0, 1}}}),
                    DegenerateConfiguration);
    // Coincident points.
    CHECK_THROWS_AS(estimate_homography({{{0, 0}, {0, 0}},
                                         {{0, 0}, {1, 0}},
                                         {{1, 1}, {1, 1}},
                                         {{0, 1}, {0, 1}}}),
                    DegenerateConfiguration);
}

TEST_CASE("apply_homography basics") {
    Homography id;
    Point2 p = apply_homography(id, {3, 4});
    CHECK(p.x == doctest::Approx(3.0));
    CHECK(p.y == doctest::Approx(4.0));

    Eigen::Matrix3d scale = Eigen::Vector3d(2, 2, 1).asDiagonal();
    Point2 q = apply_homography(Homography(scale), {1, 1});
    CHECK(q.x == doctest::Approx(2.0));
    CHECK(q.y == doctest::Approx(2.0));

    Eigen::Matrix3d m;
    m << 1, 0, 1, 0, 1, 0, 1, 0, 0;  // invertible, but w = x so x = 0 maps to infinity
    CHECK_THROWS_AS(apply_homography(Homography(m), {0, 5}), PointAtInfinity);
}

TEST_CASE("invert_homography") {
    CHECK((invert_homography(Homography()).matrix() - Homography().matrix()).norm() < 1e-12);

    Eigen::Matrix3d t;
    t << 1, 0, 3, 0, 1, 5, 0, 0, 1;
    Point2 p = invert_homography(Homography(t)).apply({0, 0});
    CHECK(p.x == doctest::Approx(-3.0).epsilon(1e-9));
    CHECK(p.y == doctest::Approx(-5.0).epsilon(1e-9));

    Rng rng(20240613);
    Homography h(random_well_conditioned(rng));
    Homography hinv = invert_homography(h);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        Point2 p0{rng.uniform(-10, 10), rng.uniform(-10, 10)};
        Point2 back = hinv.apply(h.apply(p0));
        worst = std::max(worst, distance(back, p0));
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("reprojection_error statistics") {
    std::vector<Correspondence> exact = {
        {{0, 0}, {0, 0}}, {{1, 0}, {1, 0}}, {{1, 1}, {1, 1}}, {{0, 1}, {0, 1}}};
    auto stats = reprojection_error(Homography(), exact);
    CHECK(stats.max == doctest::Approx(0.0));
    CHECK(stats.per_point.size() == 4);

    auto one = reprojection_error(Homography(), {{{1, 1}, {4, 5}}});
    CHECK(one.per_point[0] == doctest::Approx(5.0));  // 3-4-5 triangle
    CHECK(one.mean == doctest::Approx(5.0));
    CHECK(one.rms == doctest::Approx(5.0));
}

TEST_CASE("reprojection_error under Gaussian noise stays near sigma") {
    // Known H, 20 correspondences with pixel noise sigma = 0.5 on the camera
    // side; the rms world error must land within [0.2, 1.5] sigma in world
    // units, and the stats must match a direct recomputation.
    const double sigma = 0.5;
    Rng rng(77001);
    Homography h(random_well_conditioned(rng));
    std::vector<Correspondence> noisy;
    for (int i = 0; i < 20; ++i) {
        Point2 cam{rng.uniform(0, 100), rng.uniform(0, 100)};
        Point2 world = h.apply(cam);
        Point2 cam_noisy{cam.x + rng.normal(0, sigma), cam.y + rng.normal(0, sigma)};
        noisy.push_back({cam_noisy, world});
    }
    auto stats = reprojection_error(h, noisy);

    // Independent recomputation.
    double sum_sq = 0.0;
    for (const auto& c : noisy) {
        Point2 mapped = h.apply(c.camera);
        double dx = mapped.x - c.world.x, dy = mapped.y - c.world.y;
        sum_sq += dx * dx + dy * dy;
    }
    CHECK(stats.rms == doctest::Approx(std::sqrt(sum_sq / 20.0)).epsilon(1e-12));

    // Local world-units-per-pixel scale of h around the sampled region.
    Point2 a = h.apply({50, 50});
    Point2 b = h.apply({51, 50});
    Point2 c = h.apply({50, 51});
    double scale = 0.5 * (distance(a, b) + distance(a, c));
    CHECK(stats.rms >= 0.2 * sigma * scale);
    CHECK(stats.rms <= 1.5 * sigma * scale);
}

TEST_CASE("projective scale invariance and composition") {
    Rng rng(42);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::Matrix3d m1 = random_well_conditioned(rng);
        Eigen::Matrix3d m2 = random_well_conditioned(rng);
        double lambda = rng.uniform(0.1, 9.0) * (rng.bernoulli(0.5) ? 1.0 : -1.0);
        CHECK((Homography(lambda * m1).matrix() - Homography(m1).matrix()).norm() < 1e-12);

        Homography h1(m1), h2(m2), composed(m2 * m1);
        Point2 p{rng.uniform(-3, 3), rng.uniform(-3, 3)};
        Point2 chained = h2.apply(h1.apply(p));
        Point2 direct = composed.apply(p);
        CHECK(distance(chained, direct) < 1e-9);
    }
}

TEST_CASE("estimation recovers a known homography on a held-out grid") {
    Rng rng(99);
    for (int trial = 0; trial < 10; ++trial) {
        Homography truth(random_well_conditioned(rng));
        std::vector<Correspondence> c;
        for (Point2 cam : {Point2{0, 0}, Point2{10, 0}, Point2{10, 10}, Point2{0, 10}}) {
            c.push_back({cam, truth.apply(cam)});
        }
        Homography est = estimate_homography(c);
        double worst = 0.0;
        for (int gx = 0; gx < 5; ++gx) {
            for (int gy = 0; gy < 5; ++gy) {
                Point2 cam{gx * 2.5, gy * 2.5};
                worst = std::max(worst, distance(est.apply(cam), truth.apply(cam)));
            }
        }
        CHECK(worst < 1e-9);
    }
}

TEST_CASE("DLT is invariant to similarity transforms of the camera points") {
    Rng rng(314159);
    Homography truth(random_well_conditioned(rng));
    std::vector<Point2> cams;
    std::vector<Correspondence> base;
    for (int i = 0; i < 8; ++i) {
        Point2 cam{rng.uniform(0, 50), rng.uniform(0, 50)};
        cams.push_back(cam);
        base.push_back({cam, truth.apply(cam)});
    }
    Homography est_base = estimate_homography(base);

    // Shift and scale every camera point; the composed map must agree.
    const double s = 3.0, tx = 120.0, ty = -40.0;
    std::vector<Correspondence> moved;
    for (const auto& c : base) {
        moved.push_back({{s * c.camera.x + tx, s * c.camera.y + ty}, c.world});
    }
    Homography est_moved = estimate_homography(moved);
    for (const auto& cam : cams) {
        Point2 via_base = est_base.apply(cam);
        Point2 via_moved = est_moved.apply({s * cam.x + tx, s * cam.y + ty});
        CHECK(distance(via_base, via_moved) < 1e-9);
    }
}

TEST_CASE("load_correspondences parses comments and rejects bad lines") {
    const char* path = "corr_test.txt";
    {
        std::ofstream out(path);
        out << "# calibration points\n";
        out << "1 2 3 4\n";
        out << "\n";
        out << "5 6 7 8  # trailing comment\n";
    }
    auto c = load_correspondences(path);
    REQUIRE(c.size() == 2);
    CHECK(c[1].world.y == doctest::Approx(8.0));

    {
        std::ofstream out(path);
        out << "1 2 3\n";
    }
    CHECK_THROWS_AS(load_correspondences(path), ParseError);
    CHECK_THROWS_AS(load_correspondences("no_such_file.txt"), FileError);
}
