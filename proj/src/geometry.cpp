#include "courttrack/geometry.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace courttrack {

namespace {

bool finite(const Point2& p) { return std::isfinite(p.x) && std::isfinite(p.y); }

// Canonical form: unit Frobenius norm, bottom-right entry nonnegative; if
// that entry is exactly zero, the first nonzero entry in row-major order is
// made positive instead.
Eigen::Matrix3d canonicalize(const Eigen::Matrix3d& m) {
    double norm = m.norm();
    if (!(norm > 0.0) || !m.allFinite()) {
        throw SingularMatrix("homography matrix is zero or non-finite");
    }
    Eigen::Matrix3d out = m / norm;
    double pivot = out(2, 2);
    if (pivot == 0.0) {
        for (int r = 0; r < 3 && pivot == 0.0; ++r)
            for (int c = 0; c < 3 && pivot == 0.0; ++c) pivot = out(r, c);
    }
    if (pivot < 0.0) out = -out;
    return out;
}

// Hartley similarity normalization: centroid to origin, mean distance sqrt(2).
Eigen::Matrix3d normalizing_transform(const std::vector<Point2>& pts) {
    double cx = 0.0, cy = 0.0;
    for (const auto& p : pts) {
        cx += p.x;
        cy += p.y;
    }
    cx /= static_cast<double>(pts.size());
    cy /= static_cast<double>(pts.size());
    double mean_dist = 0.0;
    for (const auto& p : pts) mean_dist += std::hypot(p.x - cx, p.y - cy);
    mean_dist /= static_cast<double>(pts.size());
    if (mean_dist < GeometryTolerances::kEpsW) {
        throw DegenerateConfiguration("all points coincident");
    }
    double s = std::sqrt(2.0) / mean_dist;
    Eigen::Matrix3d t;
    t << s, 0, -s * cx, 0, s, -s * cy, 0, 0, 1;
    return t;
}

double triangle_area2(const Point2& a, const Point2& b, const Point2& c) {
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

void check_nondegenerate(const std::vector<Point2>& pts, const char* which) {
    const size_t n = pts.size();
    // Scale-relative collinearity test on every triple; n is small in
    // practice (hand-picked court points), so the cubic scan is fine.
    double span = 0.0;
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j)
            span = std::max(span, std::hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y));
    if (span < GeometryTolerances::kEpsW) {
        throw DegenerateConfiguration(std::string(which) + " points all coincident");
    }
    const double area_tol = 1e-12 * span * span;
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            if (std::hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y) < 1e-12 * span) {
                throw DegenerateConfiguration(std::string(which) + " points coincident");
            }
            for (size_t k = j + 1; k < n; ++k) {
                if (std::abs(triangle_area2(pts[i], pts[j], pts[k])) <= area_tol) {
                    throw DegenerateConfiguration(std::string(which) + " points collinear");
                }
            }
        }
    }
}

}  // namespace

double distance(const Point2& a, const Point2& b) { return std::hypot(a.x - b.x, a.y - b.y); }

Homography::Homography() : m_(canonicalize(Eigen::Matrix3d::Identity())) {}

Homography::Homography(const Eigen::Matrix3d& m) : m_(canonicalize(m)) {
    if (std::abs(m_.determinant()) <= GeometryTolerances::kEpsSingular) {
        throw SingularMatrix("homography matrix is singular");
    }
}

Point2 Homography::apply(const Point2& p) const {
    Eigen::Vector3d v = m_ * Eigen::Vector3d(p.x, p.y, 1.0);
    if (std::abs(v(2)) < GeometryTolerances::kEpsW) {
        throw PointAtInfinity("point maps to infinity");
    }
    return Point2{v(0) / v(2), v(1) / v(2)};
}

Homography Homography::inverse() const {
    // Constructor rejects singular matrices, so the inverse exists.
    return Homography(m_.inverse());
}

Point2 apply_homography(const Homography& h, const Point2& p) { return h.apply(p); }

Homography invert_homography(const Homography& h) { return h.inverse(); }

Homography estimate_homography(const std::vector<Correspondence>& correspondences) {
    const size_t n = correspondences.size();
    if (n < 4) {
        throw InsufficientPoints("need at least 4 correspondences, got " + std::to_string(n));
    }
    std::vector<Point2> cam, world;
    cam.reserve(n);
    world.reserve(n);
    for (const auto& c : correspondences) {
        if (!finite(c.camera) || !finite(c.world)) {
            throw DegenerateConfiguration("non-finite correspondence");
        }
        cam.push_back(c.camera);
        world.push_back(c.world);
    }
    check_nondegenerate(cam, "camera");
    check_nondegenerate(world, "world");

    Eigen::Matrix3d tc = normalizing_transform(cam);
    Eigen::Matrix3d tw = normalizing_transform(world);

    Eigen::MatrixXd a(2 * n, 9);
    for (size_t i = 0; i < n; ++i) {
        Eigen::Vector3d pc = tc * Eigen::Vector3d(cam[i].x, cam[i].y, 1.0);
        Eigen::Vector3d pw = tw * Eigen::Vector3d(world[i].x, world[i].y, 1.0);
        double x = pc(0), y = pc(1);
        double u = pw(0), v = pw(1);
        a.row(2 * i) << -x, -y, -1, 0, 0, 0, u * x, u * y, u;
        a.row(2 * i + 1) << 0, 0, 0, -x, -y, -1, v * x, v * y, v;
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
    Eigen::VectorXd h = svd.matrixV().col(8);
    Eigen::Matrix3d hn;
    hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);

    Eigen::Matrix3d denorm = tw.inverse() * hn * tc;
    return Homography(denorm);
}

ReprojStats reprojection_error(const Homography& h,
                               const std::vector<Correspondence>& correspondences) {
    if (correspondences.empty()) {
        throw InsufficientPoints("reprojection_error needs at least 1 correspondence");
    }
    ReprojStats stats;
    stats.per_point.reserve(correspondences.size());
    double sum = 0.0, sum_sq = 0.0;
    for (const auto& c : correspondences) {
        double e = distance(h.apply(c.camera), c.world);
        stats.per_point.push_back(e);
        sum += e;
        sum_sq += e * e;
        stats.max = std::max(stats.max, e);
    }
    stats.mean = sum / static_cast<double>(stats.per_point.size());
    stats.rms = std::sqrt(sum_sq / static_cast<double>(stats.per_point.size()));
    return stats;
}

std::vector<Correspondence> load_correspondences(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileError("cannot open " + path);
    std::vector<Correspondence> out;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ls(line);
        Correspondence c;
        if (!(ls >> c.camera.x)) continue;  // blank or comment-only line
        if (!(ls >> c.camera.y >> c.world.x >> c.world.y)) {
            throw ParseError("expected `cam_x cam_y world_x world_y` in " + path, line_no);
        }
        double extra;
        if (ls >> extra) {
            throw ParseError("trailing values in " + path, line_no);
        }
        if (!finite(c.camera) || !finite(c.world)) {
            throw ParseError("non-finite correspondence in " + path, line_no);
        }
        out.push_back(c);
    }
    return out;
}

}  // namespace courttrack
