#pragma once

#include <Eigen/Dense>
#include <vector>

#include "courttrack/errors.hpp"

namespace courttrack {

/// Tolerances used throughout the geometry module. Kept in one place so
/// callers and tests agree on what "exact" means.
struct GeometryTolerances {
    /// |w| below this counts as a point at infinity.
    static constexpr double kEpsW = 1e-12;
    /// Residuals below this count as exact (noiseless calibration, inverses).
    static constexpr double kEpsExact = 1e-9;
    /// |det| below this (after canonicalization) counts as singular.
    static constexpr double kEpsSingular = 1e-12;
};

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2&, const Point2&) = default;
};

double distance(const Point2& a, const Point2& b);

/// 3x3 projective map between the camera image plane and the court ground
/// plane. Always stored in canonical form: unit Frobenius norm with the
/// bottom-right entry nonnegative (if that entry is zero, the first nonzero
/// entry in row-major order is positive).
class Homography {
  public:
    Homography();  // identity
    explicit Homography(const Eigen::Matrix3d& m);

    const Eigen::Matrix3d& matrix() const { return m_; }

    /// Maps p through the homography. Throws PointAtInfinity when the
    /// projective scale |w| < kEpsW.
    Point2 apply(const Point2& p) const;

    /// Canonical inverse. Throws SingularMatrix.
    Homography inverse() const;

    static Homography identity() { return Homography(); }

  private:
    Eigen::Matrix3d m_;
};

/// A matched camera-pixel / world-meter point pair.
struct Correspondence {
    Point2 camera;  // pixels
    Point2 world;   // meters
};

struct ReprojStats {
    std::vector<double> per_point;
    double rms = 0.0;
    double max = 0.0;
    double mean = 0.0;
};

/// Estimates the camera->world homography from n >= 4 correspondences by the
/// normalized DLT: both point sets are similarity-normalized (centroid to the
/// origin, mean distance sqrt(2)), the stacked 2n x 9 system is solved by its
/// smallest singular vector, and the result is denormalized and canonicalized.
///
/// Throws InsufficientPoints (n < 4) and DegenerateConfiguration (coincident
/// points or three collinear points in either set).
Homography estimate_homography(const std::vector<Correspondence>& correspondences);

Point2 apply_homography(const Homography& h, const Point2& p);

Homography invert_homography(const Homography& h);

/// Per-point Euclidean distance between apply(h, camera_i) and world_i.
ReprojStats reprojection_error(const Homography& h,
                               const std::vector<Correspondence>& correspondences);

/// Loads correspondences from a plain-text calibration file: one per line,
/// `cam_x cam_y world_x world_y`, '#' comments and blank lines allowed.
std::vector<Correspondence> load_correspondences(const std::string& path);

}  // namespace courttrack
