#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "nopeplus/common.hpp"

namespace nopeplus {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;

// ---------------------------------------------------------------------------
// SO(3) utilities (axis-angle <-> rotation matrix)
// ---------------------------------------------------------------------------

Mat3 skew(const Vec3& v);

/// Rodrigues exponential map. Safe for ||w|| -> 0.
Mat3 so3_exp(const Vec3& axis_angle);

/// Logarithm via unit quaternion, stable across the whole ball ||w|| <= pi.
Vec3 so3_log(const Mat3& rotation);

/// Left Jacobian of SO(3): exp(w + d) ~ exp((Jl(w) d)^) exp(w).
Mat3 so3_left_jacobian(const Vec3& axis_angle);

/// Gradient of <g, exp(w) v> with respect to w, for constant v.
Vec3 rotate_backward_axis(const Vec3& axis_angle, const Vec3& rotated_v,
                          const Vec3& g);

// ---------------------------------------------------------------------------
// Pose: world-to-camera rigid transform, axis-angle + translation
// ---------------------------------------------------------------------------

struct Pose {
  Vec3 axis_angle = Vec3::Zero();
  Vec3 translation = Vec3::Zero();

  static Pose identity() { return {}; }

  Mat3 rotation() const { return so3_exp(axis_angle); }

  /// R x + t
  Vec3 apply(const Vec3& x) const { return rotation() * x + translation; }

  Pose inverse() const {
    Pose inv;
    inv.axis_angle = -axis_angle;
    inv.translation = -(so3_exp(-axis_angle) * translation);
    return inv;
  }

  /// (a * b)(x) = a(b(x))
  static Pose compose(const Pose& a, const Pose& b);

  static Pose from_matrix(const Mat3& rotation, const Vec3& translation) {
    return Pose{so3_log(rotation), translation};
  }

  /// Optical center in world coordinates, -R^T t.
  Vec3 camera_center() const {
    return -(rotation().transpose() * translation);
  }

  Vec6 as_vector() const {
    Vec6 v;
    v << axis_angle, translation;
    return v;
  }
  static Pose from_vector(const Vec6& v) {
    return Pose{v.head<3>(), v.tail<3>()};
  }
};

Vec3 pose_apply(const Pose& pose, const Vec3& x);

// ---------------------------------------------------------------------------
// Intrinsics and projection
// ---------------------------------------------------------------------------

struct Intrinsics {
  double fx = 0, fy = 0, cx = 0, cy = 0;
  int width = 0, height = 0;

  void validate() const {
    require(fx > 0 && fy > 0, ErrorCode::InvalidConfig, "focal lengths must be positive");
    require(cx >= 0 && cx < width && cy >= 0 && cy < height,
            ErrorCode::InvalidConfig, "principal point outside image");
  }

  /// Camera-frame homogeneous direction K^-1 (u, v, 1).
  Vec3 dir(double u, double v) const {
    return Vec3((u - cx) / fx, (v - cy) / fy, 1.0);
  }
};

/// Pinhole projection of a camera-frame point. Throws NonPositiveDepth when
/// z <= 1e-9.
Vec2 project(const Intrinsics& intr, const Vec3& x_cam);

/// World point for pixel (u, v) at camera-frame depth z (z-depth convention):
/// pose^-1 applied to depth * K^-1 (u, v, 1).
Vec3 backproject(const Intrinsics& intr, const Vec2& pixel, double depth,
                 const Pose& pose);

// ---------------------------------------------------------------------------
// Similarity transform (Umeyama alignment output)
// ---------------------------------------------------------------------------

struct SimilarityTransform {
  double scale = 1.0;
  Vec3 rotation = Vec3::Zero();  // axis-angle
  Vec3 translation = Vec3::Zero();

  Vec3 apply(const Vec3& x) const {
    return scale * (so3_exp(rotation) * x) + translation;
  }
  SimilarityTransform inverse() const {
    SimilarityTransform inv;
    inv.scale = 1.0 / scale;
    inv.rotation = -rotation;
    inv.translation = -(so3_exp(-rotation) * translation) / scale;
    return inv;
  }
};

}  // namespace nopeplus
