#include "nopeplus/geometry.hpp"

#include <cmath>

namespace nopeplus {

Mat3 skew(const Vec3& v) {
  Mat3 s;
  s << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return s;
}

Mat3 so3_exp(const Vec3& w) {
  const double theta2 = w.squaredNorm();
  const Mat3 k = skew(w);
  if (theta2 < 1e-16) {
    // Second-order Taylor expansion; exact to double precision here.
    return Mat3::Identity() + k + 0.5 * k * k;
  }
  const double theta = std::sqrt(theta2);
  const double a = std::sin(theta) / theta;
  const double b = (1.0 - std::cos(theta)) / theta2;
  return Mat3::Identity() + a * k + b * k * k;
}

Vec3 so3_log(const Mat3& rotation) {
  // Quaternion-mediated logarithm; avoids the trace-based branch
  // singularity near theta = pi.
  Eigen::Quaterniond q(rotation);
  q.normalize();
  if (q.w() < 0) q.coeffs() = -q.coeffs();
  const double sin_half = q.vec().norm();
  const double cos_half = q.w();
  if (sin_half < 1e-12) {
    return 2.0 * q.vec();  // theta ~ 0
  }
  const double theta = 2.0 * std::atan2(sin_half, cos_half);
  return (theta / sin_half) * q.vec();
}

Mat3 so3_left_jacobian(const Vec3& w) {
  const double theta2 = w.squaredNorm();
  const Mat3 k = skew(w);
  if (theta2 < 1e-16) {
    return Mat3::Identity() + 0.5 * k + (1.0 / 6.0) * k * k;
  }
  const double theta = std::sqrt(theta2);
  const double a = (1.0 - std::cos(theta)) / theta2;
  const double b = (theta - std::sin(theta)) / (theta2 * theta);
  return Mat3::Identity() + a * k + b * k * k;
}

Vec3 rotate_backward_axis(const Vec3& w, const Vec3& rotated_v, const Vec3& g) {
  // d<g, exp(w) v>/dw = Jl(w)^T ((exp(w) v) x g)
  return so3_left_jacobian(w).transpose() * rotated_v.cross(g);
}

Pose Pose::compose(const Pose& a, const Pose& b) {
  Pose out;
  const Mat3 ra = so3_exp(a.axis_angle);
  out.axis_angle = so3_log(ra * so3_exp(b.axis_angle));
  out.translation = ra * b.translation + a.translation;
  return out;
}

Vec3 pose_apply(const Pose& pose, const Vec3& x) { return pose.apply(x); }

Vec2 project(const Intrinsics& intr, const Vec3& x_cam) {
  require(x_cam.z() > 1e-9, ErrorCode::NonPositiveDepth,
          "projection of point with non-positive depth");
  return Vec2(intr.fx * x_cam.x() / x_cam.z() + intr.cx,
              intr.fy * x_cam.y() / x_cam.z() + intr.cy);
}

Vec3 backproject(const Intrinsics& intr, const Vec2& pixel, double depth,
                 const Pose& pose) {
  require(depth > 0, ErrorCode::NonPositiveDepth,
          "backprojection with non-positive depth");
  const Vec3 cam = depth * intr.dir(pixel.x(), pixel.y());
  return pose.inverse().apply(cam);
}

}  // namespace nopeplus
