#pragma once

#include "nopeplus/field.hpp"
#include "nopeplus/image.hpp"
#include "nopeplus/rng.hpp"

namespace nopeplus {

struct Ray {
  Vec3 origin = Vec3::Zero();
  Vec3 direction = Vec3::UnitZ();  // unit norm
  double near = 0.1;
  double far = 1.0;
};

struct RenderResult {
  Vec3 color = Vec3::Zero();
  double depth = 0.0;  // expected termination distance along the ray
  double opacity = 0.0;
};

/// Per-sample forward record kept for the backward pass.
struct RenderCache {
  struct Sample {
    double s = 0;       // position along the ray
    double delta = 0;   // quadrature interval
    bool inside = false;
    int cell[3] = {0, 0, 0};
    double frac[3] = {0, 0, 0};
    double raw_density = 0;  // interpolated raw values
    double raw_color[3] = {0, 0, 0};
    double sigma = 0;
    double alpha = 0;
    double weight = 0;  // T_i * alpha_i
    double color[3] = {0, 0, 0};
  };
  std::vector<Sample> samples;
  Ray ray;
};

/// Accumulator for gradients w.r.t. the field's raw parameters, laid out as
/// the field's flat parameter view: [density grads | color grads].
struct FieldGrad {
  std::vector<double> values;
  void resize(const RadianceField& field) {
    values.assign(field.param_count(), 0.0);
  }
};

/// Quadrature volume render: alpha compositing over `samples` intervals of
/// [near, far]. With `stratified` each interval is jittered by the rng;
/// otherwise midpoints are used and the result is deterministic.
RenderResult render_ray(const RadianceField& field, const Ray& ray, int samples,
                        bool stratified, Rng* rng, RenderCache* cache = nullptr);

/// Reverse pass for one ray: given dL/d(color, depth, opacity), accumulates
/// gradients into the field grad buffer and returns dL/d(origin, direction).
struct RayGrad {
  Vec3 d_origin = Vec3::Zero();
  Vec3 d_direction = Vec3::Zero();
};
RayGrad render_ray_backward(const RadianceField& field, const RenderCache& cache,
                            const Vec3& d_color, double d_depth, double d_opacity,
                            FieldGrad* field_grad);

/// Camera ray through pixel (u, v) for a world-to-camera pose. Returns the
/// ray plus the z-depth conversion factor kappa: z = kappa * ray_distance.
struct PixelRay {
  Ray ray;
  double kappa = 1.0;
  Vec3 unit_cam = Vec3::UnitZ();  // unit direction in the camera frame
};
PixelRay make_pixel_ray(const Pose& pose, const Intrinsics& intr, double u,
                        double v, double near, double far);

/// Pulls dL/d(origin, direction) back to the pose's 6 parameters.
Vec6 pixel_ray_pose_backward(const Pose& pose, const PixelRay& pixel_ray,
                             const RayGrad& grad);

/// One render_ray per pixel center (midpoint sampling unless a seed is
/// given, in which case per-pixel jitter streams keep the result
/// deterministic and thread-count independent). Returns the color image and
/// the z-depth buffer (depth = kappa * ray depth; zero-opacity pixels keep
/// depth 0), plus an opacity buffer.
struct ViewRender {
  Image color;    // h x w x 3
  Image depth;    // h x w x 1, z-depth convention
  Image opacity;  // h x w x 1
};
ViewRender render_view(const RadianceField& field, const Pose& pose,
                       const Intrinsics& intr, int samples, double near,
                       double far, std::optional<uint64_t> jitter_seed = {});

}  // namespace nopeplus
