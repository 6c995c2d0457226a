#include "nopeplus/render.hpp"

#include <cmath>

#include "nopeplus/parallel.hpp"

namespace nopeplus {

RenderResult render_ray(const RadianceField& field, const Ray& ray, int samples,
                        bool stratified, Rng* rng, RenderCache* cache) {
  require(samples >= 2, ErrorCode::InvalidConfig, "render needs >= 2 samples");
  require(ray.near > 0 && ray.near < ray.far, ErrorCode::InvalidConfig,
          "ray requires 0 < near < far");

  const int n = samples;
  const double bin = (ray.far - ray.near) / n;
  std::vector<double> s(n);
  for (int i = 0; i < n; ++i) {
    const double jitter = stratified && rng ? rng->uniform() : 0.5;
    s[i] = ray.near + (i + jitter) * bin;
  }

  if (cache) {
    cache->samples.assign(n, {});
    cache->ray = ray;
  }

  const Vec3 extent = field.bounds_max - field.bounds_min;
  RenderResult out;
  double transmittance = 1.0;
  for (int i = 0; i < n; ++i) {
    const double delta = (i + 1 < n) ? (s[i + 1] - s[i]) : (ray.far - s[i]);
    const Vec3 x = ray.origin + s[i] * ray.direction;

    bool inside = true;
    int cell[3] = {0, 0, 0};
    double frac[3] = {0, 0, 0};
    for (int a = 0; a < 3; ++a) {
      const double t = (x[a] - field.bounds_min[a]) / extent[a];
      if (t < 0.0 || t > 1.0) {
        inside = false;
        break;
      }
      const double u = t * (field.resolution[a] - 1);
      cell[a] = std::min(static_cast<int>(u), field.resolution[a] - 2);
      frac[a] = u - cell[a];
    }

    double raw_d = 0.0, raw_c[3] = {0, 0, 0};
    if (inside) {
      for (int corner = 0; corner < 8; ++corner) {
        const int dx = corner & 1, dy = (corner >> 1) & 1, dz = (corner >> 2) & 1;
        const double w = (dx ? frac[0] : 1 - frac[0]) *
                         (dy ? frac[1] : 1 - frac[1]) *
                         (dz ? frac[2] : 1 - frac[2]);
        const size_t vi =
            field.vertex_index(cell[0] + dx, cell[1] + dy, cell[2] + dz);
        raw_d += w * field.raw_density[vi];
        for (int c = 0; c < 3; ++c) raw_c[c] += w * field.raw_color[3 * vi + c];
      }
    }

    const double sigma = inside ? softplus(raw_d) : 0.0;
    const double alpha = -std::expm1(-sigma * delta);  // 1 - exp(-sigma*delta)
    const double weight = transmittance * alpha;
    double color[3] = {0, 0, 0};
    if (inside) {
      for (int c = 0; c < 3; ++c) color[c] = sigmoid(raw_c[c]);
    }
    out.color += weight * Vec3(color[0], color[1], color[2]);
    out.depth += weight * s[i];
    out.opacity += weight;
    transmittance *= 1.0 - alpha;

    if (cache) {
      auto& cs = cache->samples[i];
      cs.s = s[i];
      cs.delta = delta;
      cs.inside = inside;
      if (inside) {
        for (int a = 0; a < 3; ++a) {
          cs.cell[a] = cell[a];
          cs.frac[a] = frac[a];
        }
        cs.raw_density = raw_d;
        for (int c = 0; c < 3; ++c) {
          cs.raw_color[c] = raw_c[c];
          cs.color[c] = color[c];
        }
      }
      cs.sigma = sigma;
      cs.alpha = alpha;
      cs.weight = weight;
    }
  }
  return out;
}

RayGrad render_ray_backward(const RadianceField& field, const RenderCache& cache,
                            const Vec3& d_color, double d_depth, double d_opacity,
                            FieldGrad* field_grad) {
  RayGrad grad;
  const int n = static_cast<int>(cache.samples.size());
  if (n == 0) return grad;

  // G_i = dL/d(weight_i). The alpha adjoint uses the reverse recursion
  // dL/dalpha_i = T_i (G_i - H_{i+1}), H_i = alpha_i G_i + (1-alpha_i) H_{i+1},
  // which avoids dividing by (1 - alpha).
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) {
    const auto& cs = cache.samples[i];
    g[i] = d_color.x() * cs.color[0] + d_color.y() * cs.color[1] +
           d_color.z() * cs.color[2] + d_depth * cs.s + d_opacity;
  }

  std::vector<double> transmittance(n);
  {
    double t = 1.0;
    for (int i = 0; i < n; ++i) {
      transmittance[i] = t;
      t *= 1.0 - cache.samples[i].alpha;
    }
  }

  const Vec3 extent = field.bounds_max - field.bounds_min;
  const double inv_extent[3] = {1.0 / extent.x(), 1.0 / extent.y(),
                                1.0 / extent.z()};
  const size_t nv = field.vertex_count();

  double h = 0.0;
  for (int i = n - 1; i >= 0; --i) {
    const auto& cs = cache.samples[i];
    const double d_alpha = transmittance[i] * (g[i] - h);
    h = cs.alpha * g[i] + (1.0 - cs.alpha) * h;
    if (!cs.inside) continue;

    const double d_sigma = d_alpha * cs.delta * (1.0 - cs.alpha);
    const double d_raw_density = d_sigma * softplus_grad(cs.raw_density);
    double d_raw_color[3];
    for (int c = 0; c < 3; ++c) {
      d_raw_color[c] =
          cs.weight * d_color[c] * cs.color[c] * (1.0 - cs.color[c]);
    }

    // Corner scatter plus the spatial gradient of both interpolants.
    Vec3 d_x = Vec3::Zero();
    for (int corner = 0; corner < 8; ++corner) {
      const int dd[3] = {corner & 1, (corner >> 1) & 1, (corner >> 2) & 1};
      const double wa[3] = {dd[0] ? cs.frac[0] : 1 - cs.frac[0],
                            dd[1] ? cs.frac[1] : 1 - cs.frac[1],
                            dd[2] ? cs.frac[2] : 1 - cs.frac[2]};
      const double w = wa[0] * wa[1] * wa[2];
      const size_t vi = field.vertex_index(
          cs.cell[0] + dd[0], cs.cell[1] + dd[1], cs.cell[2] + dd[2]);
      if (field_grad) {
        field_grad->values[vi] += w * d_raw_density;
        for (int c = 0; c < 3; ++c) {
          field_grad->values[nv + 3 * vi + c] += w * d_raw_color[c];
        }
      }
      double upstream = d_raw_density * field.raw_density[vi];
      for (int c = 0; c < 3; ++c) {
        upstream += d_raw_color[c] * field.raw_color[3 * vi + c];
      }
      for (int a = 0; a < 3; ++a) {
        // dw/dx_a = sign * (product of the other two axis weights) * du/dx
        const double others =
            (a == 0 ? wa[1] * wa[2] : (a == 1 ? wa[0] * wa[2] : wa[0] * wa[1]));
        const double sign = dd[a] ? 1.0 : -1.0;
        const double du_dx = (field.resolution[a] - 1) * inv_extent[a];
        d_x[a] += sign * others * du_dx * upstream;
      }
    }
    grad.d_origin += d_x;
    grad.d_direction += cs.s * d_x;
  }
  return grad;
}

PixelRay make_pixel_ray(const Pose& pose, const Intrinsics& intr, double u,
                        double v, double near, double far) {
  PixelRay out;
  const Vec3 dir_cam = intr.dir(u, v);
  const double norm = dir_cam.norm();
  out.unit_cam = dir_cam / norm;
  out.kappa = 1.0 / norm;  // z = kappa * ray distance
  const Mat3 r_inv = so3_exp(-pose.axis_angle);
  out.ray.origin = r_inv * (-pose.translation);
  out.ray.direction = r_inv * out.unit_cam;
  out.ray.near = near;
  out.ray.far = far;
  return out;
}

Vec6 pixel_ray_pose_backward(const Pose& pose, const PixelRay& pixel_ray,
                             const RayGrad& grad) {
  // origin = exp(-w)(-t), direction = exp(-w) unit_cam
  Vec6 out = Vec6::Zero();
  const Vec3 na = -pose.axis_angle;
  const Vec3 d_na =
      rotate_backward_axis(na, pixel_ray.ray.origin, grad.d_origin) +
      rotate_backward_axis(na, pixel_ray.ray.direction, grad.d_direction);
  out.head<3>() = -d_na;
  out.tail<3>() = -(so3_exp(pose.axis_angle) * grad.d_origin);
  return out;
}

ViewRender render_view(const RadianceField& field, const Pose& pose,
                       const Intrinsics& intr, int samples, double near,
                       double far, std::optional<uint64_t> jitter_seed) {
  ViewRender out;
  out.color = Image(intr.width, intr.height, 3);
  out.depth = Image(intr.width, intr.height, 1);
  out.opacity = Image(intr.width, intr.height, 1);

  const size_t pixels = static_cast<size_t>(intr.width) * intr.height;
  parallel_for(pixels, [&](size_t p) {
    const int px = static_cast<int>(p % intr.width);
    const int py = static_cast<int>(p / intr.width);
    const PixelRay pr = make_pixel_ray(pose, intr, px, py, near, far);
    RenderResult res;
    if (jitter_seed) {
      Rng rng = Rng::stream(*jitter_seed, 0x7A5Eull, p);
      res = render_ray(field, pr.ray, samples, /*stratified=*/true, &rng);
    } else {
      res = render_ray(field, pr.ray, samples, /*stratified=*/false, nullptr);
    }
    for (int c = 0; c < 3; ++c) {
      out.color.at(px, py, c) = static_cast<float>(res.color[c]);
    }
    out.depth.at(px, py, 0) =
        res.opacity > 0 ? static_cast<float>(pr.kappa * res.depth) : 0.0f;
    out.opacity.at(px, py, 0) = static_cast<float>(res.opacity);
  });
  return out;
}

}  // namespace nopeplus
