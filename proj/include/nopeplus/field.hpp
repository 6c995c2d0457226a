#pragma once

#include <array>
#include <filesystem>

#include "nopeplus/geometry.hpp"

namespace nopeplus {

/// Raw density value whose softplus underflows to exactly zero; fields
/// initialized with it render exactly black with zero opacity.
constexpr double kRawEmptyDensity = -1e30;

inline double softplus(double x) {
  if (x > 30.0) return x;
  if (x < -700.0) return 0.0;  // exp underflow, exact zero
  return std::log1p(std::exp(x));
}
inline double softplus_grad(double x) {  // = sigmoid(x)
  if (x >= 0) {
    const double e = std::exp(-x);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}
inline double sigmoid(double x) { return softplus_grad(x); }
inline double sigmoid_grad(double x) {
  const double s = sigmoid(x);
  return s * (1.0 - s);
}

/// Trilinear voxel grid storing raw per-vertex density (1) and color (3).
/// Activations: density = softplus(raw), color = sigmoid(raw). Vertices are
/// laid out x-fastest; vertex (ix,iy,iz) has linear index
/// ix + nx*(iy + ny*iz).
struct RadianceField {
  std::array<int, 3> resolution = {2, 2, 2};
  Vec3 bounds_min = Vec3(-1, -1, -1);
  Vec3 bounds_max = Vec3(1, 1, 1);
  std::vector<double> raw_density;  // nv
  std::vector<double> raw_color;    // 3*nv, rgb interleaved per vertex

  RadianceField() { allocate(); }
  RadianceField(std::array<int, 3> res, const Vec3& bmin, const Vec3& bmax)
      : resolution(res), bounds_min(bmin), bounds_max(bmax) {
    validate();
    allocate();
  }

  void validate() const {
    require(resolution[0] >= 2 && resolution[1] >= 2 && resolution[2] >= 2,
            ErrorCode::InvalidConfig, "field resolution must be >= 2 per axis");
    require((bounds_max - bounds_min).minCoeff() > 0, ErrorCode::InvalidConfig,
            "field bounds must satisfy min < max per axis");
  }

  size_t vertex_count() const {
    return static_cast<size_t>(resolution[0]) * resolution[1] * resolution[2];
  }
  size_t param_count() const { return 4 * vertex_count(); }

  size_t vertex_index(int ix, int iy, int iz) const {
    return static_cast<size_t>(ix) +
           static_cast<size_t>(resolution[0]) *
               (static_cast<size_t>(iy) +
                static_cast<size_t>(resolution[1]) * static_cast<size_t>(iz));
  }

  /// Flat parameter view: [raw_density | raw_color].
  double param(size_t i) const {
    return i < raw_density.size() ? raw_density[i]
                                  : raw_color[i - raw_density.size()];
  }
  void set_param(size_t i, double v) {
    if (i < raw_density.size()) {
      raw_density[i] = v;
    } else {
      raw_color[i - raw_density.size()] = v;
    }
  }

 private:
  void allocate() {
    raw_density.assign(vertex_count(), kRawEmptyDensity);
    raw_color.assign(3 * vertex_count(), 0.0);
  }
};

/// Activated field query: trilinear interpolation of raw values followed by
/// the activations. Outside the bounds the density is 0 and the color black.
/// The direction argument is accepted for interface compatibility; this
/// backend is view-independent.
std::pair<Vec3, double> query_field(const RadianceField& field, const Vec3& x,
                                    const Vec3& direction = Vec3::UnitZ());

// Checkpoint: manifest JSON + little-endian float32 blob, density block
// first, then interleaved rgb, both in x-fastest vertex order.
void save_field(const RadianceField& field, const std::filesystem::path& json_path,
                const std::filesystem::path& blob_path);
RadianceField load_field(const std::filesystem::path& json_path);

}  // namespace nopeplus
