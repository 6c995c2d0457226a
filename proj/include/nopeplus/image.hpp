#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "nopeplus/common.hpp"

namespace nopeplus {

/// Row-major channel-interleaved float image. Pixel (0,0) is the center of
/// the top-left pixel; sampling coordinates are in pixel units.
struct Image {
  int width = 0, height = 0, channels = 0;
  std::vector<float> data;

  Image() = default;
  Image(int w, int h, int c) : width(w), height(h), channels(c) {
    data.assign(static_cast<size_t>(w) * h * c, 0.0f);
  }

  float& at(int x, int y, int c) {
    return data[(static_cast<size_t>(y) * width + x) * channels + c];
  }
  float at(int x, int y, int c) const {
    return data[(static_cast<size_t>(y) * width + x) * channels + c];
  }

  bool same_shape(const Image& other) const {
    return width == other.width && height == other.height &&
           channels == other.channels;
  }
};

Image load_image(const std::filesystem::path& path, int width, int height,
                 int channels);
void save_image(const std::filesystem::path& path, const Image& image);

/// Bilinear sample of channel c at float pixel (u, v); clamps to the valid
/// sample rectangle [0, w-1] x [0, h-1].
double sample_bilinear(const Image& image, double u, double v, int c);

/// Depth lookup at a float pixel, interpolating in inverse depth (exact on
/// planar surfaces). Values <= 0 mark invalid pixels; returns nullopt when
/// any contributing neighbor is invalid or the pixel is out of bounds.
std::optional<double> sample_depth(const Image& depth, double u, double v);

}  // namespace nopeplus
