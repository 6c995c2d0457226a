#include "nopeplus/image.hpp"

#include <algorithm>
#include <cmath>

namespace nopeplus {

Image load_image(const std::filesystem::path& path, int width, int height,
                 int channels) {
  Image img(width, height, channels);
  auto blob = read_f32_blob(path);
  require(blob.size() == img.data.size(), ErrorCode::ShapeMismatch,
          "image blob size mismatch: " + path.string());
  img.data = std::move(blob);
  return img;
}

void save_image(const std::filesystem::path& path, const Image& image) {
  write_f32_blob(path, image.data);
}

double sample_bilinear(const Image& image, double u, double v, int c) {
  const double x = std::clamp(u, 0.0, static_cast<double>(image.width - 1));
  const double y = std::clamp(v, 0.0, static_cast<double>(image.height - 1));
  const int x0 = std::min(static_cast<int>(std::floor(x)), image.width - 2 >= 0 ? image.width - 2 : 0);
  const int y0 = std::min(static_cast<int>(std::floor(y)), image.height - 2 >= 0 ? image.height - 2 : 0);
  const int x1 = std::min(x0 + 1, image.width - 1);
  const int y1 = std::min(y0 + 1, image.height - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  const double v00 = image.at(x0, y0, c);
  const double v10 = image.at(x1, y0, c);
  const double v01 = image.at(x0, y1, c);
  const double v11 = image.at(x1, y1, c);
  return (1 - fy) * ((1 - fx) * v00 + fx * v10) +
         (fy) * ((1 - fx) * v01 + fx * v11);
}

std::optional<double> sample_depth(const Image& depth, double u, double v) {
  if (u < 0 || v < 0 || u > depth.width - 1 || v > depth.height - 1) {
    return std::nullopt;
  }
  const int x0 = std::min(static_cast<int>(std::floor(u)),
                          std::max(depth.width - 2, 0));
  const int y0 = std::min(static_cast<int>(std::floor(v)),
                          std::max(depth.height - 2, 0));
  const int x1 = std::min(x0 + 1, depth.width - 1);
  const int y1 = std::min(y0 + 1, depth.height - 1);
  const double fx = u - x0;
  const double fy = v - y0;
  const double d00 = depth.at(x0, y0, 0);
  const double d10 = depth.at(x1, y0, 0);
  const double d01 = depth.at(x0, y1, 0);
  const double d11 = depth.at(x1, y1, 0);
  if (d00 <= 0 || d10 <= 0 || d01 <= 0 || d11 <= 0) return std::nullopt;
  const double inv = (1 - fy) * ((1 - fx) / d00 + fx / d10) +
                     (fy) * ((1 - fx) / d01 + fx / d11);
  if (!(inv > 0) || !std::isfinite(inv)) return std::nullopt;
  return 1.0 / inv;
}

}  // namespace nopeplus
