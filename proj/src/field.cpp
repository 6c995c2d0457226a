#include "nopeplus/field.hpp"

#include <cmath>
#include <json.hpp>

#include "nopeplus/common.hpp"

namespace nopeplus {

namespace {
using Json = nlohmann::ordered_json;
}

std::pair<Vec3, double> query_field(const RadianceField& field, const Vec3& x,
                                    const Vec3& /*direction*/) {
  const Vec3 extent = field.bounds_max - field.bounds_min;
  Vec3 u;  // grid coordinates in [0, n-1]
  for (int a = 0; a < 3; ++a) {
    const double t = (x[a] - field.bounds_min[a]) / extent[a];
    if (t < 0.0 || t > 1.0) return {Vec3::Zero(), 0.0};
    u[a] = t * (field.resolution[a] - 1);
  }
  int ix[3];
  double f[3];
  for (int a = 0; a < 3; ++a) {
    ix[a] = std::min(static_cast<int>(u[a]), field.resolution[a] - 2);
    f[a] = u[a] - ix[a];
  }
  double raw_d = 0.0;
  Vec3 raw_c = Vec3::Zero();
  for (int corner = 0; corner < 8; ++corner) {
    const int dx = corner & 1, dy = (corner >> 1) & 1, dz = (corner >> 2) & 1;
    const double w = (dx ? f[0] : 1 - f[0]) * (dy ? f[1] : 1 - f[1]) *
                     (dz ? f[2] : 1 - f[2]);
    const size_t vi = field.vertex_index(ix[0] + dx, ix[1] + dy, ix[2] + dz);
    raw_d += w * field.raw_density[vi];
    for (int c = 0; c < 3; ++c) raw_c[c] += w * field.raw_color[3 * vi + c];
  }
  return {Vec3(sigmoid(raw_c[0]), sigmoid(raw_c[1]), sigmoid(raw_c[2])),
          softplus(raw_d)};
}

void save_field(const RadianceField& field, const std::filesystem::path& json_path,
                const std::filesystem::path& blob_path) {
  Json manifest;
  manifest["format"] = "nopeplus-field-v1";
  manifest["resolution"] = {field.resolution[0], field.resolution[1],
                            field.resolution[2]};
  manifest["bounds_min"] = {field.bounds_min.x(), field.bounds_min.y(),
                            field.bounds_min.z()};
  manifest["bounds_max"] = {field.bounds_max.x(), field.bounds_max.y(),
                            field.bounds_max.z()};
  manifest["density_activation"] = "softplus";
  manifest["color_activation"] = "sigmoid";
  manifest["blob"] = blob_path.filename().string();
  manifest["density_offset"] = 0;
  manifest["color_offset"] = field.vertex_count();
  manifest["vertex_count"] = field.vertex_count();

  std::vector<float> blob;
  blob.reserve(field.param_count());
  for (double v : field.raw_density) blob.push_back(static_cast<float>(v));
  for (double v : field.raw_color) blob.push_back(static_cast<float>(v));
  write_f32_blob(blob_path, blob);
  write_text_file(json_path, manifest.dump(2) + "\n");
}

RadianceField load_field(const std::filesystem::path& json_path) {
  const Json manifest = Json::parse(read_text_file(json_path));
  require(manifest.at("format") == "nopeplus-field-v1",
          ErrorCode::IncompatibleCheckpoint, "unknown field format");
  std::array<int, 3> res = {manifest.at("resolution").at(0).get<int>(),
                            manifest.at("resolution").at(1).get<int>(),
                            manifest.at("resolution").at(2).get<int>()};
  const auto& bmin = manifest.at("bounds_min");
  const auto& bmax = manifest.at("bounds_max");
  RadianceField field(res,
                      Vec3(bmin.at(0).get<double>(), bmin.at(1).get<double>(),
                           bmin.at(2).get<double>()),
                      Vec3(bmax.at(0).get<double>(), bmax.at(1).get<double>(),
                           bmax.at(2).get<double>()));
  const auto blob = read_f32_blob(json_path.parent_path() /
                                  manifest.at("blob").get<std::string>());
  require(blob.size() == field.param_count(), ErrorCode::IncompatibleCheckpoint,
          "field blob size mismatch");
  const size_t nv = field.vertex_count();
  for (size_t i = 0; i < nv; ++i) field.raw_density[i] = blob[i];
  for (size_t i = 0; i < 3 * nv; ++i) field.raw_color[i] = blob[nv + i];
  return field;
}

}  // namespace nopeplus
