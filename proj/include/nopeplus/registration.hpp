#pragma once

#include <optional>
#include <vector>

#include "nopeplus/geometry.hpp"

namespace nopeplus {

struct PointCloud {
  std::vector<Vec3> points;
  // Optional provenance: per-point source pixel and image id.
  std::vector<Vec2> pixels;
  std::vector<int> image_ids;

  size_t size() const { return points.size(); }
};

/// Least-squares similarity (s, R, t) minimizing sum ||target - (s R source + t)||^2.
/// Throws DegenerateConfiguration for collinear or coincident sources.
SimilarityTransform umeyama_align(const std::vector<Vec3>& source,
                                  const std::vector<Vec3>& target);

/// Rigid-only Procrustes solve on paired points (scale fixed to 1).
Pose kabsch_align(const std::vector<Vec3>& source,
                  const std::vector<Vec3>& target);

struct IcpConfig {
  int max_iters = 50;
  double tol = 1e-8;
  size_t max_points = 5000;  // subsample cap before iterating
  bool use_correspondences = true;
  uint64_t seed = 17;
};

struct IcpResult {
  Pose transform;  // maps source points onto target points
  int iterations = 0;
  double residual = 0.0;  // mean point distance at exit
  bool converged = true;  // false = NoConvergence, transform is best effort
};

/// Point-to-point ICP. When use_correspondences is set and the clouds have
/// equal size, the first iteration is a closed-form Procrustes solve on the
/// paired points; nearest-neighbor iterations refine from there.
IcpResult icp_register(const PointCloud& source, const PointCloud& target,
                       const IcpConfig& config = {});

/// Compact exact nearest-neighbor structure used by ICP.
class KdTree3 {
 public:
  explicit KdTree3(const std::vector<Vec3>& points);
  /// Index of the nearest point; points must be non-empty.
  size_t nearest(const Vec3& query, double* out_dist2 = nullptr) const;

 private:
  struct Node {
    int axis = -1;     // -1 marks a leaf
    double split = 0;  // coordinate of the splitting point
    int point = -1;    // index into points_ for the splitting point
    int left = -1, right = -1;
  };
  int build(std::vector<int>& idx, int lo, int hi, int depth);
  void search(int node, const Vec3& q, size_t& best, double& best_d2) const;

  std::vector<Vec3> points_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

}  // namespace nopeplus
