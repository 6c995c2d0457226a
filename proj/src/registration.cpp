#include "nopeplus/registration.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "nopeplus/rng.hpp"

namespace nopeplus {

namespace {

Vec3 centroid(const std::vector<Vec3>& pts) {
  Vec3 c = Vec3::Zero();
  for (const auto& p : pts) c += p;
  return c / static_cast<double>(pts.size());
}

struct SimilaritySolution {
  double scale;
  Mat3 rotation;
  Vec3 translation;
};

SimilaritySolution solve_similarity(const std::vector<Vec3>& source,
                                    const std::vector<Vec3>& target,
                                    bool with_scale) {
  require(source.size() == target.size(), ErrorCode::LengthMismatch,
          "alignment inputs differ in length");
  require(source.size() >= 3, ErrorCode::DegenerateConfiguration,
          "alignment needs at least 3 points");
  const double n = static_cast<double>(source.size());
  const Vec3 mu_s = centroid(source);
  const Vec3 mu_t = centroid(target);

  Mat3 sigma = Mat3::Zero();
  double var_s = 0.0;
  for (size_t i = 0; i < source.size(); ++i) {
    const Vec3 ds = source[i] - mu_s;
    const Vec3 dt = target[i] - mu_t;
    sigma += dt * ds.transpose();
    var_s += ds.squaredNorm();
  }
  sigma /= n;
  var_s /= n;

  Eigen::JacobiSVD<Mat3> svd(sigma, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec3 d = svd.singularValues();
  require(var_s > 1e-18 && d(1) > 1e-12 * std::max(d(0), 1e-300),
          ErrorCode::DegenerateConfiguration,
          "alignment input is collinear or coincident");

  Vec3 s_diag = Vec3::Ones();
  if (svd.matrixU().determinant() * svd.matrixV().determinant() < 0) {
    s_diag(2) = -1.0;
  }
  const Mat3 r = svd.matrixU() * s_diag.asDiagonal() * svd.matrixV().transpose();
  const double scale = with_scale ? (d.dot(s_diag) / var_s) : 1.0;
  return {scale, r, mu_t - scale * (r * mu_s)};
}

}  // namespace

SimilarityTransform umeyama_align(const std::vector<Vec3>& source,
                                  const std::vector<Vec3>& target) {
  const auto sol = solve_similarity(source, target, /*with_scale=*/true);
  require(sol.scale > 0, ErrorCode::DegenerateConfiguration,
          "alignment produced non-positive scale");
  SimilarityTransform out;
  out.scale = sol.scale;
  out.rotation = so3_log(sol.rotation);
  out.translation = sol.translation;
  return out;
}

Pose kabsch_align(const std::vector<Vec3>& source,
                  const std::vector<Vec3>& target) {
  const auto sol = solve_similarity(source, target, /*with_scale=*/false);
  return Pose{so3_log(sol.rotation), sol.translation};
}

// ---------------------------------------------------------------------------
// KdTree3
// ---------------------------------------------------------------------------

KdTree3::KdTree3(const std::vector<Vec3>& points) : points_(points) {
  std::vector<int> idx(points_.size());
  std::iota(idx.begin(), idx.end(), 0);
  nodes_.reserve(points_.size());
  root_ = build(idx, 0, static_cast<int>(idx.size()), 0);
}

int KdTree3::build(std::vector<int>& idx, int lo, int hi, int depth) {
  if (lo >= hi) return -1;
  const int axis = depth % 3;
  const int mid = lo + (hi - lo) / 2;
  std::nth_element(idx.begin() + lo, idx.begin() + mid, idx.begin() + hi,
                   [&](int a, int b) { return points_[a][axis] < points_[b][axis]; });
  Node node;
  node.axis = axis;
  node.point = idx[mid];
  node.split = points_[idx[mid]][axis];
  const int self = static_cast<int>(nodes_.size());
  nodes_.push_back(node);
  nodes_[self].left = build(idx, lo, mid, depth + 1);
  nodes_[self].right = build(idx, mid + 1, hi, depth + 1);
  return self;
}

void KdTree3::search(int node, const Vec3& q, size_t& best, double& best_d2) const {
  if (node < 0) return;
  const Node& n = nodes_[node];
  const double d2 = (points_[n.point] - q).squaredNorm();
  if (d2 < best_d2) {
    best_d2 = d2;
    best = static_cast<size_t>(n.point);
  }
  const double delta = q[n.axis] - n.split;
  const int near = delta < 0 ? n.left : n.right;
  const int far = delta < 0 ? n.right : n.left;
  search(near, q, best, best_d2);
  if (delta * delta < best_d2) search(far, q, best, best_d2);
}

size_t KdTree3::nearest(const Vec3& query, double* out_dist2) const {
  size_t best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  search(root_, query, best, best_d2);
  if (out_dist2) *out_dist2 = best_d2;
  return best;
}

// ---------------------------------------------------------------------------
// ICP
// ---------------------------------------------------------------------------

IcpResult icp_register(const PointCloud& source, const PointCloud& target,
                       const IcpConfig& config) {
  require(source.size() >= 3 && target.size() >= 3, ErrorCode::TooSmall,
          "icp needs at least 3 points per cloud");

  const bool paired =
      config.use_correspondences && source.size() == target.size();

  std::vector<Vec3> src = source.points;
  std::vector<Vec3> tgt = target.points;
  Rng rng(config.seed);
  if (paired && src.size() > config.max_points) {
    // Joint subsample keeps the pairing intact.
    auto keep = rng.sample_indices(src.size(), config.max_points);
    std::sort(keep.begin(), keep.end());
    std::vector<Vec3> s2, t2;
    s2.reserve(keep.size());
    t2.reserve(keep.size());
    for (size_t k : keep) {
      s2.push_back(src[k]);
      t2.push_back(tgt[k]);
    }
    src.swap(s2);
    tgt.swap(t2);
  } else if (!paired) {
    auto cap = [&](std::vector<Vec3>& pts) {
      if (pts.size() <= config.max_points) return;
      auto keep = rng.sample_indices(pts.size(), config.max_points);
      std::sort(keep.begin(), keep.end());
      std::vector<Vec3> out;
      out.reserve(keep.size());
      for (size_t k : keep) out.push_back(pts[k]);
      pts.swap(out);
    };
    cap(src);
    cap(tgt);
  }

  Pose transform = Pose::identity();
  if (paired) {
    transform = kabsch_align(src, tgt);
  }

  const KdTree3 tree(tgt);
  auto mean_residual = [&](const Pose& t) {
    const Mat3 r = t.rotation();
    double sum = 0.0;
    for (const auto& p : src) {
      double d2 = 0.0;
      tree.nearest(r * p + t.translation, &d2);
      sum += std::sqrt(d2);
    }
    return sum / static_cast<double>(src.size());
  };

  IcpResult result;
  result.transform = transform;
  double prev_residual = mean_residual(transform);
  result.residual = prev_residual;

  std::vector<Vec3> moved(src.size());
  std::vector<Vec3> matched(src.size());
  for (int iter = 0; iter < config.max_iters; ++iter) {
    const Mat3 r = transform.rotation();
    for (size_t i = 0; i < src.size(); ++i) {
      moved[i] = r * src[i] + transform.translation;
      matched[i] = tgt[tree.nearest(moved[i])];
    }
    transform = kabsch_align(src, matched);

    const double residual = mean_residual(transform);
    result.iterations = iter + 1;
    if (residual <= prev_residual + 1e-15) {
      result.transform = transform;
      result.residual = residual;
    }
    if (std::abs(prev_residual - residual) < config.tol) {
      result.converged = true;
      return result;
    }
    prev_residual = std::min(prev_residual, residual);
  }
  result.converged = false;
  return result;
}

}  // namespace nopeplus
