#include "ibi/geometry.hpp"

#include "ibi/errors.hpp"

#include <Eigen/Geometry>
#include <Eigen/SVD>

#include <algorithm>
#include <limits>
#include <numbers>
#include <numeric>

namespace ibi {

bool is_finite(const Point3& p) {
  return std::isfinite(p.x()) && std::isfinite(p.y()) && std::isfinite(p.z());
}

double triangle_area(const Point3& a, const Point3& b, const Point3& c) {
  return 0.5 * (b - a).cross(c - a).norm();
}

PointCloud::PointCloud(std::vector<Point3> points) : points_(std::move(points)) {
  if (points_.empty()) throw InvalidInput("point cloud is empty");
  for (const auto& p : points_) {
    if (!is_finite(p)) throw InvalidInput("point cloud contains a non-finite coordinate");
  }
}

double PointCloud::diameter() const {
  double best = 0.0;
  for (std::size_t i = 0; i < points_.size(); ++i)
    for (std::size_t j = i + 1; j < points_.size(); ++j)
      best = std::max(best, squared_distance(points_[i], points_[j]));
  return std::sqrt(best);
}

Point3 PointCloud::centroid() const {
  Point3 sum = Point3::Zero();
  for (const auto& p : points_) sum += p;
  return sum / static_cast<double>(points_.size());
}

// ---------------------------------------------------------------------------

bool RigidTransform::is_rotation(const Eigen::Matrix3d& r, double tol) {
  if (!r.allFinite()) return false;
  const Eigen::Matrix3d gram = r.transpose() * r;
  if ((gram - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > tol) return false;
  return std::abs(r.determinant() - 1.0) <= tol;
}

RigidTransform::RigidTransform(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation)
    : rotation_(rotation), translation_(translation) {
  if (!is_rotation(rotation_)) throw InvalidInput("matrix is not a proper rotation");
  if (!translation_.allFinite()) throw InvalidInput("translation is not finite");
}

RigidTransform RigidTransform::inverse() const {
  RigidTransform out;
  out.rotation_ = rotation_.transpose();
  out.translation_ = -(out.rotation_ * translation_);
  return out;
}

RigidTransform RigidTransform::compose(const RigidTransform& other) const {
  RigidTransform out;
  out.rotation_ = rotation_ * other.rotation_;
  out.translation_ = rotation_ * other.translation_ + translation_;
  return out;
}

PointCloud apply_transform(const RigidTransform& transform, const PointCloud& cloud) {
  std::vector<Point3> out;
  out.reserve(cloud.size());
  for (const auto& p : cloud) out.push_back(transform(p));
  return PointCloud(std::move(out));
}

// ---------------------------------------------------------------------------
// NeighborIndex

namespace {
constexpr std::size_t kLeafSize = 8;
constexpr std::size_t kNoExclude = std::numeric_limits<std::size_t>::max();
}  // namespace

NeighborIndex::NeighborIndex(const PointCloud& cloud)
    : points_(cloud.points().begin(), cloud.points().end()), order_(cloud.size()) {
  if (points_.empty()) throw InvalidInput("cannot index an empty cloud");
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  nodes_.reserve(2 * points_.size() / kLeafSize + 2);
  root_ = build(0, points_.size(), 0);
}

int NeighborIndex::build(std::size_t begin, std::size_t end, int depth) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back({begin, end, -1, 0.0, -1, -1});
  if (end - begin <= kLeafSize) return id;

  Point3 lo = points_[order_[begin]];
  Point3 hi = lo;
  for (std::size_t i = begin; i < end; ++i) {
    lo = lo.cwiseMin(points_[order_[i]]);
    hi = hi.cwiseMax(points_[order_[i]]);
  }
  int axis = 0;
  (hi - lo).maxCoeff(&axis);
  if (hi[axis] == lo[axis]) return id;  // all coincident: keep as one leaf

  const std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::size_t a, std::size_t b) { return points_[a][axis] < points_[b][axis]; });
  const double split = points_[order_[mid]][axis];
  const int left = build(begin, mid, depth + 1);
  const int right = build(mid, end, depth + 1);
  nodes_[id].axis = axis;
  nodes_[id].split = split;
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

void NeighborIndex::search(int node_id, const Point3& q, std::size_t exclude, std::size_t& best,
                           double& best_sq) const {
  const Node& node = nodes_[node_id];
  if (node.axis < 0) {
    for (std::size_t i = node.begin; i < node.end; ++i) {
      const std::size_t idx = order_[i];
      if (idx == exclude) continue;
      const double d = squared_distance(q, points_[idx]);
      if (d < best_sq || (d == best_sq && idx < best)) {
        best_sq = d;
        best = idx;
      }
    }
    return;
  }
  // Left holds coordinates <= split, right holds >= split.
  const double diff = q[node.axis] - node.split;
  const int near = diff < 0 ? node.left : node.right;
  const int far = diff < 0 ? node.right : node.left;
  search(near, q, exclude, best, best_sq);
  if (diff * diff <= best_sq) search(far, q, exclude, best, best_sq);
}

NeighborIndex::Hit NeighborIndex::nearest(const Point3& query) const {
  return nearest_excluding(query, kNoExclude);
}

NeighborIndex::Hit NeighborIndex::nearest_excluding(const Point3& query, std::size_t exclude) const {
  std::size_t best = kNoExclude;
  double best_sq = std::numeric_limits<double>::infinity();
  search(root_, query, exclude, best, best_sq);
  if (best == kNoExclude) throw InvalidInput("no candidate point for nearest-neighbour query");
  return {best, std::sqrt(best_sq)};
}

double point_to_cloud_distance(const Point3& p, const NeighborIndex& index) {
  return index.nearest(p).distance;
}

double cloud_resolution(const PointCloud& cloud) {
  if (cloud.size() < 2) throw InvalidInput("cloud resolution needs at least two points");
  const NeighborIndex index(cloud);
  double sum = 0.0;
  for (std::size_t i = 0; i < cloud.size(); ++i) sum += index.nearest_excluding(cloud[i], i).distance;
  return sum / static_cast<double>(cloud.size());
}

// ---------------------------------------------------------------------------

RigidTransform estimate_rigid_transform(std::span<const PointPair> pairs, double area_eps) {
  if (pairs.size() < 3) throw InvalidInput("rigid transform estimation needs at least 3 pairs");

  // Spanning triangle: anchor, farthest point from it, farthest from that line.
  const Point3& a = pairs[0].source;
  std::size_t b = 0;
  for (std::size_t i = 1; i < pairs.size(); ++i)
    if (squared_distance(a, pairs[i].source) > squared_distance(a, pairs[b].source)) b = i;
  double area = 0.0;
  for (std::size_t i = 1; i < pairs.size(); ++i)
    area = std::max(area, triangle_area(a, pairs[b].source, pairs[i].source));
  if (!(area > area_eps)) throw DegenerateInput("source points are collinear or coincident");

  Point3 src_mean = Point3::Zero();
  Point3 dst_mean = Point3::Zero();
  for (const auto& p : pairs) {
    src_mean += p.source;
    dst_mean += p.target;
  }
  src_mean /= static_cast<double>(pairs.size());
  dst_mean /= static_cast<double>(pairs.size());

  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : pairs) cov += (p.source - src_mean) * (p.target - dst_mean).transpose();

  const Eigen::JacobiSVD<Eigen::Matrix3d> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Matrix3d& u = svd.matrixU();
  const Eigen::Matrix3d& v = svd.matrixV();
  Eigen::Matrix3d fix = Eigen::Matrix3d::Identity();
  if ((v * u.transpose()).determinant() < 0.0) fix(2, 2) = -1.0;
  const Eigen::Matrix3d rotation = v * fix * u.transpose();
  return RigidTransform(rotation, dst_mean - rotation * src_mean);
}

double rotation_error_deg(const Eigen::Matrix3d& ra, const Eigen::Matrix3d& rb) {
  // atan2(2 sin, 2 cos) of the relative rotation; the same angle as
  // acos((trace - 1) / 2) but without the loss of precision near zero.
  const Eigen::Matrix3d rel = ra.transpose() * rb;
  const double two_cos = std::clamp(rel.trace() - 1.0, -2.0, 2.0);
  const Eigen::Vector3d skew(rel(2, 1) - rel(1, 2), rel(0, 2) - rel(2, 0), rel(1, 0) - rel(0, 1));
  const double angle = std::atan2(skew.norm(), two_cos);
  return angle * 180.0 / std::numbers::pi;
}

double translation_error(const Eigen::Vector3d& ta, const Eigen::Vector3d& tb) { return distance(ta, tb); }

}  // namespace ibi
