#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace ibi {

using Point3 = Eigen::Vector3d;

/// Euclidean distance evaluated as sqrt(dx^2 + dy^2 + dz^2), in that order.
/// Every distance in the library goes through here so that brute-force checks
/// reproduce results bit for bit.
inline double distance(const Point3& a, const Point3& b) {
  const double dx = a.x() - b.x();
  const double dy = a.y() - b.y();
  const double dz = a.z() - b.z();
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

inline double squared_distance(const Point3& a, const Point3& b) {
  const double dx = a.x() - b.x();
  const double dy = a.y() - b.y();
  const double dz = a.z() - b.z();
  return dx * dx + dy * dy + dz * dz;
}

bool is_finite(const Point3& p);

/// Area of the triangle (a, b, c).
double triangle_area(const Point3& a, const Point3& b, const Point3& c);

/// Ordered, nonempty list of finite points.
class PointCloud {
 public:
  PointCloud() = default;
  /// Throws InvalidInput on an empty list or a non-finite coordinate.
  explicit PointCloud(std::vector<Point3> points);

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const Point3& operator[](std::size_t i) const { return points_[i]; }
  std::span<const Point3> points() const { return points_; }
  auto begin() const { return points_.begin(); }
  auto end() const { return points_.end(); }

  /// Largest pairwise distance (exact, O(n^2)).
  double diameter() const;
  Point3 centroid() const;

 private:
  std::vector<Point3> points_;
};

/// Proper rigid motion p -> R p + t.
class RigidTransform {
 public:
  static constexpr double kOrthonormalTolerance = 1e-9;

  RigidTransform() : rotation_(Eigen::Matrix3d::Identity()), translation_(Eigen::Vector3d::Zero()) {}
  /// Throws InvalidInput unless R^T R = I and det(R) = +1 within kOrthonormalTolerance.
  RigidTransform(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation);

  static RigidTransform identity() { return {}; }

  const Eigen::Matrix3d& rotation() const { return rotation_; }
  const Eigen::Vector3d& translation() const { return translation_; }

  /// R p + t, summed left to right per row so residuals are reproducible bit for bit.
  Point3 operator()(const Point3& p) const {
    const auto& r = rotation_;
    return {r(0, 0) * p.x() + r(0, 1) * p.y() + r(0, 2) * p.z() + translation_.x(),
            r(1, 0) * p.x() + r(1, 1) * p.y() + r(1, 2) * p.z() + translation_.y(),
            r(2, 0) * p.x() + r(2, 1) * p.y() + r(2, 2) * p.z() + translation_.z()};
  }
  RigidTransform inverse() const;
  /// (*this)(other(p))
  RigidTransform compose(const RigidTransform& other) const;

  static bool is_rotation(const Eigen::Matrix3d& r, double tol = kOrthonormalTolerance);

  friend bool operator==(const RigidTransform&, const RigidTransform&) = default;

 private:
  Eigen::Matrix3d rotation_;
  Eigen::Vector3d translation_;
};

PointCloud apply_transform(const RigidTransform& transform, const PointCloud& cloud);

/// Exact nearest-neighbour search over a fixed cloud (static k-d tree).
class NeighborIndex {
 public:
  explicit NeighborIndex(const PointCloud& cloud);

  struct Hit {
    std::size_t index;
    double distance;
  };

  /// Nearest indexed point to `query`. Ties resolve to the lowest index.
  Hit nearest(const Point3& query) const;
  /// Nearest indexed point other than the one at `exclude`.
  Hit nearest_excluding(const Point3& query, std::size_t exclude) const;

  std::size_t size() const { return points_.size(); }

 private:
  struct Node {
    std::size_t begin, end;  // range into order_
    int axis;                // -1 for leaves
    double split;
    int left, right;
  };

  int build(std::size_t begin, std::size_t end, int depth);
  void search(int node, const Point3& q, std::size_t exclude, std::size_t& best, double& best_sq) const;

  std::vector<Point3> points_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

/// min over the indexed cloud of |p - q|.
double point_to_cloud_distance(const Point3& p, const NeighborIndex& index);

/// Mean over all points of the distance to the nearest other point of the cloud.
/// Throws InvalidInput on fewer than two points.
double cloud_resolution(const PointCloud& cloud);

struct PointPair {
  Point3 source;
  Point3 target;
};

/// Least-squares rigid motion mapping sources onto targets (centroid alignment,
/// SVD of the cross-covariance, determinant-corrected so det(R) = +1).
/// Throws InvalidInput on fewer than 3 pairs and DegenerateInput when the
/// source points are collinear or coincident (spanning triangle area <= area_eps).
RigidTransform estimate_rigid_transform(std::span<const PointPair> pairs, double area_eps = 1e-9);

/// Geodesic angle between two rotations in degrees.
double rotation_error_deg(const Eigen::Matrix3d& ra, const Eigen::Matrix3d& rb);
double translation_error(const Eigen::Vector3d& ta, const Eigen::Vector3d& tb);

}  // namespace ibi
