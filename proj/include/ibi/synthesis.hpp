#pragma once

// Synthetic multi-instance scenes with known poses, and correspondence sets
// mixing ground-truth matches with a controlled fraction of outliers.

#include "ibi/correspondence.hpp"
#include "ibi/geometry.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace ibi {

inline constexpr int kMaxInstances = 20;

struct SceneGroundTruth {
  PointCloud model;
  PointCloud scene;
  std::vector<RigidTransform> poses;
  /// [begin, end) of each instance's points within `scene`.
  std::vector<std::pair<std::size_t, std::size_t>> instance_point_ranges;
  std::size_t clutter_count = 0;
};

struct SceneOptions {
  std::size_t clutter_count = 0;
  /// Instances are centred uniformly in a cube of side
  /// spacing_factor * model diameter * ceil(cbrt(k)); lower values let instances collide.
  double spacing_factor = 6.0;
};

/// Deterministic 256-point asymmetric composite shape (body, head, ears, tail).
PointCloud builtin_model(std::size_t n = 256);

/// k uniformly random rotations (unit quaternions) and translations, plus
/// uniform clutter inside the instances' bounding box.
/// Throws InvalidInput on k outside [1, 20].
SceneGroundTruth generate_scene(const PointCloud& model, int k, const SceneOptions& options, std::uint64_t seed);
SceneGroundTruth generate_scene(const PointCloud& model, int k, std::size_t clutter_count, std::uint64_t seed);

inline constexpr int kOutlierLabel = -1;

struct LabeledCorrespondences {
  CorrespondenceSet set;
  /// labels[i] is the instance index of set[i], or kOutlierLabel.
  std::vector<int> labels;

  std::size_t outlier_count() const;
  double outlier_ratio() const;
};

/// Per instance, `inliers_per_instance` model points paired with their posed
/// scene location plus N(0, (noise_sigma * pr)^2) per axis; then random
/// (model point, scene point) outliers so that outliers / total equals
/// outlier_ratio to within one correspondence. Ids are 0..n-1 after a shuffle.
/// Throws InvalidInput when outlier_ratio is outside [0, 1), inliers_per_instance < 1
/// or noise_sigma < 0.
LabeledCorrespondences generate_correspondences(const SceneGroundTruth& gt, int inliers_per_instance,
                                                double outlier_ratio, double noise_sigma, std::uint64_t seed);

}  // namespace ibi
