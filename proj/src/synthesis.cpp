#include "ibi/synthesis.hpp"

#include "ibi/errors.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

namespace ibi {

namespace {

Point3 unit_sphere_sample(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Point3 v;
  do {
    v = Point3(gauss(rng), gauss(rng), gauss(rng));
  } while (v.norm() < 1e-12);
  return v.normalized();
}

Eigen::Matrix3d random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::Quaterniond q;
  do {
    q = Eigen::Quaterniond(gauss(rng), gauss(rng), gauss(rng), gauss(rng));
  } while (q.norm() < 1e-12);
  q.normalize();
  return q.toRotationMatrix();
}

int cube_root_ceil(int k) {
  int c = 1;
  while (c * c * c < k) ++c;
  return c;
}

}  // namespace

PointCloud builtin_model(std::size_t n) {
  if (n == 0) throw InvalidInput("model size must be positive");
  struct Part {
    Point3 centre;
    Point3 radii;
    Eigen::Matrix3d orientation;
    double weight;
  };
  const auto tilt = [](double angle, const Point3& axis) {
    return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
  };
  const std::vector<Part> parts{
      {{0.0, 0.0, 0.0}, {1.0, 0.65, 0.55}, Eigen::Matrix3d::Identity(), 0.50},       // body
      {{0.95, 0.45, 0.1}, {0.38, 0.34, 0.32}, tilt(0.4, {0, 0, 1}), 0.20},            // head
      {{1.05, 0.95, 0.25}, {0.08, 0.35, 0.09}, tilt(-0.35, {1, 0, 0.3}), 0.09},       // long ear
      {{1.25, 0.8, -0.1}, {0.07, 0.25, 0.07}, tilt(0.6, {0.2, 0, 1}), 0.07},          // short ear
      {{-1.05, 0.15, -0.15}, {0.18, 0.18, 0.18}, Eigen::Matrix3d::Identity(), 0.07},  // tail
      {{0.35, -0.6, 0.3}, {0.22, 0.12, 0.12}, tilt(0.3, {0, 1, 0}), 0.07},            // front foot
  };

  std::mt19937_64 rng(0x1b1b5eedULL);
  std::vector<std::size_t> counts;
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const std::size_t c = (i + 1 == parts.size()) ? n - assigned
                                                  : static_cast<std::size_t>(std::floor(parts[i].weight * n));
    counts.push_back(c);
    assigned += c;
  }

  std::vector<Point3> points;
  points.reserve(n);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    for (std::size_t m = 0; m < counts[i]; ++m) {
      const Point3 dir = unit_sphere_sample(rng);
      points.push_back(parts[i].centre + parts[i].orientation * parts[i].radii.cwiseProduct(dir));
    }
  }
  return PointCloud(std::move(points));
}

SceneGroundTruth generate_scene(const PointCloud& model, int k, std::size_t clutter_count, std::uint64_t seed) {
  SceneOptions options;
  options.clutter_count = clutter_count;
  return generate_scene(model, k, options, seed);
}

SceneGroundTruth generate_scene(const PointCloud& model, int k, const SceneOptions& options, std::uint64_t seed) {
  if (k < 1 || k > kMaxInstances) throw InvalidInput("instance count must lie in [1, 20]");
  if (model.empty()) throw InvalidInput("model is empty");
  if (!(options.spacing_factor > 0.0)) throw InvalidInput("spacing factor must be positive");

  std::mt19937_64 rng(seed);
  const double diameter = std::max(model.diameter(), 1e-9);
  const double side = options.spacing_factor * diameter * cube_root_ceil(k);
  std::uniform_real_distribution<double> coord(0.0, side);
  const Point3 model_centre = model.centroid();

  std::vector<RigidTransform> poses;
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  std::vector<Point3> scene;
  scene.reserve(static_cast<std::size_t>(k) * model.size() + options.clutter_count);
  for (int j = 0; j < k; ++j) {
    const Eigen::Matrix3d rotation = random_rotation(rng);
    const Point3 centre(coord(rng), coord(rng), coord(rng));
    RigidTransform pose(rotation, centre - rotation * model_centre);
    const std::size_t begin = scene.size();
    for (const auto& p : model) scene.push_back(pose(p));
    ranges.emplace_back(begin, scene.size());
    poses.push_back(pose);
  }

  Point3 lo = scene.front();
  Point3 hi = lo;
  for (const auto& p : scene) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t c = 0; c < options.clutter_count; ++c) {
    const Point3 u(unit(rng), unit(rng), unit(rng));
    scene.push_back(lo + (hi - lo).cwiseProduct(u));
  }

  return SceneGroundTruth{model, PointCloud(std::move(scene)), std::move(poses), std::move(ranges),
                          options.clutter_count};
}

std::size_t LabeledCorrespondences::outlier_count() const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), kOutlierLabel));
}

double LabeledCorrespondences::outlier_ratio() const {
  return labels.empty() ? 0.0 : static_cast<double>(outlier_count()) / static_cast<double>(labels.size());
}

LabeledCorrespondences generate_correspondences(const SceneGroundTruth& gt, int inliers_per_instance,
                                                double outlier_ratio, double noise_sigma, std::uint64_t seed) {
  if (inliers_per_instance < 1) throw InvalidInput("inliers_per_instance must be at least 1");
  if (!(outlier_ratio >= 0.0 && outlier_ratio < 1.0)) throw InvalidInput("outlier_ratio must lie in [0, 1)");
  if (!(noise_sigma >= 0.0)) throw InvalidInput("noise_sigma must be non-negative");
  if (gt.poses.empty()) throw InvalidInput("scene has no instances");

  std::mt19937_64 rng(seed);
  // noise_sigma is the RMS length of the 3D offset, so each axis gets sigma / sqrt(3).
  const double sigma = noise_sigma > 0.0 ? noise_sigma * cloud_resolution(gt.model) / std::sqrt(3.0) : 0.0;
  std::normal_distribution<double> noise(0.0, sigma > 0.0 ? sigma : 1.0);

  struct Draft {
    Point3 source, target;
    int label;
  };
  std::vector<Draft> drafts;

  const std::size_t model_size = gt.model.size();
  std::vector<std::size_t> model_idx(model_size);
  std::iota(model_idx.begin(), model_idx.end(), std::size_t{0});
  const auto per_instance = static_cast<std::size_t>(inliers_per_instance);
  for (std::size_t j = 0; j < gt.poses.size(); ++j) {
    std::vector<std::size_t> chosen;
    if (per_instance <= model_size) {
      std::sample(model_idx.begin(), model_idx.end(), std::back_inserter(chosen), per_instance, rng);
    } else {
      std::uniform_int_distribution<std::size_t> any(0, model_size - 1);
      for (std::size_t m = 0; m < per_instance; ++m) chosen.push_back(any(rng));
    }
    for (std::size_t idx : chosen) {
      const Point3& p = gt.model[idx];
      Point3 q = gt.poses[j](p);
      if (sigma > 0.0) q += Point3(noise(rng), noise(rng), noise(rng));
      drafts.push_back({p, q, static_cast<int>(j)});
    }
  }

  const double inliers = static_cast<double>(drafts.size());
  const auto outliers = static_cast<std::size_t>(std::llround(outlier_ratio * inliers / (1.0 - outlier_ratio)));
  std::uniform_int_distribution<std::size_t> any_model(0, model_size - 1);
  std::uniform_int_distribution<std::size_t> any_scene(0, gt.scene.size() - 1);
  for (std::size_t m = 0; m < outliers; ++m) {
    const std::size_t a = any_model(rng);
    const std::size_t b = any_scene(rng);
    drafts.push_back({gt.model[a], gt.scene[b], kOutlierLabel});
  }

  std::shuffle(drafts.begin(), drafts.end(), rng);
  std::vector<Correspondence> items;
  LabeledCorrespondences out;
  items.reserve(drafts.size());
  out.labels.reserve(drafts.size());
  for (std::size_t i = 0; i < drafts.size(); ++i) {
    items.push_back({drafts[i].source, drafts[i].target, static_cast<CorrespondenceId>(i)});
    out.labels.push_back(drafts[i].label);
  }
  out.set = CorrespondenceSet(std::move(items));
  return out;
}

}  // namespace ibi
