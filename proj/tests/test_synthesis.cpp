#include "ibi/errors.hpp"
#include "ibi/pose_estimation.hpp"
#include "ibi/synthesis.hpp"
#include "ibi/validation.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

namespace ibi {
namespace {

TEST(BuiltinModel, DeterministicAndSized) {
  const PointCloud a = builtin_model();
  EXPECT_EQ(a.size(), 256u);
  const PointCloud b = builtin_model();
  EXPECT_TRUE(std::equal(a.begin(), a.end(), b.begin()));
  EXPECT_GT(cloud_resolution(a), 0.0);
}

TEST(GenerateScene, SingleCopyOverlapsFully) {
  const PointCloud model = builtin_model();
  const auto gt = generate_scene(model, 1, 0, 3);
  ASSERT_EQ(gt.scene.size(), model.size());
  EXPECT_EQ(overlap_rate(gt.poses[0], model, NeighborIndex(gt.scene), 1e-9), 1.0);
}

TEST(GenerateScene, DisjointRangesAndCounts) {
  const PointCloud model = builtin_model();
  for (int k : {1, 5, 20}) {
    const auto gt = generate_scene(model, k, 37, static_cast<std::uint64_t>(k));
    ASSERT_EQ(gt.poses.size(), static_cast<std::size_t>(k));
    ASSERT_EQ(gt.instance_point_ranges.size(), static_cast<std::size_t>(k));
    EXPECT_EQ(gt.scene.size(), static_cast<std::size_t>(k) * model.size() + 37);
    EXPECT_EQ(gt.clutter_count, 37u);
    auto ranges = gt.instance_point_ranges;
    std::sort(ranges.begin(), ranges.end());
    for (std::size_t i = 0; i < ranges.size(); ++i) {
      EXPECT_EQ(ranges[i].second - ranges[i].first, model.size());
      if (i > 0) EXPECT_LE(ranges[i - 1].second, ranges[i].first);
    }
    for (const auto& pose : gt.poses) EXPECT_TRUE(RigidTransform::is_rotation(pose.rotation()));
  }
}

TEST(GenerateScene, DeterministicAndValidated) {
  const PointCloud model = builtin_model();
  const auto a = generate_scene(model, 5, 20, 9);
  const auto b = generate_scene(model, 5, 20, 9);
  EXPECT_TRUE(std::equal(a.scene.begin(), a.scene.end(), b.scene.begin()));
  EXPECT_EQ(a.poses, b.poses);
  EXPECT_THROW(generate_scene(model, 0, 0, 1), InvalidInput);
  EXPECT_THROW(generate_scene(model, 21, 0, 1), InvalidInput);
}

TEST(GenerateCorrespondences, CleanInliersAreExact) {
  const auto gt = generate_scene(builtin_model(), 3, 10, 4);
  const auto lc = generate_correspondences(gt, 20, 0.0, 0.0, 5);
  ASSERT_EQ(lc.set.size(), 60u);
  EXPECT_EQ(lc.outlier_count(), 0u);
  for (std::size_t i = 0; i < lc.set.size(); ++i)
    EXPECT_NEAR(correspondence_residual(gt.poses[static_cast<std::size_t>(lc.labels[i])], lc.set[i]), 0.0, 1e-9);
}

TEST(GenerateCorrespondences, OutlierArithmetic) {
  const auto gt = generate_scene(builtin_model(), 3, 0, 6);
  const auto lc = generate_correspondences(gt, 20, 0.8, 0.5, 7);
  EXPECT_NEAR(static_cast<double>(lc.outlier_count()), 240.0, 1.0);
  EXPECT_NEAR(static_cast<double>(lc.set.size()), 300.0, 1.0);

  for (double r : {0.0, 0.1, 0.33, 0.5, 0.77, 0.9, 0.95}) {
    const auto c = generate_correspondences(gt, 13, r, 0.5, 8);
    EXPECT_LE(std::abs(c.outlier_ratio() - r), 1.0 / static_cast<double>(c.set.size())) << r;
    std::set<CorrespondenceId> ids;
    for (auto id : c.set.ids()) ids.insert(id);
    EXPECT_EQ(ids.size(), c.set.size());
    EXPECT_EQ(c.labels.size(), c.set.size());
  }
  EXPECT_THROW(generate_correspondences(gt, 20, 1.0, 0.5, 1), InvalidInput);
  EXPECT_THROW(generate_correspondences(gt, 0, 0.5, 0.5, 1), InvalidInput);
}

TEST(GenerateCorrespondences, NoiseStaysInGaussianTail) {
  const auto gt = generate_scene(builtin_model(), 5, 0, 10);
  const double pr = cloud_resolution(gt.model);
  const double sigma = 0.5;
  std::size_t inliers = 0, within = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto lc = generate_correspondences(gt, 50, 0.3, sigma, seed);
    for (std::size_t i = 0; i < lc.set.size(); ++i) {
      if (lc.labels[i] == kOutlierLabel) continue;
      ++inliers;
      const double e = correspondence_residual(gt.poses[static_cast<std::size_t>(lc.labels[i])], lc.set[i]);
      within += e <= 4.0 * sigma * pr;
    }
  }
  EXPECT_GE(static_cast<double>(within), 0.999 * static_cast<double>(inliers));
}

TEST(GenerateCorrespondences, Deterministic) {
  const auto gt = generate_scene(builtin_model(), 2, 5, 11);
  const auto a = generate_correspondences(gt, 20, 0.6, 0.5, 12);
  const auto b = generate_correspondences(gt, 20, 0.6, 0.5, 12);
  EXPECT_EQ(a.set, b.set);
  EXPECT_EQ(a.labels, b.labels);
}

}  // namespace
}  // namespace ibi
