#include "ibi/errors.hpp"
#include "ibi/synthesis.hpp"
#include "ibi/validation.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <Eigen/Geometry>

namespace ibi {
namespace {

TEST(Overlap, ConstructedCases) {
  std::mt19937_64 rng(1);
  const auto t = testing::random_transform(rng);
  const PointCloud source(testing::random_points(rng, 100, -1, 1));
  const PointCloud target = apply_transform(t, source);
  const NeighborIndex index(target);
  EXPECT_EQ(overlap_rate(t, source, index, 0.01), 1.0);

  const RigidTransform away(Eigen::Matrix3d::Identity(), Eigen::Vector3d(100, 0, 0));
  EXPECT_EQ(overlap_rate(away.compose(t), source, index, 0.01), 0.0);

  std::vector<Point3> half;
  for (std::size_t i = 0; i < source.size(); ++i)
    half.push_back(i % 2 == 0 ? t(source[i]) : Point3(t(source[i]) + Point3(1000, 0, 0)));
  // Displaced copies sit 10 d_op from every point near the instance.
  EXPECT_EQ(overlap_rate(t, source, NeighborIndex(PointCloud(half)), 0.01), 0.5);
  EXPECT_THROW(overlap_rate(t, source, index, 0.0), InvalidInput);
}

TEST(Overlap, MonotoneInThreshold) {
  std::mt19937_64 rng(2);
  const PointCloud source(testing::random_points(rng, 200, -1, 1));
  const PointCloud target(testing::random_points(rng, 300, -1, 1));
  const NeighborIndex index(target);
  const auto t = testing::random_transform(rng, 0.3);
  double previous = 0.0;
  for (int i = 1; i <= 100; ++i) {
    const double o = overlap_rate(t, source, index, 0.02 * i);
    EXPECT_GE(o, previous);
    EXPECT_LE(o, 1.0);
    previous = o;
  }
  EXPECT_EQ(previous, 1.0);
}

TEST(GlobalValidation, StrictThreshold) {
  EXPECT_TRUE(validate_global(0.9, 0.85));
  EXPECT_FALSE(validate_global(0.85, 0.85));
  EXPECT_TRUE(validate_global(1e-6, 0.0));
}

TEST(LocalValidation, InlierCountRule) {
  std::mt19937_64 rng(3);
  const auto t = testing::random_transform(rng);
  const CorrespondenceSet many(testing::consistent_group(rng, t, 120, 0));
  const auto v = validate_local(t, many, 0.01, 100);
  EXPECT_TRUE(v.accepted);
  EXPECT_EQ(v.inlier_count, 120u);
  const CorrespondenceSet few(testing::consistent_group(rng, t, 50, 0));
  EXPECT_FALSE(validate_local(t, few, 0.01, 100).accepted);

  const std::vector<std::pair<std::size_t, bool>> sweep{{50, true}, {100, true}, {150, false}};
  for (const auto& [threshold, expected] : sweep) EXPECT_EQ(validate_local(t, many, 0.01, threshold).accepted, expected);
}

TEST(GlobalValidation, AcceptsTruePosesRejectsLargeRotations) {
  const PointCloud model = builtin_model();
  const double pr = cloud_resolution(model);
  const Point3 c = model.centroid();
  std::mt19937_64 rng(4);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto gt = generate_scene(model, 3, 0, seed);
    const NeighborIndex index(gt.scene);
    for (const auto& pose : gt.poses) {
      EXPECT_TRUE(validate_global(overlap_rate(pose, model, index, 1.5 * pr), 0.85));
      for (int trial = 0; trial < 10; ++trial) {
        std::uniform_real_distribution<double> angle(31.0, 180.0);
        const Eigen::Vector3d axis = testing::random_points(rng, 1, -1, 1)[0].normalized();
        const Eigen::Matrix3d spin = Eigen::AngleAxisd(angle(rng) * EIGEN_PI / 180.0, axis).toRotationMatrix();
        // Rotate about the model centroid so the wrong pose stays on the instance.
        const RigidTransform about(spin, c - spin * c);
        const RigidTransform wrong = pose.compose(about);
        ASSERT_GT(rotation_error_deg(wrong.rotation(), pose.rotation()), 30.0);
        EXPECT_FALSE(validate_global(overlap_rate(wrong, model, index, 1.5 * pr), 0.85))
            << "seed " << seed << " trial " << trial;
      }
    }
  }
}

}  // namespace
}  // namespace ibi
