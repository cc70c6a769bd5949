#include "ibi/errors.hpp"
#include "ibi/evaluation.hpp"
#include "ibi/pipeline.hpp"
#include "ibi/synthesis.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>

namespace ibi {
namespace {

CorrespondenceSet numbered(std::size_t n) {
  std::vector<Correspondence> items;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = static_cast<double>(i);
    items.push_back({{v, 0, 0}, {0, v, 0}, static_cast<CorrespondenceId>(i)});
  }
  return CorrespondenceSet(items);
}

TEST(Downsample, Examples) {
  const auto small = numbered(500);
  EXPECT_EQ(downsample(small, 1024, 3), small);

  const auto big = numbered(2048);
  const auto a = downsample(big, 1024, 3);
  ASSERT_EQ(a.size(), 1024u);
  const auto ids = a.ids();
  EXPECT_TRUE(std::is_sorted(ids.begin(), ids.end()));
  EXPECT_EQ(std::set<CorrespondenceId>(ids.begin(), ids.end()).size(), 1024u);
  EXPECT_EQ(downsample(big, 1024, 3), a);
  EXPECT_NE(downsample(big, 1024, 4), a);
}

TEST(Nnsr, Examples) {
  const auto c = numbered(3);
  EXPECT_EQ(nnsr_seed_alternative(c, {{0, 0.2}, {1, 0.9}, {2, 0.5}}, 2).ids(), (std::vector<CorrespondenceId>{0, 2}));
  EXPECT_EQ(nnsr_seed_alternative(c, {{0, 0.2}, {1, 0.9}, {2, 0.5}}, 10).ids(),
            (std::vector<CorrespondenceId>{0, 2, 1}));
  EXPECT_EQ(nnsr_seed_alternative(c, {{0, 0.4}, {1, 0.4}, {2, 0.1}}, 3).ids(),
            (std::vector<CorrespondenceId>{2, 0, 1}));
  EXPECT_THROW(nnsr_seed_alternative(c, {{0, 0.2}}, 2), MissingScores);
}

TEST(Config, ProfilesModesAndValidation) {
  const auto real = PipelineConfig::real();
  EXPECT_EQ(real.n_gsac, 20);
  EXPECT_EQ(real.t_he, 1.0);
  EXPECT_EQ(real.d_op_th, 3.0);
  EXPECT_EQ(real.t_overlap, 0.7);
  EXPECT_NO_THROW(PipelineConfig::synthetic().validate());
  PipelineConfig bad;
  bad.t_overlap = 1.0;
  EXPECT_THROW(bad.validate(), InvalidInput);
  bad = {};
  bad.n_vot = 0;
  EXPECT_THROW(bad.validate(), InvalidInput);
  EXPECT_EQ(parse_validation_mode(to_string(ValidationMode::local)), ValidationMode::local);
  EXPECT_EQ(parse_solver_mode("ransac"), SolverMode::ransac);
  EXPECT_EQ(parse_seed_mode("nnsr"), SeedMode::nnsr);
  EXPECT_THROW(parse_seed_mode("magic"), InvalidInput);
}

struct Fixture {
  SceneGroundTruth gt;
  LabeledCorrespondences corrs;
};

Fixture fixture(int k, int inliers, double outlier_ratio, double noise, std::uint64_t seed, std::size_t clutter = 0) {
  Fixture f{generate_scene(builtin_model(), k, clutter, seed), {}};
  f.corrs = generate_correspondences(f.gt, inliers, outlier_ratio, noise, seed + 100);
  return f;
}

std::vector<RigidTransform> transforms(const std::vector<InstanceResult>& results) {
  std::vector<RigidTransform> out;
  for (const auto& r : results) out.push_back(r.transform);
  return out;
}

TEST(RunIbi, SingleExactInstance) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto f = fixture(1, 100, 1.0 / 3.0, 0.0, seed);
    ASSERT_EQ(f.corrs.outlier_count(), 50u);
    const auto out = run_ibi(f.corrs.set, f.gt.model, f.gt.scene, PipelineConfig{});
    ASSERT_EQ(out.results.size(), 1u) << "seed " << seed;
    EXPECT_LE(rotation_error_deg(out.results[0].transform.rotation(), f.gt.poses[0].rotation()), 0.5);
  }
}

TEST(RunIbi, ThreeSeparatedInstances) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto f = fixture(3, 20, 0.4, 0.0, seed);
    const auto out = run_ibi(f.corrs.set, f.gt.model, f.gt.scene, PipelineConfig{});
    const auto preds = transforms(out.results);
    EXPECT_EQ(out.results.size(), 3u) << "seed " << seed;
    EXPECT_EQ(match_hits(preds, f.gt.poses, HitCriteria{}, out.resolution).size(), 3u) << "seed " << seed;
  }
}

TEST(RunIbi, EachPassTakesOneInstance) {
  // Equal-size exact cliques can still share the population after n_gtm steps.
  // Both may clear the Otsu cut, but a pass must not swallow two instances.
  int passes = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto f = fixture(3 + static_cast<int>(seed % 3), 20, 0.0, 0.0, 500 + seed);
    std::map<CorrespondenceId, int> label;
    for (std::size_t i = 0; i < f.corrs.set.size(); ++i) label[f.corrs.set[i].id] = f.corrs.labels[i];
    PipelineConfig cfg;
    cfg.rng_seed = seed;
    const auto out = run_ibi(f.corrs.set, f.gt.model, f.gt.scene, cfg);
    for (const auto* list : {&out.results, &out.rejected})
      for (const auto& r : *list) {
        std::set<int> instances;
        for (auto id : r.dense_ids) instances.insert(label[id]);
        EXPECT_EQ(instances.size(), 1u) << "seed " << seed << " iteration " << r.iteration;
        ++passes;
      }
  }
  EXPECT_GT(passes, 100);
}

TEST(RunIbi, TooFewCorrespondencesStopsImmediately) {
  const auto f = fixture(1, 4, 0.0, 0.0, 7);
  ASSERT_EQ(f.corrs.set.size(), 4u);
  const auto out = run_ibi(f.corrs.set, f.gt.model, f.gt.scene, PipelineConfig{});
  EXPECT_TRUE(out.results.empty());
  EXPECT_EQ(out.iterations_run, 0);
}

TEST(RunIbi, DeterministicAndDisjoint) {
  const auto f = fixture(4, 20, 0.6, 0.5, 11, 100);
  PipelineConfig cfg;
  cfg.rng_seed = 5;
  const auto a = run_ibi(f.corrs.set, f.gt.model, f.gt.scene, cfg);
  const auto b = run_ibi(f.corrs.set, f.gt.model, f.gt.scene, cfg);
  ASSERT_EQ(a.results.size(), b.results.size());
  ASSERT_EQ(a.rejected.size(), b.rejected.size());
  EXPECT_EQ(a.iterations_run, b.iterations_run);
  for (std::size_t i = 0; i < a.results.size(); ++i) {
    EXPECT_EQ(a.results[i].transform, b.results[i].transform);
    EXPECT_EQ(a.results[i].dense_ids, b.results[i].dense_ids);
    EXPECT_EQ(a.results[i].overlap, b.results[i].overlap);
  }
  std::set<CorrespondenceId> seen;
  for (const auto* list : {&a.results, &a.rejected})
    for (const auto& r : *list)
      for (auto id : r.dense_ids) EXPECT_TRUE(seen.insert(id).second) << "id " << id << " reused";
  for (std::size_t i = 1; i < a.results.size(); ++i) EXPECT_LT(a.results[i - 1].iteration, a.results[i].iteration);
}

TEST(RunIbi, TerminatesWithinBoundOnPureNoise) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<Correspondence> items;
    for (CorrespondenceId id = 0; id < 400; ++id)
      items.push_back({testing::random_points(rng, 1, -1, 1)[0], testing::random_points(rng, 1, -1, 1)[0], id});
    const PointCloud source(testing::random_points(rng, 200, -1, 1));
    const PointCloud target(testing::random_points(rng, 200, -1, 1));
    PipelineConfig cfg;
    cfg.max_iterations = 1000000;
    cfg.validation_mode = ValidationMode::none;
    const auto out = run_ibi(CorrespondenceSet(items), source, target, cfg);
    EXPECT_LE(out.iterations_run, (400 + cfg.t_s - 1) / cfg.t_s);
  }
}

// Replays the removals of each pass. After an accepted pass whose dense set is
// at least as clean as the current mixture, every instance still waiting for
// registration makes up a larger share of what remains.
TEST(RunIbi, RemainingInstancesGainInlierRatio) {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto f = fixture(4, 20, 0.5, 0.5, 200 + seed, 100);
    const auto out = run_ibi(f.corrs.set, f.gt.model, f.gt.scene, PipelineConfig{});
    std::map<int, const InstanceResult*> by_iteration;
    for (const auto* list : {&out.results, &out.rejected})
      for (const auto& r : *list) by_iteration[r.iteration] = &r;

    std::map<CorrespondenceId, int> label;
    for (std::size_t i = 0; i < f.corrs.set.size(); ++i) label[f.corrs.set[i].id] = f.corrs.labels[i];
    const auto all_ids = f.corrs.set.ids();
    std::set<CorrespondenceId> remaining(all_ids.begin(), all_ids.end());
    std::set<int> registered;
    const auto ratio = [&](int instance) {
      std::size_t n = 0;
      for (auto id : remaining) n += label[id] == instance;
      return static_cast<double>(n) / static_cast<double>(remaining.size());
    };
    const auto mixture = [&] {
      double sum = 0.0;
      for (int j = 0; j < static_cast<int>(f.gt.poses.size()); ++j)
        if (!registered.contains(j)) sum += ratio(j);
      return sum;
    };

    for (const auto& [iteration, r] : by_iteration) {
      const double mix = mixture();
      std::vector<double> before;
      for (int j = 0; j < static_cast<int>(f.gt.poses.size()); ++j) before.push_back(ratio(j));
      std::vector<RigidTransform> one{r->transform};
      const auto hits = match_hits(one, f.gt.poses, HitCriteria{}, out.resolution);
      const int instance = hits.empty() ? -2 : static_cast<int>(hits[0].gt);
      std::size_t own = 0;
      for (auto id : r->dense_ids) own += label[id] == instance;
      const double precision = static_cast<double>(own) / static_cast<double>(r->dense_ids.size());
      for (auto id : r->dense_ids) remaining.erase(id);
      if (!r->accepted || instance < 0 || registered.contains(instance)) continue;
      registered.insert(instance);
      if (remaining.empty() || precision < mix) continue;
      for (int j = 0; j < static_cast<int>(f.gt.poses.size()); ++j) {
        if (registered.contains(j)) continue;
        EXPECT_GE(ratio(j), before[static_cast<std::size_t>(j)]) << "seed " << seed << " iteration " << iteration;
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 10);
}

TEST(RunIbi, RejectsBadInputs) {
  const auto f = fixture(1, 20, 0.0, 0.0, 1);
  EXPECT_THROW(run_ibi(CorrespondenceSet(), f.gt.model, f.gt.scene, PipelineConfig{}), InvalidInput);
  PipelineConfig nnsr;
  nnsr.seed_mode = SeedMode::nnsr;
  EXPECT_THROW(run_ibi(f.corrs.set, f.gt.model, f.gt.scene, nnsr), MissingScores);
}

}  // namespace
}  // namespace ibi
