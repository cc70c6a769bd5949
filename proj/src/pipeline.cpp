#include "ibi/pipeline.hpp"

#include "ibi/errors.hpp"
#include "ibi/pose_estimation.hpp"
#include "ibi/seed_selection.hpp"
#include "ibi/validation.hpp"
#include "ibi/voting.hpp"

#include <algorithm>
#include <chrono>
#include <iterator>
#include <random>
#include <vector>

namespace ibi {

std::string_view to_string(ValidationMode m) {
  switch (m) {
    case ValidationMode::global: return "global";
    case ValidationMode::local: return "local";
    case ValidationMode::none: return "none";
  }
  return "?";
}

std::string_view to_string(SolverMode m) { return m == SolverMode::gsac ? "gsac" : "ransac"; }
std::string_view to_string(SeedMode m) { return m == SeedMode::gtm ? "gtm" : "nnsr"; }

ValidationMode parse_validation_mode(std::string_view s) {
  if (s == "global") return ValidationMode::global;
  if (s == "local") return ValidationMode::local;
  if (s == "none") return ValidationMode::none;
  throw InvalidInput("unknown validation mode '" + std::string(s) + "'");
}

SolverMode parse_solver_mode(std::string_view s) {
  if (s == "gsac") return SolverMode::gsac;
  if (s == "ransac") return SolverMode::ransac;
  throw InvalidInput("unknown solver mode '" + std::string(s) + "'");
}

SeedMode parse_seed_mode(std::string_view s) {
  if (s == "gtm") return SeedMode::gtm;
  if (s == "nnsr") return SeedMode::nnsr;
  throw InvalidInput("unknown seed mode '" + std::string(s) + "'");
}

PipelineConfig PipelineConfig::real() {
  PipelineConfig cfg;
  cfg.n_gsac = 20;
  cfg.t_he = 1.0;
  cfg.d_op_th = 3.0;
  cfg.t_overlap = 0.7;
  return cfg;
}

void PipelineConfig::validate() const {
  const auto require = [](bool ok, const char* what) {
    if (!ok) throw InvalidInput(std::string("invalid pipeline config: ") + what);
  };
  require(n_downsample >= 1, "n_downsample must be >= 1");
  require(n_gtm >= 1, "n_gtm must be >= 1");
  require(n_vot >= 1, "n_vot must be >= 1");
  require(n_gsac >= 1, "n_gsac must be >= 1");
  require(t_s >= 1, "t_s must be >= 1");
  require(t_inliers >= 1, "t_inliers must be >= 1");
  require(nnsr_top_k >= 1, "nnsr_top_k must be >= 1");
  require(max_iterations >= 1, "max_iterations must be >= 1");
  require(delta_r > 0.0, "delta_r must be positive");
  require(t_he > 0.0, "t_he must be positive");
  require(d_op_th > 0.0, "d_op_th must be positive");
  require(t_overlap > 0.0 && t_overlap < 1.0, "t_overlap must lie in (0, 1)");
  require(dense_support_ratio >= 0.0 && dense_support_ratio <= 1.0, "dense_support_ratio must lie in [0, 1]");
  require(area_eps > 0.0, "area_eps must be positive");
  require(payoff_eps > 0.0, "payoff_eps must be positive");
  require(n_vot >= t_s, "n_vot must be >= t_s");
}

CorrespondenceSet downsample(const CorrespondenceSet& set, int n, std::uint64_t seed) {
  if (n < 1) throw InvalidInput("downsample size must be at least 1");
  if (set.size() <= static_cast<std::size_t>(n)) return set;
  std::vector<Correspondence> out;
  out.reserve(static_cast<std::size_t>(n));
  std::mt19937_64 rng(seed);
  std::sample(set.begin(), set.end(), std::back_inserter(out), n, rng);
  return CorrespondenceSet(std::move(out));
}

CorrespondenceSet nnsr_seed_alternative(const CorrespondenceSet& set, const NnsrRatios& ratios, int top_k) {
  if (top_k < 1) throw InvalidInput("top_k must be at least 1");
  std::vector<std::pair<double, std::size_t>> ranked;
  ranked.reserve(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto it = ratios.find(set[i].id);
    if (it == ratios.end()) throw MissingScores("no NNSR ratio for correspondence " + std::to_string(set[i].id));
    ranked.emplace_back(it->second, i);
  }
  std::sort(ranked.begin(), ranked.end(), [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return set[a.second].id < set[b.second].id;
  });
  const std::size_t keep = std::min(static_cast<std::size_t>(top_k), ranked.size());
  std::vector<Correspondence> out;
  out.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) out.push_back(set[ranked[i].second]);
  return CorrespondenceSet(std::move(out));
}

namespace {

// splitmix64 finaliser; decorrelates the per-pass and per-stage streams.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (a + 1) + 0xbf58476d1ce4e5b9ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

enum Stream : std::uint64_t { kDownsample = 0, kPopulation = 1, kRansac = 2 };

CorrespondenceSet game_theoretic_seeds(const CorrespondenceSet& sample, const PipelineConfig& cfg, double delta_r,
                                       std::uint64_t seed) {
  if (sample.size() < 2) return {};
  try {
    const Population x = run_gtm(sample, cfg.n_gtm, delta_r, seed, cfg.payoff_eps);
    const std::vector<double> mass(x.mass().data(), x.mass().data() + x.mass().size());
    const CorrespondenceSet seeds = select_seeds(sample, x, otsu_threshold(mass));
    if (!cfg.coherent_seeds || seeds.empty()) return seeds;
    // Two instances can still share the population after n_gtm steps.
    const auto heaviest = static_cast<std::size_t>(std::max_element(mass.begin(), mass.end()) - mass.begin());
    return consistent_with(seeds, sample[heaviest], delta_r);
  } catch (const DegeneratePayoff&) {
    return {};
  } catch (const DegenerateInput&) {
    return {};
  }
}

}  // namespace

RegistrationOutcome run_ibi(const CorrespondenceSet& set, const PointCloud& source, const PointCloud& target,
                            const PipelineConfig& cfg, const NnsrRatios& ratios) {
  const auto started = std::chrono::steady_clock::now();
  cfg.validate();
  if (set.empty()) throw InvalidInput("correspondence set is empty");
  if (source.empty() || target.empty()) throw InvalidInput("point clouds must be nonempty");
  if (cfg.seed_mode == SeedMode::nnsr) {
    for (const auto& c : set)
      if (!ratios.contains(c.id)) throw MissingScores("NNSR seed mode needs a ratio for every correspondence");
  }

  RegistrationOutcome out;
  const auto finish = [&] {
    out.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return out;
  };

  out.resolution = source.size() >= 2 ? cloud_resolution(source) : 0.0;
  // A model without spacing gives zero-sized thresholds; nothing can be validated.
  if (!(out.resolution > 0.0)) return finish();
  const double pr = out.resolution;
  const double delta_r = cfg.delta_r * pr;
  const double t_he = cfg.t_he * pr;
  const double d_op_th = cfg.d_op_th * pr;

  const NeighborIndex target_index(target);
  CorrespondenceSet remaining = set;

  while (out.iterations_run < cfg.max_iterations && remaining.size() >= 3) {
    const auto pass = static_cast<std::uint64_t>(out.iterations_run);
    const CorrespondenceSet sample = downsample(remaining, cfg.n_downsample, mix_seed(cfg.rng_seed, pass, kDownsample));

    const CorrespondenceSet seeds =
        cfg.seed_mode == SeedMode::gtm
            ? game_theoretic_seeds(sample, cfg, delta_r, mix_seed(cfg.rng_seed, pass, kPopulation))
            : nnsr_seed_alternative(sample, ratios, cfg.nnsr_top_k);
    if (seeds.size() < static_cast<std::size_t>(cfg.t_s)) break;

    const VotingScores scores = vote(remaining, seeds, delta_r);
    const CorrespondenceSet dense =
        select_dense(select_supported(remaining, scores, seeds, cfg.dense_support_ratio), scores, cfg.n_vot);

    InstanceResult result;
    result.dense_ids = dense.ids();
    result.iteration = out.iterations_run;
    try {
      const Hypothesis h = cfg.solver_mode == SolverMode::gsac
                               ? gsac(dense, scores, cfg.n_gsac, t_he, cfg.area_eps)
                               : ransac_baseline(dense, cfg.n_gsac, t_he, mix_seed(cfg.rng_seed, pass, kRansac),
                                                 cfg.area_eps);
      result.transform = h.transform;
      result.mae = h.mae;
      result.overlap = overlap_rate(h.transform, source, target_index, d_op_th);
      switch (cfg.validation_mode) {
        case ValidationMode::global:
          result.accepted = validate_global(result.overlap, cfg.t_overlap);
          break;
        case ValidationMode::local:
          result.accepted =
              validate_local(h.transform, remaining, t_he, static_cast<std::size_t>(cfg.t_inliers)).accepted;
          break;
        case ValidationMode::none:
          result.accepted = true;
          break;
      }
      (result.accepted ? out.results : out.rejected).push_back(result);
    } catch (const Error&) {
      // No usable hypothesis this pass; the dense set is dropped all the same.
    }

    remaining = remaining.without(result.dense_ids);
    ++out.iterations_run;
  }
  return finish();
}

}  // namespace ibi
