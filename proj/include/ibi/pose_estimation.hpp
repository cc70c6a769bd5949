#pragma once

// Transformation estimation: guided sample consensus (GSAC) over the dense
// set, scored by the truncated residual-margin (MAE) criterion, plus a plain
// RANSAC baseline with the same scoring.

#include "ibi/correspondence.hpp"
#include "ibi/geometry.hpp"
#include "ibi/voting.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace ibi {

using IdTriple = std::array<CorrespondenceId, 3>;

struct Hypothesis {
  RigidTransform transform;
  double mae = 0.0;
  IdTriple triplet_ids{};
};

/// |R p_s + t - p_t|
double correspondence_residual(const RigidTransform& transform, const Correspondence& c);

/// (t_he - e) / t_he for e < t_he, otherwise 0. Throws InvalidInput on t_he <= 0.
double mae_contribution(double residual, double t_he);

/// Sum of mae_contribution over `eval_set`.
double mae_score(const RigidTransform& transform, const CorrespondenceSet& eval_set, double t_he);

inline constexpr double kDefaultAreaEps = 1e-9;

/// Triples of `dense` in descending order of summed voting score, skipping
/// triples whose source points span area <= area_eps; at most `count` of them.
///
/// Members are ranked by (score desc, id asc) and a best-first walk over index
/// triples i < j < k yields the exact order without enumerating all of them.
/// Equal sums come out lexicographically by rank, which is ascending id order
/// when the scores themselves are equal.
///
/// Throws InsufficientCorrespondences on |dense| < 3 and TooDegenerate when no
/// non-collinear triple exists.
std::vector<IdTriple> generate_guided_triplets(const CorrespondenceSet& dense, const VotingScores& scores,
                                               int count, double area_eps = kDefaultAreaEps);

/// Fit and score every guided triple; the best MAE wins, earliest triple on ties.
Hypothesis gsac(const CorrespondenceSet& dense, const VotingScores& scores, int n_gsac, double t_he,
                double area_eps = kDefaultAreaEps);

/// Same scoring as gsac over `iterations` uniformly drawn non-degenerate triples.
Hypothesis ransac_baseline(const CorrespondenceSet& dense, int iterations, double t_he, std::uint64_t seed,
                           double area_eps = kDefaultAreaEps);

}  // namespace ibi
