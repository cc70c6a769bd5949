#include "ibi/pose_estimation.hpp"

#include "ibi/errors.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <random>
#include <unordered_map>
#include <unordered_set>

namespace ibi {

double correspondence_residual(const RigidTransform& transform, const Correspondence& c) {
  return distance(transform(c.source), c.target);
}

double mae_contribution(double residual, double t_he) {
  if (!(t_he > 0.0)) throw InvalidInput("t_he must be positive");
  return residual < t_he ? (t_he - residual) / t_he : 0.0;
}

double mae_score(const RigidTransform& transform, const CorrespondenceSet& eval_set, double t_he) {
  if (!(t_he > 0.0)) throw InvalidInput("t_he must be positive");
  double sum = 0.0;
  for (const auto& c : eval_set) sum += mae_contribution(correspondence_residual(transform, c), t_he);
  return sum;
}

namespace {

bool spans_triangle(const Correspondence& a, const Correspondence& b, const Correspondence& c, double area_eps) {
  return triangle_area(a.source, b.source, c.source) > area_eps;
}

struct IndexTriple {
  std::uint32_t i, j, k;
  double sum;
};

// Max-heap order: larger sum first, then lexicographically smaller index triple.
struct FrontierOrder {
  bool operator()(const IndexTriple& a, const IndexTriple& b) const {
    if (a.sum != b.sum) return a.sum < b.sum;
    return std::tie(a.i, a.j, a.k) > std::tie(b.i, b.j, b.k);
  }
};

Hypothesis fit_and_score(const CorrespondenceSet& dense, const std::array<std::size_t, 3>& idx, double t_he,
                         double area_eps) {
  const std::array<PointPair, 3> pairs{PointPair{dense[idx[0]].source, dense[idx[0]].target},
                                       PointPair{dense[idx[1]].source, dense[idx[1]].target},
                                       PointPair{dense[idx[2]].source, dense[idx[2]].target}};
  Hypothesis h;
  h.transform = estimate_rigid_transform(pairs, area_eps);
  h.mae = mae_score(h.transform, dense, t_he);
  h.triplet_ids = {dense[idx[0]].id, dense[idx[1]].id, dense[idx[2]].id};
  return h;
}

}  // namespace

std::vector<IdTriple> generate_guided_triplets(const CorrespondenceSet& dense, const VotingScores& scores,
                                               int count, double area_eps) {
  const std::size_t n = dense.size();
  if (n < 3) throw InsufficientCorrespondences("guided sampling needs at least 3 correspondences");
  if (count < 1) throw InvalidInput("triplet count must be at least 1");

  std::vector<std::size_t> rank(n);
  std::iota(rank.begin(), rank.end(), std::size_t{0});
  std::vector<double> score(n);
  for (std::size_t i = 0; i < n; ++i) score[i] = scores.at(dense[i].id);
  std::sort(rank.begin(), rank.end(), [&](std::size_t a, std::size_t b) {
    if (score[a] != score[b]) return score[a] > score[b];
    return dense[a].id < dense[b].id;
  });

  const auto make = [&](std::uint32_t i, std::uint32_t j, std::uint32_t k) {
    return IndexTriple{i, j, k, score[rank[i]] + score[rank[j]] + score[rank[k]]};
  };
  const auto key = [n](const IndexTriple& t) {
    return (static_cast<std::uint64_t>(t.i) * n + t.j) * n + t.k;
  };

  std::priority_queue<IndexTriple, std::vector<IndexTriple>, FrontierOrder> frontier;
  std::unordered_set<std::uint64_t> seen;
  frontier.push(make(0, 1, 2));
  seen.insert(key(frontier.top()));

  std::vector<IdTriple> out;
  while (!frontier.empty() && out.size() < static_cast<std::size_t>(count)) {
    const IndexTriple t = frontier.top();
    frontier.pop();
    const auto& a = dense[rank[t.i]];
    const auto& b = dense[rank[t.j]];
    const auto& c = dense[rank[t.k]];
    if (spans_triangle(a, b, c, area_eps)) out.push_back({a.id, b.id, c.id});

    const auto push = [&](std::uint32_t i, std::uint32_t j, std::uint32_t k) {
      const IndexTriple next = make(i, j, k);
      if (seen.insert(key(next)).second) frontier.push(next);
    };
    if (t.i + 1 < t.j) push(t.i + 1, t.j, t.k);
    if (t.j + 1 < t.k) push(t.i, t.j + 1, t.k);
    if (t.k + 1 < n) push(t.i, t.j, t.k + 1);
  }
  if (out.empty()) throw TooDegenerate("every triple of the dense set is collinear");
  return out;
}

Hypothesis gsac(const CorrespondenceSet& dense, const VotingScores& scores, int n_gsac, double t_he,
                double area_eps) {
  if (!(t_he > 0.0)) throw InvalidInput("t_he must be positive");
  const auto triples = generate_guided_triplets(dense, scores, n_gsac, area_eps);

  std::unordered_map<CorrespondenceId, std::size_t> position;
  position.reserve(dense.size());
  for (std::size_t i = 0; i < dense.size(); ++i) position.emplace(dense[i].id, i);

  Hypothesis best;
  bool have_best = false;
  for (const auto& ids : triples) {
    const std::array<std::size_t, 3> idx{position.at(ids[0]), position.at(ids[1]), position.at(ids[2])};
    Hypothesis h = fit_and_score(dense, idx, t_he, area_eps);
    if (!have_best || h.mae > best.mae) {
      best = h;
      have_best = true;
    }
  }
  return best;
}

Hypothesis ransac_baseline(const CorrespondenceSet& dense, int iterations, double t_he, std::uint64_t seed,
                           double area_eps) {
  const std::size_t n = dense.size();
  if (n < 3) throw InsufficientCorrespondences("RANSAC needs at least 3 correspondences");
  if (iterations < 1) throw InvalidInput("iteration count must be at least 1");
  if (!(t_he > 0.0)) throw InvalidInput("t_he must be positive");

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  // Bounded redraws so an all-degenerate set terminates.
  const long max_draws = 100L * iterations + 1000;

  Hypothesis best;
  bool have_best = false;
  int accepted = 0;
  for (long draw = 0; draw < max_draws && accepted < iterations; ++draw) {
    std::array<std::size_t, 3> idx{pick(rng), pick(rng), pick(rng)};
    if (idx[0] == idx[1] || idx[0] == idx[2] || idx[1] == idx[2]) continue;
    if (!spans_triangle(dense[idx[0]], dense[idx[1]], dense[idx[2]], area_eps)) continue;
    ++accepted;
    Hypothesis h = fit_and_score(dense, idx, t_he, area_eps);
    if (!have_best || h.mae > best.mae) {
      best = h;
      have_best = true;
    }
  }
  if (!have_best) throw TooDegenerate("no non-degenerate triple drawn");
  return best;
}

}  // namespace ibi
