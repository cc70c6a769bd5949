#include "ibi/voting.hpp"

#include "ibi/errors.hpp"
#include "ibi/seed_selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

namespace ibi {

double compatibility(const Correspondence& ci, const Correspondence& cj, double delta_r) {
  if (!(delta_r > 0.0)) throw InvalidInput("delta_r must be positive");
  const double r = rigidity(ci, cj);
  return std::exp(-(r * r) / (delta_r * delta_r));
}

VotingScores::VotingScores(std::vector<CorrespondenceId> ids, std::vector<double> scores)
    : ids_(std::move(ids)), scores_(std::move(scores)) {
  if (ids_.size() != scores_.size()) throw InvalidInput("ids and scores differ in length");
  lookup_.reserve(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (!std::isfinite(scores_[i])) throw InvalidInput("voting score is not finite");
    if (!lookup_.emplace(ids_[i], i).second) throw InvalidInput("duplicate id in voting scores");
  }
}

double VotingScores::at(CorrespondenceId id) const {
  const auto it = lookup_.find(id);
  if (it == lookup_.end()) throw InvalidInput("no voting score for id " + std::to_string(id));
  return scores_[it->second];
}

VotingScores vote(const CorrespondenceSet& candidates, const CorrespondenceSet& voters, double delta_r) {
  if (voters.empty()) throw InvalidInput("voting needs at least one voter");
  if (!(delta_r > 0.0)) throw InvalidInput("delta_r must be positive");
  std::vector<double> scores(candidates.size(), 0.0);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    double s = 0.0;
    for (const auto& v : voters) s += compatibility(candidates[i], v, delta_r);
    scores[i] = s;
  }
  return VotingScores(candidates.ids(), std::move(scores));
}

CorrespondenceSet select_dense(const CorrespondenceSet& candidates, const VotingScores& scores, int n_vot) {
  if (n_vot < 1) throw InvalidInput("n_vot must be at least 1");
  std::vector<std::pair<double, std::size_t>> ranked;
  ranked.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) ranked.emplace_back(scores.at(candidates[i].id), i);

  const std::size_t keep = std::min(static_cast<std::size_t>(n_vot), ranked.size());
  const auto before = [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return candidates[a.second].id < candidates[b.second].id;
  };
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep), ranked.end(), before);

  std::vector<Correspondence> out;
  out.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) out.push_back(candidates[ranked[i].second]);
  return CorrespondenceSet(std::move(out));
}

CorrespondenceSet select_supported(const CorrespondenceSet& candidates, const VotingScores& scores,
                                   const CorrespondenceSet& seeds, double min_ratio) {
  if (!(min_ratio >= 0.0 && min_ratio <= 1.0)) throw InvalidInput("support ratio must lie in [0, 1]");
  if (min_ratio == 0.0 || candidates.empty()) return candidates;
  double best = 0.0;
  for (const auto& c : candidates) best = std::max(best, scores.at(c.id));
  const double floor = min_ratio * best;
  std::unordered_set<CorrespondenceId> seed_ids;
  for (const auto& c : seeds) seed_ids.insert(c.id);
  std::vector<Correspondence> out;
  for (const auto& c : candidates)
    if (seed_ids.contains(c.id) || scores.at(c.id) >= floor) out.push_back(c);
  return CorrespondenceSet(std::move(out));
}

}  // namespace ibi
