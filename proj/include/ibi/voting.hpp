#pragma once

// Correspondence enhancement: seeds vote for every remaining correspondence
// and the best-supported ones form the dense set.

#include "ibi/correspondence.hpp"

#include <unordered_map>
#include <vector>

namespace ibi {

/// exp(-r^2 / delta_r^2); throws InvalidInput on delta_r <= 0.
double compatibility(const Correspondence& ci, const Correspondence& cj, double delta_r);

/// Voting score per correspondence id, kept in candidate order.
class VotingScores {
 public:
  VotingScores() = default;
  VotingScores(std::vector<CorrespondenceId> ids, std::vector<double> scores);

  std::size_t size() const { return ids_.size(); }
  const std::vector<CorrespondenceId>& ids() const { return ids_; }
  const std::vector<double>& scores() const { return scores_; }
  bool contains(CorrespondenceId id) const { return lookup_.contains(id); }
  /// Throws InvalidInput for an unknown id.
  double at(CorrespondenceId id) const;

 private:
  std::vector<CorrespondenceId> ids_;
  std::vector<double> scores_;
  std::unordered_map<CorrespondenceId, std::size_t> lookup_;
};

/// s(c) = sum over voters v of compatibility(c, v), voters summed in order.
/// A candidate that is also a voter counts its own unit self-vote.
/// Throws InvalidInput on an empty voter set.
VotingScores vote(const CorrespondenceSet& candidates, const CorrespondenceSet& voters, double delta_r);

/// The min(n_vot, |candidates|) highest-scoring candidates, descending score,
/// ties by ascending id.
CorrespondenceSet select_dense(const CorrespondenceSet& candidates, const VotingScores& scores, int n_vot);

/// Candidates that are seeds or whose score reaches `min_ratio` times the best
/// score, order preserved. A ratio of 0 keeps every candidate.
CorrespondenceSet select_supported(const CorrespondenceSet& candidates, const VotingScores& scores,
                                   const CorrespondenceSet& seeds, double min_ratio);

}  // namespace ibi
