#pragma once

// Hit-based multi-instance metrics: mean hit recall, precision and F1.

#include "ibi/geometry.hpp"

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace ibi {

/// A prediction hits a ground-truth pose when both errors are within bounds.
/// These are configurable defaults, not values fixed by any benchmark.
struct HitCriteria {
  double rre_max_deg = 15.0;
  double rte_max_pr = 10.0;  // multiples of the model resolution
};

struct HitMatch {
  std::size_t pred;
  std::size_t gt;
  double rotation_error_deg;
  double translation_error;
};

/// Greedy one-to-one assignment over all (pred, gt) pairs within the criteria,
/// taken in ascending rotation error (then translation error, pred, gt).
std::vector<HitMatch> match_hits(std::span<const RigidTransform> preds, std::span<const RigidTransform> gts,
                                 const HitCriteria& criteria, double resolution);

struct PairCounts {
  std::size_t hits = 0;
  std::size_t gt_count = 0;
  std::size_t pred_count = 0;

  friend bool operator==(const PairCounts&, const PairCounts&) = default;
};

struct MetricsReport {
  double mhr = 0.0;
  double mhp = 0.0;
  double mhf1 = 0.0;
  std::vector<PairCounts> per_pair;
  double mean_time = 0.0;
};

/// Per-pair HR, HP (0 without predictions) and F1 (0 when HR = HP = 0),
/// averaged over pairs. Throws InvalidInput on a pair with gt_count = 0 or
/// hits exceeding either count. An empty list yields all-zero metrics.
MetricsReport compute_metrics(std::span<const PairCounts> per_pair);

}  // namespace ibi
