#include "ibi/evaluation.hpp"

#include "ibi/errors.hpp"

#include <algorithm>
#include <tuple>

namespace ibi {

std::vector<HitMatch> match_hits(std::span<const RigidTransform> preds, std::span<const RigidTransform> gts,
                                 const HitCriteria& criteria, double resolution) {
  const double rte_max = criteria.rte_max_pr * resolution;
  std::vector<HitMatch> candidates;
  for (std::size_t p = 0; p < preds.size(); ++p) {
    for (std::size_t g = 0; g < gts.size(); ++g) {
      const double rre = rotation_error_deg(preds[p].rotation(), gts[g].rotation());
      const double rte = translation_error(preds[p].translation(), gts[g].translation());
      if (rre <= criteria.rre_max_deg && rte <= rte_max) candidates.push_back({p, g, rre, rte});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const HitMatch& a, const HitMatch& b) {
    return std::tie(a.rotation_error_deg, a.translation_error, a.pred, a.gt) <
           std::tie(b.rotation_error_deg, b.translation_error, b.pred, b.gt);
  });

  std::vector<bool> pred_used(preds.size(), false);
  std::vector<bool> gt_used(gts.size(), false);
  std::vector<HitMatch> hits;
  for (const auto& c : candidates) {
    if (pred_used[c.pred] || gt_used[c.gt]) continue;
    pred_used[c.pred] = true;
    gt_used[c.gt] = true;
    hits.push_back(c);
  }
  return hits;
}

MetricsReport compute_metrics(std::span<const PairCounts> per_pair) {
  MetricsReport report;
  report.per_pair.assign(per_pair.begin(), per_pair.end());
  if (per_pair.empty()) return report;
  for (const auto& pair : per_pair) {
    if (pair.gt_count == 0) throw InvalidInput("scene pair without ground-truth instances");
    if (pair.hits > pair.gt_count || pair.hits > pair.pred_count)
      throw InvalidInput("hit count exceeds ground-truth or prediction count");
    const double hr = static_cast<double>(pair.hits) / static_cast<double>(pair.gt_count);
    const double hp = pair.pred_count == 0 ? 0.0 : static_cast<double>(pair.hits) / static_cast<double>(pair.pred_count);
    const double f1 = (hr + hp) > 0.0 ? 2.0 * hr * hp / (hr + hp) : 0.0;
    report.mhr += hr;
    report.mhp += hp;
    report.mhf1 += f1;
  }
  const auto n = static_cast<double>(per_pair.size());
  report.mhr /= n;
  report.mhp /= n;
  report.mhf1 /= n;
  return report;
}

}  // namespace ibi
