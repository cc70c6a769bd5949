#include "ibi/validation.hpp"

#include "ibi/errors.hpp"
#include "ibi/pose_estimation.hpp"

namespace ibi {

double overlap_rate(const RigidTransform& transform, const PointCloud& source, const NeighborIndex& target_index,
                    double d_op_th) {
  if (!(d_op_th > 0.0)) throw InvalidInput("d_op_th must be positive");
  if (source.empty()) throw InvalidInput("source cloud is empty");
  std::size_t overlapped = 0;
  for (const auto& p : source)
    if (point_to_cloud_distance(transform(p), target_index) <= d_op_th) ++overlapped;
  return static_cast<double>(overlapped) / static_cast<double>(source.size());
}

bool validate_global(double overlap, double t_overlap) { return overlap > t_overlap; }

ValidationVerdict validate_local(const RigidTransform& transform, const CorrespondenceSet& correspondences,
                                 double t_he, std::size_t t_inliers) {
  if (!(t_he > 0.0)) throw InvalidInput("t_he must be positive");
  ValidationVerdict verdict;
  for (const auto& c : correspondences)
    if (correspondence_residual(transform, c) < t_he) ++verdict.inlier_count;
  verdict.accepted = verdict.inlier_count > t_inliers;
  return verdict;
}

}  // namespace ibi
