#pragma once

// Hypothesis validation: global point-cloud overlap or the local inlier count.

#include "ibi/correspondence.hpp"
#include "ibi/geometry.hpp"

#include <cstddef>

namespace ibi {

struct ValidationVerdict {
  bool accepted = false;
  double overlap = 0.0;
  std::size_t inlier_count = 0;
};

/// Fraction of transformed source points whose nearest target point lies
/// within d_op_th. Throws InvalidInput on d_op_th <= 0.
double overlap_rate(const RigidTransform& transform, const PointCloud& source, const NeighborIndex& target_index,
                    double d_op_th);

/// overlap > t_overlap (strict).
bool validate_global(double overlap, double t_overlap);

/// Accept when more than t_inliers correspondences have residual < t_he.
ValidationVerdict validate_local(const RigidTransform& transform, const CorrespondenceSet& correspondences,
                                 double t_he, std::size_t t_inliers);

}  // namespace ibi
