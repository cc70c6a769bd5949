#pragma once

#include "ibi/geometry.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace ibi {

using CorrespondenceId = std::int64_t;

/// Putative match between a model point and a scene point.
struct Correspondence {
  Point3 source;
  Point3 target;
  CorrespondenceId id = 0;

  friend bool operator==(const Correspondence&, const Correspondence&) = default;
};

/// Ordered collection of correspondences with unique ids.
class CorrespondenceSet {
 public:
  CorrespondenceSet() = default;
  /// Throws InvalidInput on duplicate ids or non-finite points.
  explicit CorrespondenceSet(std::vector<Correspondence> items);

  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  const Correspondence& operator[](std::size_t i) const { return items_[i]; }
  std::span<const Correspondence> items() const { return items_; }
  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }

  std::vector<CorrespondenceId> ids() const;
  std::vector<PointPair> pairs() const;

  /// Members whose id is not in `removed`, order preserved.
  CorrespondenceSet without(std::span<const CorrespondenceId> removed) const;

  friend bool operator==(const CorrespondenceSet&, const CorrespondenceSet&) = default;

 private:
  std::vector<Correspondence> items_;
};

}  // namespace ibi
