#include "ibi/correspondence.hpp"

#include "ibi/errors.hpp"

#include <unordered_set>

namespace ibi {

CorrespondenceSet::CorrespondenceSet(std::vector<Correspondence> items) : items_(std::move(items)) {
  std::unordered_set<CorrespondenceId> seen;
  seen.reserve(items_.size());
  for (const auto& c : items_) {
    if (!is_finite(c.source) || !is_finite(c.target))
      throw InvalidInput("correspondence " + std::to_string(c.id) + " has a non-finite point");
    if (!seen.insert(c.id).second)
      throw InvalidInput("duplicate correspondence id " + std::to_string(c.id));
  }
}

std::vector<CorrespondenceId> CorrespondenceSet::ids() const {
  std::vector<CorrespondenceId> out;
  out.reserve(items_.size());
  for (const auto& c : items_) out.push_back(c.id);
  return out;
}

std::vector<PointPair> CorrespondenceSet::pairs() const {
  std::vector<PointPair> out;
  out.reserve(items_.size());
  for (const auto& c : items_) out.push_back({c.source, c.target});
  return out;
}

CorrespondenceSet CorrespondenceSet::without(std::span<const CorrespondenceId> removed) const {
  const std::unordered_set<CorrespondenceId> drop(removed.begin(), removed.end());
  CorrespondenceSet out;
  out.items_.reserve(items_.size());
  for (const auto& c : items_)
    if (!drop.contains(c.id)) out.items_.push_back(c);
  return out;
}

}  // namespace ibi
