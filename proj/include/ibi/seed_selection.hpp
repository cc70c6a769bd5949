#pragma once

// Seed correspondence selection: game-theoretic matching by replicator
// dynamics over a rigidity payoff, cut by an Otsu threshold.

#include "ibi/correspondence.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <vector>

namespace ibi {

/// | |p_i - p_j| - |p'_i - p'_j| |: zero for pairs consistent with one rigid motion.
double rigidity(const Correspondence& ci, const Correspondence& cj);

/// Symmetric, zero-diagonal payoff with entries in [0, 1].
class PayoffMatrix {
 public:
  explicit PayoffMatrix(Eigen::MatrixXd values);
  std::size_t size() const { return static_cast<std::size_t>(values_.rows()); }
  double operator()(std::size_t i, std::size_t j) const { return values_(i, j); }
  const Eigen::MatrixXd& values() const { return values_; }

 private:
  Eigen::MatrixXd values_;
};

/// Off-diagonal entries exp(-r^2 / delta_r^2); throws InvalidInput on delta_r <= 0.
PayoffMatrix build_payoff_matrix(const CorrespondenceSet& set, double delta_r);

/// Strategy masses on the probability simplex.
class Population {
 public:
  static constexpr double kSumTolerance = 1e-9;

  /// Throws InvalidInput when an entry is negative or non-finite, or when the
  /// entries do not sum to 1 within kSumTolerance.
  explicit Population(Eigen::VectorXd mass);

  /// (1 + e_i) / Z with e_i uniform in [-1e-4, 1e-4] from `seed`.
  static Population near_barycenter(std::size_t n, std::uint64_t seed);

  std::size_t size() const { return static_cast<std::size_t>(mass_.size()); }
  double operator[](std::size_t i) const { return mass_[static_cast<Eigen::Index>(i)]; }
  const Eigen::VectorXd& mass() const { return mass_; }

 private:
  Eigen::VectorXd mass_;
};

inline constexpr double kDefaultPayoffEps = 1e-12;

/// x^T Pi x
double average_payoff(const Population& x, const PayoffMatrix& payoff);

/// One discrete replicator update x_i <- x_i (Pi x)_i / (x^T Pi x).
/// Throws DegeneratePayoff when x^T Pi x <= payoff_eps.
Population replicator_step(const Population& x, const PayoffMatrix& payoff,
                           double payoff_eps = kDefaultPayoffEps);

/// Evolve a near-barycentric population for `iterations` replicator steps on
/// the rigidity payoff of `set`. Throws InvalidInput on fewer than 2 members.
Population run_gtm(const CorrespondenceSet& set, int iterations, double delta_r, std::uint64_t seed = 0,
                   double payoff_eps = kDefaultPayoffEps);

inline constexpr int kOtsuBins = 256;

/// Otsu threshold over 256 uniform bins spanning [min, max]. The returned value
/// is the upper edge of the last bin of the lower class. Throws DegenerateInput
/// when all values are equal, InvalidInput on fewer than two or non-finite values.
double otsu_threshold(std::span<const double> values);

/// Members with mass strictly greater than `threshold`, order preserved.
CorrespondenceSet select_seeds(const CorrespondenceSet& set, const Population& x, double threshold);

/// Members of `seeds` whose rigidity against `anchor` is at most `max_rigidity`.
CorrespondenceSet consistent_with(const CorrespondenceSet& seeds, const Correspondence& anchor, double max_rigidity);

}  // namespace ibi
