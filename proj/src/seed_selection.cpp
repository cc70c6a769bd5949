#include "ibi/seed_selection.hpp"

#include "ibi/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

namespace ibi {

double rigidity(const Correspondence& ci, const Correspondence& cj) {
  return std::abs(distance(ci.source, cj.source) - distance(ci.target, cj.target));
}

PayoffMatrix::PayoffMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {
  if (values_.rows() != values_.cols()) throw InvalidInput("payoff matrix must be square");
}

PayoffMatrix build_payoff_matrix(const CorrespondenceSet& set, double delta_r) {
  if (!(delta_r > 0.0)) throw InvalidInput("delta_r must be positive");
  const auto n = static_cast<Eigen::Index>(set.size());
  const double inv_sq = 1.0 / (delta_r * delta_r);
  Eigen::MatrixXd pi = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double r = rigidity(set[static_cast<std::size_t>(i)], set[static_cast<std::size_t>(j)]);
      const double v = std::exp(-r * r * inv_sq);
      pi(i, j) = v;
      pi(j, i) = v;
    }
  }
  return PayoffMatrix(std::move(pi));
}

Population::Population(Eigen::VectorXd mass) : mass_(std::move(mass)) {
  if (mass_.size() == 0) throw InvalidInput("population is empty");
  if (!mass_.allFinite() || mass_.minCoeff() < 0.0) throw InvalidInput("population entries must be finite and >= 0");
  if (std::abs(mass_.sum() - 1.0) > kSumTolerance) throw InvalidInput("population does not sum to 1");
}

Population Population::near_barycenter(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw InvalidInput("population is empty");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-1e-4, 1e-4);
  Eigen::VectorXd mass(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < mass.size(); ++i) mass[i] = 1.0 + jitter(rng);
  mass /= mass.sum();
  return Population(std::move(mass));
}

double average_payoff(const Population& x, const PayoffMatrix& payoff) {
  return x.mass().dot(payoff.values() * x.mass());
}

Population replicator_step(const Population& x, const PayoffMatrix& payoff, double payoff_eps) {
  if (x.size() != payoff.size()) throw InvalidInput("population and payoff sizes differ");
  const Eigen::VectorXd fitness = payoff.values() * x.mass();
  const double avg = x.mass().dot(fitness);
  if (!(avg > payoff_eps)) throw DegeneratePayoff("average payoff vanished");
  return Population(x.mass().cwiseProduct(fitness) / avg);
}

Population run_gtm(const CorrespondenceSet& set, int iterations, double delta_r, std::uint64_t seed,
                   double payoff_eps) {
  if (set.size() < 2) throw InvalidInput("game-theoretic matching needs at least two correspondences");
  if (iterations < 0) throw InvalidInput("iteration count must be non-negative");
  const PayoffMatrix payoff = build_payoff_matrix(set, delta_r);
  Population x = Population::near_barycenter(set.size(), seed);
  for (int step = 0; step < iterations; ++step) x = replicator_step(x, payoff, payoff_eps);
  return x;
}

double otsu_threshold(std::span<const double> values) {
  if (values.size() < 2) throw InvalidInput("Otsu threshold needs at least two values");
  for (double v : values)
    if (!std::isfinite(v)) throw InvalidInput("Otsu threshold on non-finite value");
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (!(hi > lo)) throw DegenerateInput("all values are equal");

  const double width = (hi - lo) / kOtsuBins;
  std::array<double, kOtsuBins> hist{};
  for (double v : values) {
    const int bin = std::clamp(static_cast<int>((v - lo) / width), 0, kOtsuBins - 1);
    hist[bin] += 1.0;
  }

  const double total = static_cast<double>(values.size());
  double total_moment = 0.0;
  for (int b = 0; b < kOtsuBins; ++b) total_moment += hist[b] * (lo + (b + 0.5) * width);

  double best_var = -1.0;
  int best_bin = 0;
  double count0 = 0.0;
  double moment0 = 0.0;
  for (int k = 0; k < kOtsuBins; ++k) {
    count0 += hist[k];
    moment0 += hist[k] * (lo + (k + 0.5) * width);
    const double count1 = total - count0;
    double var = 0.0;
    if (count0 > 0.0 && count1 > 0.0) {
      const double diff = moment0 / count0 - (total_moment - moment0) / count1;
      var = (count0 / total) * (count1 / total) * diff * diff;
    }
    if (var > best_var) {
      best_var = var;
      best_bin = k;
    }
  }
  return lo + (best_bin + 1) * width;
}

CorrespondenceSet select_seeds(const CorrespondenceSet& set, const Population& x, double threshold) {
  if (x.size() != set.size()) throw InvalidInput("population and set sizes differ");
  std::vector<Correspondence> out;
  for (std::size_t i = 0; i < set.size(); ++i)
    if (x[i] > threshold) out.push_back(set[i]);
  return CorrespondenceSet(std::move(out));
}

CorrespondenceSet consistent_with(const CorrespondenceSet& seeds, const Correspondence& anchor, double max_rigidity) {
  std::vector<Correspondence> out;
  for (const auto& c : seeds)
    if (rigidity(anchor, c) <= max_rigidity) out.push_back(c);
  return CorrespondenceSet(std::move(out));
}

}  // namespace ibi
