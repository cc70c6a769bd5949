#pragma once

// Instance-by-instance registration loop: seed selection, voting enhancement,
// guided pose estimation and validation, repeated with the dense set of each
// pass removed until the seeds run out.

#include "ibi/correspondence.hpp"
#include "ibi/geometry.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ibi {

enum class ValidationMode { global, local, none };
enum class SolverMode { gsac, ransac };
enum class SeedMode { gtm, nnsr };

std::string_view to_string(ValidationMode m);
std::string_view to_string(SolverMode m);
std::string_view to_string(SeedMode m);
/// Throw InvalidInput on an unknown name.
ValidationMode parse_validation_mode(std::string_view s);
SolverMode parse_solver_mode(std::string_view s);
SeedMode parse_seed_mode(std::string_view s);

/// Distance parameters (delta_r, t_he, d_op_th) are multiples of the model
/// resolution pr and resolved to scene units when a run starts.
struct PipelineConfig {
  int n_downsample = 1024;
  int n_gtm = 20;
  int n_vot = 300;
  int n_gsac = 100;  // also the RANSAC iteration budget
  double delta_r = 10.0;
  double t_he = 10.0;
  double d_op_th = 1.5;
  double t_overlap = 0.85;
  int t_s = 5;
  int t_inliers = 100;
  int nnsr_top_k = 50;
  /// Dense-set candidates need this fraction of the best voting score (seeds
  /// always qualify); 0 keeps the plain top-n_vot rule.
  double dense_support_ratio = 0.5;
  /// Trim the seed set to members within delta_r rigidity of its heaviest
  /// member, so one pass follows one instance.
  bool coherent_seeds = true;
  int max_iterations = 64;
  std::uint64_t rng_seed = 0;
  ValidationMode validation_mode = ValidationMode::global;
  SolverMode solver_mode = SolverMode::gsac;
  SeedMode seed_mode = SeedMode::gtm;
  double area_eps = 1e-9;
  double payoff_eps = 1e-12;

  static PipelineConfig synthetic() { return {}; }
  static PipelineConfig real();

  /// Throws InvalidInput when a count is < 1, a threshold is not positive,
  /// t_overlap is outside (0, 1) or n_vot < t_s.
  void validate() const;

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

struct InstanceResult {
  RigidTransform transform;
  double overlap = 0.0;
  double mae = 0.0;
  std::vector<CorrespondenceId> dense_ids;
  bool accepted = false;
  int iteration = 0;
};

struct RegistrationOutcome {
  std::vector<InstanceResult> results;   // accepted, in iteration order
  std::vector<InstanceResult> rejected;
  int iterations_run = 0;                // passes that removed a dense set
  double resolution = 0.0;               // pr of the source cloud
  double wall_time = 0.0;                // seconds
};

using NnsrRatios = std::unordered_map<CorrespondenceId, double>;

/// Uniform random subset of size n (relative order kept), or `set` itself when
/// it is no larger than n.
CorrespondenceSet downsample(const CorrespondenceSet& set, int n, std::uint64_t seed);

/// The top_k members with the smallest ratio, ascending ratio then id.
/// Throws MissingScores when a member has no ratio.
CorrespondenceSet nnsr_seed_alternative(const CorrespondenceSet& set, const NnsrRatios& ratios, int top_k);

/// Register every instance of `source` in `target` from correspondences `set`.
/// Errors raised inside one pass reject that pass (its dense set is still
/// removed); only invalid arguments escape.
RegistrationOutcome run_ibi(const CorrespondenceSet& set, const PointCloud& source, const PointCloud& target,
                            const PipelineConfig& cfg, const NnsrRatios& ratios = {});

}  // namespace ibi
