#pragma once

// File formats: ASCII PLY point clouds and the JSON documents exchanged by the
// command-line tools (correspondences, ground truth, poses, metrics, config).

#include "ibi/correspondence.hpp"
#include "ibi/errors.hpp"
#include "ibi/evaluation.hpp"
#include "ibi/geometry.hpp"
#include "ibi/pipeline.hpp"
#include "ibi/synthesis.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ibi::io {

using json = nlohmann::json;

/// Unreadable, unwritable or malformed file.
class IoError : public Error {
 public:
  using Error::Error;
};

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

/// Shortest decimal that parses back to the same double.
std::string format_real(double v);

/// ASCII PLY with one `vertex` element; x, y, z are located by property name,
/// other properties and elements are skipped.
PointCloud parse_ply(std::string_view text);
std::string format_ply(const PointCloud& cloud);
PointCloud read_ply(const std::filesystem::path& path);
void write_ply(const std::filesystem::path& path, const PointCloud& cloud);

json read_json(const std::filesystem::path& path);
/// Two-space indented, trailing newline.
void write_json(const std::filesystem::path& path, const json& doc);
std::string dump(const json& doc);

json pose_to_json(const RigidTransform& pose);
RigidTransform pose_from_json(const json& doc);

// {"pairs": [{"id": int, "src": [x,y,z], "dst": [x,y,z], "nnsr": optional real}]}
struct CorrespondenceFile {
  CorrespondenceSet set;
  NnsrRatios ratios;
};
json correspondences_to_json(const CorrespondenceSet& set, const NnsrRatios& ratios = {});
CorrespondenceFile correspondences_from_json(const json& doc);

struct GroundTruthFile {
  double resolution = 0.0;
  std::vector<RigidTransform> poses;
  std::vector<std::pair<std::size_t, std::size_t>> instance_point_ranges;
  std::size_t clutter_count = 0;
  /// (correspondence id, instance index or -1)
  std::vector<std::pair<CorrespondenceId, int>> labels;
};
GroundTruthFile make_ground_truth(const SceneGroundTruth& scene, const LabeledCorrespondences& corrs);
json ground_truth_to_json(const GroundTruthFile& gt);
GroundTruthFile ground_truth_from_json(const json& doc);

/// Accepted and rejected instances; wall time is left out so the document is
/// reproducible byte for byte.
json outcome_to_json(const RegistrationOutcome& outcome);
struct PosesFile {
  double resolution = 0.0;
  std::vector<RigidTransform> poses;
};
PosesFile poses_from_json(const json& doc);

json metrics_to_json(const MetricsReport& report);
MetricsReport metrics_from_json(const json& doc);

json config_to_json(const PipelineConfig& cfg);
/// Keys present in `doc` override `base`; unknown keys are rejected with InvalidInput.
PipelineConfig config_from_json(const json& doc, PipelineConfig base = {});
/// Assign one config field from a JSON scalar by its key name.
void set_config_field(PipelineConfig& cfg, const std::string& key, const json& value);

}  // namespace ibi::io
