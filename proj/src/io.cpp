#include "ibi/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace ibi::io {

namespace fs = std::filesystem;

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("failed reading '" + path.string() + "'");
  return buf.str();
}

void write_text(const fs::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::string format_real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------
// PLY

PointCloud parse_ply(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  const auto next_line = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };

  if (!next_line() || line != "ply") throw IoError("not a PLY file");
  bool ascii = false;
  std::size_t vertex_count = 0;
  bool have_vertex = false;
  bool in_vertex = false;
  std::size_t elements_before_vertex_lines = 0;  // lines to skip from earlier elements
  std::vector<std::string> vertex_props;
  for (;;) {
    if (!next_line()) throw IoError("PLY header is not terminated");
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    if (word == "end_header") break;
    if (word == "format") {
      std::string fmt;
      ls >> fmt;
      ascii = fmt == "ascii";
    } else if (word == "element") {
      std::string name;
      std::size_t count = 0;
      if (!(ls >> name >> count)) throw IoError("malformed PLY element line");
      in_vertex = name == "vertex";
      if (in_vertex) {
        have_vertex = true;
        vertex_count = count;
      } else if (!have_vertex) {
        elements_before_vertex_lines += count;
      }
    } else if (word == "property") {
      if (in_vertex) {
        std::string type, name;
        ls >> type;
        if (type == "list") throw IoError("list properties on vertices are not supported");
        ls >> name;
        vertex_props.push_back(name);
      }
    }
  }
  if (!ascii) throw IoError("only ASCII PLY is supported");
  if (!have_vertex) throw IoError("PLY file has no vertex element");

  int ix = -1, iy = -1, iz = -1;
  for (std::size_t i = 0; i < vertex_props.size(); ++i) {
    if (vertex_props[i] == "x") ix = static_cast<int>(i);
    if (vertex_props[i] == "y") iy = static_cast<int>(i);
    if (vertex_props[i] == "z") iz = static_cast<int>(i);
  }
  if (ix < 0 || iy < 0 || iz < 0) throw IoError("PLY vertex element lacks x, y or z");

  for (std::size_t i = 0; i < elements_before_vertex_lines; ++i)
    if (!next_line()) throw IoError("PLY body is truncated");

  std::vector<Point3> points;
  points.reserve(vertex_count);
  std::vector<double> row(vertex_props.size());
  for (std::size_t v = 0; v < vertex_count; ++v) {
    if (!next_line()) throw IoError("PLY body is truncated");
    std::istringstream ls(line);
    for (auto& value : row)
      if (!(ls >> value)) throw IoError("malformed PLY vertex line " + std::to_string(v));
    points.emplace_back(row[ix], row[iy], row[iz]);
  }
  try {
    return PointCloud(std::move(points));
  } catch (const InvalidInput& e) {
    throw IoError(std::string("invalid PLY content: ") + e.what());
  }
}

std::string format_ply(const PointCloud& cloud) {
  std::string out;
  out += "ply\nformat ascii 1.0\nelement vertex " + std::to_string(cloud.size()) +
         "\nproperty double x\nproperty double y\nproperty double z\nend_header\n";
  for (const auto& p : cloud) {
    out += format_real(p.x());
    out += ' ';
    out += format_real(p.y());
    out += ' ';
    out += format_real(p.z());
    out += '\n';
  }
  return out;
}

PointCloud read_ply(const fs::path& path) {
  try {
    return parse_ply(read_text(path));
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

void write_ply(const fs::path& path, const PointCloud& cloud) { write_text(path, format_ply(cloud)); }

// ---------------------------------------------------------------------------
// JSON

json read_json(const fs::path& path) {
  const std::string text = read_text(path);
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

void write_json(const fs::path& path, const json& doc) { write_text(path, dump(doc)); }

namespace {

// Schema violations in an input document count as malformed files.
template <typename F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed ") + what + ": " + e.what());
  } catch (const InvalidInput& e) {
    throw IoError(std::string("invalid ") + what + ": " + e.what());
  }
}

json point_to_json(const Point3& p) { return json::array({p.x(), p.y(), p.z()}); }

Point3 point_from_json(const json& doc) {
  if (!doc.is_array() || doc.size() != 3) throw IoError("point must be a 3-element array");
  return {doc.at(0).get<double>(), doc.at(1).get<double>(), doc.at(2).get<double>()};
}

}  // namespace

json pose_to_json(const RigidTransform& pose) {
  json rotation = json::array();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) rotation.push_back(pose.rotation()(r, c));
  return {{"rotation", rotation}, {"translation", point_to_json(pose.translation())}};
}

RigidTransform pose_from_json(const json& doc) {
  return guarded("pose", [&] {
    const json& rot = doc.at("rotation");
    if (!rot.is_array() || rot.size() != 9) throw IoError("rotation must hold 9 numbers (row-major)");
    Eigen::Matrix3d r;
    for (int i = 0; i < 9; ++i) r(i / 3, i % 3) = rot.at(static_cast<std::size_t>(i)).get<double>();
    return RigidTransform(r, point_from_json(doc.at("translation")));
  });
}

json correspondences_to_json(const CorrespondenceSet& set, const NnsrRatios& ratios) {
  json pairs = json::array();
  for (const auto& c : set) {
    json item = {{"id", c.id}, {"src", point_to_json(c.source)}, {"dst", point_to_json(c.target)}};
    if (const auto it = ratios.find(c.id); it != ratios.end()) item["nnsr"] = it->second;
    pairs.push_back(std::move(item));
  }
  return {{"pairs", std::move(pairs)}};
}

CorrespondenceFile correspondences_from_json(const json& doc) {
  return guarded("correspondence file", [&] {
    CorrespondenceFile out;
    std::vector<Correspondence> items;
    for (const auto& item : doc.at("pairs")) {
      Correspondence c{point_from_json(item.at("src")), point_from_json(item.at("dst")),
                       item.at("id").get<CorrespondenceId>()};
      if (item.contains("nnsr")) out.ratios[c.id] = item.at("nnsr").get<double>();
      items.push_back(c);
    }
    out.set = CorrespondenceSet(std::move(items));
    return out;
  });
}

GroundTruthFile make_ground_truth(const SceneGroundTruth& scene, const LabeledCorrespondences& corrs) {
  GroundTruthFile gt;
  gt.resolution = cloud_resolution(scene.model);
  gt.poses = scene.poses;
  gt.instance_point_ranges = scene.instance_point_ranges;
  gt.clutter_count = scene.clutter_count;
  for (std::size_t i = 0; i < corrs.set.size(); ++i) gt.labels.emplace_back(corrs.set[i].id, corrs.labels[i]);
  return gt;
}

json ground_truth_to_json(const GroundTruthFile& gt) {
  json poses = json::array();
  for (const auto& p : gt.poses) poses.push_back(pose_to_json(p));
  json ranges = json::array();
  for (const auto& [b, e] : gt.instance_point_ranges) ranges.push_back(json::array({b, e}));
  json labels = json::array();
  for (const auto& [id, instance] : gt.labels) labels.push_back({{"id", id}, {"instance", instance}});
  return {{"resolution", gt.resolution},
          {"poses", std::move(poses)},
          {"instance_point_ranges", std::move(ranges)},
          {"clutter_count", gt.clutter_count},
          {"labels", std::move(labels)}};
}

GroundTruthFile ground_truth_from_json(const json& doc) {
  return guarded("ground-truth file", [&] {
    GroundTruthFile gt;
    gt.resolution = doc.at("resolution").get<double>();
    for (const auto& p : doc.at("poses")) gt.poses.push_back(pose_from_json(p));
    if (doc.contains("instance_point_ranges"))
      for (const auto& r : doc.at("instance_point_ranges"))
        gt.instance_point_ranges.emplace_back(r.at(0).get<std::size_t>(), r.at(1).get<std::size_t>());
    gt.clutter_count = doc.value("clutter_count", std::size_t{0});
    if (doc.contains("labels"))
      for (const auto& l : doc.at("labels"))
        gt.labels.emplace_back(l.at("id").get<CorrespondenceId>(), l.at("instance").get<int>());
    return gt;
  });
}

namespace {

json instance_to_json(const InstanceResult& r) {
  json doc = pose_to_json(r.transform);
  doc["overlap"] = r.overlap;
  doc["mae"] = r.mae;
  doc["iteration"] = r.iteration;
  doc["dense_ids"] = r.dense_ids;
  return doc;
}

}  // namespace

json outcome_to_json(const RegistrationOutcome& outcome) {
  json accepted = json::array();
  for (const auto& r : outcome.results) accepted.push_back(instance_to_json(r));
  json rejected = json::array();
  for (const auto& r : outcome.rejected) rejected.push_back(instance_to_json(r));
  return {{"resolution", outcome.resolution},
          {"iterations_run", outcome.iterations_run},
          {"instances", std::move(accepted)},
          {"rejected", std::move(rejected)}};
}

PosesFile poses_from_json(const json& doc) {
  return guarded("poses file", [&] {
    PosesFile out;
    out.resolution = doc.value("resolution", 0.0);
    for (const auto& p : doc.at("instances")) out.poses.push_back(pose_from_json(p));
    return out;
  });
}

json metrics_to_json(const MetricsReport& report) {
  json pairs = json::array();
  for (const auto& p : report.per_pair)
    pairs.push_back({{"hits", p.hits}, {"gt_count", p.gt_count}, {"pred_count", p.pred_count}});
  return {{"mhr", report.mhr},
          {"mhp", report.mhp},
          {"mhf1", report.mhf1},
          {"mean_time", report.mean_time},
          {"per_pair", std::move(pairs)}};
}

MetricsReport metrics_from_json(const json& doc) {
  return guarded("metrics file", [&] {
    MetricsReport r;
    r.mhr = doc.at("mhr").get<double>();
    r.mhp = doc.at("mhp").get<double>();
    r.mhf1 = doc.at("mhf1").get<double>();
    r.mean_time = doc.value("mean_time", 0.0);
    for (const auto& p : doc.at("per_pair"))
      r.per_pair.push_back({p.at("hits").get<std::size_t>(), p.at("gt_count").get<std::size_t>(),
                            p.at("pred_count").get<std::size_t>()});
    return r;
  });
}

// ---------------------------------------------------------------------------
// Config

json config_to_json(const PipelineConfig& cfg) {
  return {{"n_downsample", cfg.n_downsample},
          {"n_gtm", cfg.n_gtm},
          {"n_vot", cfg.n_vot},
          {"n_gsac", cfg.n_gsac},
          {"delta_r", cfg.delta_r},
          {"t_he", cfg.t_he},
          {"d_op_th", cfg.d_op_th},
          {"t_overlap", cfg.t_overlap},
          {"t_s", cfg.t_s},
          {"t_inliers", cfg.t_inliers},
          {"nnsr_top_k", cfg.nnsr_top_k},
          {"dense_support_ratio", cfg.dense_support_ratio},
          {"coherent_seeds", cfg.coherent_seeds},
          {"max_iterations", cfg.max_iterations},
          {"rng_seed", cfg.rng_seed},
          {"validation_mode", std::string(to_string(cfg.validation_mode))},
          {"solver_mode", std::string(to_string(cfg.solver_mode))},
          {"seed_mode", std::string(to_string(cfg.seed_mode))},
          {"area_eps", cfg.area_eps},
          {"payoff_eps", cfg.payoff_eps}};
}

void set_config_field(PipelineConfig& cfg, const std::string& key, const json& value) {
  try {
    const auto as_int = [&] {
      if (!value.is_number_integer()) throw InvalidInput("config key '" + key + "' expects an integer");
      return value.get<int>();
    };
    const auto as_real = [&] {
      if (!value.is_number()) throw InvalidInput("config key '" + key + "' expects a number");
      return value.get<double>();
    };
    if (key == "n_downsample") cfg.n_downsample = as_int();
    else if (key == "n_gtm") cfg.n_gtm = as_int();
    else if (key == "n_vot") cfg.n_vot = as_int();
    else if (key == "n_gsac") cfg.n_gsac = as_int();
    else if (key == "delta_r") cfg.delta_r = as_real();
    else if (key == "t_he") cfg.t_he = as_real();
    else if (key == "d_op_th") cfg.d_op_th = as_real();
    else if (key == "t_overlap") cfg.t_overlap = as_real();
    else if (key == "t_s") cfg.t_s = as_int();
    else if (key == "t_inliers") cfg.t_inliers = as_int();
    else if (key == "nnsr_top_k") cfg.nnsr_top_k = as_int();
    else if (key == "dense_support_ratio") cfg.dense_support_ratio = as_real();
    else if (key == "coherent_seeds") {
      if (!value.is_boolean()) throw InvalidInput("config key 'coherent_seeds' expects true or false");
      cfg.coherent_seeds = value.get<bool>();
    }    else if (key == "max_iterations") cfg.max_iterations = as_int();
    else if (key == "rng_seed") {
      if (!value.is_number_unsigned()) throw InvalidInput("config key 'rng_seed' expects a non-negative integer");
      cfg.rng_seed = value.get<std::uint64_t>();
    } else if (key == "validation_mode") cfg.validation_mode = parse_validation_mode(value.get<std::string>());
    else if (key == "solver_mode") cfg.solver_mode = parse_solver_mode(value.get<std::string>());
    else if (key == "seed_mode") cfg.seed_mode = parse_seed_mode(value.get<std::string>());
    else if (key == "area_eps") cfg.area_eps = as_real();
    else if (key == "payoff_eps") cfg.payoff_eps = as_real();
    else throw InvalidInput("unknown config key '" + key + "'");
  } catch (const json::exception& e) {
    throw InvalidInput("config key '" + key + "': " + e.what());
  }
}

PipelineConfig config_from_json(const json& doc, PipelineConfig base) {
  if (!doc.is_object()) throw InvalidInput("config must be a JSON object");
  for (const auto& [key, value] : doc.items()) set_config_field(base, key, value);
  return base;
}

}  // namespace ibi::io
