#include "cli.hpp"

#include "ibi/evaluation.hpp"
#include "ibi/io.hpp"
#include "ibi/pipeline.hpp"
#include "ibi/synthesis.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>

namespace ibi::cli {

namespace fs = std::filesystem;
using io::json;

namespace {

std::string default_output_dir() {
  const char* env = std::getenv(kOutputDirEnv);
  return (env != nullptr && *env != '\0') ? std::string(env) : std::string(".");
}

fs::path prepare_output_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw io::IoError("cannot create output directory '" + dir + "': " + ec.message());
  return fs::path(dir);
}

// ---------------------------------------------------------------------------

struct SynthArgs {
  int instances = 5;
  double outlier_ratio = 0.5;
  int inliers = 20;
  double noise = 0.5;
  std::size_t clutter = 100;
  double spacing = 6.0;
  std::string model;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_synth(const SynthArgs& a) {
  const PointCloud model = a.model.empty() ? builtin_model() : io::read_ply(a.model);
  SceneOptions options;
  options.clutter_count = a.clutter;
  options.spacing_factor = a.spacing;
  const SceneGroundTruth scene = generate_scene(model, a.instances, options, a.seed);
  const LabeledCorrespondences corrs =
      generate_correspondences(scene, a.inliers, a.outlier_ratio, a.noise, a.seed * 2 + 1);

  const fs::path out = prepare_output_dir(a.out);
  io::write_ply(out / "model.ply", scene.model);
  io::write_ply(out / "scene.ply", scene.scene);
  io::write_json(out / "gt.json", io::ground_truth_to_json(io::make_ground_truth(scene, corrs)));
  io::write_json(out / "corrs.json", io::correspondences_to_json(corrs.set));
  return kOk;
}

// ---------------------------------------------------------------------------

struct RegisterArgs {
  std::string model, scene, corrs, config;
  std::string profile = "synthetic";
  std::optional<std::string> validation, solver, seeds;
  std::optional<double> t_overlap;
  std::optional<int> t_inliers, n_gsac;
  std::optional<std::uint64_t> seed;
  std::string out;
};

PipelineConfig resolve_config(const RegisterArgs& a) {
  PipelineConfig cfg;
  if (a.profile == "synthetic") cfg = PipelineConfig::synthetic();
  else if (a.profile == "real") cfg = PipelineConfig::real();
  else throw InvalidInput("unknown profile '" + a.profile + "'");
  if (!a.config.empty()) cfg = io::config_from_json(io::read_json(a.config), cfg);
  if (a.validation) cfg.validation_mode = parse_validation_mode(*a.validation);
  if (a.solver) cfg.solver_mode = parse_solver_mode(*a.solver);
  if (a.seeds) cfg.seed_mode = parse_seed_mode(*a.seeds);
  if (a.t_overlap) cfg.t_overlap = *a.t_overlap;
  if (a.t_inliers) cfg.t_inliers = *a.t_inliers;
  if (a.n_gsac) cfg.n_gsac = *a.n_gsac;
  if (a.seed) cfg.rng_seed = *a.seed;
  cfg.validate();
  return cfg;
}

int cmd_register(const RegisterArgs& a) {
  const PipelineConfig cfg = resolve_config(a);
  const PointCloud model = io::read_ply(a.model);
  const PointCloud scene = io::read_ply(a.scene);
  const io::CorrespondenceFile corrs = io::correspondences_from_json(io::read_json(a.corrs));
  if (corrs.set.empty()) throw InvalidInput("correspondence file has no pairs");

  const RegistrationOutcome outcome = run_ibi(corrs.set, model, scene, cfg, corrs.ratios);

  const fs::path out = prepare_output_dir(a.out);
  io::write_json(out / "poses.json", io::outcome_to_json(outcome));
  const json manifest = {
      {"version", IBI_VERSION},
      {"config", io::config_to_json(cfg)},
      {"rng_seed", cfg.rng_seed},
      {"inputs", {{"model", a.model}, {"scene", a.scene}, {"corrs", a.corrs}, {"config", a.config}}},
      {"outputs", {{"poses", (out / "poses.json").string()}}},
      {"wall_time", outcome.wall_time},
  };
  io::write_json(out / "manifest.json", manifest);
  return kOk;
}

// ---------------------------------------------------------------------------

struct EvaluateArgs {
  std::vector<std::string> poses, gts;
  double rre_max = 15.0;
  double rte_max = 10.0;
  std::string out;
};

int cmd_evaluate(const EvaluateArgs& a) {
  if (a.poses.size() != a.gts.size() || a.poses.empty())
    throw InvalidInput("--poses and --gt must be given the same, nonzero number of times");
  const HitCriteria criteria{a.rre_max, a.rte_max};
  if (!(criteria.rre_max_deg > 0.0) || !(criteria.rte_max_pr > 0.0))
    throw InvalidInput("hit thresholds must be positive");

  std::vector<PairCounts> counts;
  double time_sum = 0.0;
  std::size_t timed = 0;
  for (std::size_t i = 0; i < a.poses.size(); ++i) {
    const io::PosesFile preds = io::poses_from_json(io::read_json(a.poses[i]));
    const io::GroundTruthFile gt = io::ground_truth_from_json(io::read_json(a.gts[i]));
    const auto hits = match_hits(preds.poses, gt.poses, criteria, gt.resolution);
    counts.push_back({hits.size(), gt.poses.size(), preds.poses.size()});

    const fs::path manifest = fs::path(a.poses[i]).parent_path() / "manifest.json";
    if (fs::exists(manifest)) {
      const json m = io::read_json(manifest);
      if (m.contains("wall_time") && m["wall_time"].is_number()) {
        time_sum += m["wall_time"].get<double>();
        ++timed;
      }
    }
  }
  MetricsReport report = compute_metrics(counts);
  report.mean_time = timed > 0 ? time_sum / static_cast<double>(timed) : 0.0;

  const fs::path out = prepare_output_dir(a.out);
  io::write_json(out / "metrics.json", io::metrics_to_json(report));
  return kOk;
}

// ---------------------------------------------------------------------------

struct AblateArgs {
  std::string fixtures, grid, config;
  std::string profile = "synthetic";
  double rre_max = 15.0;
  double rte_max = 10.0;
  std::string out;
};

struct Fixture {
  PointCloud model, scene;
  io::CorrespondenceFile corrs;
  io::GroundTruthFile gt;
};

std::vector<Fixture> load_fixtures(const fs::path& root) {
  std::vector<fs::path> dirs;
  if (fs::exists(root / "corrs.json")) {
    dirs.push_back(root);
  } else {
    if (!fs::is_directory(root)) throw io::IoError("fixture directory '" + root.string() + "' does not exist");
    for (const auto& entry : fs::directory_iterator(root))
      if (entry.is_directory() && fs::exists(entry.path() / "corrs.json")) dirs.push_back(entry.path());
    std::sort(dirs.begin(), dirs.end());
  }
  std::vector<Fixture> out;
  for (const auto& d : dirs) {
    out.push_back({io::read_ply(d / "model.ply"), io::read_ply(d / "scene.ply"),
                   io::correspondences_from_json(io::read_json(d / "corrs.json")),
                   io::ground_truth_from_json(io::read_json(d / "gt.json"))});
  }
  return out;
}

struct GridCell {
  std::string id;
  PipelineConfig config;
};

std::string value_label(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

// Each sweep is an object of config keys; array values are swept as a
// cartesian product, scalars are fixed.
std::vector<GridCell> expand_grid(const json& grid, const PipelineConfig& base) {
  if (!grid.is_object() || !grid.contains("sweeps") || !grid["sweeps"].is_array())
    throw InvalidInput("grid must be an object with a 'sweeps' array");
  std::map<std::string, GridCell> cells;
  for (const auto& sweep : grid["sweeps"]) {
    if (!sweep.is_object()) throw InvalidInput("each sweep must be an object");
    std::vector<std::pair<std::string, std::vector<json>>> axes;
    for (const auto& [key, value] : sweep.items()) {
      std::vector<json> values = value.is_array() ? std::vector<json>(value.begin(), value.end())
                                                  : std::vector<json>{value};
      if (values.empty()) throw InvalidInput("sweep key '" + key + "' has no values");
      axes.emplace_back(key, std::move(values));
    }
    std::vector<std::size_t> pos(axes.size(), 0);
    for (;;) {
      GridCell cell{"", base};
      for (std::size_t a = 0; a < axes.size(); ++a) {
        const json& v = axes[a].second[pos[a]];
        io::set_config_field(cell.config, axes[a].first, v);
        if (!cell.id.empty()) cell.id += ';';
        cell.id += axes[a].first + "=" + value_label(v);
      }
      if (cell.id.empty()) cell.id = "base";
      cell.config.validate();
      cells.insert_or_assign(cell.id, cell);
      std::size_t a = 0;
      while (a < axes.size() && ++pos[a] == axes[a].second.size()) pos[a++] = 0;
      if (a == axes.size()) break;
    }
  }
  std::vector<GridCell> out;
  for (auto& [id, cell] : cells) out.push_back(std::move(cell));
  return out;
}

int cmd_ablate(const AblateArgs& a) {
  PipelineConfig base;
  if (a.profile == "synthetic") base = PipelineConfig::synthetic();
  else if (a.profile == "real") base = PipelineConfig::real();
  else throw InvalidInput("unknown profile '" + a.profile + "'");
  if (!a.config.empty()) base = io::config_from_json(io::read_json(a.config), base);

  const std::vector<GridCell> cells = expand_grid(io::read_json(a.grid), base);
  const std::vector<Fixture> fixtures = cells.empty() ? std::vector<Fixture>{} : load_fixtures(a.fixtures);
  const HitCriteria criteria{a.rre_max, a.rte_max};

  std::string csv = "config_id,mhr,mhp,mhf1,mean_time\n";
  for (const auto& cell : cells) {
    std::vector<PairCounts> counts;
    double time_sum = 0.0;
    for (const auto& f : fixtures) {
      const RegistrationOutcome outcome = run_ibi(f.corrs.set, f.model, f.scene, cell.config, f.corrs.ratios);
      std::vector<RigidTransform> preds;
      for (const auto& r : outcome.results) preds.push_back(r.transform);
      const auto hits = match_hits(preds, f.gt.poses, criteria, f.gt.resolution);
      counts.push_back({hits.size(), f.gt.poses.size(), preds.size()});
      time_sum += outcome.wall_time;
    }
    const MetricsReport report = compute_metrics(counts);
    const double mean_time = fixtures.empty() ? 0.0 : time_sum / static_cast<double>(fixtures.size());
    std::string id = cell.id;
    if (id.find_first_of(",\"") != std::string::npos) {
      std::string quoted = "\"";
      for (char ch : id) quoted += (ch == '"') ? std::string("\"\"") : std::string(1, ch);
      id = quoted + "\"";
    }
    csv += id + "," + io::format_real(report.mhr) + "," + io::format_real(report.mhp) + "," +
           io::format_real(report.mhf1) + "," + io::format_real(mean_time) + "\n";
  }

  const fs::path out = prepare_output_dir(a.out);
  io::write_text(out / "ablation.csv", csv);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Multi-instance rigid registration from putative correspondences"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(IBI_VERSION));

  SynthArgs synth;
  synth.out = default_output_dir();
  auto* s = app.add_subcommand("synth", "generate a synthetic multi-instance scene");
  s->add_option("--instances,-k", synth.instances, "number of instances (1-20)")->check(CLI::Range(1, kMaxInstances));
  s->add_option("--outlier-ratio", synth.outlier_ratio, "outliers / all correspondences, in [0, 1)");
  s->add_option("--inliers", synth.inliers, "ground-truth correspondences per instance")->check(CLI::PositiveNumber);
  s->add_option("--noise", synth.noise, "inlier noise sigma in multiples of the model resolution");
  s->add_option("--clutter", synth.clutter, "random clutter points in the scene");
  s->add_option("--spacing", synth.spacing, "instance spacing factor");
  s->add_option("--model", synth.model, "model PLY (default: built-in 256-point shape)");
  s->add_option("--seed", synth.seed, "random seed");
  s->add_option("--out", synth.out, "output directory");

  RegisterArgs reg;
  reg.out = default_output_dir();
  auto* r = app.add_subcommand("register", "register every instance of the model in the scene");
  r->add_option("--model", reg.model, "model PLY")->required();
  r->add_option("--scene", reg.scene, "scene PLY")->required();
  r->add_option("--corrs", reg.corrs, "correspondence JSON")->required();
  r->add_option("--config", reg.config, "pipeline config JSON (keys override the profile)");
  r->add_option("--profile", reg.profile, "parameter profile: synthetic or real");
  r->add_option("--validation", reg.validation, "global, local or none");
  r->add_option("--solver", reg.solver, "gsac or ransac");
  r->add_option("--seeds", reg.seeds, "gtm or nnsr");
  r->add_option("--t-overlap", reg.t_overlap, "global validation overlap threshold");
  r->add_option("--t-inliers", reg.t_inliers, "local validation inlier threshold");
  r->add_option("--n-gsac", reg.n_gsac, "hypotheses per pass (GSAC triples or RANSAC draws)");
  r->add_option("--seed", reg.seed, "random seed");
  r->add_option("--out", reg.out, "output directory");

  EvaluateArgs eval;
  eval.out = default_output_dir();
  auto* e = app.add_subcommand("evaluate", "compute MHR / MHP / MHF1");
  e->add_option("--poses", eval.poses, "poses.json (repeat per scene pair)")->required();
  e->add_option("--gt", eval.gts, "gt.json (repeat per scene pair, same order)")->required();
  e->add_option("--rre-max", eval.rre_max, "rotation hit threshold in degrees");
  e->add_option("--rte-max", eval.rte_max, "translation hit threshold in model-resolution multiples");
  e->add_option("--out", eval.out, "output directory");

  AblateArgs abl;
  abl.out = default_output_dir();
  auto* b = app.add_subcommand("ablate", "run a configuration grid over fixtures");
  b->add_option("--fixtures", abl.fixtures, "fixture directory (or a directory of fixtures)")->required();
  b->add_option("--grid", abl.grid, "grid JSON")->required();
  b->add_option("--config", abl.config, "base pipeline config JSON");
  b->add_option("--profile", abl.profile, "parameter profile: synthetic or real");
  b->add_option("--rre-max", abl.rre_max, "rotation hit threshold in degrees");
  b->add_option("--rte-max", abl.rte_max, "translation hit threshold in model-resolution multiples");
  b->add_option("--out", abl.out, "output directory");

  std::vector<char*> argv;
  std::vector<std::string> storage = args.empty() ? std::vector<std::string>{"ibi"} : args;
  for (auto& a : storage) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::CallForAllHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::CallForVersion& ex) {
    return app.exit(ex);
  } catch (const CLI::ParseError& ex) {
    app.exit(ex);
    return kUsage;
  }

  try {
    if (*s) return cmd_synth(synth);
    if (*r) return cmd_register(reg);
    if (*e) return cmd_evaluate(eval);
    if (*b) return cmd_ablate(abl);
  } catch (const io::IoError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kIo;
  } catch (const fs::filesystem_error& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kIo;
  } catch (const InvalidInput& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kUsage;
  } catch (const MissingScores& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kUsage;
  } catch (const std::exception& ex) {
    std::cerr << "internal error: " << ex.what() << "\n";
    return kInternal;
  }
  return kUsage;
}

}  // namespace ibi::cli
