// fs2d: batch front end for pairwise registration, odometry, peak
// inspection, scene synthesis and evaluation.
//
// Exit codes: 0 success, 2 input or configuration error, 3 processing error.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "fs2d/config.hpp"
#include "fs2d/dataset.hpp"
#include "fs2d/errors.hpp"
#include "fs2d/eval.hpp"
#include "fs2d/odometry.hpp"
#include "fs2d/registration.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace fs2d;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitProcessing = 3;

// Flags that map one-to-one onto config keys. Values stay strings so the
// config parser does all validation.
struct ConfigFlags {
  std::string config_path;
  bool subcell = false;

  void attach(CLI::App& app) {
    app.add_option("--config", config_path, "key = value configuration file");
    add(app, "--grid-size", "grid_size", "grid cells per side (even)");
    add(app, "--cell-size", "cell_size", "cell size in meters (default 0.75)");
    add(app, "--bandwidth", "bandwidth", "spherical harmonic bandwidth B (default 128)");
    add(app, "--stride", "stride", "scan stride for odometry pairs (default 5)");
    add(app, "--tau", "tau", "outlier threshold on the peak ratio");
    add(app, "--nms-k", "nms_k", "maximum translation hypotheses");
    add(app, "--nms-radius", "nms_radius", "peak suppression radius in cells");
    add(app, "--rel-threshold", "rel_threshold", "weakest hypothesis relative to the first");
    add(app, "--jobs", "jobs", "worker threads for odometry");
    add(app, "--seed", "seed", "seed for every stochastic path (0 keeps the scene seed)");
    app.add_flag("--subcell", subcell, "quadratic sub-cell peak refinement");
  }

  void add(CLI::App& app, const std::string& flag, const std::string& key,
           const std::string& help) {
    slots_.push_back({key, std::make_unique<std::string>()});
    app.add_option(flag, *slots_.back().second, help);
  }

  RunConfig load() {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_run_config(config_path);
    for (const auto& [key, text] : slots_) {
      if (!text->empty()) cfg.set(key, *text);
    }
    if (subcell) cfg.set("subcell", "true");
    cfg.validate();
    return cfg;
  }

 private:
  std::vector<std::pair<std::string, std::unique_ptr<std::string>>> slots_;
};

json motion_json(const RigidMotion2D& m) {
  return {{"dx", m.dx}, {"dy", m.dy}, {"theta", m.theta}, {"theta_deg", rad2deg(m.theta)}};
}

json hypotheses_json(const std::vector<MotionHypothesis>& hyps) {
  json out = json::array();
  for (const auto& h : hyps) {
    json item = {{"rank", h.rank}, {"strength", h.strength}};
    item["motion"] = motion_json(h.motion);
    out.push_back(item);
  }
  return out;
}

json result_json(const RegistrationResult& r) {
  json doc;
  doc["ego_motion"] = motion_json(r.ego_motion);
  doc["confidence"] = r.confidence;
  doc["is_outlier"] = r.is_outlier;
  doc["rotation_confidence"] = r.rotation_confidence;
  doc["rotation_candidates_deg"] = {rad2deg(r.rotation.candidates[0]),
                                    rad2deg(r.rotation.candidates[1])};
  doc["hypotheses"] = hypotheses_json(r.hypotheses);
  return doc;
}

void write_text(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << text;
  if (!out) throw Error("write failed: " + path);
}

// Centered layout: row i holds dy = i - n/2, column j holds dx = j - n/2.
void dump_surface(const CorrelationSurface& s, double cell_size, const std::string& path) {
  std::ostringstream out;
  const int n = s.size();
  out << "# fs2d correlation surface " << n << "x" << n << " cell " << format_double(cell_size)
      << " m; row i is dy = i - " << n / 2 << ", column j is dx = j - " << n / 2 << "\n";
  for (int dy = -n / 2; dy < n / 2; ++dy) {
    for (int dx = -n / 2; dx < n / 2; ++dx) {
      if (dx > -n / 2) out << ' ';
      out << format_double(s.at({dx, dy}));
    }
    out << '\n';
  }
  write_text(out.str(), path);
}

std::vector<fs::path> scan_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw InputError("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".fs2dscan") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::string frame_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "scan_%06zu.fs2dscan", i);
  return buf;
}

// --- subcommands ----------------------------------------------------------

struct PairArgs {
  std::string scan_a;
  std::string scan_b;
  std::string output;
  std::string surface;
};

RegistrationResult register_files(const PairArgs& args, const RunConfig& cfg) {
  const PolarScan a = load_polar_scan(args.scan_a);
  const PolarScan b = load_polar_scan(args.scan_b);
  return register_scans(a, b, cfg.registration());
}

void cmd_register(const PairArgs& args, ConfigFlags& flags) {
  const RunConfig cfg = flags.load();
  const RegistrationResult r = register_files(args, cfg);
  json doc = result_json(r);
  doc["scan_a"] = args.scan_a;
  doc["scan_b"] = args.scan_b;
  write_text(doc.dump(2) + "\n", args.output);
  if (!args.surface.empty()) dump_surface(r.surface, cfg.registration().grid.cell_size, args.surface);
}

void cmd_peaks(const PairArgs& args, ConfigFlags& flags) {
  const RunConfig cfg = flags.load();
  const RegistrationResult r = register_files(args, cfg);
  json doc;
  doc["scan_a"] = args.scan_a;
  doc["scan_b"] = args.scan_b;
  doc["confidence"] = r.confidence;
  doc["hypotheses"] = hypotheses_json(r.hypotheses);
  write_text(doc.dump(2) + "\n", args.output);
  if (!args.surface.empty()) dump_surface(r.surface, cfg.registration().grid.cell_size, args.surface);
}

struct OdometryArgs {
  std::string scan_dir;
  std::string output = "trajectory.csv";
  std::string summary;
  std::string format = "csv";
  bool sliding = false;
};

void cmd_odometry(const OdometryArgs& args, ConfigFlags& flags) {
  RunConfig cfg = flags.load();
  if (args.sliding) cfg.odometry.pair_mode = PairMode::kSliding;
  const std::vector<fs::path> files = scan_files(args.scan_dir);
  ScanSource source;
  source.count = files.size();
  source.load = [&files](std::size_t i) { return load_polar_scan(files[i]); };
  const OdometryRun run = run_odometry(source, cfg.odometry);

  export_trajectory(run.trajectory, args.output,
                    args.format == "geojson" ? TrajectoryFormat::kGeoJson : TrajectoryFormat::kCsv);

  json pairs = json::array();
  std::vector<double> ms;
  for (const PairRecord& p : run.pairs) {
    json item = {{"index_a", p.index_a},
                 {"index_b", p.index_b},
                 {"timestamp_a", p.timestamp_a},
                 {"timestamp_b", p.timestamp_b}};
    item["motion"] = motion_json(p.motion);
    item["confidence"] = p.confidence;
    item["is_outlier"] = p.is_outlier;
    item["hypotheses"] = hypotheses_json(p.hypotheses);
    pairs.push_back(item);
    ms.push_back(p.elapsed_ms);
  }
  json doc;
  doc["scan_count"] = files.size();
  doc["stride"] = cfg.odometry.stride;
  doc["pair_mode"] = cfg.odometry.pair_mode == PairMode::kSliding ? "sliding" : "stride";
  doc["pose_count"] = run.trajectory.size();
  doc["outlier_count"] =
      std::count(run.trajectory.outliers.begin(), run.trajectory.outliers.end(), true);
  doc["pairs"] = pairs;
  // Wall-clock figures; the only part of any output that varies between runs.
  const double total = std::accumulate(ms.begin(), ms.end(), 0.0);
  doc["timing"] = {{"jobs", cfg.odometry.jobs},
                   {"mean_ms_per_pair", ms.empty() ? 0.0 : total / ms.size()},
                   {"max_ms_per_pair", ms.empty() ? 0.0 : *std::max_element(ms.begin(), ms.end())},
                   {"per_pair_ms", ms}};
  const std::string summary =
      args.summary.empty() ? fs::path(args.output).replace_extension(".summary.json").string()
                           : args.summary;
  write_text(doc.dump(2) + "\n", summary);
}

struct SynthArgs {
  std::string spec;
  std::size_t frames = 10;
  std::string out_dir = ".";
};

void cmd_synth(const SynthArgs& args, ConfigFlags& flags) {
  const RunConfig cfg = flags.load();
  SceneSpec spec = load_scene_spec(args.spec);
  // An explicit --seed (or config seed) wins over the spec file.
  if (cfg.seed != 0) spec.seed = cfg.seed;
  if (args.frames < 1) throw InputError("--frames must be >= 1");
  const SynthOutput out = synth_scene(spec, args.frames);
  for (const auto& w : out.warnings) std::cerr << "warning: " << w << "\n";

  const fs::path dir = args.out_dir;
  fs::create_directories(dir);
  for (std::size_t i = 0; i < out.frames.size(); ++i) {
    save_polar_scan(out.frames[i].scan, dir / frame_name(i));
  }
  save_ground_truth(out.ground_truth(), dir / "ground_truth.csv");
  if (!spec.moving_objects.empty()) {
    // Per-object world poses and the per-frame motion each one follows.
    std::ostringstream csv;
    csv << "object,frame,timestamp,x,y,heading,motion_dx,motion_dy,motion_theta\n";
    for (std::size_t k = 0; k < out.object_poses.size(); ++k) {
      const RigidMotion2D& m = spec.moving_objects[k].motion_per_frame;
      for (std::size_t f = 0; f < out.object_poses[k].size(); ++f) {
        const Pose2D& p = out.object_poses[k][f];
        csv << k << ',' << f << ',' << format_double(out.frames[f].scan.timestamp) << ','
            << format_double(p.x) << ',' << format_double(p.y) << ','
            << format_double(p.heading) << ',' << format_double(m.dx) << ','
            << format_double(m.dy) << ',' << format_double(m.theta) << '\n';
      }
    }
    write_text(csv.str(), (dir / "object_motions.csv").string());
  }
}

struct EvalArgs {
  std::string trajectory;
  std::string truth;
  std::string output;
  bool table = false;
};

double median_spacing(const std::vector<GroundTruthRecord>& gt) {
  if (gt.size() < 2) throw InputError("ground truth needs at least two records");
  std::vector<double> d;
  for (std::size_t i = 1; i < gt.size(); ++i) d.push_back(gt[i].timestamp - gt[i - 1].timestamp);
  std::nth_element(d.begin(), d.begin() + d.size() / 2, d.end());
  return d[d.size() / 2];
}

void cmd_eval(const EvalArgs& args, ConfigFlags& flags) {
  const RunConfig cfg = flags.load();
  const Trajectory traj = import_trajectory(args.trajectory);
  const auto truth = load_ground_truth(args.truth);
  const double period = cfg.scan_period > 0.0 ? cfg.scan_period : median_spacing(truth);
  const EvaluationReport report = evaluate_trajectory(traj, truth, period, cfg.eval);
  write_text(args.table ? report_table(report) : report_json(report), args.output);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FS2D spectral registration of 2D radar scans"};
  app.require_subcommand(1);
  ConfigFlags flags;

  PairArgs reg_args;
  CLI::App* reg = app.add_subcommand("register", "register two scans");
  reg->add_option("scan_a", reg_args.scan_a, "first scan")->required();
  reg->add_option("scan_b", reg_args.scan_b, "second scan")->required();
  reg->add_option("-o,--output", reg_args.output, "result JSON (default stdout)");
  reg->add_option("--dump-surface", reg_args.surface, "write the translation surface as text");
  flags.attach(*reg);

  PairArgs peak_args;
  ConfigFlags peak_flags;
  CLI::App* peaks = app.add_subcommand("peaks", "ranked motion hypotheses for a scan pair");
  peaks->add_option("scan_a", peak_args.scan_a, "first scan")->required();
  peaks->add_option("scan_b", peak_args.scan_b, "second scan")->required();
  peaks->add_option("-o,--output", peak_args.output, "hypotheses JSON (default stdout)");
  peaks->add_option("--dump-surface", peak_args.surface, "write the translation surface as text");
  peak_flags.attach(*peaks);

  OdometryArgs odo_args;
  ConfigFlags odo_flags;
  CLI::App* odo = app.add_subcommand("odometry", "chain registrations over a scan directory");
  odo->add_option("scan_dir", odo_args.scan_dir, "directory of .fs2dscan files")->required();
  odo->add_option("-o,--output", odo_args.output, "trajectory file");
  odo->add_option("--summary", odo_args.summary, "summary JSON (default next to the output)");
  odo->add_option("--format", odo_args.format, "csv or geojson")
      ->check(CLI::IsMember({"csv", "geojson"}));
  odo->add_flag("--sliding", odo_args.sliding, "register every (i, i + stride) pair");
  odo_flags.attach(*odo);

  SynthArgs syn_args;
  ConfigFlags syn_flags;
  CLI::App* syn = app.add_subcommand("synth", "render a synthetic scene");
  syn->add_option("spec", syn_args.spec, "scene description")->required();
  syn->add_option("-n,--frames", syn_args.frames, "frame count");
  syn->add_option("-d,--out-dir", syn_args.out_dir, "output directory");
  syn_flags.attach(*syn);

  EvalArgs ev_args;
  ConfigFlags ev_flags;
  CLI::App* ev = app.add_subcommand("eval", "compare a trajectory with ground truth");
  ev->add_option("trajectory", ev_args.trajectory, "trajectory CSV")->required();
  ev->add_option("truth", ev_args.truth, "ground truth CSV")->required();
  ev->add_option("-o,--output", ev_args.output, "report file (default stdout)");
  ev->add_flag("--table", ev_args.table, "human-readable table instead of JSON");
  ev_flags.attach(*ev);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*reg) cmd_register(reg_args, flags);
    if (*peaks) cmd_peaks(peak_args, peak_flags);
    if (*odo) cmd_odometry(odo_args, odo_flags);
    if (*syn) cmd_synth(syn_args, syn_flags);
    if (*ev) cmd_eval(ev_args, ev_flags);
  } catch (const InputError& e) {
    std::cerr << "fs2d: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "fs2d: " << e.what() << "\n";
    return kExitProcessing;
  }
  return 0;
}
