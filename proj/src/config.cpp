#include "fs2d/config.hpp"

#include <fstream>

#include "fs2d/errors.hpp"
#include "text_util.hpp"

namespace fs2d {
namespace {

template <typename T>
T number(const std::string& key, const std::string& value) {
  T out;
  if (!detail::parse_number(value, out)) {
    throw InputError("config: field " + key + ": bad value \"" + value + "\"");
  }
  return out;
}

bool boolean(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "on") return true;
  if (value == "false" || value == "0" || value == "off") return false;
  throw InputError("config: field " + key + ": expected true or false, got \"" + value + "\"");
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
  RegistrationConfig& reg = odometry.registration;
  if (key == "grid_size") {
    reg.grid.grid_size = number<int>(key, value);
  } else if (key == "cell_size") {
    reg.grid.cell_size = number<double>(key, value);
  } else if (key == "noise_floor") {
    reg.grid.noise_floor = number<double>(key, value);
  } else if (key == "window") {
    if (value == "hann") {
      reg.grid.window = Window::kHann;
    } else if (value == "none") {
      reg.grid.window = Window::kNone;
    } else {
      throw InputError("config: field window: expected hann or none");
    }
  } else if (key == "log_scale") {
    reg.grid.log_scale = boolean(key, value);
  } else if (key == "despeckle") {
    reg.grid.despeckle = boolean(key, value);
  } else if (key == "blind_radius") {
    reg.grid.blind_radius = number<double>(key, value);
  } else if (key == "bandwidth") {
    reg.rotation.bandwidth = number<int>(key, value);
  } else if (key == "log_magnitude") {
    reg.rotation.log_magnitude = boolean(key, value);
  } else if (key == "rotation_alternatives") {
    reg.rotation.alternatives = number<int>(key, value);
  } else if (key == "rotation_oversample") {
    reg.rotation.oversample = number<int>(key, value);
  } else if (key == "stride") {
    odometry.stride = number<int>(key, value);
  } else if (key == "tau") {
    reg.outlier_threshold = number<double>(key, value);
  } else if (key == "nms_k") {
    reg.nms_k = number<int>(key, value);
  } else if (key == "nms_radius") {
    reg.nms_radius = number<int>(key, value);
  } else if (key == "rel_threshold") {
    reg.rel_threshold = number<double>(key, value);
  } else if (key == "subcell") {
    reg.subcell_refine = boolean(key, value);
  } else if (key == "jobs") {
    odometry.jobs = number<int>(key, value);
  } else if (key == "seed") {
    seed = number<std::uint64_t>(key, value);
  } else if (key == "input_dir") {
    input_dir = value;
  } else if (key == "output_dir") {
    output_dir = value;
  } else if (key == "pair_mode") {
    if (value == "stride") {
      odometry.pair_mode = PairMode::kEveryStride;
    } else if (value == "sliding") {
      odometry.pair_mode = PairMode::kSliding;
    } else {
      throw InputError("config: field pair_mode: expected stride or sliding");
    }
  } else if (key == "outlier_policy") {
    if (value == "keep") {
      odometry.outlier_policy = OutlierPolicy::kKeep;
    } else if (value == "hold") {
      odometry.outlier_policy = OutlierPolicy::kHoldPreviousMotion;
    } else {
      throw InputError("config: field outlier_policy: expected keep or hold");
    }
  } else if (key == "outlier_rule") {
    if (value == "confidence") {
      eval.outlier_rule = OutlierRule::kConfidenceFlag;
    } else if (value == "error_threshold") {
      eval.outlier_rule = OutlierRule::kErrorThreshold;
    } else {
      throw InputError("config: field outlier_rule: expected confidence or error_threshold");
    }
  } else if (key == "error_threshold_deg") {
    eval.error_threshold_deg = number<double>(key, value);
  } else if (key == "exclude_outliers") {
    eval.exclude_outliers = boolean(key, value);
  } else if (key == "scan_period") {
    scan_period = number<double>(key, value);
  } else {
    throw InputError("config: unknown field " + key);
  }
  sync_eval();
}

void RunConfig::sync_eval() {
  eval.stride = odometry.stride;
  eval.cell_size = odometry.registration.grid.cell_size;
  eval.tau = odometry.registration.outlier_threshold;
}

void RunConfig::validate() const {
  odometry.registration.validate();
  if (odometry.stride < 1) throw InputError("config: field stride: must be >= 1");
  if (odometry.jobs < 1) throw InputError("config: field jobs: must be >= 1");
  if (!(scan_period >= 0.0)) throw InputError("config: field scan_period: must be >= 0");
  if (!(eval.error_threshold_deg > 0.0)) {
    throw InputError("config: field error_threshold_deg: must be positive");
  }
}

RunConfig parse_run_config(std::istream& in) {
  RunConfig cfg;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string text = detail::trim(raw.substr(0, raw.find('#')));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw InputError("config line " + std::to_string(line) + ": expected key = value");
    }
    cfg.set(detail::trim(text.substr(0, eq)), detail::trim(text.substr(eq + 1)));
  }
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  return parse_run_config(in);
}

}  // namespace fs2d
