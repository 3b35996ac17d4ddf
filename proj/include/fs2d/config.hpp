#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "fs2d/eval.hpp"
#include "fs2d/odometry.hpp"

namespace fs2d {

/// Everything a batch run needs. Loaded from a key = value file; command-line
/// flags override individual keys.
struct RunConfig {
  OdometryConfig odometry;  // holds the registration and grid settings
  EvalConfig eval;
  std::filesystem::path input_dir;
  std::filesystem::path output_dir;
  std::uint64_t seed = 0;
  double scan_period = 0.0;  // 0: inferred from ground truth spacing

  RegistrationConfig& registration() { return odometry.registration; }
  const RegistrationConfig& registration() const { return odometry.registration; }

  /// Applies one key. Throws InputError for unknown keys or bad values.
  void set(const std::string& key, const std::string& value);
  void validate() const;
  /// Copies the shared fields (stride, cell size, tau) into the eval echo.
  void sync_eval();
};

RunConfig parse_run_config(std::istream& in);
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace fs2d
