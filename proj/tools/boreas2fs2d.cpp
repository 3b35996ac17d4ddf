// boreas2fs2d: converts one Boreas sequence (radar PNGs plus the applanix
// radar pose file) into native scans and a ground-truth CSV.
//
// Radar PNG rows: bytes 0..7 timestamp (int64 us), 8..9 encoder azimuth
// (u16, 5600 counts per turn), 10 valid flag, 11.. range bins (u8).
// Assumptions, not verified against the dataset tools: the encoder turns
// clockwise seen from above (mirrored here to counter-clockwise), the pose
// file's heading column is a yaw in the east-north plane, and range bin i
// sits at i * range_resolution.

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "fs2d/dataset.hpp"
#include "fs2d/errors.hpp"

namespace fs = std::filesystem;
using namespace fs2d;

namespace {

constexpr int kMetaBytes = 11;
constexpr double kEncoderCounts = 5600.0;

struct Options {
  fs::path sequence;
  fs::path out_dir;
  double range_resolution = 0.0596;
  double max_range = 100.0;
  bool clockwise = true;
};

std::vector<std::uint8_t> read_gray_png(const fs::path& path, int& width, int& height) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw InputError(path.string() + ": " + image.message);
  }
  image.format = PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> pixels(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, pixels.data(), 0, nullptr)) {
    throw InputError(path.string() + ": " + image.message);
  }
  width = static_cast<int>(image.width);
  height = static_cast<int>(image.height);
  return pixels;
}

PolarScan convert_scan(const fs::path& path, const Options& opt) {
  int width = 0;
  int height = 0;
  const auto px = read_gray_png(path, width, height);
  if (width <= kMetaBytes) throw InputError(path.string() + ": image too narrow");
  const int bins = std::min(width - kMetaBytes,
                            static_cast<int>(opt.max_range / opt.range_resolution) + 1);

  // Sort rows by azimuth; the sweep may start anywhere and repeat a count.
  std::map<double, int> rows;
  for (int r = 0; r < height; ++r) {
    const std::uint8_t* row = px.data() + static_cast<std::size_t>(r) * width;
    if (row[10] == 0) continue;
    const std::uint16_t enc = static_cast<std::uint16_t>(row[8] | (row[9] << 8));
    double az = 2.0 * std::numbers::pi * enc / kEncoderCounts;
    if (opt.clockwise) az = std::fmod(2.0 * std::numbers::pi - az, 2.0 * std::numbers::pi);
    rows.emplace(az, r);
  }
  if (rows.size() < 2) throw InputError(path.string() + ": fewer than two valid azimuths");

  PolarScan scan;
  scan.range_resolution = opt.range_resolution;
  scan.timestamp = std::stod(path.stem().string()) * 1e-6;
  scan.intensities = Matrix<float>(rows.size(), static_cast<std::size_t>(bins));
  std::size_t i = 0;
  for (const auto& [az, r] : rows) {
    scan.azimuths.push_back(az);
    const std::uint8_t* row = px.data() + static_cast<std::size_t>(r) * width + kMetaBytes;
    for (int b = 0; b < bins; ++b) scan.intensities(i, b) = row[b] / 255.0f;
    ++i;
  }
  scan.validate();
  return scan;
}

// GPSTime (us), easting, northing, ..., heading in column 9.
std::vector<GroundTruthRecord> convert_poses(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::vector<GroundTruthRecord> out;
  std::string line;
  std::getline(in, line);  // header
  double e0 = 0.0;
  double n0 = 0.0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> v;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
    if (v.size() < 10) throw InputError(path.string() + ": short line: " + line);
    if (out.empty()) {
      e0 = v[1];
      n0 = v[2];
    }
    const double t = v[0] * 1e-6;
    out.push_back({t, {v[1] - e0, v[2] - n0, normalize_angle(v[9]), t}});
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convert a Boreas sequence to fs2d scans and ground truth"};
  Options opt;
  app.add_option("sequence", opt.sequence, "sequence directory (radar/, applanix/)")->required();
  app.add_option("out_dir", opt.out_dir, "output directory")->required();
  app.add_option("--range-resolution", opt.range_resolution, "meters per range bin");
  app.add_option("--max-range", opt.max_range, "crop range bins beyond this distance (m)");
  app.add_flag("!--counter-clockwise", opt.clockwise, "keep encoder azimuths as they are");
  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    std::vector<fs::path> pngs;
    const fs::path radar = opt.sequence / "radar";
    if (!fs::is_directory(radar)) throw InputError("missing directory " + radar.string());
    for (const auto& entry : fs::directory_iterator(radar)) {
      if (entry.path().extension() == ".png") pngs.push_back(entry.path());
    }
    std::sort(pngs.begin(), pngs.end());
    fs::create_directories(opt.out_dir);
    for (const auto& p : pngs) {
      save_polar_scan(convert_scan(p, opt), opt.out_dir / (p.stem().string() + ".fs2dscan"));
    }
    const fs::path poses = opt.sequence / "applanix" / "radar_poses.csv";
    if (fs::exists(poses)) {
      save_ground_truth(convert_poses(poses), opt.out_dir / "ground_truth.csv");
    } else {
      std::cerr << "boreas2fs2d: no " << poses << ", ground truth skipped\n";
    }
    std::cerr << "boreas2fs2d: wrote " << pngs.size() << " scans\n";
  } catch (const InputError& e) {
    std::cerr << "boreas2fs2d: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "boreas2fs2d: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
