#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <sstream>

#include "fs2d/dataset.hpp"
#include "fs2d/errors.hpp"
#include "text_util.hpp"

namespace fs2d {
namespace {

constexpr char kMagic[8] = {'F', 'S', '2', 'D', 'S', 'C', 'A', 'N'};

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  std::uint8_t bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes, bytes + sizeof(T));
  }
  out.insert(out.end(), bytes, bytes + sizeof(T));
}

template <typename T>
T get_le(const std::vector<std::uint8_t>& in, std::size_t offset) {
  std::uint8_t bytes[sizeof(T)];
  std::memcpy(bytes, in.data() + offset, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes, bytes + sizeof(T));
  }
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace

std::vector<std::uint8_t> encode_polar_scan(const PolarScan& scan) {
  scan.validate();
  if (scan.azimuth_count() > 0xFFFF) {
    throw InputError("scan: azimuth_count exceeds the u16 header field");
  }
  if (scan.range_bin_count() > 0xFFFFFFFFu) {
    throw InputError("scan: range_bin_count exceeds the u32 header field");
  }
  std::vector<std::uint8_t> out;
  out.reserve(kScanHeaderBytes + scan.azimuth_count() * 8 +
              scan.intensities.size() * 4);
  out.resize(8);
  std::memcpy(out.data(), kMagic, 8);
  put_le<std::uint16_t>(out, kScanFormatVersion);
  put_le<std::uint16_t>(out, static_cast<std::uint16_t>(scan.azimuth_count()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(scan.range_bin_count()));
  put_le<double>(out, scan.range_resolution);
  put_le<double>(out, scan.timestamp);
  out.resize(kScanHeaderBytes, 0);
  for (double a : scan.azimuths) put_le<double>(out, a);
  for (float v : scan.intensities.values()) put_le<float>(out, v);
  return out;
}

PolarScan decode_polar_scan(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < kScanHeaderBytes) {
    throw ParseError("scan: truncated header, expected " +
                         std::to_string(kScanHeaderBytes) + " bytes, got " +
                         std::to_string(bytes.size()),
                     bytes.size());
  }
  if (std::memcmp(bytes.data(), kMagic, 8) != 0) {
    throw ParseError("scan: bad magic at byte 0, expected \"FS2DSCAN\"", 0);
  }
  const auto version = get_le<std::uint16_t>(bytes, 8);
  if (version != kScanFormatVersion) {
    throw ParseError("scan: unsupported format version " + std::to_string(version) +
                         " at byte 8",
                     8);
  }
  const auto azimuth_count = get_le<std::uint16_t>(bytes, 10);
  const auto range_bins = get_le<std::uint32_t>(bytes, 12);
  if (azimuth_count == 0) throw ParseError("scan: azimuth_count is 0 at byte 10", 10);
  if (range_bins == 0) throw ParseError("scan: range_bin_count is 0 at byte 12", 12);

  PolarScan scan;
  scan.range_resolution = get_le<double>(bytes, 16);
  scan.timestamp = get_le<double>(bytes, 24);
  if (!(scan.range_resolution > 0.0) || !std::isfinite(scan.range_resolution)) {
    throw ParseError("scan: range_resolution must be positive at byte 16", 16);
  }

  const std::size_t expected = kScanHeaderBytes + std::size_t{azimuth_count} * 8 +
                               std::size_t{azimuth_count} * range_bins * 4;
  if (bytes.size() != expected) {
    throw ParseError("scan: payload size mismatch, expected " +
                         std::to_string(expected) + " bytes in total, got " +
                         std::to_string(bytes.size()),
                     std::min(bytes.size(), expected));
  }

  std::size_t offset = kScanHeaderBytes;
  scan.azimuths.resize(azimuth_count);
  for (std::size_t i = 0; i < azimuth_count; ++i, offset += 8) {
    const double a = get_le<double>(bytes, offset);
    if (!(a >= 0.0 && a < 2.0 * std::numbers::pi)) {
      throw ParseError("scan: azimuth outside [0, 2pi) at byte " +
                           std::to_string(offset),
                       offset);
    }
    if (i > 0 && !(a > scan.azimuths[i - 1])) {
      throw ParseError("scan: azimuths not strictly ascending at byte " +
                           std::to_string(offset),
                       offset);
    }
    scan.azimuths[i] = a;
  }
  scan.intensities = Matrix<float>(azimuth_count, range_bins);
  for (float& v : scan.intensities.values()) {
    v = get_le<float>(bytes, offset);
    if (!(v >= 0.0f) || !std::isfinite(v)) {
      throw ParseError("scan: negative or non-finite intensity at byte " +
                           std::to_string(offset),
                       offset);
    }
    offset += 4;
  }
  return scan;
}

void save_polar_scan(const PolarScan& scan, const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = encode_polar_scan(scan);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed: " + path.string());
}

PolarScan load_polar_scan(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return decode_polar_scan(bytes);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.location());
  }
}

std::string format_double(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

std::vector<GroundTruthRecord> parse_ground_truth(std::istream& in) {
  std::vector<GroundTruthRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = detail::trim(line);
    if (line.empty() || line.front() == '#') continue;
    if (records.empty() && line.rfind("timestamp", 0) == 0) continue;
    const auto fields = detail::split(line, ',');
    if (fields.size() != 4) {
      throw ParseError("ground truth line " + std::to_string(line_no) +
                           ": expected 4 fields, got " +
                           std::to_string(fields.size()),
                       line_no);
    }
    GroundTruthRecord rec;
    double values[4];
    for (int i = 0; i < 4; ++i) {
      if (!detail::parse_number(fields[i], values[i])) {
        throw ParseError("ground truth line " + std::to_string(line_no) +
                             ": bad number \"" + fields[i] + "\"",
                         line_no);
      }
    }
    rec.timestamp = values[0];
    rec.pose = {values[1], values[2], normalize_angle(values[3]), values[0]};
    if (!records.empty() && !(rec.timestamp > records.back().timestamp)) {
      throw ParseError("ground truth line " + std::to_string(line_no) +
                           ": timestamps not strictly increasing",
                       line_no);
    }
    records.push_back(rec);
  }
  return records;
}

std::vector<GroundTruthRecord> load_ground_truth(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return parse_ground_truth(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.location());
  }
}

void save_ground_truth(const std::vector<GroundTruthRecord>& records,
                       const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << "timestamp,x,y,heading\n";
  for (const auto& r : records) {
    out << format_double(r.timestamp) << ',' << format_double(r.pose.x) << ','
        << format_double(r.pose.y) << ',' << format_double(r.pose.heading) << '\n';
  }
  if (!out) throw Error("write failed: " + path.string());
}

}  // namespace fs2d
