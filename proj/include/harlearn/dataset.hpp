#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "harlearn/activity.hpp"
#include "harlearn/errors.hpp"
#include "harlearn/feature_matrix.hpp"
#include "harlearn/rng.hpp"

namespace harlearn {

/// One subject/position stream of 6-channel inertial samples at 50 Hz with a
/// per-sample activity label. Channels are stored column-wise.
struct RawRecording {
  std::string subject_id;
  BodyPosition position = BodyPosition::arm;
  double sample_rate_hz = 50.0;
  std::array<std::vector<double>, 6> channels;  // acc x,y,z then gyro x,y,z
  std::vector<ActivityClass> labels;

  std::size_t length() const { return labels.size(); }
};

struct DatasetManifest {
  std::vector<std::string> included_subjects;
  std::vector<std::pair<std::string, std::string>> excluded_subjects;  // id, reason
  std::vector<BodyPosition> positions;

  bool is_included(const std::string& id) const {
    return std::find(included_subjects.begin(), included_subjects.end(), id) !=
           included_subjects.end();
  }
};

/// Manifest file format: one `key = value` per line, `#` comments.
/// `positions = arm,waist,wrist`; any other key is a subject id with value
/// `include` or `exclude: <reason>`.
inline DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest: " + path.string());
  DatasetManifest m;
  std::string line;
  std::size_t lineno = 0;
  auto trim = [](std::string s) {
    const char* ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw MalformedRow(path.string() + ":" + std::to_string(lineno) +
                         ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key == "positions") {
      std::stringstream ss(value);
      std::string tok;
      while (std::getline(ss, tok, ',')) {
        auto p = position_from_string(trim(tok));
        if (!p)
          throw MalformedRow(path.string() + ":" + std::to_string(lineno) +
                             ": unknown position '" + tok + "'");
        m.positions.push_back(*p);
      }
    } else if (value == "include") {
      m.included_subjects.push_back(key);
    } else if (value.rfind("exclude", 0) == 0) {
      std::string reason;
      if (auto colon = value.find(':'); colon != std::string::npos)
        reason = trim(value.substr(colon + 1));
      m.excluded_subjects.emplace_back(key, reason);
    } else {
      throw MalformedRow(path.string() + ":" + std::to_string(lineno) +
                         ": value must be include or exclude: <reason>");
    }
  }
  for (const auto& [id, reason] : m.excluded_subjects) {
    (void)reason;
    if (m.is_included(id))
      throw MalformedRow("manifest lists '" + id + "' as both included and excluded");
  }
  if (m.positions.empty())
    m.positions.assign(kAllPositions.begin(), kAllPositions.end());
  return m;
}

namespace detail {

inline bool parse_double(std::string_view tok, double& out) {
  const char* b = tok.data();
  const char* e = tok.data() + tok.size();
  auto res = std::from_chars(b, e, out);
  return res.ec == std::errc() && res.ptr == e;
}

inline bool parse_i64(std::string_view tok, std::int64_t& out) {
  const char* b = tok.data();
  const char* e = tok.data() + tok.size();
  auto res = std::from_chars(b, e, out);
  return res.ec == std::errc() && res.ptr == e;
}

inline void split_csv_line(const std::string& line, std::vector<std::string_view>& out) {
  out.clear();
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.emplace_back(line.data() + start, line.size() - start);
      break;
    }
    out.emplace_back(line.data() + start, comma - start);
    start = comma + 1;
  }
  // strip trailing \r
  if (!out.empty() && !out.back().empty() && out.back().back() == '\r')
    out.back().remove_suffix(1);
}

}  // namespace detail

/// Reads one `<subject>_<position>.csv` file. Schema:
/// timestamp_ms,acc_x,acc_y,acc_z,gyro_x,gyro_y,gyro_z,activity
inline RawRecording load_recording(const std::filesystem::path& file,
                                   std::string subject_id, BodyPosition position) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open recording: " + file.string());
  RawRecording rec;
  rec.subject_id = std::move(subject_id);
  rec.position = position;

  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line))
    throw MalformedRow(file.string() + ": empty file");
  ++lineno;

  std::vector<std::string_view> tok;
  detail::split_csv_line(line, tok);
  static constexpr const char* kHeader[8] = {"timestamp_ms", "acc_x",  "acc_y",
                                             "acc_z",        "gyro_x", "gyro_y",
                                             "gyro_z",       "activity"};
  if (tok.size() != 8)
    throw MalformedRow(file.string() + ":1: expected 8 header columns");
  for (int i = 0; i < 8; ++i) {
    if (tok[i] != kHeader[i])
      throw MalformedRow(file.string() + ":1: unexpected header column '" +
                         std::string(tok[i]) + "'");
  }

  std::vector<std::int64_t> timestamps;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    detail::split_csv_line(line, tok);
    if (tok.size() != 8)
      throw MalformedRow(file.string() + ":" + std::to_string(lineno) +
                         ": expected 8 columns, got " + std::to_string(tok.size()));
    std::int64_t ts = 0;
    if (!detail::parse_i64(tok[0], ts))
      throw MalformedRow(file.string() + ":" + std::to_string(lineno) +
                         ": bad timestamp '" + std::string(tok[0]) + "'");
    double v[6];
    for (int c = 0; c < 6; ++c) {
      if (!detail::parse_double(tok[c + 1], v[c]))
        throw MalformedRow(file.string() + ":" + std::to_string(lineno) +
                           ": bad number '" + std::string(tok[c + 1]) + "'");
    }
    const auto act = activity_from_string(tok[7]);
    if (!act)
      throw UnknownActivity(file.string() + ":" + std::to_string(lineno) +
                            ": unknown activity '" + std::string(tok[7]) + "'");
    timestamps.push_back(ts);
    for (int c = 0; c < 6; ++c) rec.channels[c].push_back(v[c]);
    rec.labels.push_back(*act);
  }

  // Sample rate comes from the timestamp column; windowing constants assume 50 Hz.
  if (timestamps.size() >= 2) {
    std::vector<std::int64_t> deltas;
    deltas.reserve(timestamps.size() - 1);
    for (std::size_t i = 1; i < timestamps.size(); ++i)
      deltas.push_back(timestamps[i] - timestamps[i - 1]);
    std::nth_element(deltas.begin(), deltas.begin() + deltas.size() / 2, deltas.end());
    const double median_ms = static_cast<double>(deltas[deltas.size() / 2]);
    if (!(median_ms > 0.0) || std::llround(1000.0 / median_ms) != 50)
      throw BadSampleRate(file.string() + ": sample rate is not 50 Hz (median step " +
                          std::to_string(median_ms) + " ms)");
  }
  rec.sample_rate_hz = 50.0;
  return rec;
}

/// Loads one RawRecording per (included subject, manifest position).
/// Excluded subjects are never read even when their files exist.
inline std::vector<RawRecording> load_dataset(const std::filesystem::path& dir,
                                              const DatasetManifest& manifest) {
  if (!std::filesystem::exists(dir)) throw IoError("dataset path does not exist: " + dir.string());
  std::vector<RawRecording> out;
  for (const auto& subject : manifest.included_subjects) {
    for (BodyPosition pos : manifest.positions) {
      std::filesystem::path file =
          dir / (subject + "_" + std::string(to_string(pos)) + ".csv");
      if (!std::filesystem::exists(file))
        throw MissingSubject("manifest includes '" + subject + "' but " +
                             file.string() + " is missing");
      out.push_back(load_recording(file, subject, pos));
    }
  }
  return out;
}

/// Per-subject three-part class-balanced split. Parts hold feature rows.
struct SubjectSplit {
  std::string subject_id;
  std::array<FeatureMatrix, 3> parts;
};

/// Splits each class's window sequence into three contiguous temporal runs of
/// near-equal length (±1). The seed only rotates which parts take the
/// remainder windows.
inline SubjectSplit split_three_parts(const FeatureMatrix& windows,
                                      std::uint64_t seed) {
  if (!windows.has_labels()) throw Error("split requires labeled windows");
  SubjectSplit split;
  if (windows.rows() > 0) split.subject_id = windows.provenance(0).subject;
  for (auto& p : split.parts) p = FeatureMatrix(windows.cols());

  std::map<ActivityClass, std::vector<std::uint32_t>> by_class;
  for (std::size_t i = 0; i < windows.rows(); ++i)
    by_class[windows.label(i)].push_back(static_cast<std::uint32_t>(i));

  // part assignment per row index, filled class by class
  std::vector<std::uint8_t> part_of(windows.rows(), 0);
  for (const auto& [cls, idx] : by_class) {
    const std::size_t n = idx.size();
    if (n < 3)
      throw InsufficientClassData("class " + std::string(to_string(cls)) +
                                  " has only " + std::to_string(n) + " windows");
    const std::size_t base = n / 3;
    const std::size_t rem = n % 3;
    Rng rng(derive_seed(seed, {hash_string(to_string(cls)), n}));
    const std::size_t rot = rng.below(3);
    std::array<std::size_t, 3> sizes{base, base, base};
    for (std::size_t r = 0; r < rem; ++r) sizes[(rot + r) % 3] += 1;
    std::size_t cursor = 0;
    for (std::size_t p = 0; p < 3; ++p)
      for (std::size_t k = 0; k < sizes[p]; ++k) part_of[idx[cursor++]] = static_cast<std::uint8_t>(p);
  }

  for (std::size_t i = 0; i < windows.rows(); ++i) {
    RowProvenance prov = windows.provenance(i);
    prov.part = part_of[i];
    split.parts[part_of[i]].append_row(windows.row(i), windows.label(i), std::move(prov));
  }
  return split;
}

/// (chunk_1, chunk_2, test_set) = (part 1, part 2, part 3).
inline std::tuple<const FeatureMatrix*, const FeatureMatrix*, const FeatureMatrix*>
chunks_for_personalization(const SubjectSplit& split) {
  return {&split.parts[0], &split.parts[1], &split.parts[2]};
}

}  // namespace harlearn
