#pragma once

// On-disk dataset layout:
//
//   <dir>/meta.json        single JSON object, DatasetMeta
//   <dir>/manifest.jsonl   one JSON object per line, one line per frame
//   <dir>/<blob paths>     one ATNB blob per detection, dims [L, S, S]
//
// Blob paths inside the manifest are relative to the manifest's directory.
// Exporters for multi-head models average the heads before writing; each
// blob holds exactly one map per (detection, layer).

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "attnspread/error.hpp"
#include "attnspread/geometry.hpp"
#include "attnspread/grid.hpp"
#include "attnspread/io/blob.hpp"
#include "attnspread/spread.hpp"

namespace attnspread::io {

namespace fs = std::filesystem;
using nlohmann::json;

inline constexpr const char* kMetaFileName = "meta.json";
inline constexpr const char* kManifestFileName = "manifest.jsonl";

struct DatasetMeta {
  GridSpec grid = default_grid();
  int layer_count = 6;
  int queries_per_frame = 100;
  double frame_period_s = 0.5;
  std::vector<std::string> class_list{"car"};
};

struct DetectionEntry {
  std::string detection_id;
  std::optional<std::string> track_id;
  int query_index = 0;
  double score = 0.0;
  std::string cls;
  BevBox box;
  std::string attention_blob;
};

struct GroundTruthEntry {
  std::string gt_id;
  std::optional<std::string> track_id;
  std::string cls;
  BevBox box;
};

struct FrameEntry {
  std::string frame_id;
  std::int64_t timestamp_us = 0;
  std::vector<DetectionEntry> detections;
  std::vector<GroundTruthEntry> ground_truth;
};

/// A frame with its attention maps loaded: maps[d][l] is detection d, layer l.
struct Frame {
  FrameEntry entry;
  std::vector<std::vector<AttentionMap>> maps;
};

// ---------------------------------------------------------------------------
// JSON conversion

inline json box_to_json(const BevBox& b) {
  return {{"cx", b.cx}, {"cy", b.cy}, {"length", b.length}, {"width", b.width}, {"yaw", b.yaw}};
}

inline json meta_to_json(const DatasetMeta& m) {
  return {{"format", "attnspread-dataset"},
          {"version", 1},
          {"grid",
           {{"size_cells", m.grid.size_cells},
            {"min_x", m.grid.min_x},
            {"min_y", m.grid.min_y},
            {"cell_size", m.grid.cell_size}}},
          {"layer_count", m.layer_count},
          {"queries_per_frame", m.queries_per_frame},
          {"frame_period_s", m.frame_period_s},
          {"class_list", m.class_list}};
}

inline json frame_to_json(const FrameEntry& f) {
  json dets = json::array();
  for (const auto& d : f.detections) {
    json j = {{"detection_id", d.detection_id}};
    if (d.track_id) j["track_id"] = *d.track_id;
    j["query_index"] = d.query_index;
    j["score"] = d.score;
    j["class"] = d.cls;
    j["box"] = box_to_json(d.box);
    j["attention_blob"] = d.attention_blob;
    dets.push_back(std::move(j));
  }
  json gts = json::array();
  for (const auto& g : f.ground_truth) {
    json j = {{"gt_id", g.gt_id}};
    if (g.track_id) j["track_id"] = *g.track_id;
    j["class"] = g.cls;
    j["box"] = box_to_json(g.box);
    gts.push_back(std::move(j));
  }
  return {{"frame_id", f.frame_id},
          {"timestamp_us", f.timestamp_us},
          {"detections", std::move(dets)},
          {"ground_truth", std::move(gts)}};
}

namespace detail {

class JsonReader {
 public:
  JsonReader(std::string file, long long offset) : file_(std::move(file)), offset_(offset) {}

  [[noreturn]] void fail(const std::string& what) const { throw FormatError(file_, offset_, what); }

  const json& field(const json& obj, const char* key) const {
    if (!obj.is_object()) fail("expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) fail(std::string("missing field '") + key + "'");
    return *it;
  }

  std::string str(const json& obj, const char* key) const {
    const auto& v = field(obj, key);
    if (!v.is_string()) fail(std::string("field '") + key + "' must be a string");
    return v.get<std::string>();
  }

  std::optional<std::string> opt_str(const json& obj, const char* key) const {
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) fail(std::string("field '") + key + "' must be a string");
    return it->get<std::string>();
  }

  double num(const json& obj, const char* key) const {
    const auto& v = field(obj, key);
    if (!v.is_number()) fail(std::string("field '") + key + "' must be a number");
    return v.get<double>();
  }

  std::int64_t integer(const json& obj, const char* key) const {
    const auto& v = field(obj, key);
    if (!v.is_number_integer()) fail(std::string("field '") + key + "' must be an integer");
    return v.get<std::int64_t>();
  }

  BevBox box(const json& obj) const {
    const auto& b = field(obj, "box");
    BevBox out{num(b, "cx"), num(b, "cy"), num(b, "length"), num(b, "width"), num(b, "yaw")};
    if (!out.valid()) fail("invalid box (non-positive extent or non-finite field)");
    out.yaw = normalize_angle(out.yaw);
    return out;
  }

 private:
  std::string file_;
  long long offset_;
};

inline json parse_json(const std::string& text, const std::string& file, long long offset) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(file, offset, std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace detail

inline DatasetMeta parse_meta(const std::string& text, const std::string& file) {
  const json j = detail::parse_json(text, file, 0);
  const detail::JsonReader r(file, 0);
  DatasetMeta m;
  const auto& g = r.field(j, "grid");
  m.grid.size_cells = static_cast<int>(r.integer(g, "size_cells"));
  m.grid.min_x = r.num(g, "min_x");
  m.grid.min_y = r.num(g, "min_y");
  m.grid.cell_size = r.num(g, "cell_size");
  try {
    m.grid.validate();
  } catch (const ParameterError& e) {
    r.fail(e.what());
  }
  m.layer_count = static_cast<int>(r.integer(j, "layer_count"));
  m.queries_per_frame = static_cast<int>(r.integer(j, "queries_per_frame"));
  m.frame_period_s = r.num(j, "frame_period_s");
  if (m.layer_count < 1) r.fail("layer_count must be >= 1");
  if (m.queries_per_frame < 1) r.fail("queries_per_frame must be >= 1");
  if (!(m.frame_period_s > 0.0)) r.fail("frame_period_s must be positive");
  m.class_list.clear();
  const auto& classes = r.field(j, "class_list");
  if (!classes.is_array()) r.fail("class_list must be an array");
  for (const auto& c : classes) {
    if (!c.is_string()) r.fail("class_list entries must be strings");
    m.class_list.push_back(c.get<std::string>());
  }
  return m;
}

inline FrameEntry parse_frame(const std::string& line, const std::string& file, long long offset) {
  const json j = detail::parse_json(line, file, offset);
  const detail::JsonReader r(file, offset);
  FrameEntry f;
  f.frame_id = r.str(j, "frame_id");
  f.timestamp_us = r.integer(j, "timestamp_us");
  const auto& dets = r.field(j, "detections");
  if (!dets.is_array()) r.fail("detections must be an array");
  for (const auto& d : dets) {
    DetectionEntry e;
    e.detection_id = r.str(d, "detection_id");
    e.track_id = r.opt_str(d, "track_id");
    e.query_index = static_cast<int>(r.integer(d, "query_index"));
    e.score = r.num(d, "score");
    e.cls = r.str(d, "class");
    e.box = r.box(d);
    e.attention_blob = r.str(d, "attention_blob");
    f.detections.push_back(std::move(e));
  }
  const auto& gts = r.field(j, "ground_truth");
  if (!gts.is_array()) r.fail("ground_truth must be an array");
  for (const auto& g : gts) {
    GroundTruthEntry e;
    e.gt_id = r.str(g, "gt_id");
    e.track_id = r.opt_str(g, "track_id");
    e.cls = r.str(g, "class");
    e.box = r.box(g);
    f.ground_truth.push_back(std::move(e));
  }
  return f;
}

inline std::string read_text_file(const fs::path& path) {
  const auto bytes = read_file_bytes(path);
  return {bytes.begin(), bytes.end()};
}

/// Reads the manifest up front and loads attention blobs per frame on
/// demand.  Frames are ordered by ascending timestamp (stable for ties).
/// `load_frame` only reads files and is safe to call from several threads.
class DatasetReader {
 public:
  explicit DatasetReader(const fs::path& manifest_path)
      : manifest_path_(manifest_path), root_(manifest_path.parent_path()) {
    const fs::path meta_path = root_ / kMetaFileName;
    meta_ = parse_meta(read_text_file(meta_path), meta_path.string());

    const std::string text = read_text_file(manifest_path);
    std::size_t pos = 0;
    while (pos < text.size()) {
      std::size_t end = text.find('\n', pos);
      if (end == std::string::npos) end = text.size();
      const std::string line = text.substr(pos, end - pos);
      if (line.find_first_not_of(" \t\r") != std::string::npos) {
        FrameEntry f = parse_frame(line, manifest_path.string(), static_cast<long long>(pos));
        for (const auto& d : f.detections)
          if (d.query_index < 0 || d.query_index >= meta_.queries_per_frame)
            throw ConsistencyError(manifest_path.string() + ": detection " + d.detection_id +
                                   " has query_index outside [0, queries_per_frame)");
        frames_.push_back(std::move(f));
      }
      pos = end + 1;
    }
    std::stable_sort(frames_.begin(), frames_.end(),
                     [](const FrameEntry& a, const FrameEntry& b) {
                       return a.timestamp_us < b.timestamp_us;
                     });
  }

  const DatasetMeta& meta() const { return meta_; }
  const fs::path& root() const { return root_; }
  std::size_t frame_count() const { return frames_.size(); }
  const FrameEntry& entry(std::size_t i) const { return frames_.at(i); }
  const std::vector<FrameEntry>& entries() const { return frames_; }

  std::vector<AttentionMap> load_maps(const DetectionEntry& det) const {
    const fs::path path = root_ / det.attention_blob;
    const TensorBlob blob = read_blob(path);
    const auto side = static_cast<std::uint32_t>(meta_.grid.size_cells);
    const auto layers = static_cast<std::uint32_t>(meta_.layer_count);
    if (blob.dims.size() != 3 || blob.dims[0] != layers || blob.dims[1] != side ||
        blob.dims[2] != side) {
      std::string got;
      for (auto d : blob.dims) got += (got.empty() ? "" : ",") + std::to_string(d);
      throw ConsistencyError(path.string() + ": blob dims [" + got + "] do not match [" +
                             std::to_string(layers) + "," + std::to_string(side) + "," +
                             std::to_string(side) + "]");
    }
    const std::size_t per_layer = static_cast<std::size_t>(side) * side;
    std::vector<AttentionMap> maps;
    maps.reserve(layers);
    for (std::uint32_t l = 0; l < layers; ++l) {
      const auto first = blob.values.begin() + static_cast<std::ptrdiff_t>(l * per_layer);
      std::vector<double> w(first, first + static_cast<std::ptrdiff_t>(per_layer));
      for (double v : w)
        if (v < 0.0) throw FormatError(path.string(), -1, "negative attention weight");
      maps.emplace_back(meta_.grid, std::move(w), static_cast<int>(l), det.detection_id);
    }
    return maps;
  }

  Frame load_frame(std::size_t i) const {
    Frame f;
    f.entry = entry(i);
    for (const auto& d : f.entry.detections) f.maps.push_back(load_maps(d));
    return f;
  }

 private:
  fs::path manifest_path_;
  fs::path root_;
  DatasetMeta meta_;
  std::vector<FrameEntry> frames_;
};

struct Dataset {
  DatasetMeta meta;
  std::vector<Frame> frames;
};

/// Eagerly loads every frame with its attention maps.
inline Dataset load_dataset(const fs::path& manifest_path) {
  const DatasetReader reader(manifest_path);
  Dataset ds{reader.meta(), {}};
  for (std::size_t i = 0; i < reader.frame_count(); ++i) ds.frames.push_back(reader.load_frame(i));
  return ds;
}

/// Writes meta.json and manifest.jsonl into `dir`.  Blobs are written separately.
inline void write_dataset_index(const fs::path& dir, const DatasetMeta& meta,
                                const std::vector<FrameEntry>& frames) {
  fs::create_directories(dir);
  {
    std::ofstream out(dir / kMetaFileName, std::ios::trunc);
    if (!out) throw IoError("cannot write " + (dir / kMetaFileName).string());
    out << meta_to_json(meta).dump() << '\n';
  }
  std::ofstream out(dir / kManifestFileName, std::ios::trunc);
  if (!out) throw IoError("cannot write " + (dir / kManifestFileName).string());
  for (const auto& f : frames) out << frame_to_json(f).dump() << '\n';
  if (!out) throw IoError("write failed: " + (dir / kManifestFileName).string());
}

}  // namespace attnspread::io
