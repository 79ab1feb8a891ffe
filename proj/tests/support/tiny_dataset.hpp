#pragma once

// Writes small hand-built datasets for io and cli tests.

#include <filesystem>
#include <string>
#include <vector>

#include "attnspread/io/blob.hpp"
#include "attnspread/io/dataset.hpp"

namespace testing_support {

namespace fs = std::filesystem;
using namespace attnspread;

inline fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("attnspread_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

/// Blob with `layers` maps of side x side; layer l has a single hot cell at
/// (row, col) with weight l + 1 and a second cell one column right with half
/// that weight.
inline io::TensorBlob two_cell_blob(int layers, int side, int row, int col) {
  io::TensorBlob b;
  b.dims = {static_cast<std::uint32_t>(layers), static_cast<std::uint32_t>(side),
            static_cast<std::uint32_t>(side)};
  b.values.assign(static_cast<std::size_t>(layers) * side * side, 0.0f);
  for (int l = 0; l < layers; ++l) {
    const std::size_t base = static_cast<std::size_t>(l) * side * side;
    b.values[base + static_cast<std::size_t>(row) * side + col] = static_cast<float>(l + 1);
    b.values[base + static_cast<std::size_t>(row) * side + col + 1] = static_cast<float>(l + 1) / 2;
  }
  return b;
}

/// Two frames on a 16-cell grid of 1 m; each frame has one car detection
/// overlapping its ground truth, and frame 1 also has a low-score pedestrian.
/// Frames are written in reverse timestamp order.
inline fs::path write_tiny_dataset(const fs::path& dir, int layers = 3) {
  io::DatasetMeta meta;
  meta.grid = {16, -8.0, -8.0, 1.0};
  meta.layer_count = layers;
  meta.queries_per_frame = 10;
  meta.class_list = {"car", "pedestrian"};
  fs::create_directories(dir / "blobs");

  std::vector<io::FrameEntry> frames;
  for (int f = 1; f >= 0; --f) {
    io::FrameEntry fr;
    fr.frame_id = "frame" + std::to_string(f);
    fr.timestamp_us = 500000LL * f;
    io::DetectionEntry d;
    d.detection_id = fr.frame_id + "_car";
    d.track_id = "t0";
    d.query_index = 0;
    d.score = 0.9;
    d.cls = "car";
    d.box = {0.5 + f, 0.0, 4.0, 2.0, 0.0};
    d.attention_blob = "blobs/" + d.detection_id + ".atnb";
    io::write_blob(dir / d.attention_blob, two_cell_blob(layers, 16, 8, 8 + f));
    fr.detections.push_back(d);
    fr.ground_truth.push_back({fr.frame_id + "_gt", "t0", "car", {static_cast<double>(f), 0.0, 4.0, 2.0, 0.0}});
    if (f == 1) {
      io::DetectionEntry p;
      p.detection_id = fr.frame_id + "_ped";
      p.query_index = 3;
      p.score = 0.3;
      p.cls = "pedestrian";
      p.box = {-4.0, 4.0, 0.8, 0.8, 0.0};
      p.attention_blob = "blobs/" + p.detection_id + ".atnb";
      io::write_blob(dir / p.attention_blob, two_cell_blob(layers, 16, 12, 3));
      fr.detections.push_back(p);
    }
    frames.push_back(fr);
  }
  io::write_dataset_index(dir, meta, frames);
  return dir / io::kManifestFileName;
}

}  // namespace testing_support
