#pragma once

// Command-line front end.  `run` is the whole program; tools/attnspread.cpp
// only forwards argv.  Exit codes: 0 success, 2 input/format error,
// 3 empty result after filtering, 4 I/O failure.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "attnspread/analysis.hpp"
#include "attnspread/error.hpp"
#include "attnspread/io/csv.hpp"
#include "attnspread/io/dataset.hpp"
#include "attnspread/io/svg.hpp"
#include "attnspread/stats.hpp"
#include "attnspread/synth.hpp"

namespace attnspread::cli {

namespace fs = std::filesystem;

enum ExitCode : int {
  kSuccess = 0,
  kInputError = 2,
  kEmptyResult = 3,
  kIoFailure = 4,
};

/// Raised when filtering leaves nothing to aggregate.
class EmptyResultError : public Error {
 public:
  using Error::Error;
};

struct RunConfig {
  std::string manifest_path;
  std::string output_dir = ".";
  int k = 100;
  double score_threshold = 0.8;
  /// Empty or "*" disables the class filter.
  std::string class_filter = "car";
  /// "last" or a 0-based layer index.
  std::string layer = "last";
  double iou_bin_width = 0.1;
  int spatial_bins = 20;
  double spatial_extent_m = 51.2;
  double frame_period_s = 0.5;
  double track_window_s = 3.5;
  double min_track_s = 7.0;
  double n_sigma = 1.0;
  std::string match_mode = "max-iou";
  int threads = 1;

  std::optional<int> layer_index() const {
    if (layer == "last") return std::nullopt;
    try {
      std::size_t used = 0;
      const int l = std::stoi(layer, &used);
      if (used == layer.size() && l >= 0) return l;
    } catch (const std::exception&) {
    }
    throw ParameterError("--layer must be 'last' or a non-negative integer, got '" + layer + "'");
  }

  std::optional<std::string> class_option() const {
    if (class_filter.empty() || class_filter == "*") return std::nullopt;
    return class_filter;
  }

  MatchMode mode() const {
    if (match_mode == "max-iou") return MatchMode::kMaxIou;
    if (match_mode == "nearest-center") return MatchMode::kNearestCenter;
    throw ParameterError("--match-mode must be 'max-iou' or 'nearest-center'");
  }

  void validate() const {
    if (k < 1) throw ParameterError("--k must be >= 1");
    if (!(iou_bin_width > 0.0) || spatial_bins < 1 || !(spatial_extent_m > 0.0) ||
        !(frame_period_s > 0.0) || !(track_window_s > 0.0) || !(min_track_s > 0.0) ||
        !(n_sigma > 0.0) || threads < 1)
      throw ParameterError("numeric options must be positive");
    (void)layer_index();
    (void)mode();
  }
};

struct SynthConfig {
  std::string output_dir;
  std::uint64_t seed = 1;
  int n_frames = 40;
  int n_tracks = 12;
  double frame_period_s = 0.5;
  int k = 100;
  double spread_scale = 8.0;
  double range_gain = 0.5;
  int grid_size = 64;
  double cell_size = 1.8;
};

namespace detail {

inline fs::path prepare_output_dir(const RunConfig& cfg) {
  const fs::path dir(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string());
  return dir;
}

struct Analyzed {
  io::DatasetReader reader;
  std::vector<FrameResult> results;
  std::vector<AnalysisRecord> records;
};

inline Analyzed analyze(const RunConfig& cfg) {
  if (cfg.manifest_path.empty()) throw ParameterError("--manifest is required");
  io::DatasetReader reader(cfg.manifest_path);
  auto results = analyze_dataset(reader, cfg.k, cfg.mode(), cfg.threads);
  std::size_t skipped = 0;
  auto records = make_records(reader, results, &skipped);
  if (skipped > 0)
    std::cerr << "warning: " << skipped << " detection(s) with degenerate attention skipped\n";
  return {std::move(reader), std::move(results), std::move(records)};
}

inline std::vector<AnalysisRecord> filtered_records(const RunConfig& cfg) {
  auto records = filter_records(analyze(cfg).records, cfg.score_threshold, cfg.class_option());
  if (records.empty()) throw EmptyResultError("no records left after score/class filtering");
  return records;
}

inline bool any_samples(const BinnedSeries& s) {
  for (const auto& b : s.bins)
    if (b.count > 0) return true;
  return false;
}

inline nlohmann::json num_or_null(const std::optional<AttentionStats>& s, double v) {
  return s ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace detail

/// One JSON line per (detection, layer).  No score or class filtering.
inline fs::path cmd_spread(const RunConfig& cfg) {
  const auto a = detail::analyze(cfg);
  std::string out;
  std::size_t lines = 0;
  for (std::size_t f = 0; f < a.results.size(); ++f) {
    const auto& entry = a.reader.entry(f);
    for (std::size_t d = 0; d < a.results[f].detections.size(); ++d) {
      const auto& det = entry.detections[d];
      const auto& layers = a.results[f].detections[d].layers;
      for (std::size_t l = 0; l < layers.size(); ++l) {
        const auto& s = layers[l];
        nlohmann::json j = {
            {"detection_id", det.detection_id},
            {"frame_id", entry.frame_id},
            {"track_id", det.track_id ? nlohmann::json(*det.track_id) : nlohmann::json(nullptr)},
            {"layer", l},
            {"mean_x", detail::num_or_null(s, s ? s->mean.x : 0.0)},
            {"mean_y", detail::num_or_null(s, s ? s->mean.y : 0.0)},
            {"cov_xx", detail::num_or_null(s, s ? s->covariance.xx : 0.0)},
            {"cov_xy", detail::num_or_null(s, s ? s->covariance.xy : 0.0)},
            {"cov_yy", detail::num_or_null(s, s ? s->covariance.yy : 0.0)},
            {"spread", detail::num_or_null(s, s ? s->spread : 0.0)},
            {"degenerate", !s.has_value()}};
        out += j.dump() + '\n';
        ++lines;
      }
    }
  }
  if (lines == 0) throw EmptyResultError("dataset contains no detections");
  const fs::path path = detail::prepare_output_dir(cfg) / "spread.jsonl";
  io::write_text_atomic(path, out);
  return path;
}

inline fs::path cmd_iou_curve(const RunConfig& cfg) {
  const auto series = iou_curve(detail::filtered_records(cfg), cfg.iou_bin_width, cfg.layer_index());
  if (!detail::any_samples(series)) throw EmptyResultError("no overlapping detections to bin");
  const fs::path path = detail::prepare_output_dir(cfg) / "iou_curve.csv";
  io::write_series_csv(series, path);
  return path;
}

inline fs::path cmd_spatial_map(const RunConfig& cfg) {
  const auto stats = spatial_map(detail::filtered_records(cfg), cfg.spatial_bins,
                                 cfg.spatial_extent_m, cfg.layer_index());
  std::size_t total = 0;
  for (auto c : stats.count) total += c;
  if (total == 0) throw EmptyResultError("no detections inside the spatial extent");
  const fs::path path = detail::prepare_output_dir(cfg) / "spatial_map.csv";
  io::write_spatial_csv(stats, path);
  return path;
}

inline fs::path cmd_layer_curve(const RunConfig& cfg) {
  const auto series = layer_curve(detail::filtered_records(cfg));
  const fs::path path = detail::prepare_output_dir(cfg) / "layer_curve.csv";
  io::write_series_csv(series, path);
  return path;
}

inline std::pair<fs::path, fs::path> cmd_track_age(const RunConfig& cfg) {
  const auto curves = track_age_curves(detail::filtered_records(cfg), cfg.frame_period_s,
                                       cfg.track_window_s, cfg.min_track_s, cfg.layer_index());
  if (!detail::any_samples(curves.init)) throw EmptyResultError("no track is long enough");
  const fs::path dir = detail::prepare_output_dir(cfg);
  const std::string init = io::render_series_csv(curves.init);
  const std::string fin = io::render_series_csv(curves.final);
  io::write_text_atomic(dir / "track_age_init.csv", init);
  io::write_text_atomic(dir / "track_age_final.csv", fin);
  return {dir / "track_age_init.csv", dir / "track_age_final.csv"};
}

inline fs::path cmd_overlay(const RunConfig& cfg, const std::string& frame_id) {
  if (cfg.manifest_path.empty()) throw ParameterError("--manifest is required");
  const io::DatasetReader reader(cfg.manifest_path);
  std::optional<std::size_t> index;
  for (std::size_t i = 0; i < reader.frame_count(); ++i)
    if (reader.entry(i).frame_id == frame_id) index = i;
  if (!index) throw ConsistencyError("frame '" + frame_id + "' not found in manifest");
  const io::Frame frame = reader.load_frame(*index);

  const std::optional<int> layer = cfg.layer_index();
  std::vector<std::optional<AttentionStats>> stats;
  for (const auto& maps : frame.maps) {
    const int l = layer.value_or(static_cast<int>(maps.size()) - 1);
    if (l >= static_cast<int>(maps.size()))
      throw ParameterError("--layer " + std::to_string(l) + " not present in dataset");
    try {
      stats.emplace_back(analyze_map(maps[static_cast<std::size_t>(l)], cfg.k));
    } catch (const DegenerateAttentionError&) {
      stats.emplace_back(std::nullopt);
    }
  }
  io::OverlayOptions opts;
  opts.n_sigma = cfg.n_sigma;
  opts.layer = layer;
  opts.k = cfg.k;
  const std::string svg = io::render_overlay_svg(frame, stats, opts);
  const fs::path path = detail::prepare_output_dir(cfg) / ("overlay_" + frame_id + ".svg");
  io::write_text_atomic(path, svg);
  return path;
}

/// Generates into a sibling staging directory and renames it into place.
inline fs::path cmd_synth(const SynthConfig& cfg) {
  if (cfg.output_dir.empty()) throw ParameterError("--output-dir is required");
  const fs::path out(cfg.output_dir);
  if (fs::exists(out) && !(fs::is_directory(out) && fs::is_empty(out)))
    throw ParameterError("output directory " + out.string() + " exists and is not empty");
  synth::SceneParams p;
  p.seed = cfg.seed;
  p.n_frames = cfg.n_frames;
  p.n_tracks = cfg.n_tracks;
  p.frame_period_s = cfg.frame_period_s;
  p.k = cfg.k;
  if (cfg.grid_size < 1 || !(cfg.cell_size > 0.0)) throw ParameterError("invalid grid");
  p.grid = {cfg.grid_size, -0.5 * cfg.grid_size * cfg.cell_size, -0.5 * cfg.grid_size * cfg.cell_size,
            cfg.cell_size};
  if (!(cfg.spread_scale > 0.0) || !(cfg.range_gain >= 0.0))
    throw ParameterError("--spread-scale must be positive and --range-gain non-negative");
  const double scale = cfg.spread_scale;
  const double gain = cfg.range_gain;
  p.relation.vs_iou = [scale](double iou) { return scale / (iou + 0.1); };
  p.relation.vs_range = [gain](double r) { return 1.0 + gain * r / 70.0; };

  const fs::path staging = out.string() + ".partial";
  std::error_code ec;
  fs::remove_all(staging, ec);
  try {
    synth::gen_scene_dataset(staging, p);
  } catch (...) {
    fs::remove_all(staging, ec);
    throw;
  }
  if (fs::exists(out)) fs::remove(out, ec);
  fs::rename(staging, out, ec);
  if (ec) {
    fs::remove_all(staging, ec);
    throw IoError("cannot move dataset into " + out.string());
  }
  return out / io::kManifestFileName;
}

namespace detail {

inline void add_run_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--manifest", cfg.manifest_path, "Dataset manifest (manifest.jsonl)")->required();
  sub->add_option("--output-dir", cfg.output_dir, "Directory for result files");
  sub->add_option("-k,--k", cfg.k, "Number of top attention weights");
  sub->add_option("--threads", cfg.threads, "Worker threads for frame analysis");
  sub->add_option("--match-mode", cfg.match_mode, "max-iou | nearest-center");
}

inline void add_filter_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--score-threshold", cfg.score_threshold, "Keep detections scoring above this");
  sub->add_option("--class-filter", cfg.class_filter, "Class to keep ('*' keeps all)");
  sub->add_option("--layer", cfg.layer, "Decoder layer: 'last' or 0-based index");
}

}  // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app("Attention spread statistics for transformer detectors", "attnspread");
  app.set_config("--config", "", "TOML/INI file with option defaults (flags take precedence)");
  app.require_subcommand(1);

  RunConfig cfg;
  SynthConfig synth_cfg;
  std::string frame_id;

  auto* spread = app.add_subcommand("spread", "Per-detection, per-layer attention statistics");
  detail::add_run_options(spread, cfg);

  auto* iou = app.add_subcommand("iou-curve", "Spread versus IoU with the closest ground truth");
  detail::add_run_options(iou, cfg);
  detail::add_filter_options(iou, cfg);
  iou->add_option("--iou-bin-width", cfg.iou_bin_width);

  auto* spatial = app.add_subcommand("spatial-map", "Mean spread over a birds-eye-view bin grid");
  detail::add_run_options(spatial, cfg);
  detail::add_filter_options(spatial, cfg);
  spatial->add_option("--spatial-bins", cfg.spatial_bins);
  spatial->add_option("--spatial-extent-m", cfg.spatial_extent_m);

  auto* layers = app.add_subcommand("layer-curve", "Spread statistics per decoder layer");
  detail::add_run_options(layers, cfg);
  layers->add_option("--score-threshold", cfg.score_threshold);
  layers->add_option("--class-filter", cfg.class_filter);

  auto* track = app.add_subcommand("track-age", "Spread over track initialization and finalization");
  detail::add_run_options(track, cfg);
  detail::add_filter_options(track, cfg);
  track->add_option("--frame-period-s", cfg.frame_period_s);
  track->add_option("--track-window-s", cfg.track_window_s);
  track->add_option("--min-track-s", cfg.min_track_s);

  auto* overlay = app.add_subcommand("overlay", "SVG of one frame with boxes and ellipses");
  detail::add_run_options(overlay, cfg);
  overlay->add_option("--layer", cfg.layer);
  overlay->add_option("--n-sigma", cfg.n_sigma);
  overlay->add_option("--frame-id", frame_id)->required();

  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset with bookkeeping");
  synth->add_option("--output-dir", synth_cfg.output_dir)->required();
  synth->add_option("--seed", synth_cfg.seed);
  synth->add_option("--n-frames", synth_cfg.n_frames);
  synth->add_option("--n-tracks", synth_cfg.n_tracks);
  synth->add_option("--frame-period-s", synth_cfg.frame_period_s);
  synth->add_option("-k,--k", synth_cfg.k);
  synth->add_option("--spread-scale", synth_cfg.spread_scale);
  synth->add_option("--range-gain", synth_cfg.range_gain);
  synth->add_option("--grid-size", synth_cfg.grid_size);
  synth->add_option("--cell-size", synth_cfg.cell_size);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kSuccess;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kInputError;
  }

  try {
    if (*synth) {
      out << "wrote " << cmd_synth(synth_cfg).string() << '\n';
      return kSuccess;
    }
    cfg.validate();
    if (*spread) out << "wrote " << cmd_spread(cfg).string() << '\n';
    if (*iou) out << "wrote " << cmd_iou_curve(cfg).string() << '\n';
    if (*spatial) out << "wrote " << cmd_spatial_map(cfg).string() << '\n';
    if (*layers) out << "wrote " << cmd_layer_curve(cfg).string() << '\n';
    if (*track) {
      const auto [init, fin] = cmd_track_age(cfg);
      out << "wrote " << init.string() << "\nwrote " << fin.string() << '\n';
    }
    if (*overlay) out << "wrote " << cmd_overlay(cfg, frame_id).string() << '\n';
    return kSuccess;
  } catch (const EmptyResultError& e) {
    err << "empty result: " << e.what() << '\n';
    return kEmptyResult;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kIoFailure;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "i/o error: " << e.what() << '\n';
    return kIoFailure;
  }
}

}  // namespace attnspread::cli
