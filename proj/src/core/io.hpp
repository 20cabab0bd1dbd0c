#pragma once

#include "acquisition.hpp"
#include "image.hpp"
#include "metrics.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace mrsim {

namespace fs = std::filesystem;

// PGM (P5, 8 or 16 bit, normalised by maxval to [0, 1]) or raw float32
// little-endian with a JSON sidecar of the same stem. A PGM without a sidecar
// gets 1 mm spacing and a warning.
ImageSlice load_image(fs::path const &path, std::vector<std::string> *warnings = nullptr);

// Writes <path> as raw float32 and <path stem>.json as its sidecar.
void save_image_raw(ImageSlice const &image, fs::path const &path);

fs::path sidecar_path(fs::path const &raw_path);

struct PgmData
{
  int width = 0;
  int height = 0;
  int maxval = 0;
  std::vector<std::uint16_t> samples;
};

PgmData read_pgm(fs::path const &path);
void write_pgm(fs::path const &path, int width, int height, int maxval, std::vector<std::uint16_t> const &samples);
void write_error_map(ErrorMap const &map, fs::path const &path);
ErrorMap read_error_map(fs::path const &path);

// Bilinear resampling with edge clamping, pixel centers aligned. Spacing
// scales by the size ratio (of the width).
ImageSlice resize_bilinear(ImageSlice const &image, int width, int height);

// Brings an image to the config matrix: resizes when needed and applies
// fov_mm when set.
ImageSlice conform_to_config(ImageSlice const &image, ScannerConfig const &config);

inline constexpr char const *kMetricsCsvHeader = "id,scheme,seed,rms_disp_mm,rms_rot_deg,rmse,nrmse,hf_ratio,score";
std::string metrics_csv_row(SimulationRecord const &record);

// Directory layout: clean.raw/.json, corrupted.raw/.json, error_map.pgm,
// trajectory.csv, metrics.csv, record.json.
void write_record(SimulationRecord const &record, fs::path const &dir);
SimulationRecord read_record(fs::path const &dir);

// Recomputes error map and metrics from the stored images; returns a
// description of every mismatch (empty if consistent).
std::vector<std::string> verify_record(SimulationRecord const &record, double tolerance = 1e-9);

struct ManifestEntry
{
  std::string id;
  std::string label; // "motion" or "clean"
  std::string source;
  std::uint64_t seed = 0;
  ScannerConfig config;
  SeverityStats severity;
  MetricsReport metrics;
  std::string dir; // record directory relative to the manifest
  int image_index = 0;
  int trial = 0;
};

struct DatasetManifest
{
  std::string format_version = "1";
  std::uint64_t master_seed = 0;
  std::vector<ManifestEntry> entries;
};

void write_manifest(DatasetManifest const &manifest, fs::path const &path);
DatasetManifest read_manifest(fs::path const &path);

// Rebuilds the record an entry describes from its source image, config, seed
// and severity.
SimulationRecord regenerate(ManifestEntry const &entry, fs::path const &manifest_dir);

std::string config_summary(ScannerConfig const &config);

} // namespace mrsim
