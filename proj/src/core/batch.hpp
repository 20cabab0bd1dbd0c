#pragma once

#include "acquisition.hpp"
#include "io.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace mrsim {

struct BatchImage
{
  std::string name;   // unique stem used in record ids
  std::string source; // path recorded in the manifest; empty for in-memory images
  ImageSlice image;
};

// Per-trajectory severity targets: Normal(mean, std) clamped from below.
struct SeverityPolicy
{
  double disp_mean_mm = 1.0;
  double disp_std_mm = 0.4;
  double disp_min_mm = 0.05;
  double rot_mean_deg = 0.6;
  double rot_std_deg = 0.4;
  double rot_min_deg = 0.0;
  bool fixed = false; // use the means as exact targets
};

struct BatchOptions
{
  ScannerConfig base;           // scheme is overridden per entry of `schemes`
  std::vector<Scheme> schemes{Scheme::Cartesian};
  int trials = 1;
  int threads = 0; // 0: hardware concurrency
  std::uint64_t master_seed = 0;
  SeverityPolicy severity{};
  CorruptOptions corrupt{};
  fs::path output_dir; // empty: nothing written
  bool keep_records = true;
};

struct BatchResult
{
  DatasetManifest manifest;
  std::vector<SimulationRecord> records; // manifest order; empty unless keep_records
  std::vector<ProbeFeatures> features;   // of each corrupted image, manifest order
};

// Seed for (image, trial); independent of the scheme so that schemes see the
// same trajectories.
std::uint64_t record_seed(std::uint64_t master_seed, int image_index, int trial);
SeverityStats draw_severity(std::uint64_t seed, SeverityPolicy const &policy);

// The zero-motion twin of a motion record (equal to corrupt_slice with zero
// severity and the same seed).
SimulationRecord clean_twin(SimulationRecord const &motion);

// .pgm and .raw files of a directory, sorted by name.
std::vector<BatchImage> load_batch_inputs(fs::path const &dir, std::vector<std::string> *warnings = nullptr);

// One motion and one clean record per scheme x image x trial. Records are
// computed on a worker pool; output order and content do not depend on the
// number of threads. With an output directory, records go to
// <dir>/<scheme>/<id> and the manifest to <dir>/manifest.json.
BatchResult run_batch(std::vector<BatchImage> const &images, BatchOptions const &options);

} // namespace mrsim
