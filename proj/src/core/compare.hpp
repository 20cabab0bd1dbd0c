#pragma once

#include "io.hpp"
#include "metrics.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace mrsim {

struct CompareSample
{
  Scheme scheme = Scheme::Cartesian;
  int image_index = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  SeverityStats severity;
  int label = 0; // 1 motion
  double nrmse = 0.0;
  ProbeFeatures features{};
};

// Reads the manifests and the corrupted image of every entry.
std::vector<CompareSample> load_compare_samples(std::vector<fs::path> const &manifests);
std::vector<CompareSample> samples_from(DatasetManifest const &manifest, std::vector<ProbeFeatures> const &features);

// Throws InvalidArgument with an explanation unless there are >= 2 schemes
// and every scheme holds the same (image, trial, seed, severity, label) set.
void check_pairing(std::vector<CompareSample> const &samples);

struct CompareOptions
{
  int repetitions = 5;
  double test_fraction = 0.3;
  std::uint64_t seed = 0;
  ProbeTraining training{};
};

struct SchemeSummary
{
  Scheme scheme = Scheme::Cartesian;
  int n_motion = 0;
  int n_clean = 0;
  double nrmse_mean = 0.0; // over motion records
  double nrmse_std = 0.0;
  std::vector<double> auc; // one per repetition
  double auc_mean = 0.0;
  double auc_std = 0.0;
};

// Paired NRMSE difference a - b over matched motion records.
struct PairedGap
{
  Scheme a = Scheme::Cartesian;
  Scheme b = Scheme::Cartesian;
  int n = 0;
  double mean = 0.0;
  double std_error = 0.0;
};

struct CompareReport
{
  std::vector<SchemeSummary> schemes; // cartesian, radial, spiral order
  std::vector<PairedGap> gaps;        // adjacent schemes in that order
  bool degenerate = false;            // no distortion anywhere
  bool distortion_ordered = false;    // strictly decreasing means, each gap >= 1 standard error
  bool auc_ordered = false;           // non-increasing mean AUC
  std::string distortion_verdict;
  std::string auc_verdict;
};

CompareReport compare_schemes(std::vector<CompareSample> const &samples, CompareOptions const &options = {});

std::string format_report(CompareReport const &report);
void write_compare_csv(CompareReport const &report, fs::path const &path);

} // namespace mrsim
