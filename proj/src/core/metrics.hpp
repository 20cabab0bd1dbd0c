#pragma once

#include "image.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace mrsim {

struct ErrorMap
{
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> values;

  bool operator==(ErrorMap const &) const = default;
};

struct MetricsReport
{
  double rmse = 0.0;
  double nrmse = 0.0;
  double highfreq_energy_ratio = 0.0;
  double artifact_score = 0.0;

  bool operator==(MetricsReport const &) const = default;
};

inline constexpr int kProbeBands = 8;
inline constexpr double kDefaultHighfreqCutoff = 0.25;

using ProbeFeatures = std::array<double, kProbeBands>;

// |clean - corrupted| scaled so the largest difference maps to 255, rounded
// half-up. All zero when the images are equal.
ErrorMap abs_error_map(ImageSlice const &clean, ImageSlice const &corrupted);

double rmse(ImageSlice const &clean, ImageSlice const &corrupted);
// rmse / rms(clean). Throws Numeric for an all-zero clean image.
double nrmse(ImageSlice const &clean, ImageSlice const &corrupted);

// Fraction of |DFT|^2 at |k| > cutoff (cycles/pixel). Throws Numeric for an
// all-zero image.
double highfreq_energy_ratio(ImageSlice const &image, double cutoff = kDefaultHighfreqCutoff);

// Energy fractions in 8 bands of width 1/16 over |k| in [0, 0.5]; corner
// energy beyond 0.5 counts toward the last band. Throws Numeric for an
// all-zero image.
ProbeFeatures probe_features(ImageSlice const &image);

// Total variation distance between the band energy distributions of the two
// images, in [0, 1].
double artifact_score(ProbeFeatures const &clean, ProbeFeatures const &corrupted);

MetricsReport compute_metrics(ImageSlice const &clean, ImageSlice const &corrupted);

struct LabeledFeatures
{
  ProbeFeatures features{};
  int label = 0; // 1 motion, 0 clean
};

struct ProbeTraining
{
  int epochs = 2000;
  double learning_rate = 0.5;
  double l2 = 1e-4;
};

// Logistic regression on raw band features: score = w . f + bias.
struct ProbeModel
{
  std::array<double, kProbeBands + 1> weights{}; // bias last
  int epochs = 0;
  double learning_rate = 0.0;
  std::uint64_t seed = 0;

  double score(ProbeFeatures const &f) const;
  double probability(ProbeFeatures const &f) const;
};

// Full-batch gradient descent on standardised features; the standardisation
// is folded back into the returned weights. Throws InvalidArgument unless
// both labels are present.
ProbeModel train_probe(std::span<LabeledFeatures const> data, std::uint64_t seed, ProbeTraining const &options = {});

double evaluate_auc(ProbeModel const &model, std::span<LabeledFeatures const> test);

// Mann-Whitney rank statistic with midranks for ties.
double auc_rank(std::span<double const> scores, std::span<int const> labels);
// O(P N) pair counting, ties 1/2.
double auc_pairs(std::span<double const> scores, std::span<int const> labels);

} // namespace mrsim
