#include "metrics.hpp"

#include "error.hpp"
#include "recon.hpp"
#include "rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mrsim {

namespace {

void require_same_shape(ImageSlice const &a, ImageSlice const &b)
{
  if (a.width != b.width || a.height != b.height) {
    fail(ErrorCode::InvalidArgument, "image dimensions differ: " + std::to_string(a.width) + "x" +
                                       std::to_string(a.height) + " vs " + std::to_string(b.width) + "x" +
                                       std::to_string(b.height));
  }
}

template <typename Fn>
void for_each_power(ImageSlice const &image, Fn &&fn)
{
  auto const spectrum = forward_grid(image);
  for (int v = 0; v < image.height; ++v) {
    double const ky = static_cast<double>(v - image.height / 2) / image.height;
    for (int u = 0; u < image.width; ++u) {
      double const kx = static_cast<double>(u - image.width / 2) / image.width;
      fn(std::hypot(kx, ky), std::norm(spectrum.at(u, v)));
    }
  }
}

void require_labels(std::span<int const> labels, std::size_t n)
{
  if (labels.size() != n) { fail(ErrorCode::InvalidArgument, "score and label counts differ"); }
  bool pos = false;
  bool neg = false;
  for (int l : labels) {
    (l ? pos : neg) = true;
  }
  if (!pos || !neg) { fail(ErrorCode::InvalidArgument, "both classes must be present"); }
}

double sigmoid(double z) { return z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z)); }

} // namespace

ErrorMap abs_error_map(ImageSlice const &clean, ImageSlice const &corrupted)
{
  require_same_shape(clean, corrupted);
  ErrorMap map{clean.width, clean.height, std::vector<std::uint8_t>(clean.size(), 0)};
  double peak = 0.0;
  for (std::size_t i = 0; i < clean.size(); ++i) {
    peak = std::max(peak, std::abs(clean.pixels[i] - corrupted.pixels[i]));
  }
  if (peak == 0.0) { return map; }
  for (std::size_t i = 0; i < clean.size(); ++i) {
    double const d = std::abs(clean.pixels[i] - corrupted.pixels[i]);
    map.values[i] = static_cast<std::uint8_t>(std::min(255.0, std::floor(255.0 * d / peak + 0.5)));
  }
  return map;
}

double rmse(ImageSlice const &clean, ImageSlice const &corrupted)
{
  require_same_shape(clean, corrupted);
  double acc = 0.0;
  for (std::size_t i = 0; i < clean.size(); ++i) {
    double const d = clean.pixels[i] - corrupted.pixels[i];
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(clean.size()));
}

double nrmse(ImageSlice const &clean, ImageSlice const &corrupted)
{
  double acc = 0.0;
  for (double p : clean.pixels) {
    acc += p * p;
  }
  if (acc == 0.0) { fail(ErrorCode::Numeric, "nrmse is undefined for an all-zero clean image"); }
  return rmse(clean, corrupted) / std::sqrt(acc / static_cast<double>(clean.size()));
}

double highfreq_energy_ratio(ImageSlice const &image, double cutoff)
{
  if (!(cutoff > 0.0 && cutoff < 0.5)) { fail(ErrorCode::InvalidArgument, "cutoff must lie in (0, 0.5)"); }
  double total = 0.0;
  double high = 0.0;
  for_each_power(image, [&](double r, double p) {
    total += p;
    if (r > cutoff) { high += p; }
  });
  if (total == 0.0) { fail(ErrorCode::Numeric, "spectral energy is zero"); }
  return high / total;
}

ProbeFeatures probe_features(ImageSlice const &image)
{
  ProbeFeatures f{};
  double const band = 0.5 / kProbeBands;
  for_each_power(image, [&](double r, double p) {
    int const b = std::min(kProbeBands - 1, static_cast<int>(r / band));
    f[b] += p;
  });
  double const total = std::accumulate(f.begin(), f.end(), 0.0);
  if (total == 0.0) { fail(ErrorCode::Numeric, "probe features are undefined for an all-zero image"); }
  for (double &v : f) {
    v /= total;
  }
  return f;
}

double artifact_score(ProbeFeatures const &clean, ProbeFeatures const &corrupted)
{
  double acc = 0.0;
  for (int b = 0; b < kProbeBands; ++b) {
    acc += std::abs(clean[b] - corrupted[b]);
  }
  return 0.5 * acc;
}

MetricsReport compute_metrics(ImageSlice const &clean, ImageSlice const &corrupted)
{
  MetricsReport m;
  m.rmse = rmse(clean, corrupted);
  m.nrmse = nrmse(clean, corrupted);
  m.highfreq_energy_ratio = highfreq_energy_ratio(corrupted);
  m.artifact_score = artifact_score(probe_features(clean), probe_features(corrupted));
  return m;
}

double ProbeModel::score(ProbeFeatures const &f) const
{
  double z = weights[kProbeBands];
  for (int b = 0; b < kProbeBands; ++b) {
    z += weights[b] * f[b];
  }
  return z;
}

double ProbeModel::probability(ProbeFeatures const &f) const { return sigmoid(score(f)); }

ProbeModel train_probe(std::span<LabeledFeatures const> data, std::uint64_t seed, ProbeTraining const &options)
{
  std::vector<int> labels(data.size());
  std::transform(data.begin(), data.end(), labels.begin(), [](auto const &d) { return d.label; });
  require_labels(labels, data.size());
  if (options.epochs < 1 || !(options.learning_rate > 0.0)) {
    fail(ErrorCode::InvalidArgument, "probe training needs epochs >= 1 and a positive learning rate");
  }

  double const n = static_cast<double>(data.size());
  std::array<double, kProbeBands> mean{};
  std::array<double, kProbeBands> scale{};
  for (auto const &d : data) {
    for (int b = 0; b < kProbeBands; ++b) {
      mean[b] += d.features[b] / n;
    }
  }
  for (auto const &d : data) {
    for (int b = 0; b < kProbeBands; ++b) {
      scale[b] += (d.features[b] - mean[b]) * (d.features[b] - mean[b]) / n;
    }
  }
  for (double &s : scale) {
    s = s > 0.0 ? std::sqrt(s) : 1.0;
  }
  std::vector<std::array<double, kProbeBands>> z(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (int b = 0; b < kProbeBands; ++b) {
      z[i][b] = (data[i].features[b] - mean[b]) / scale[b];
    }
  }

  Xoshiro256 rng(seed);
  std::array<double, kProbeBands + 1> w{};
  for (double &v : w) {
    v = 0.01 * rng.normal();
  }
  std::array<double, kProbeBands + 1> grad{};
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    grad.fill(0.0);
    for (std::size_t i = 0; i < data.size(); ++i) {
      double s = w[kProbeBands];
      for (int b = 0; b < kProbeBands; ++b) {
        s += w[b] * z[i][b];
      }
      double const r = sigmoid(s) - data[i].label;
      for (int b = 0; b < kProbeBands; ++b) {
        grad[b] += r * z[i][b];
      }
      grad[kProbeBands] += r;
    }
    for (int b = 0; b < kProbeBands; ++b) {
      w[b] -= options.learning_rate * (grad[b] / n + options.l2 * w[b]);
    }
    w[kProbeBands] -= options.learning_rate * grad[kProbeBands] / n;
  }

  ProbeModel model;
  model.epochs = options.epochs;
  model.learning_rate = options.learning_rate;
  model.seed = seed;
  double bias = w[kProbeBands];
  for (int b = 0; b < kProbeBands; ++b) {
    model.weights[b] = w[b] / scale[b];
    bias -= w[b] * mean[b] / scale[b];
  }
  model.weights[kProbeBands] = bias;
  for (double v : model.weights) {
    if (!std::isfinite(v)) { fail(ErrorCode::Numeric, "probe training diverged"); }
  }
  return model;
}

double evaluate_auc(ProbeModel const &model, std::span<LabeledFeatures const> test)
{
  std::vector<double> scores(test.size());
  std::vector<int> labels(test.size());
  for (std::size_t i = 0; i < test.size(); ++i) {
    scores[i] = model.score(test[i].features);
    labels[i] = test[i].label;
  }
  return auc_rank(scores, labels);
}

double auc_rank(std::span<double const> scores, std::span<int const> labels)
{
  require_labels(labels, scores.size());
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] < scores[b]; });
  double pos_rank_sum = 0.0;
  double n_pos = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      ++j;
    }
    double const midrank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t t = i; t < j; ++t) {
      if (labels[order[t]]) {
        pos_rank_sum += midrank;
        n_pos += 1.0;
      }
    }
    i = j;
  }
  double const n_neg = static_cast<double>(scores.size()) - n_pos;
  return (pos_rank_sum - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg);
}

double auc_pairs(std::span<double const> scores, std::span<int const> labels)
{
  require_labels(labels, scores.size());
  double wins = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!labels[i]) { continue; }
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j]) { continue; }
      pairs += 1.0;
      if (scores[i] > scores[j]) {
        wins += 1.0;
      } else if (scores[i] == scores[j]) {
        wins += 0.5;
      }
    }
  }
  return wins / pairs;
}

} // namespace mrsim
