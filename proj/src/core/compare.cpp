#include "compare.hpp"

#include "error.hpp"
#include "rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>

namespace mrsim {

namespace {

using PairKey = std::tuple<int, int>; // image, trial

double mean_of(std::vector<double> const &v)
{
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Sample standard deviation (n - 1).
double std_of(std::vector<double> const &v)
{
  if (v.size() < 2) { return 0.0; }
  double const m = mean_of(v);
  double acc = 0.0;
  for (double x : v) {
    acc += (x - m) * (x - m);
  }
  return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

std::string fmt(double v, int precision = 4)
{
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << v;
  return os.str();
}

std::vector<Scheme> present_schemes(std::vector<CompareSample> const &samples)
{
  std::vector<Scheme> out;
  for (auto s : {Scheme::Cartesian, Scheme::Radial, Scheme::Spiral}) {
    if (std::any_of(samples.begin(), samples.end(), [&](auto const &x) { return x.scheme == s; })) {
      out.push_back(s);
    }
  }
  return out;
}

} // namespace

std::vector<CompareSample> samples_from(DatasetManifest const &manifest, std::vector<ProbeFeatures> const &features)
{
  if (features.size() != manifest.entries.size()) {
    fail(ErrorCode::InvalidArgument, "feature count does not match the manifest");
  }
  std::vector<CompareSample> out;
  for (std::size_t i = 0; i < features.size(); ++i) {
    auto const &e = manifest.entries[i];
    out.push_back({e.config.scheme, e.image_index, e.trial, e.seed, e.severity, e.label == "motion" ? 1 : 0,
                   e.metrics.nrmse, features[i]});
  }
  return out;
}

std::vector<CompareSample> load_compare_samples(std::vector<fs::path> const &manifests)
{
  std::vector<CompareSample> out;
  for (auto const &path : manifests) {
    auto const m = read_manifest(path);
    std::vector<ProbeFeatures> features;
    for (auto const &e : m.entries) {
      auto const img = load_image(path.parent_path() / e.dir / "corrupted.raw");
      features.push_back(probe_features(img));
    }
    auto part = samples_from(m, features);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

void check_pairing(std::vector<CompareSample> const &samples)
{
  auto const schemes = present_schemes(samples);
  if (schemes.size() < 2) {
    fail(ErrorCode::InvalidArgument, "comparison needs records from at least two schemes");
  }
  using Key = std::tuple<int, int, int, std::uint64_t, double, double>;
  std::map<Scheme, std::multiset<Key>> sets;
  for (auto const &s : samples) {
    sets[s.scheme].insert({s.image_index, s.trial, s.label, s.seed, s.severity.rms_displacement_mm,
                           s.severity.rms_rotation_deg});
  }
  auto const &ref = sets[schemes.front()];
  for (auto s : schemes) {
    if (sets[s] != ref) {
      fail(ErrorCode::InvalidArgument,
           std::string("records are not paired: ") + std::string(to_string(s)) + " and " +
             std::string(to_string(schemes.front())) +
             " differ in their (image, trial, label, seed, severity) sets; generate all schemes in one batch run "
             "or with the same master seed, images and trial count");
    }
  }
}

CompareReport compare_schemes(std::vector<CompareSample> const &samples, CompareOptions const &options)
{
  check_pairing(samples);
  if (options.repetitions < 1) { fail(ErrorCode::InvalidArgument, "repetitions must be >= 1"); }
  if (!(options.test_fraction > 0.0 && options.test_fraction < 1.0)) {
    fail(ErrorCode::InvalidArgument, "test fraction must lie in (0, 1)");
  }
  auto const schemes = present_schemes(samples);

  // Split by (image, trial) so that a motion record and its clean twin never
  // straddle train and test, and every scheme uses the same split.
  std::vector<PairKey> keys;
  for (auto const &s : samples) {
    if (s.scheme == schemes.front()) { keys.emplace_back(s.image_index, s.trial); }
  }
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  auto const n_test = static_cast<std::size_t>(std::llround(options.test_fraction * static_cast<double>(keys.size())));
  if (n_test < 1 || n_test >= keys.size()) {
    fail(ErrorCode::InvalidArgument, "too few records for a train/test split");
  }

  CompareReport report;
  std::map<Scheme, std::map<PairKey, double>> motion_nrmse;
  double total_nrmse = 0.0;
  for (auto scheme : schemes) {
    SchemeSummary sum;
    sum.scheme = scheme;
    std::vector<double> nrmse;
    for (auto const &s : samples) {
      if (s.scheme != scheme) { continue; }
      if (s.label) {
        ++sum.n_motion;
        nrmse.push_back(s.nrmse);
        motion_nrmse[scheme][{s.image_index, s.trial}] = s.nrmse;
        total_nrmse += s.nrmse;
      } else {
        ++sum.n_clean;
      }
    }
    sum.nrmse_mean = mean_of(nrmse);
    sum.nrmse_std = std_of(nrmse);
    report.schemes.push_back(sum);
  }

  for (int rep = 0; rep < options.repetitions; ++rep) {
    std::uint64_t const rep_seed = derive_seed(options.seed, static_cast<std::uint64_t>(rep));
    auto order = keys;
    Xoshiro256 rng(rep_seed);
    for (std::size_t i = order.size() - 1; i > 0; --i) {
      std::swap(order[i], order[rng.below(i + 1)]);
    }
    std::set<PairKey> test_keys(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
    for (auto &sum : report.schemes) {
      std::vector<LabeledFeatures> train;
      std::vector<LabeledFeatures> test;
      for (auto const &s : samples) {
        if (s.scheme != sum.scheme) { continue; }
        auto &dst = test_keys.count({s.image_index, s.trial}) ? test : train;
        dst.push_back({s.features, s.label});
      }
      auto const model = train_probe(train, rep_seed, options.training);
      sum.auc.push_back(evaluate_auc(model, test));
    }
  }
  for (auto &sum : report.schemes) {
    sum.auc_mean = mean_of(sum.auc);
    sum.auc_std = std_of(sum.auc);
  }

  for (std::size_t i = 0; i + 1 < schemes.size(); ++i) {
    PairedGap gap;
    gap.a = schemes[i];
    gap.b = schemes[i + 1];
    std::vector<double> diffs;
    for (auto const &[key, v] : motion_nrmse[gap.a]) {
      diffs.push_back(v - motion_nrmse[gap.b].at(key));
    }
    gap.n = static_cast<int>(diffs.size());
    gap.mean = mean_of(diffs);
    gap.std_error = diffs.size() > 1 ? std_of(diffs) / std::sqrt(static_cast<double>(diffs.size())) : 0.0;
    report.gaps.push_back(gap);
  }

  std::string chain;
  std::string auc_chain;
  for (std::size_t i = 0; i < report.schemes.size(); ++i) {
    if (i) {
      chain += " > ";
      auc_chain += " >= ";
    }
    chain += to_string(report.schemes[i].scheme);
    auc_chain += to_string(report.schemes[i].scheme);
  }

  report.degenerate = total_nrmse == 0.0;
  if (report.degenerate) {
    report.distortion_verdict = "distortion: no ordering (degenerate): every record has zero distortion";
    report.auc_verdict = "detectability: no ordering (degenerate): motion and clean records are identical";
    return report;
  }
  report.distortion_ordered = std::all_of(report.gaps.begin(), report.gaps.end(), [](PairedGap const &g) {
    return g.mean > 0.0 && g.mean >= g.std_error;
  });
  report.distortion_verdict = std::string("distortion: ") + (report.distortion_ordered ? "ordered " : "NOT ordered ") +
                              chain + " (mean nrmse; each paired gap >= 1 standard error)";
  report.auc_ordered = true;
  for (std::size_t i = 0; i + 1 < report.schemes.size(); ++i) {
    if (report.schemes[i].auc_mean < report.schemes[i + 1].auc_mean) { report.auc_ordered = false; }
  }
  report.auc_verdict =
    std::string("detectability: ") + (report.auc_ordered ? "ordered " : "NOT ordered ") + auc_chain + " (mean AUC)";
  return report;
}

std::string format_report(CompareReport const &r)
{
  std::ostringstream os;
  os << "scheme      n_motion  n_clean  nrmse mean +- std     AUC mean +- std\n";
  for (auto const &s : r.schemes) {
    os << std::left << std::setw(12) << to_string(s.scheme) << std::right << std::setw(8) << s.n_motion
       << std::setw(9) << s.n_clean << "  " << fmt(s.nrmse_mean, 5) << " +- " << fmt(s.nrmse_std, 5) << "   "
       << fmt(s.auc_mean) << " +- " << fmt(s.auc_std) << '\n';
  }
  for (auto const &g : r.gaps) {
    os << "paired nrmse gap " << to_string(g.a) << " - " << to_string(g.b) << ": " << fmt(g.mean, 5)
       << " (se " << fmt(g.std_error, 5) << ", n " << g.n << ")\n";
  }
  os << r.distortion_verdict << '\n' << r.auc_verdict << '\n';
  return os.str();
}

void write_compare_csv(CompareReport const &r, fs::path const &path)
{
  std::ofstream out(path);
  if (!out) { fail(ErrorCode::Io, path.string() + ": cannot open for writing"); }
  out << std::setprecision(17);
  out << "kind,scheme,other,n_motion,n_clean,mean,std,std_error,repetition\n";
  for (auto const &s : r.schemes) {
    out << "nrmse," << to_string(s.scheme) << ",," << s.n_motion << ',' << s.n_clean << ',' << s.nrmse_mean << ','
        << s.nrmse_std << ",,\n";
    out << "auc," << to_string(s.scheme) << ",," << s.n_motion << ',' << s.n_clean << ',' << s.auc_mean << ','
        << s.auc_std << ",,\n";
    for (std::size_t i = 0; i < s.auc.size(); ++i) {
      out << "auc_rep," << to_string(s.scheme) << ",,,," << s.auc[i] << ",,," << i << '\n';
    }
  }
  for (auto const &g : r.gaps) {
    out << "nrmse_gap," << to_string(g.a) << ',' << to_string(g.b) << ',' << g.n << ",," << g.mean << ",,"
        << g.std_error << ",\n";
  }
  out << "verdict,distortion,," << ",," << (r.degenerate ? "degenerate" : r.distortion_ordered ? "ordered" : "not_ordered")
      << ",,,\n";
  out << "verdict,auc,," << ",," << (r.degenerate ? "degenerate" : r.auc_ordered ? "ordered" : "not_ordered") << ",,,\n";
  if (!out) { fail(ErrorCode::Io, path.string() + ": write failed"); }
}

} // namespace mrsim
