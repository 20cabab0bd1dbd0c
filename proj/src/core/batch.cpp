#include "batch.hpp"

#include "error.hpp"
#include "rng.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <thread>

namespace mrsim {

std::uint64_t record_seed(std::uint64_t master_seed, int image_index, int trial)
{
  return derive_seed(master_seed, static_cast<std::uint64_t>(image_index), static_cast<std::uint64_t>(trial));
}

SeverityStats draw_severity(std::uint64_t seed, SeverityPolicy const &p)
{
  if (p.fixed) { return {p.disp_mean_mm, p.rot_mean_deg}; }
  Xoshiro256 rng(derive_seed(seed, 0x5e7e417ULL));
  double const d = p.disp_mean_mm + p.disp_std_mm * rng.normal();
  double const r = p.rot_mean_deg + p.rot_std_deg * rng.normal();
  return {std::max(p.disp_min_mm, d), std::max(p.rot_min_deg, r)};
}

SimulationRecord clean_twin(SimulationRecord const &motion)
{
  SimulationRecord r;
  r.config = motion.config;
  r.seed = motion.seed;
  r.severity = {};
  r.trajectory = identity_trajectory(motion.trajectory.size(), motion.trajectory.tr_ms);
  r.clean = motion.clean;
  r.corrupted = motion.clean;
  r.error_map = abs_error_map(r.clean, r.corrupted);
  r.metrics = compute_metrics(r.clean, r.corrupted);
  return r;
}

std::vector<BatchImage> load_batch_inputs(fs::path const &dir, std::vector<std::string> *warnings)
{
  if (!fs::is_directory(dir)) { fail(ErrorCode::Io, dir.string() + ": not a directory"); }
  std::vector<fs::path> files;
  for (auto const &e : fs::directory_iterator(dir)) {
    auto const ext = e.path().extension().string();
    if (e.is_regular_file() && (ext == ".pgm" || ext == ".raw")) { files.push_back(e.path()); }
  }
  std::sort(files.begin(), files.end());
  std::vector<BatchImage> out;
  for (auto const &f : files) {
    out.push_back({f.stem().string(), fs::absolute(f).lexically_normal().string(), load_image(f, warnings)});
  }
  if (out.empty()) { fail(ErrorCode::Io, dir.string() + ": no .pgm or .raw images"); }
  return out;
}

namespace {

struct Job
{
  Scheme scheme;
  int image;
  int trial;
};

std::string trial_tag(int trial)
{
  char buf[16];
  std::snprintf(buf, sizeof buf, "t%03d", trial);
  return buf;
}

} // namespace

BatchResult run_batch(std::vector<BatchImage> const &images, BatchOptions const &options)
{
  if (images.empty()) { fail(ErrorCode::InvalidArgument, "batch needs at least one image"); }
  if (options.trials < 1) { fail(ErrorCode::InvalidArgument, "trials must be >= 1"); }
  if (options.schemes.empty()) { fail(ErrorCode::InvalidArgument, "at least one scheme is required"); }
  std::vector<Scheme> schemes = options.schemes;
  for (std::size_t i = 0; i < schemes.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (schemes[i] == schemes[j]) { fail(ErrorCode::InvalidArgument, "scheme listed twice"); }
    }
  }
  std::vector<std::string> names;
  for (auto const &img : images) {
    if (std::find(names.begin(), names.end(), img.name) != names.end()) {
      fail(ErrorCode::InvalidArgument, "duplicate image name " + img.name);
    }
    names.push_back(img.name);
  }

  std::vector<ScannerConfig> configs;
  for (auto s : schemes) {
    ScannerConfig c = options.base;
    c.scheme = s;
    validate(c);
    configs.push_back(c);
  }
  std::vector<ImageSlice> prepared;
  for (auto const &img : images) {
    prepared.push_back(conform_to_config(img.image, options.base));
  }

  std::vector<Job> jobs;
  for (std::size_t s = 0; s < schemes.size(); ++s) {
    for (int i = 0; i < static_cast<int>(images.size()); ++i) {
      for (int t = 0; t < options.trials; ++t) {
        jobs.push_back({schemes[s], i, t});
      }
    }
  }

  BatchResult result;
  result.manifest.master_seed = options.master_seed;
  result.manifest.entries.resize(jobs.size() * 2);
  result.features.resize(jobs.size() * 2);
  if (options.keep_records) { result.records.resize(jobs.size() * 2); }

  auto run_job = [&](std::size_t j) {
    auto const &job = jobs[j];
    auto const &cfg = configs[static_cast<std::size_t>(std::find(schemes.begin(), schemes.end(), job.scheme) -
                                                       schemes.begin())];
    std::uint64_t const seed = record_seed(options.master_seed, job.image, job.trial);
    auto const severity = draw_severity(seed, options.severity);
    auto motion = corrupt_slice(prepared[job.image], cfg, severity, seed, options.corrupt);
    auto clean = clean_twin(motion);
    std::string const scheme(to_string(job.scheme));
    std::string const stem = images[job.image].name + "_" + trial_tag(job.trial);
    motion.id = scheme + "/" + stem + "_motion";
    clean.id = scheme + "/" + stem + "_clean";

    for (int k = 0; k < 2; ++k) {
      auto &rec = k == 0 ? motion : clean;
      ManifestEntry e;
      e.id = rec.id;
      e.label = k == 0 ? "motion" : "clean";
      e.source = images[job.image].source;
      e.seed = seed;
      e.config = cfg;
      e.severity = rec.severity;
      e.metrics = rec.metrics;
      e.dir = rec.id;
      e.image_index = job.image;
      e.trial = job.trial;
      if (!options.output_dir.empty()) { write_record(rec, options.output_dir / e.dir); }
      result.manifest.entries[2 * j + k] = std::move(e);
      result.features[2 * j + k] = probe_features(rec.corrupted);
      if (options.keep_records) { result.records[2 * j + k] = std::move(rec); }
    }
  };

  unsigned const hw = std::max(1u, std::thread::hardware_concurrency());
  std::size_t const workers =
    std::min<std::size_t>(jobs.size(), options.threads > 0 ? static_cast<std::size_t>(options.threads) : hw);
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t j = next++; j < jobs.size(); j = next++) {
            run_job(j);
          }
        } catch (...) {
          errors[w] = std::current_exception();
          next = jobs.size();
        }
      });
    }
  }
  for (auto const &e : errors) {
    if (e) { std::rethrow_exception(e); }
  }

  if (!options.output_dir.empty()) { write_manifest(result.manifest, options.output_dir / "manifest.json"); }
  return result;
}

} // namespace mrsim
