#include "acquisition.hpp"

#include "error.hpp"
#include "fft.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <thread>
#include <tuple>

namespace mrsim {

ImageSlice apply_rigid(ImageSlice const &image, RigidPose const &pose, bool ignore_through_plane)
{
  validate(image);
  if (!pose.is_in_plane() && !ignore_through_plane) {
    fail(ErrorCode::Unsupported, "through-plane motion (tz, rx, ry) is not supported by the 2-D model");
  }
  if (pose.tx_mm == 0.0 && pose.ty_mm == 0.0 && pose.rz_deg == 0.0) { return image; }

  double const tx = pose.tx_mm / image.pixel_spacing_mm;
  double const ty = pose.ty_mm / image.pixel_spacing_mm;
  double const theta = pose.rz_deg * std::numbers::pi / 180.0;
  double const c = std::cos(theta);
  double const s = std::sin(theta);
  double const cx = image.width / 2;
  double const cy = image.height / 2;

  auto sample = [&](long x, long y) {
    if (x < 0 || y < 0 || x >= image.width || y >= image.height) { return 0.0; }
    return image.at(static_cast<int>(x), static_cast<int>(y));
  };

  ImageSlice out(image.width, image.height, image.pixel_spacing_mm);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      // Inverse map: undo the translation, then rotate by -theta.
      double const dx = x - cx - tx;
      double const dy = y - cy - ty;
      double const sx = c * dx + s * dy + cx;
      double const sy = -s * dx + c * dy + cy;
      double const fx = std::floor(sx);
      double const fy = std::floor(sy);
      double const ax = sx - fx;
      double const ay = sy - fy;
      long const x0 = static_cast<long>(fx);
      long const y0 = static_cast<long>(fy);
      double v = (1.0 - ax) * (1.0 - ay) * sample(x0, y0);
      if (ax != 0.0) { v += ax * (1.0 - ay) * sample(x0 + 1, y0); }
      if (ay != 0.0) { v += (1.0 - ax) * ay * sample(x0, y0 + 1); }
      if (ax != 0.0 && ay != 0.0) { v += ax * ay * sample(x0 + 1, y0 + 1); }
      out.at(x, y) = v;
    }
  }
  return out;
}

namespace {

using PoseKey = std::tuple<double, double, double, double, double, double>;

PoseKey key_of(RigidPose const &p) { return {p.tx_mm, p.ty_mm, p.tz_mm, p.rx_deg, p.ry_deg, p.rz_deg}; }

struct ShotSlot
{
  std::size_t shot;
  std::size_t offset; // into the all-excitation value array
};

struct PoseGroup
{
  RigidPose pose;
  std::vector<ShotSlot> shots;
};

// Groups with at most this many Cartesian shots are sampled line by line.
constexpr std::size_t kLineDftLimit = 8;

int wrap(long i, int n)
{
  long const m = i % n;
  return static_cast<int>(m < 0 ? m + n : m);
}

// Centered DFT along the kx line at ky = v / H, indexed by wrap(u, W) for
// kx = u / W: a direct sum over y, then a 1-D FFT over x.
std::vector<Complex> line_spectrum(ImageSlice const &image, long v)
{
  int const w = image.width;
  int const h = image.height;
  std::vector<Complex> twiddle(h);
  for (int m = 0; m < h; ++m) {
    twiddle[m] = std::polar(1.0, -2.0 * std::numbers::pi * m / h);
  }
  std::vector<Complex> line(w);
  for (int y = 0; y < h; ++y) {
    Complex const t = twiddle[wrap(v * (y - h / 2), h)];
    for (int x = 0; x < w; ++x) {
      line[wrap(x - w / 2, w)] += image.at(x, y) * t;
    }
  }
  columns_inplace(line, w, 1, false);
  return line;
}

void sample_group(ImageSlice const &image,
                  SamplingPlan const &plan,
                  PoseGroup const &group,
                  AcquisitionOptions const &options,
                  std::vector<Complex> &values)
{
  auto const moved = apply_rigid(image, group.pose, options.ignore_through_plane);
  if (plan.config.scheme == Scheme::Cartesian) {
    if (group.shots.size() > kLineDftLimit) {
      auto const grid = forward_grid(moved);
      for (auto const &slot : group.shots) {
        auto const &samples = plan.shots[slot.shot].samples;
        for (std::size_t j = 0; j < samples.size(); ++j) {
          long const u = std::lround(samples[j].kx * image.width) + image.width / 2;
          long const v = std::lround(samples[j].ky * image.height) + image.height / 2;
          values[slot.offset + j] = grid.at(static_cast<int>(u), static_cast<int>(v));
        }
      }
      return;
    }
    std::map<long, std::vector<Complex>> lines;
    for (auto const &slot : group.shots) {
      auto const &samples = plan.shots[slot.shot].samples;
      for (std::size_t j = 0; j < samples.size(); ++j) {
        long const u = std::lround(samples[j].kx * image.width);
        long const v = std::lround(samples[j].ky * image.height);
        auto it = lines.find(v);
        if (it == lines.end()) { it = lines.emplace(v, line_spectrum(moved, v)).first; }
        values[slot.offset + j] = it->second[wrap(u, image.width)];
      }
    }
    return;
  }
  if (options.off_grid == OffGridMode::Direct) {
    for (auto const &slot : group.shots) {
      auto const &samples = plan.shots[slot.shot].samples;
      auto const v = direct_dft_oracle(moved, samples);
      std::copy(v.begin(), v.end(), values.begin() + static_cast<std::ptrdiff_t>(slot.offset));
    }
    return;
  }
  OffGridEvaluator evaluator(image.width, image.height, options.interpolation);
  evaluator.load(moved);
  for (auto const &slot : group.shots) {
    auto const &samples = plan.shots[slot.shot].samples;
    evaluator.evaluate(samples, std::span<Complex>(values).subspan(slot.offset, samples.size()));
  }
}

} // namespace

KSpaceAcquisition simulate_acquisition(ImageSlice const &image,
                                       MotionTrajectory const &trajectory,
                                       SamplingPlan const &plan,
                                       AcquisitionOptions const &options)
{
  validate(image);
  validate(plan.config);
  if (image.width != plan.config.matrix_fe || image.height != plan.config.matrix_pe) {
    fail(ErrorCode::InvalidArgument, "image is " + std::to_string(image.width) + "x" + std::to_string(image.height) +
                                       " but the plan matrix is " + std::to_string(plan.config.matrix_fe) + "x" +
                                       std::to_string(plan.config.matrix_pe) + " (fe x pe)");
  }
  if (trajectory.size() < static_cast<std::size_t>(plan.n_shots_total())) {
    fail(ErrorCode::InvalidArgument, "trajectory has " + std::to_string(trajectory.size()) +
                                       " poses but the plan needs " + std::to_string(plan.n_shots_total()));
  }
  if (options.threads < 1) { fail(ErrorCode::InvalidArgument, "threads must be >= 1"); }

  std::map<PoseKey, std::size_t> index;
  std::vector<PoseGroup> groups;
  std::size_t offset = 0;
  for (std::size_t s = 0; s < plan.shots.size(); ++s) {
    auto const &pose = pose_at_shot(trajectory, static_cast<std::size_t>(plan.shots[s].time_index_tr));
    auto [it, fresh] = index.try_emplace(key_of(pose), groups.size());
    if (fresh) { groups.push_back({pose, {}}); }
    groups[it->second].shots.push_back({s, offset});
    offset += plan.shots[s].samples.size();
  }

  std::vector<Complex> all(offset);
  int const workers = std::min<int>(options.threads, static_cast<int>(groups.size()));
  if (workers <= 1) {
    for (auto const &g : groups) {
      sample_group(image, plan, g, options, all);
    }
  } else {
    // Each group writes a disjoint set of slots, so the result is independent
    // of scheduling.
    std::vector<std::jthread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t g = w; g < groups.size(); g += workers) {
            sample_group(image, plan, groups[g], options, all);
          }
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    pool.clear();
    for (auto const &e : errors) {
      if (e) { std::rethrow_exception(e); }
    }
  }

  KSpaceAcquisition acq;
  acq.plan = plan;
  acq.width = image.width;
  acq.height = image.height;
  acq.pixel_spacing_mm = image.pixel_spacing_mm;
  int const nex = plan.config.nex;
  std::size_t const per = plan.samples_per_excitation();
  if (nex == 1) {
    acq.values = std::move(all);
  } else {
    acq.values.assign(per, Complex{});
    for (int e = 0; e < nex; ++e) {
      for (std::size_t i = 0; i < per; ++i) {
        acq.values[i] += all[e * per + i];
      }
    }
    for (auto &v : acq.values) {
      v /= static_cast<double>(nex);
    }
    acq.nex_averaged = true;
  }
  return acq;
}

SimulationRecord corrupt_slice(ImageSlice const &image,
                               ScannerConfig const &config,
                               SeverityStats const &severity,
                               std::uint64_t seed,
                               CorruptOptions const &options)
{
  validate(image);
  validate(config);
  validate(options.gridding);
  auto const plan = make_plan(config);
  auto const n_shots = static_cast<std::size_t>(plan.n_shots_total());

  SimulationRecord rec;
  rec.config = config;
  rec.seed = seed;
  rec.severity = severity;
  rec.trajectory = generate_random_trajectory(n_shots, config.tr_ms, severity, seed, options.trajectory);

  auto const clean_acq = simulate_acquisition(image, identity_trajectory(n_shots, config.tr_ms), plan,
                                              options.acquisition);
  rec.clean = grid_reconstruct(clean_acq, options.gridding);
  bool const still = std::all_of(rec.trajectory.poses.begin(), rec.trajectory.poses.end(),
                                 [](RigidPose const &p) { return p.is_identity(); });
  if (still) {
    rec.corrupted = rec.clean;
  } else {
    auto const acq = simulate_acquisition(image, rec.trajectory, plan, options.acquisition);
    rec.corrupted = grid_reconstruct(acq, options.gridding);
  }
  quantize_to_float32(rec.clean);
  quantize_to_float32(rec.corrupted);
  rec.error_map = abs_error_map(rec.clean, rec.corrupted);
  rec.metrics = compute_metrics(rec.clean, rec.corrupted);
  return rec;
}

} // namespace mrsim
