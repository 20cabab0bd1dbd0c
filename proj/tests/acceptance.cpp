// Acceptance run: one PASS/FAIL line per criterion, details indented below.
// usage: mrsim_acceptance [criterion numbers...]   (default: all)
// MRSIM_USER_IMAGE=<path> adds a user image to the scheme-ordering run.

#include "core/batch.hpp"
#include "core/compare.hpp"
#include "core/error.hpp"
#include "core/phantom.hpp"
#include "core/rng.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <set>
#include <string>

using namespace mrsim;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome
{
  bool pass = false;
  std::string summary;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(char const *f, auto... args)
{
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void detail(std::string const &s) { std::printf("    %s\n", s.c_str()); }

ScannerConfig square(Scheme scheme, int n)
{
  ScannerConfig c;
  c.scheme = scheme;
  c.matrix_pe = n;
  c.matrix_fe = n;
  return c;
}

ImageSlice random_image(int w, int h, std::uint64_t seed)
{
  Xoshiro256 rng(seed);
  ImageSlice img(w, h);
  for (auto &p : img.pixels) {
    p = rng.uniform();
  }
  return img;
}

double rel_error(std::span<Complex const> a, std::span<Complex const> b)
{
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return std::sqrt(num / den);
}

double max_rel_deviation(std::span<Complex const> a, std::span<Complex const> b)
{
  double dev = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dev = std::max(dev, std::abs(a[i] - b[i]));
    scale = std::max(scale, std::abs(b[i]));
  }
  return dev / scale;
}

std::vector<KPoint> random_coords(std::size_t n, std::uint64_t seed)
{
  Xoshiro256 rng(seed);
  std::vector<KPoint> k(n);
  for (auto &p : k) {
    p = {rng.uniform() - 0.5, rng.uniform() - 0.5};
  }
  return k;
}

// ---- 1 ----
Outcome scan_time_criterion()
{
  ScannerConfig c = square(Scheme::Cartesian, 208);
  c.tr_ms = 400.0;
  c.nex = 2;
  auto const t0 = Clock::now();
  double const t = scan_time_s(c);
  double const dt = seconds_since(t0);
  bool const exact = t == 166.4;
  bool const rounds = std::lround(t) == 166;
  return {exact && rounds && dt < 1e-3,
          fmt("scan_time(TR 400 ms, pe 208, NEX 2, cartesian) = %.6f s (166 s rounded); %.1f us", t, dt * 1e6)};
}

// ---- 2 ----
Outcome zero_motion_criterion()
{
  auto const t0 = Clock::now();
  auto const img = shepp_logan(256, 256);
  auto const plan = make_plan(square(Scheme::Cartesian, 256));
  auto const acq = simulate_acquisition(img, identity_trajectory(plan.n_shots_total(), 400.0), plan);
  auto const spectrum = forward_grid(img);
  double const dev = max_rel_deviation(acq.values, spectrum.values);
  double const err = rmse(img, grid_reconstruct(acq));
  double const dt = seconds_since(t0);
  return {dev <= 1e-9 && err <= 1e-9 && dt < 1.0,
          fmt("Cartesian 256x256, identity trajectory: k-space max rel deviation %.2e, recon RMSE %.2e; %.2f s", dev,
              err, dt)};
}

// ---- 3 ----
Outcome shift_theorem_criterion()
{
  auto const t0 = Clock::now();
  // Random content inside a zero border, so a 3-pixel shift loses nothing.
  auto img = random_image(32, 32, 303);
  for (int y = 0; y < 32; ++y) {
    for (int x = 0; x < 32; ++x) {
      if (x < 4 || y < 4 || x >= 28 || y >= 28) { img.at(x, y) = 0.0; }
    }
  }
  double const shift_mm = 3.0;
  double worst = 0.0;
  for (auto scheme : {Scheme::Cartesian, Scheme::Radial, Scheme::Spiral}) {
    auto const plan = make_plan(square(scheme, 32));
    auto traj = identity_trajectory(plan.n_shots_total(), 400.0);
    for (auto &p : traj.poses) {
      p.tx_mm = shift_mm;
    }
    auto const coords = plan.excitation_coords();
    auto expect = direct_dft_oracle(img, coords);
    for (std::size_t j = 0; j < coords.size(); ++j) {
      expect[j] *= std::polar(1.0, -2.0 * std::numbers::pi * coords[j].kx * shift_mm / img.pixel_spacing_mm);
    }
    AcquisitionOptions exact;
    exact.off_grid = OffGridMode::Direct;
    auto const a = simulate_acquisition(img, traj, plan, exact);
    auto const b = simulate_acquisition(img, traj, plan);
    double const e = rel_error(a.values, expect);
    worst = std::max(worst, e);
    detail(fmt("%-9s engine vs clean x phase ramp: %.2e (interpolated path: %.2e)",
               std::string(to_string(scheme)).c_str(), e, rel_error(b.values, expect)));
  }
  double const dt = seconds_since(t0);
  return {worst <= 1e-6 && dt < 10.0,
          fmt("3.0 mm constant translation, 32x32, all schemes: worst rel error %.2e; %.2f s", worst, dt)};
}

// ---- 4 ----
Outcome oracle_equivalence_criterion()
{
  auto const t0 = Clock::now();
  double worst = 0.0;
  double worst_cubic = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto const img = random_image(16, 16, 4000 + seed);
    auto const coords = random_coords(100, 5000 + seed);
    auto const ref = direct_dft_oracle(img, coords);
    std::vector<Complex> out(coords.size());
    OffGridEvaluator engine(16, 16); // the acquisition engine's default evaluator
    engine.load(img);
    engine.evaluate(coords, out);
    worst = std::max(worst, rel_error(out, ref));
    OffGridEvaluator cubic(16, 16, {.oversampling = 2.0, .kernel = SpectralKernel::Cubic});
    cubic.load(img);
    cubic.evaluate(coords, out);
    worst_cubic = std::max(worst_cubic, rel_error(out, ref));
  }
  double const dt = seconds_since(t0);
  detail(fmt("plain cubic convolution at oversampling 2 (not used by the engine): worst rel error %.2e", worst_cubic));
  return {worst <= 1e-3 && dt < 10.0,
          fmt("engine off-grid evaluation (oversampling 2, deapodised Kaiser-Bessel width 6) vs direct DFT, "
              "20 images x 100 coords: worst rel error %.2e; %.2f s",
              worst, dt)};
}

// ---- 5 ----
Outcome center_periphery_criterion()
{
  auto const t0 = Clock::now();
  int const n = 256;
  auto const plan = make_plan(square(Scheme::Cartesian, n));
  std::set<int> central;
  std::set<int> outer;
  for (int i = 0; i < 16; ++i) {
    central.insert(n / 2 - 8 + i);
  }
  for (int i = 0; i < 8; ++i) {
    outer.insert(i);
    outer.insert(n - 1 - i);
  }
  // Shots are sampled in ky order; confirm which lines those shots hold.
  for (int s : central) {
    if (std::abs(plan.shots[s].samples[0].ky) > 8.0 / n) { return {false, "central shots are not central lines"}; }
  }
  int wins = 0;
  for (int seed = 0; seed < 20; ++seed) {
    auto const img = random_head_phantom(n, n, 500 + seed);
    Xoshiro256 rng(derive_seed(55, seed));
    double const angle = 2.0 * std::numbers::pi * rng.uniform();
    RigidPose step{.tx_mm = 2.0 * std::cos(angle), .ty_mm = 2.0 * std::sin(angle)};
    auto run = [&](std::set<int> const &lines) {
      auto traj = identity_trajectory(plan.n_shots_total(), 400.0);
      for (int s : lines) {
        traj.poses[s] = step;
      }
      return nrmse(img, grid_reconstruct(simulate_acquisition(img, traj, plan)));
    };
    double const c = run(central);
    double const p = run(outer);
    wins += c > p;
    if (seed < 3) { detail(fmt("seed %d: central NRMSE %.4f, peripheral NRMSE %.4f", seed, c, p)); }
  }
  double const dt = seconds_since(t0);
  return {wins >= 19 && dt < 120.0,
          fmt("2 mm step during 16 central vs 16 outermost ky lines, Cartesian 256x256: central worse in %d/20; %.1f s",
              wins, dt)};
}

// ---- 6 ----
Outcome scheme_distortion_criterion()
{
  auto const t0 = Clock::now();
  int const n = 256;
  std::vector<BatchImage> images{{"shepp_logan", "", shepp_logan(n, n)}};
  if (char const *user = std::getenv("MRSIM_USER_IMAGE"); user && *user) {
    std::vector<std::string> warnings;
    images.push_back({"user", user, conform_to_config(load_image(user, &warnings), square(Scheme::Cartesian, n))});
    detail(std::string("user image: ") + user);
  }
  BatchOptions o;
  o.base = square(Scheme::Cartesian, n);
  o.schemes = {Scheme::Cartesian, Scheme::Radial, Scheme::Spiral};
  o.trials = 50;
  o.threads = 0;
  o.master_seed = 6;
  o.severity.fixed = true; // 1.0 mm / 0.6 deg
  o.keep_records = false;
  auto const batch = run_batch(images, o);
  auto const report = compare_schemes(samples_from(batch.manifest, batch.features), {.seed = 6});
  for (auto const &s : report.schemes) {
    detail(fmt("%-9s mean NRMSE %.5f +- %.5f over %d motion records", std::string(to_string(s.scheme)).c_str(),
               s.nrmse_mean, s.nrmse_std, s.n_motion));
  }
  for (auto const &g : report.gaps) {
    detail(fmt("paired gap %s - %s: %.5f (standard error %.5f, n %d)", std::string(to_string(g.a)).c_str(),
               std::string(to_string(g.b)).c_str(), g.mean, g.std_error, g.n));
  }
  double const dt = seconds_since(t0);
  return {report.distortion_ordered && dt < 600.0,
          fmt("%s; 50 paired trials at 1.0 mm / 0.6 deg, 256x256; %.0f s", report.distortion_verdict.c_str(), dt)};
}

// ---- 7 ----
Outcome detectability_criterion()
{
  auto const t0 = Clock::now();
  int const n = 256;
  int const count = 200;
  std::vector<BatchImage> images;
  for (int i = 0; i < count; ++i) {
    images.push_back({fmt("head%03d", i), "", random_head_phantom(n, n, 70000 + i)});
  }
  BatchOptions o;
  o.base = square(Scheme::Cartesian, n);
  o.schemes = {Scheme::Cartesian, Scheme::Radial, Scheme::Spiral};
  o.trials = 1;
  o.threads = 0;
  o.master_seed = 7;
  o.keep_records = false; // severity drawn per trajectory: 1 +- 0.4 mm, 0.6 +- 0.4 deg
  auto const batch = run_batch(images, o);
  CompareOptions co;
  co.repetitions = 5;
  co.test_fraction = 0.3;
  co.seed = 7;
  auto const report = compare_schemes(samples_from(batch.manifest, batch.features), co);
  double auc_cart = 0.0;
  for (auto const &s : report.schemes) {
    detail(fmt("%-9s %d motion + %d clean, AUC %.4f +- %.4f, mean NRMSE %.4f", std::string(to_string(s.scheme)).c_str(),
               s.n_motion, s.n_clean, s.auc_mean, s.auc_std, s.nrmse_mean));
    if (s.scheme == Scheme::Cartesian) { auc_cart = s.auc_mean; }
  }
  double const dt = seconds_since(t0);
  return {report.auc_ordered && auc_cart >= 0.95 && dt < 900.0,
          fmt("%s; AUC(cartesian) %.4f (>= 0.95 required); 70/30 split x 5; %.0f s", report.auc_verdict.c_str(),
              auc_cart, dt)};
}

// ---- 8 ----
Outcome invariant_criterion()
{
  auto const t0 = Clock::now();
  std::vector<std::pair<std::string, bool>> checks;

  { // sgolay reproduces polynomials of degree <= order at interior points
    Xoshiro256 rng(81);
    double worst = 0.0;
    for (int order = 1; order <= 4; ++order) {
      for (int window = (order + 1) | 1; window <= 15; window += 2) {
        std::vector<double> x(50);
        std::vector<double> coef(order + 1);
        for (auto &c : coef) {
          c = rng.normal();
        }
        for (int i = 0; i < 50; ++i) {
          double v = 0.0;
          for (int d = order; d >= 0; --d) {
            v = v * ((i - 25) / 10.0) + coef[d];
          }
          x[i] = v;
        }
        auto const y = smooth_savitzky_golay(x, window, order);
        for (int i = window / 2; i < 50 - window / 2; ++i) {
          worst = std::max(worst, std::abs(y[i] - x[i]));
        }
      }
    }
    checks.push_back({fmt("sgolay polynomial reproduction (max abs error %.1e)", worst), worst <= 1e-10});
  }
  { // RMS homogeneity
    auto const t = generate_random_trajectory(300, 400.0, {1.0, 0.6}, 82);
    double worst = 0.0;
    for (double c : {-3.0, 0.25, 7.5}) {
      auto s = t;
      for (auto &p : s.poses) {
        p.tx_mm *= c;
        p.ty_mm *= c;
        p.tz_mm *= c;
      }
      worst = std::max(worst, std::abs(severity_rms(s).rms_displacement_mm / (std::abs(c) * 1.0) - 1.0));
    }
    checks.push_back({fmt("RMS homogeneity (max rel error %.1e)", worst), worst <= 1e-12});
  }
  { // FFT round trip
    double worst = 0.0;
    for (int n : {16, 64, 256}) {
      auto const img = random_image(n, n, 83 + n);
      auto const back = inverse_grid(forward_grid(img));
      for (std::size_t i = 0; i < img.size(); ++i) {
        worst = std::max(worst, std::abs(back.pixels[i] - img.pixels[i]));
      }
    }
    checks.push_back({fmt("FFT round trip (max abs error %.1e)", worst), worst <= 1e-12});
  }
  { // gridding phantom NRMSE
    auto const img = gaussian_phantom(256, 256);
    for (auto [scheme, limit] : {std::pair{Scheme::Radial, 0.05}, std::pair{Scheme::Spiral, 0.07}}) {
      auto const plan = make_plan(square(scheme, 256));
      auto const rec =
        grid_reconstruct(simulate_acquisition(img, identity_trajectory(plan.n_shots_total(), 400.0), plan));
      double const e = nrmse(img, rec);
      checks.push_back(
        {fmt("%s gridding of a Gaussian phantom: NRMSE %.4f (< %.2f)", std::string(to_string(scheme)).c_str(), e, limit),
         e < limit});
    }
  }
  { // AUC rank statistic vs brute-force pairs
    Xoshiro256 rng(84);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
      std::size_t const n = 2 + rng.below(100);
      std::vector<double> s(n);
      std::vector<int> l(n);
      for (std::size_t i = 0; i < n; ++i) {
        s[i] = trial % 2 ? rng.normal() : static_cast<double>(rng.below(6));
        l[i] = static_cast<int>(rng.below(2));
      }
      l[0] = 0;
      l[1] = 1;
      worst = std::max(worst, std::abs(auc_rank(s, l) - auc_pairs(s, l)));
    }
    checks.push_back({fmt("AUC rank statistic == pair counting (max diff %.1e)", worst), worst <= 1e-12});
  }
  { // error map normalisation
    bool ok = true;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      auto const m = abs_error_map(random_image(32, 16, 850 + seed), random_image(32, 16, 900 + seed));
      ok = ok && *std::max_element(m.values.begin(), m.values.end()) == 255;
    }
    ImageSlice z(8, 8);
    ImageSlice d(8, 8);
    d.at(0, 0) = 1.0;
    d.at(1, 0) = 2.0;
    d.at(2, 0) = 4.0;
    auto const m = abs_error_map(z, d);
    ok = ok && m.values[0] == 64 && m.values[1] == 128 && m.values[2] == 255;
    checks.push_back({"error map normalisation (max = 255; {1,2,4} -> {64,128,255})", ok});
  }
  { // manifest-driven regeneration
    auto const dir = fs::temp_directory_path() / "mrsim_acceptance_regen";
    fs::remove_all(dir);
    save_image_raw(shepp_logan(64, 64), dir / "in" / "shepp.raw");
    save_image_raw(random_head_phantom(64, 64, 3), dir / "in" / "head.raw");
    BatchOptions o;
    o.base = square(Scheme::Cartesian, 64);
    o.schemes = {Scheme::Cartesian, Scheme::Radial, Scheme::Spiral};
    o.trials = 2;
    o.master_seed = 86;
    o.output_dir = dir / "out";
    run_batch(load_batch_inputs(dir / "in"), o);
    auto const manifest = read_manifest(dir / "out" / "manifest.json");
    int identical = 0;
    for (auto const &e : manifest.entries) {
      auto const stored = read_record(dir / "out" / e.dir);
      auto const again = regenerate(e, dir / "out");
      identical += again.corrupted.pixels == stored.corrupted.pixels && again == stored;
    }
    fs::remove_all(dir);
    checks.push_back({fmt("manifest regeneration bit-identical (%d/%zu records)", identical, manifest.entries.size()),
                      identical == static_cast<int>(manifest.entries.size()) && identical == 24});
  }

  bool all = true;
  for (auto const &[name, ok] : checks) {
    detail(std::string(ok ? "ok   " : "FAIL ") + name);
    all = all && ok;
  }
  double const dt = seconds_since(t0);
  return {all && dt < 300.0, fmt("invariant suites: %s; %.1f s", all ? "all green" : "failures", dt)};
}

} // namespace

int main(int argc, char **argv)
{
  std::vector<std::pair<int, std::function<Outcome()>>> const criteria{
    {1, scan_time_criterion},        {2, zero_motion_criterion},      {3, shift_theorem_criterion},
    {4, oracle_equivalence_criterion}, {5, center_periphery_criterion}, {6, scheme_distortion_criterion},
    {7, detectability_criterion},    {8, invariant_criterion},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) {
    selected.insert(std::atoi(argv[i]));
  }
  int failed = 0;
  for (auto const &[id, run] : criteria) {
    if (!selected.empty() && !selected.count(id)) { continue; }
    Outcome o;
    try {
      o = run();
    } catch (std::exception const &e) {
      o = {false, std::string("error: ") + e.what()};
    }
    std::printf("criterion %d: %s  %s\n", id, o.pass ? "PASS" : "FAIL", o.summary.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed ? 1 : 0;
}
