#include "sampling.hpp"

#include "error.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>

namespace mrsim {

std::string_view to_string(Scheme scheme)
{
  switch (scheme) {
  case Scheme::Cartesian: return "cartesian";
  case Scheme::Radial: return "radial";
  case Scheme::Spiral: return "spiral";
  }
  return "unknown";
}

std::optional<Scheme> parse_scheme(std::string_view name)
{
  if (name == "cartesian") { return Scheme::Cartesian; }
  if (name == "radial") { return Scheme::Radial; }
  if (name == "spiral") { return Scheme::Spiral; }
  return std::nullopt;
}

int ScannerConfig::shots_per_excitation() const
{
  switch (scheme) {
  case Scheme::Cartesian: return matrix_pe;
  case Scheme::Radial: return spokes();
  case Scheme::Spiral: return interleaves();
  }
  return 0;
}

void validate(ScannerConfig const &c)
{
  if (!(c.tr_ms > 0.0) || !std::isfinite(c.tr_ms)) { fail(ErrorCode::InvalidArgument, "TR must be positive"); }
  if (c.nex < 1) { fail(ErrorCode::InvalidArgument, "NEX must be >= 1"); }
  if (c.matrix_pe < 8 || c.matrix_fe < 8 || c.matrix_pe % 2 || c.matrix_fe % 2) {
    fail(ErrorCode::InvalidArgument, "matrix dimensions must be even and >= 8");
  }
  if (c.radial_spokes < 0 || c.spiral_interleaves < 0 || c.spiral_turns < 0.0 || !std::isfinite(c.spiral_turns)) {
    fail(ErrorCode::InvalidArgument, "scheme-specific counts must be >= 1 (or 0 for the default)");
  }
  if (c.fov_mm < 0.0 || !std::isfinite(c.fov_mm)) { fail(ErrorCode::InvalidArgument, "FOV must be non-negative"); }
  if (c.scheme == Scheme::Spiral) {
    long const budget = static_cast<long>(c.matrix_pe) * c.matrix_fe;
    if (budget % c.interleaves() != 0) {
      fail(ErrorCode::InvalidArgument,
           "spiral interleaves (" + std::to_string(c.interleaves()) + ") must divide the sample budget " +
             std::to_string(budget));
    }
  }
}

std::size_t SamplingPlan::samples_per_excitation() const
{
  std::size_t n = 0;
  for (int s = 0; s < shots_per_excitation && s < n_shots_total(); ++s) {
    n += shots[s].samples.size();
  }
  return n;
}

std::size_t SamplingPlan::total_samples() const
{
  std::size_t n = 0;
  for (auto const &s : shots) {
    n += s.samples.size();
  }
  return n;
}

std::vector<KPoint> SamplingPlan::excitation_coords() const
{
  std::vector<KPoint> out;
  out.reserve(samples_per_excitation());
  for (int s = 0; s < shots_per_excitation && s < n_shots_total(); ++s) {
    out.insert(out.end(), shots[s].samples.begin(), shots[s].samples.end());
  }
  return out;
}

double kmax(ScannerConfig const &config) { return 0.5 * (config.matrix_fe - 1) / config.matrix_fe; }

namespace {

SamplingPlan repeat_for_nex(ScannerConfig const &config, std::vector<Shot> excitation)
{
  SamplingPlan plan;
  plan.config = config;
  plan.shots_per_excitation = static_cast<int>(excitation.size());
  plan.shots.reserve(excitation.size() * config.nex);
  int t = 0;
  for (int e = 0; e < config.nex; ++e) {
    for (auto const &shot : excitation) {
      plan.shots.push_back(Shot{t, t, shot.samples});
      ++t;
    }
  }
  return plan;
}

void require_scheme(ScannerConfig const &config, Scheme scheme)
{
  validate(config);
  if (config.scheme != scheme) {
    fail(ErrorCode::InvalidArgument, "plan builder for " + std::string(to_string(scheme)) + " given a " +
                                       std::string(to_string(config.scheme)) + " config");
  }
}

} // namespace

SamplingPlan cartesian_plan(ScannerConfig const &config)
{
  require_scheme(config, Scheme::Cartesian);
  int const pe = config.matrix_pe;
  int const fe = config.matrix_fe;
  std::vector<Shot> lines(pe);
  for (int i = 0; i < pe; ++i) {
    double const ky = static_cast<double>(i - pe / 2) / pe;
    lines[i].samples.resize(fe);
    for (int j = 0; j < fe; ++j) {
      lines[i].samples[j] = {static_cast<double>(j - fe / 2) / fe, ky};
    }
  }
  return repeat_for_nex(config, std::move(lines));
}

std::vector<KPoint> radial_spoke(double angle_rad, int n_samples)
{
  std::vector<KPoint> spoke(n_samples);
  double const c = std::cos(angle_rad);
  double const s = std::sin(angle_rad);
  for (int j = 0; j < n_samples; ++j) {
    // Spacing 1/n from -kmax to +kmax, kmax = 0.5 (n - 1) / n.
    double const k = (j - 0.5 * (n_samples - 1)) / n_samples;
    spoke[j] = {k * c, k * s};
  }
  return spoke;
}

double spoke_angle(int s, int n, SpokeOrdering ordering)
{
  if (ordering == SpokeOrdering::GoldenAngle) {
    double const golden = std::numbers::pi * (std::sqrt(5.0) - 1.0) / 2.0; // 111.25 deg
    return std::fmod(s * golden, std::numbers::pi);
  }
  return s * std::numbers::pi / n;
}

SamplingPlan radial_plan(ScannerConfig const &config)
{
  require_scheme(config, Scheme::Radial);
  int const n = config.spokes();
  std::vector<Shot> spokes(n);
  for (int s = 0; s < n; ++s) {
    spokes[s].samples = radial_spoke(spoke_angle(s, n, config.spoke_ordering), config.matrix_fe);
  }
  return repeat_for_nex(config, std::move(spokes));
}

SamplingPlan spiral_plan(ScannerConfig const &config)
{
  require_scheme(config, Scheme::Spiral);
  int const arms = config.interleaves();
  long const per_arm = static_cast<long>(config.matrix_pe) * config.matrix_fe / arms;
  double const turns = config.turns();
  double const k_max = kmax(config);
  std::vector<Shot> shots(arms);
  for (int m = 0; m < arms; ++m) {
    shots[m].samples.resize(per_arm);
    double const phase0 = 2.0 * std::numbers::pi * m / arms;
    for (long j = 0; j < per_arm; ++j) {
      double const s = static_cast<double>(j) / per_arm;
      double const r = k_max * s;
      double const phi = 2.0 * std::numbers::pi * turns * s + phase0;
      shots[m].samples[j] = {r * std::cos(phi), r * std::sin(phi)};
    }
  }
  return repeat_for_nex(config, std::move(shots));
}

SamplingPlan make_plan(ScannerConfig const &config)
{
  switch (config.scheme) {
  case Scheme::Cartesian: return cartesian_plan(config);
  case Scheme::Radial: return radial_plan(config);
  case Scheme::Spiral: return spiral_plan(config);
  }
  fail(ErrorCode::InvalidArgument, "unknown scheme");
}

double scan_time_s(ScannerConfig const &config)
{
  // Only the timing fields matter here; odd line counts are fine.
  if (!(config.tr_ms > 0.0) || !std::isfinite(config.tr_ms)) { fail(ErrorCode::InvalidArgument, "TR must be positive"); }
  if (config.nex < 1) { fail(ErrorCode::InvalidArgument, "NEX must be >= 1"); }
  if (config.matrix_pe < 1 || config.radial_spokes < 0 || config.spiral_interleaves < 0) {
    fail(ErrorCode::InvalidArgument, "line and shot counts must be positive");
  }
  return static_cast<double>(config.shots_per_excitation()) * config.nex * config.tr_ms / 1000.0;
}

std::vector<PlanViolation> validate_plan(SamplingPlan const &plan)
{
  std::vector<PlanViolation> out;
  auto const &cfg = plan.config;
  if (plan.shots.empty()) {
    out.push_back({ViolationKind::Structure, "plan has no shots"});
    return out;
  }
  for (std::size_t i = 0; i < plan.shots.size(); ++i) {
    auto const &shot = plan.shots[i];
    if (shot.time_index_tr != static_cast<int>(i)) {
      out.push_back({ViolationKind::Timing, "shot " + std::to_string(i) + " has time index " +
                                              std::to_string(shot.time_index_tr) + ", expected " + std::to_string(i)});
    }
    if (shot.samples.empty()) { out.push_back({ViolationKind::Structure, "shot " + std::to_string(i) + " is empty"}); }
    for (auto const &k : shot.samples) {
      bool const ok = std::isfinite(k.kx) && std::isfinite(k.ky) && k.kx >= -0.5 && k.kx < 0.5 && k.ky >= -0.5 &&
                      k.ky < 0.5;
      if (!ok) {
        out.push_back({ViolationKind::Bounds, "shot " + std::to_string(i) + " has sample (" + std::to_string(k.kx) +
                                                ", " + std::to_string(k.ky) + ") outside [-0.5, 0.5)"});
        break;
      }
    }
  }

  int const per_exc = plan.shots_per_excitation;
  if (per_exc <= 0 || plan.n_shots_total() != per_exc * cfg.nex) {
    out.push_back({ViolationKind::Structure, "shot count " + std::to_string(plan.n_shots_total()) +
                                               " is not shots-per-excitation x NEX"});
    return out;
  }
  std::size_t const budget = static_cast<std::size_t>(cfg.matrix_pe) * cfg.matrix_fe;
  for (int e = 0; e < cfg.nex; ++e) {
    std::size_t count = 0;
    for (int s = 0; s < per_exc; ++s) {
      count += plan.shots[e * per_exc + s].samples.size();
    }
    if (count != budget) {
      out.push_back({ViolationKind::Budget, "excitation " + std::to_string(e) + " has " + std::to_string(count) +
                                              " samples, expected " + std::to_string(budget)});
    }
  }

  if (cfg.scheme == Scheme::Cartesian) {
    int const fe = cfg.matrix_fe;
    int const pe = cfg.matrix_pe;
    for (int e = 0; e < cfg.nex; ++e) {
      std::vector<int> hits(budget, 0);
      bool off_grid = false;
      for (int s = 0; s < per_exc; ++s) {
        for (auto const &k : plan.shots[e * per_exc + s].samples) {
          double const u = k.kx * fe + fe / 2;
          double const v = k.ky * pe + pe / 2;
          long const iu = std::lround(u);
          long const iv = std::lround(v);
          if (std::abs(u - iu) > 1e-9 || std::abs(v - iv) > 1e-9 || iu < 0 || iu >= fe || iv < 0 || iv >= pe) {
            off_grid = true;
            continue;
          }
          ++hits[iv * fe + iu];
        }
      }
      if (off_grid) { out.push_back({ViolationKind::Coverage, "Cartesian excitation " + std::to_string(e) + " has off-grid samples"}); }
      std::size_t missing = 0;
      std::size_t repeated = 0;
      for (int h : hits) {
        missing += h == 0;
        repeated += h > 1;
      }
      if (missing || repeated) {
        out.push_back({ViolationKind::Coverage, "Cartesian excitation " + std::to_string(e) + ": " +
                                                  std::to_string(missing) + " grid points missing, " +
                                                  std::to_string(repeated) + " repeated"});
      }
    }
  }
  return out;
}

void write_plan_csv(SamplingPlan const &plan, std::ostream &out)
{
  out << "shot,time_index,kx,ky\n" << std::setprecision(17);
  for (auto const &shot : plan.shots) {
    for (auto const &k : shot.samples) {
      out << shot.index << ',' << shot.time_index_tr << ',' << k.kx << ',' << k.ky << '\n';
    }
  }
}

void write_plan_csv(SamplingPlan const &plan, std::string const &path)
{
  std::ofstream f(path);
  if (!f) { fail(ErrorCode::Io, "cannot open " + path + " for writing"); }
  write_plan_csv(plan, f);
  if (!f) { fail(ErrorCode::Io, "failed writing " + path); }
}

} // namespace mrsim
