#include "motion.hpp"

#include "error.hpp"
#include "rng.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace mrsim {

namespace {

constexpr int kAxes = 6;

double &axis(RigidPose &p, int a)
{
  switch (a) {
  case 0: return p.tx_mm;
  case 1: return p.ty_mm;
  case 2: return p.tz_mm;
  case 3: return p.rx_deg;
  case 4: return p.ry_deg;
  default: return p.rz_deg;
  }
}

bool axis_enabled(MotionDof dof, int a) { return dof == MotionDof::Six || a == 0 || a == 1 || a == 5; }

} // namespace

MotionTrajectory identity_trajectory(std::size_t n_shots, double tr_ms)
{
  if (n_shots == 0) { fail(ErrorCode::InvalidArgument, "trajectory must contain at least one shot"); }
  return MotionTrajectory{std::vector<RigidPose>(n_shots), tr_ms};
}

std::vector<double> savitzky_golay_weights(int window, int order)
{
  if (window < 1 || window % 2 == 0) { fail(ErrorCode::InvalidArgument, "Savitzky-Golay window must be odd"); }
  if (order < 0 || order >= window) {
    fail(ErrorCode::InvalidArgument, "Savitzky-Golay order must be less than the window");
  }
  int const half = window / 2;
  int const cols = order + 1;
  // Columns of the Vandermonde matrix on scaled offsets, orthonormalised by
  // modified Gram-Schmidt (two passes). The center weights are then row
  // `half` of the projector Q Q^T.
  std::vector<std::vector<double>> q(cols, std::vector<double>(window));
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < window; ++r) {
      double const t = half ? static_cast<double>(r - half) / half : 0.0;
      q[c][r] = std::pow(t, c);
    }
    for (int pass = 0; pass < 2; ++pass) {
      for (int p = 0; p < c; ++p) {
        double dot = 0.0;
        for (int r = 0; r < window; ++r) {
          dot += q[p][r] * q[c][r];
        }
        for (int r = 0; r < window; ++r) {
          q[c][r] -= dot * q[p][r];
        }
      }
    }
    double norm = 0.0;
    for (double const v : q[c]) {
      norm += v * v;
    }
    norm = std::sqrt(norm);
    for (double &v : q[c]) {
      v /= norm;
    }
  }
  std::vector<double> weights(window, 0.0);
  for (int r = 0; r < window; ++r) {
    for (int c = 0; c < cols; ++c) {
      weights[r] += q[c][half] * q[c][r];
    }
  }
  return weights;
}

std::vector<double> smooth_savitzky_golay(std::span<double const> values, int window, int order)
{
  auto const weights = savitzky_golay_weights(window, order);
  if (order < 1) { fail(ErrorCode::InvalidArgument, "Savitzky-Golay order must be >= 1"); }
  long const n = static_cast<long>(values.size());
  if (n == 0) { return {}; }
  if (window > 2 * n - 1) {
    fail(ErrorCode::InvalidArgument, "Savitzky-Golay window exceeds mirror-padded length");
  }
  int const half = window / 2;
  auto mirrored = [&](long i) {
    if (i < 0) { i = -i; }
    if (i >= n) { i = 2 * (n - 1) - i; }
    return values[static_cast<std::size_t>(i)];
  };
  std::vector<double> out(values.size());
  for (long i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = -half; j <= half; ++j) {
      acc += weights[j + half] * mirrored(i + j);
    }
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

SeverityStats severity_rms(MotionTrajectory const &trajectory)
{
  if (trajectory.poses.empty()) { fail(ErrorCode::InvalidArgument, "severity of an empty trajectory"); }
  double disp = 0.0;
  double rot = 0.0;
  for (auto const &p : trajectory.poses) {
    disp += p.tx_mm * p.tx_mm + p.ty_mm * p.ty_mm + p.tz_mm * p.tz_mm;
    rot += p.rx_deg * p.rx_deg + p.ry_deg * p.ry_deg + p.rz_deg * p.rz_deg;
  }
  double const n = static_cast<double>(trajectory.poses.size());
  return {std::sqrt(disp / n), std::sqrt(rot / n)};
}

MotionTrajectory rescale_to_target(MotionTrajectory const &trajectory, SeverityStats const &target)
{
  if (!(target.rms_displacement_mm >= 0.0) || !(target.rms_rotation_deg >= 0.0) ||
      !std::isfinite(target.rms_displacement_mm) || !std::isfinite(target.rms_rotation_deg)) {
    fail(ErrorCode::InvalidArgument, "severity targets must be finite and non-negative");
  }
  auto const current = severity_rms(trajectory);
  auto factor = [](double want, double have, char const *group) {
    if (want == 0.0) { return 0.0; }
    if (have == 0.0) {
      fail(ErrorCode::Numeric, std::string("cannot rescale identically-zero ") + group + " to a nonzero target");
    }
    return want / have;
  };
  double const fd = factor(target.rms_displacement_mm, current.rms_displacement_mm, "translation");
  double const fr = factor(target.rms_rotation_deg, current.rms_rotation_deg, "rotation");
  MotionTrajectory out = trajectory;
  // Adding +0.0 turns the -0.0 produced by zero factors into +0.0.
  for (auto &p : out.poses) {
    p.tx_mm = p.tx_mm * fd + 0.0;
    p.ty_mm = p.ty_mm * fd + 0.0;
    p.tz_mm = p.tz_mm * fd + 0.0;
    p.rx_deg = p.rx_deg * fr + 0.0;
    p.ry_deg = p.ry_deg * fr + 0.0;
    p.rz_deg = p.rz_deg * fr + 0.0;
  }
  return out;
}

MotionTrajectory generate_random_trajectory(std::size_t n_shots,
                                            double tr_ms,
                                            SeverityStats const &target,
                                            std::uint64_t seed,
                                            TrajectoryOptions const &options)
{
  if (n_shots == 0) { fail(ErrorCode::InvalidArgument, "trajectory must contain at least one shot"); }
  if (!(tr_ms > 0.0)) { fail(ErrorCode::InvalidArgument, "TR must be positive"); }

  Xoshiro256 rng(seed);
  std::array<std::vector<double>, kAxes> walks;
  for (auto &w : walks) {
    w.assign(n_shots, 0.0);
  }
  // Increments are drawn shot-major so the stream does not depend on which
  // axes are enabled.
  std::array<double, kAxes> sum{};
  for (std::size_t i = 0; i < n_shots; ++i) {
    for (int a = 0; a < kAxes; ++a) {
      sum[a] += rng.normal();
      walks[a][i] = axis_enabled(options.dof, a) ? sum[a] : 0.0;
    }
  }

  // Short trajectories shrink the window to fit the mirror-padded length and
  // skip smoothing when the fit would be exact anyway.
  long const max_window = 2 * static_cast<long>(n_shots) - 1;
  int window = options.smoothing_window;
  if (window > max_window) { window = static_cast<int>(max_window % 2 ? max_window : max_window - 1); }
  bool const smooth = window > options.smoothing_order && options.smoothing_order >= 1;

  MotionTrajectory traj{std::vector<RigidPose>(n_shots), tr_ms};
  for (int a = 0; a < kAxes; ++a) {
    auto const series = smooth ? smooth_savitzky_golay(walks[a], window, options.smoothing_order) : walks[a];
    for (std::size_t i = 0; i < n_shots; ++i) {
      axis(traj.poses[i], a) = series[i];
    }
  }
  return rescale_to_target(traj, target);
}

RigidPose const &pose_at_shot(MotionTrajectory const &trajectory, std::size_t shot_index)
{
  if (shot_index >= trajectory.poses.size()) {
    fail(ErrorCode::OutOfRange,
         "shot index " + std::to_string(shot_index) + " outside trajectory of length " +
           std::to_string(trajectory.poses.size()));
  }
  return trajectory.poses[shot_index];
}

void validate(MotionTrajectory const &trajectory)
{
  if (trajectory.poses.empty()) { fail(ErrorCode::InvalidArgument, "trajectory must contain at least one shot"); }
  for (auto const &p : trajectory.poses) {
    RigidPose q = p;
    for (int a = 0; a < kAxes; ++a) {
      if (!std::isfinite(axis(q, a))) { fail(ErrorCode::InvalidArgument, "trajectory contains non-finite poses"); }
    }
  }
}

void write_trajectory_csv(MotionTrajectory const &trajectory, std::ostream &out)
{
  out << "shot,time_s,tx_mm,ty_mm,tz_mm,rx_deg,ry_deg,rz_deg\n";
  out << std::setprecision(17);
  for (std::size_t i = 0; i < trajectory.poses.size(); ++i) {
    auto const &p = trajectory.poses[i];
    out << i << ',' << static_cast<double>(i) * trajectory.tr_ms / 1000.0 << ',' << p.tx_mm << ',' << p.ty_mm << ','
        << p.tz_mm << ',' << p.rx_deg << ',' << p.ry_deg << ',' << p.rz_deg << '\n';
  }
}

void write_trajectory_csv(MotionTrajectory const &trajectory, std::string const &path)
{
  std::ofstream f(path);
  if (!f) { fail(ErrorCode::Io, "cannot open " + path + " for writing"); }
  write_trajectory_csv(trajectory, f);
  if (!f) { fail(ErrorCode::Io, "failed writing " + path); }
}

MotionTrajectory read_trajectory_csv(std::istream &in)
{
  std::string line;
  if (!std::getline(in, line) || line.rfind("shot,time_s,tx_mm", 0) != 0) {
    fail(ErrorCode::Io, "trajectory CSV is missing its header");
  }
  MotionTrajectory traj;
  std::vector<double> times;
  while (std::getline(in, line)) {
    if (line.empty()) { continue; }
    std::istringstream row(line);
    std::array<double, 8> v{};
    for (std::size_t k = 0; k < v.size(); ++k) {
      std::string cell;
      if (!std::getline(row, cell, ',')) { fail(ErrorCode::Io, "short trajectory CSV row: " + line); }
      try {
        v[k] = std::stod(cell);
      } catch (std::exception const &) {
        fail(ErrorCode::Io, "bad number in trajectory CSV: " + cell);
      }
    }
    if (static_cast<std::size_t>(v[0]) != traj.poses.size()) { fail(ErrorCode::Io, "trajectory CSV rows out of order"); }
    times.push_back(v[1]);
    traj.poses.push_back({v[2], v[3], v[4], v[5], v[6], v[7]});
  }
  if (times.size() >= 2) { traj.tr_ms = times[1] * 1000.0; }
  validate(traj);
  return traj;
}

MotionTrajectory read_trajectory_csv(std::string const &path)
{
  std::ifstream f(path);
  if (!f) { fail(ErrorCode::Io, "cannot open " + path); }
  return read_trajectory_csv(f);
}

} // namespace mrsim
