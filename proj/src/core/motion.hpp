#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace mrsim {

// Absolute rigid pose relative to the reference (t = 0) frame. Rotations are
// about axes through the image center.
struct RigidPose
{
  double tx_mm = 0.0;
  double ty_mm = 0.0;
  double tz_mm = 0.0;
  double rx_deg = 0.0;
  double ry_deg = 0.0;
  double rz_deg = 0.0;

  bool operator==(RigidPose const &) const = default;
  bool is_identity() const { return *this == RigidPose{}; }
  bool is_in_plane() const { return tz_mm == 0.0 && rx_deg == 0.0 && ry_deg == 0.0; }
};

// One pose per TR shot; the pose holds for the whole shot.
struct MotionTrajectory
{
  std::vector<RigidPose> poses;
  double tr_ms = 0.0;

  std::size_t size() const { return poses.size(); }
  bool operator==(MotionTrajectory const &) const = default;
};

struct SeverityStats
{
  double rms_displacement_mm = 0.0;
  double rms_rotation_deg = 0.0;

  bool operator==(SeverityStats const &) const = default;
};

enum class MotionDof {
  Six,     // all six components random
  InPlane, // tx, ty and rz only; through-plane components stay zero
};

struct TrajectoryOptions
{
  MotionDof dof = MotionDof::Six;
  int smoothing_window = 11;
  int smoothing_order = 3;
};

MotionTrajectory identity_trajectory(std::size_t n_shots, double tr_ms);

// Per-axis Gaussian random walk (unit-variance increments, cumulative sum),
// Savitzky-Golay smoothed, then rescaled so severity_rms(result) == target.
MotionTrajectory generate_random_trajectory(std::size_t n_shots,
                                            double tr_ms,
                                            SeverityStats const &target,
                                            std::uint64_t seed,
                                            TrajectoryOptions const &options = {});

// Savitzky-Golay smoothing with mirror padding (reflection about the end
// samples, which are not repeated). Requires odd window, 1 <= order < window
// and window <= 2 * values.size() - 1.
std::vector<double> smooth_savitzky_golay(std::span<double const> values, int window, int order);

// Convolution weights producing the fitted value at the window center.
std::vector<double> savitzky_golay_weights(int window, int order);

SeverityStats severity_rms(MotionTrajectory const &trajectory);

MotionTrajectory rescale_to_target(MotionTrajectory const &trajectory, SeverityStats const &target);

RigidPose const &pose_at_shot(MotionTrajectory const &trajectory, std::size_t shot_index);

void validate(MotionTrajectory const &trajectory);

// CSV: shot,time_s,tx_mm,ty_mm,tz_mm,rx_deg,ry_deg,rz_deg
void write_trajectory_csv(MotionTrajectory const &trajectory, std::ostream &out);
void write_trajectory_csv(MotionTrajectory const &trajectory, std::string const &path);
MotionTrajectory read_trajectory_csv(std::istream &in);
MotionTrajectory read_trajectory_csv(std::string const &path);

} // namespace mrsim
