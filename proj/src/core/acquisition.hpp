#pragma once

#include "image.hpp"
#include "kspace.hpp"
#include "metrics.hpp"
#include "motion.hpp"
#include "nufft.hpp"
#include "recon.hpp"
#include "sampling.hpp"

#include <cstdint>
#include <string>

namespace mrsim {

// Resamples `image` under the inverse of (rotate by rz_deg about the image
// center, then translate by (tx, ty) mm). Bilinear, zero outside the FOV.
// Through-plane components must be zero unless ignore_through_plane is set.
ImageSlice apply_rigid(ImageSlice const &image, RigidPose const &pose, bool ignore_through_plane = false);

enum class OffGridMode {
  Interpolated, // zero-padded FFT + spectral interpolation
  Direct,       // exact DFT sum per sample; small images only
};

struct AcquisitionOptions
{
  OffGridMode off_grid = OffGridMode::Interpolated;
  SpectralInterpParams interpolation{};
  bool ignore_through_plane = false;
  int threads = 1; // parallel over distinct poses; results do not depend on it
};

// Samples the spectrum of the moving object along the plan. Shot s sees
// apply_rigid(image, pose_at_shot(traj, time_index_tr)). With nex > 1 the
// excitations are complex-averaged.
KSpaceAcquisition simulate_acquisition(ImageSlice const &image,
                                       MotionTrajectory const &trajectory,
                                       SamplingPlan const &plan,
                                       AcquisitionOptions const &options = {});

struct SimulationRecord
{
  std::string id;
  ScannerConfig config;
  std::uint64_t seed = 0;
  SeverityStats severity;
  ImageSlice clean;
  ImageSlice corrupted;
  ErrorMap error_map;
  MetricsReport metrics;
  MotionTrajectory trajectory;

  bool operator==(SimulationRecord const &) const = default;
};

struct CorruptOptions
{
  AcquisitionOptions acquisition{};
  GriddingParams gridding{};
  TrajectoryOptions trajectory{.dof = MotionDof::InPlane};
};

// End to end: plan, random trajectory at the target severity, acquisition,
// reconstruction of the clean and corrupted images (stored as float32
// precision), error map and metrics. The image must be matrix_fe wide and
// matrix_pe high.
SimulationRecord corrupt_slice(ImageSlice const &image,
                               ScannerConfig const &config,
                               SeverityStats const &severity,
                               std::uint64_t seed,
                               CorruptOptions const &options = {});

} // namespace mrsim
