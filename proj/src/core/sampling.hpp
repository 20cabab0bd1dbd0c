#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mrsim {

enum class Scheme { Cartesian, Radial, Spiral };
enum class SpokeOrdering { Sequential, GoldenAngle };

std::string_view to_string(Scheme scheme);
std::optional<Scheme> parse_scheme(std::string_view name);

// Zero-valued scheme counts select the defaults documented on the accessors.
struct ScannerConfig
{
  double tr_ms = 400.0;
  int nex = 1;
  int matrix_pe = 256; // rows (ky)
  int matrix_fe = 256; // columns (kx)
  Scheme scheme = Scheme::Cartesian;
  int radial_spokes = 0;
  SpokeOrdering spoke_ordering = SpokeOrdering::Sequential;
  int spiral_interleaves = 0;
  double spiral_turns = 0.0;
  double fov_mm = 0.0; // 0: taken from the image

  // matrix_pe by default.
  int spokes() const { return radial_spokes > 0 ? radial_spokes : matrix_pe; }
  // matrix_pe by default, which keeps scan time equal to the other schemes.
  int interleaves() const { return spiral_interleaves > 0 ? spiral_interleaves : matrix_pe; }
  // matrix_pe / (2 * interleaves) by default: adjacent arms one k-space pixel apart.
  double turns() const { return spiral_turns > 0.0 ? spiral_turns : matrix_pe / (2.0 * interleaves()); }
  int shots_per_excitation() const;

  bool operator==(ScannerConfig const &) const = default;
};

void validate(ScannerConfig const &config);

// Normalised k-space coordinate in cycles/pixel, each component in [-0.5, 0.5).
struct KPoint
{
  double kx = 0.0;
  double ky = 0.0;
  bool operator==(KPoint const &) const = default;
};

struct Shot
{
  int index = 0;
  int time_index_tr = 0;
  std::vector<KPoint> samples;
};

struct SamplingPlan
{
  ScannerConfig config;
  std::vector<Shot> shots; // all excitations, in time order
  int shots_per_excitation = 0;

  int n_shots_total() const { return static_cast<int>(shots.size()); }
  std::size_t samples_per_excitation() const;
  std::size_t total_samples() const;
  // Coordinates of one excitation, shot-major.
  std::vector<KPoint> excitation_coords() const;
};

// Largest |k| reached by radial spokes and spiral arms.
double kmax(ScannerConfig const &config);

SamplingPlan cartesian_plan(ScannerConfig const &config);
SamplingPlan radial_plan(ScannerConfig const &config);
SamplingPlan spiral_plan(ScannerConfig const &config);
SamplingPlan make_plan(ScannerConfig const &config);

// Samples of one spoke through the origin at `angle_rad`, uniformly spaced on
// [-kmax, kmax] with kmax = 0.5 (n - 1) / n.
std::vector<KPoint> radial_spoke(double angle_rad, int n_samples);

// Angle of spoke s out of n under the given ordering.
double spoke_angle(int s, int n, SpokeOrdering ordering);

// shots per excitation x NEX x TR. Checks only the timing fields, so any
// positive line count is accepted.
double scan_time_s(ScannerConfig const &config);

enum class ViolationKind { Timing, Bounds, Budget, Coverage, Structure };

struct PlanViolation
{
  ViolationKind kind;
  std::string message;
};

std::vector<PlanViolation> validate_plan(SamplingPlan const &plan);

// CSV: shot,time_index,kx,ky with one row per sample.
void write_plan_csv(SamplingPlan const &plan, std::ostream &out);
void write_plan_csv(SamplingPlan const &plan, std::string const &path);

} // namespace mrsim
