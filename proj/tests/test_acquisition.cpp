#include "core/acquisition.hpp"
#include "core/error.hpp"
#include "core/phantom.hpp"
#include "support.hpp"

#include <catch_amalgamated.hpp>

#include <numbers>

using namespace mrsim;
using Catch::Matchers::WithinAbs;

namespace {

// Random values with a zero border, so integer shifts up to `border` pixels
// lose nothing at the edge.
ImageSlice padded_random(int n, int border, std::uint64_t seed)
{
  auto img = random_image(n, n, seed);
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      if (x < border || y < border || x >= n - border || y >= n - border) { img.at(x, y) = 0.0; }
    }
  }
  return img;
}

ScannerConfig config(Scheme scheme, int n)
{
  ScannerConfig c;
  c.scheme = scheme;
  c.matrix_pe = n;
  c.matrix_fe = n;
  return c;
}

MotionTrajectory constant_shift(std::size_t n, double tx, double ty)
{
  auto t = identity_trajectory(n, 400.0);
  for (auto &p : t.poses) {
    p.tx_mm = tx;
    p.ty_mm = ty;
  }
  return t;
}

} // namespace

TEST_CASE("apply_rigid examples")
{
  auto const img = random_image(16, 16, 1);
  CHECK(apply_rigid(img, RigidPose{}) == img);

  auto const shifted = apply_rigid(img, RigidPose{.tx_mm = 3.0});
  for (int y = 0; y < 16; ++y) {
    for (int x = 0; x < 16; ++x) {
      CHECK(shifted.at(x, y) == (x >= 3 ? img.at(x - 3, y) : 0.0));
    }
  }

  // Spacing converts millimetres to pixels.
  auto coarse = img;
  coarse.pixel_spacing_mm = 2.0;
  CHECK(apply_rigid(coarse, RigidPose{.ty_mm = 4.0}).at(5, 7) == img.at(5, 5));

  // A cross centred on the rotation centre is invariant under 90 degrees.
  ImageSlice cross(32, 32);
  for (int i = 6; i <= 26; ++i) {
    for (int w = -2; w <= 2; ++w) {
      cross.at(i, 16 + w) = 1.0;
      cross.at(16 + w, i) = 1.0;
    }
  }
  auto const rot = apply_rigid(cross, RigidPose{.rz_deg = 90.0});
  double se = 0.0;
  for (std::size_t i = 0; i < cross.size(); ++i) {
    se += (rot.pixels[i] - cross.pixels[i]) * (rot.pixels[i] - cross.pixels[i]);
  }
  CHECK(std::sqrt(se / cross.size()) <= 1e-6);

  try {
    apply_rigid(img, RigidPose{.tz_mm = 1.0});
    FAIL("through-plane motion accepted");
  } catch (Error const &e) {
    CHECK(e.code() == ErrorCode::Unsupported);
  }
  CHECK(apply_rigid(img, RigidPose{.tz_mm = 1.0}, true) == img);
}

TEST_CASE("zero motion Cartesian acquisition is the centered DFT")
{
  auto const img = shepp_logan(64, 64);
  auto const plan = make_plan(config(Scheme::Cartesian, 64));
  auto const acq = simulate_acquisition(img, identity_trajectory(64, 400.0), plan);
  auto const g = forward_grid(img);
  REQUIRE(acq.values.size() == 64u * 64u);
  CHECK(rel_error(acq.values, g.values) <= 1e-9);
  CHECK(max_abs_diff(grid_reconstruct(acq), img) <= 1e-9);
}

TEST_CASE("constant translation multiplies by the phase ramp")
{
  auto const img = padded_random(32, 5, 17);
  double const tx = 3.0;
  double const ty = -2.0;
  for (auto scheme : {Scheme::Cartesian, Scheme::Radial, Scheme::Spiral}) {
    auto const plan = make_plan(config(scheme, 32));
    auto const coords = plan.excitation_coords();
    auto expect = direct_dft_oracle(img, coords);
    for (std::size_t j = 0; j < coords.size(); ++j) {
      expect[j] *= std::polar(1.0, -2.0 * std::numbers::pi * (coords[j].kx * tx + coords[j].ky * ty));
    }
    auto const traj = constant_shift(plan.n_shots_total(), tx, ty);
    auto const direct = simulate_acquisition(img, traj, plan, {.off_grid = OffGridMode::Direct});
    CHECK(rel_error(direct.values, expect) <= 1e-6);
    auto const interp = simulate_acquisition(img, traj, plan);
    CHECK(rel_error(interp.values, expect) <= 1e-4);
  }
}

TEST_CASE("step motion assembles rows of two spectra")
{
  // 16: both halves are short groups (line by line); 32: full FFT per group.
  for (int n : {16, 32}) {
    auto const img = padded_random(n, 3, 5);
    auto const plan = make_plan(config(Scheme::Cartesian, n));
    auto traj = identity_trajectory(n, 400.0);
    for (int i = n / 2; i < n; ++i) {
      traj.poses[i].tx_mm = 2.0;
    }
    auto const acq = simulate_acquisition(img, traj, plan);
    auto const before = forward_grid(img);
    auto const after = forward_grid(apply_rigid(img, RigidPose{.tx_mm = 2.0}));
    for (int v = 0; v < n; ++v) {
      auto const &src = v < n / 2 ? before : after;
      for (int u = 0; u < n; ++u) {
        CHECK(std::abs(acq.values[static_cast<std::size_t>(v) * n + u] - src.at(u, v)) <= 1e-9 * n * n);
      }
    }
  }
}

TEST_CASE("rotation per shot matches a full transform of the rotated image")
{
  auto const img = shepp_logan(32, 32);
  auto const plan = make_plan(config(Scheme::Cartesian, 32));
  auto traj = identity_trajectory(32, 400.0);
  traj.poses[7].rz_deg = 4.0;
  traj.poses[7].ty_mm = 0.7;
  auto const acq = simulate_acquisition(img, traj, plan);
  auto const moved = forward_grid(apply_rigid(img, traj.poses[7]));
  for (int u = 0; u < 32; ++u) {
    CHECK(std::abs(acq.values[7 * 32 + u] - moved.at(u, 7)) <= 1e-9 * 32 * 32);
  }
}

TEST_CASE("NEX averaging and thread count")
{
  auto const img = shepp_logan(32, 32);
  for (auto scheme : {Scheme::Cartesian, Scheme::Radial, Scheme::Spiral}) {
    auto c = config(scheme, 32);
    auto const one = simulate_acquisition(img, identity_trajectory(32, 400.0), make_plan(c));
    c.nex = 2;
    auto const plan2 = make_plan(c);
    auto const two = simulate_acquisition(img, identity_trajectory(64, 400.0), plan2);
    CHECK(two.nex_averaged);
    CHECK(rel_error(two.values, one.values) <= 1e-14);

    auto const traj = generate_random_trajectory(64, 400.0, {1.0, 0.6}, 3, {.dof = MotionDof::InPlane});
    auto const a = simulate_acquisition(img, traj, plan2, {.threads = 1});
    auto const b = simulate_acquisition(img, traj, plan2, {.threads = 3});
    CHECK(a.values == b.values);
  }
}

TEST_CASE("simulate_acquisition argument checks")
{
  auto const img = shepp_logan(32, 32);
  auto const plan = make_plan(config(Scheme::Cartesian, 32));
  CHECK_THROWS_AS(simulate_acquisition(img, identity_trajectory(10, 400.0), plan), Error);
  CHECK_THROWS_AS(simulate_acquisition(shepp_logan(16, 16), identity_trajectory(32, 400.0), plan), Error);
}

TEST_CASE("corrupt_slice")
{
  auto const img = shepp_logan(32, 32);
  for (auto scheme : {Scheme::Cartesian, Scheme::Radial, Scheme::Spiral}) {
    auto const c = config(scheme, 32);
    auto const still = corrupt_slice(img, c, {0.0, 0.0}, 5);
    CHECK(still.corrupted == still.clean);
    CHECK(still.metrics.rmse == 0.0);
    for (auto v : still.error_map.values) {
      CHECK(v == 0);
    }

    auto const a = corrupt_slice(img, c, {1.0, 0.6}, 9);
    auto const b = corrupt_slice(img, c, {1.0, 0.6}, 9);
    CHECK(a == b);
    CHECK(a.metrics.nrmse > 0.0);
    CHECK_THAT(severity_rms(a.trajectory).rms_displacement_mm, WithinAbs(1.0, 1e-9));
    for (auto const &p : a.trajectory.poses) {
      CHECK(p.is_in_plane());
    }
  }
  // The clean reconstruction of a Cartesian plan is the image itself (float32).
  auto const cart = corrupt_slice(img, config(Scheme::Cartesian, 32), {1.0, 0.6}, 1);
  CHECK(max_abs_diff(cart.clean, img) <= 1e-6);
  CHECK_THROWS_AS(corrupt_slice(shepp_logan(16, 16), config(Scheme::Cartesian, 32), {1.0, 0.6}, 1), Error);
}
