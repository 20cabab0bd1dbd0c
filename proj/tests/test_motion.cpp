#include "core/error.hpp"
#include "core/motion.hpp"
#include "support.hpp"

#include <catch_amalgamated.hpp>

#include <sstream>

using namespace mrsim;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Value at the window center of the least-squares polynomial through the
// mirror-padded window, by normal equations and Gaussian elimination.
std::vector<double> sgolay_oracle(std::vector<double> const &x, int window, int order)
{
  int const n = static_cast<int>(x.size());
  int const h = window / 2;
  int const m = order + 1;
  auto value = [&](int j) {
    if (j < 0) { j = -j; }
    if (j >= n) { j = 2 * (n - 1) - j; }
    return x[j];
  };
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    std::vector<double> a(m * m, 0.0);
    std::vector<double> b(m, 0.0);
    for (int t = -h; t <= h; ++t) {
      double const y = value(i + t);
      for (int r = 0; r < m; ++r) {
        b[r] += std::pow(t, r) * y;
        for (int c = 0; c < m; ++c) {
          a[r * m + c] += std::pow(t, r + c);
        }
      }
    }
    for (int col = 0; col < m; ++col) {
      int piv = col;
      for (int r = col + 1; r < m; ++r) {
        if (std::abs(a[r * m + col]) > std::abs(a[piv * m + col])) { piv = r; }
      }
      for (int c = 0; c < m; ++c) {
        std::swap(a[col * m + c], a[piv * m + c]);
      }
      std::swap(b[col], b[piv]);
      for (int r = col + 1; r < m; ++r) {
        double const f = a[r * m + col] / a[col * m + col];
        for (int c = col; c < m; ++c) {
          a[r * m + c] -= f * a[col * m + c];
        }
        b[r] -= f * b[col];
      }
    }
    std::vector<double> coef(m);
    for (int r = m - 1; r >= 0; --r) {
      double s = b[r];
      for (int c = r + 1; c < m; ++c) {
        s -= a[r * m + c] * coef[c];
      }
      coef[r] = s / a[r * m + r];
    }
    out[i] = coef[0];
  }
  return out;
}

MotionTrajectory constant_tx(std::size_t n, double tx)
{
  MotionTrajectory t = identity_trajectory(n, 400.0);
  for (auto &p : t.poses) {
    p.tx_mm = tx;
  }
  return t;
}

} // namespace

TEST_CASE("sgolay reproduces a constant sequence")
{
  std::vector<double> const x{5, 5, 5, 5, 5};
  auto const y = smooth_savitzky_golay(x, 3, 1);
  REQUIRE(y.size() == x.size());
  for (double v : y) {
    CHECK_THAT(v, WithinAbs(5.0, 1e-12));
  }
}

TEST_CASE("sgolay reproduces a quadratic at interior points")
{
  std::vector<double> x;
  for (int i = 0; i <= 10; ++i) {
    x.push_back(static_cast<double>(i) * i);
  }
  auto const y = smooth_savitzky_golay(x, 5, 2);
  for (int i = 2; i <= 8; ++i) {
    CHECK_THAT(y[i], WithinAbs(x[i], 1e-10));
  }
  auto const oracle = sgolay_oracle(x, 5, 2);
  for (int i = 0; i <= 10; ++i) {
    CHECK_THAT(y[i], WithinAbs(oracle[i], 1e-10));
  }
}

TEST_CASE("sgolay matches brute-force sliding least squares")
{
  auto const [window, order] = GENERATE(table<int, int>({{11, 3}, {5, 2}, {7, 1}, {9, 4}}));
  Xoshiro256 rng(99);
  std::vector<double> x(64);
  for (auto &v : x) {
    v = rng.normal();
  }
  auto const y = smooth_savitzky_golay(x, window, order);
  auto const oracle = sgolay_oracle(x, window, order);
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK_THAT(y[i], WithinAbs(oracle[i], 1e-9));
  }
}

TEST_CASE("sgolay polynomial reproduction property")
{
  Xoshiro256 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    int const order = 1 + static_cast<int>(rng.below(4));
    int const window = 2 * (order + 1 + static_cast<int>(rng.below(4))) + 1;
    std::vector<double> coef(order + 1);
    for (auto &c : coef) {
      c = rng.normal();
    }
    std::vector<double> x(40);
    for (int i = 0; i < 40; ++i) {
      double const t = (i - 20) / 10.0;
      double v = 0.0;
      for (int d = order; d >= 0; --d) {
        v = v * t + coef[d];
      }
      x[i] = v;
    }
    auto const y = smooth_savitzky_golay(x, window, order);
    for (int i = window / 2; i < 40 - window / 2; ++i) {
      CHECK_THAT(y[i], WithinAbs(x[i], 1e-10));
    }
  }
}

TEST_CASE("sgolay parameter errors")
{
  std::vector<double> const x(20, 1.0);
  CHECK_THROWS_AS(smooth_savitzky_golay(x, 4, 2), Error);
  CHECK_THROWS_AS(smooth_savitzky_golay(x, 5, 5), Error);
  CHECK_THROWS_AS(smooth_savitzky_golay(std::vector<double>(3, 1.0), 7, 2), Error);
}

TEST_CASE("severity_rms examples")
{
  auto const s = severity_rms(constant_tx(10, 1.0));
  CHECK_THAT(s.rms_displacement_mm, WithinRel(1.0, 1e-15));
  CHECK(s.rms_rotation_deg == 0.0);

  MotionTrajectory two = identity_trajectory(2, 400.0);
  two.poses[0].tx_mm = 3.0;
  two.poses[1].tx_mm = -4.0;
  CHECK_THAT(severity_rms(two).rms_displacement_mm, WithinAbs(3.5355, 5e-5));
  CHECK_THAT(severity_rms(two).rms_displacement_mm, WithinRel(std::sqrt(12.5), 1e-15));

  CHECK(severity_rms(identity_trajectory(7, 400.0)) == SeverityStats{});
}

TEST_CASE("severity_rms is homogeneous")
{
  auto const t = generate_random_trajectory(100, 400.0, {1.3, 0.7}, 3);
  auto const base = severity_rms(t);
  for (double c : {-2.5, 0.5, 3.0}) {
    auto scaled = t;
    for (auto &p : scaled.poses) {
      p.tx_mm *= c;
      p.ty_mm *= c;
      p.tz_mm *= c;
    }
    auto const s = severity_rms(scaled);
    CHECK_THAT(s.rms_displacement_mm, WithinRel(std::abs(c) * base.rms_displacement_mm, 1e-14));
    CHECK(s.rms_rotation_deg == base.rms_rotation_deg);
  }
}

TEST_CASE("rescale_to_target")
{
  auto t = generate_random_trajectory(50, 400.0, {2.0, 1.2}, 11);
  auto const half = rescale_to_target(t, {1.0, 0.6});
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK_THAT(half.poses[i].tx_mm, WithinAbs(0.5 * t.poses[i].tx_mm, 1e-12));
    CHECK_THAT(half.poses[i].rz_deg, WithinAbs(0.5 * t.poses[i].rz_deg, 1e-12));
  }
  auto const s = severity_rms(half);
  CHECK_THAT(s.rms_displacement_mm, WithinRel(1.0, 1e-9));
  CHECK_THAT(s.rms_rotation_deg, WithinRel(0.6, 1e-9));

  auto const zero = rescale_to_target(t, {0.0, 0.0});
  for (auto const &p : zero.poses) {
    CHECK(p.is_identity());
  }
  CHECK_THROWS_AS(rescale_to_target(identity_trajectory(5, 400.0), {1.0, 0.0}), Error);
}

TEST_CASE("generate_random_trajectory hits the target and is deterministic")
{
  auto const t = generate_random_trajectory(208, 400.0, {1.0, 0.6}, 42);
  REQUIRE(t.size() == 208);
  auto const s = severity_rms(t);
  CHECK_THAT(s.rms_displacement_mm, WithinRel(1.0, 1e-9));
  CHECK_THAT(s.rms_rotation_deg, WithinRel(0.6, 1e-9));

  CHECK(generate_random_trajectory(300, 400.0, {1.0, 0.6}, 7) ==
        generate_random_trajectory(300, 400.0, {1.0, 0.6}, 7));
  CHECK_FALSE(generate_random_trajectory(300, 400.0, {1.0, 0.6}, 7) ==
              generate_random_trajectory(300, 400.0, {1.0, 0.6}, 8));

  auto const zero = generate_random_trajectory(30, 400.0, {0.0, 0.0}, 9);
  CHECK(zero == identity_trajectory(30, 400.0));

  auto const planar = generate_random_trajectory(64, 400.0, {1.0, 0.6}, 1, {.dof = MotionDof::InPlane});
  for (auto const &p : planar.poses) {
    CHECK(p.is_in_plane());
  }
  CHECK_THAT(severity_rms(planar).rms_displacement_mm, WithinRel(1.0, 1e-9));

  CHECK_THROWS_AS(generate_random_trajectory(0, 400.0, {1.0, 0.6}, 1), Error);
}

TEST_CASE("pose_at_shot lookup")
{
  MotionTrajectory t = identity_trajectory(3, 400.0);
  t.poses[1].ty_mm = 2.0;
  CHECK(pose_at_shot(t, 1).ty_mm == 2.0);
  CHECK(pose_at_shot(identity_trajectory(4, 400.0), 3).is_identity());
  CHECK_THROWS_AS(pose_at_shot(t, 3), Error);
}

TEST_CASE("trajectory CSV round trip")
{
  auto const t = generate_random_trajectory(25, 400.0, {1.0, 0.6}, 4);
  std::stringstream ss;
  write_trajectory_csv(t, ss);
  std::string header;
  std::getline(std::stringstream(ss.str()), header);
  CHECK(header == "shot,time_s,tx_mm,ty_mm,tz_mm,rx_deg,ry_deg,rz_deg");
  auto const back = read_trajectory_csv(ss);
  CHECK(back == t);

  std::stringstream bad("shot,tx\n0,1\n");
  CHECK_THROWS_AS(read_trajectory_csv(bad), Error);
}
