#include "core/error.hpp"
#include "core/sampling.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

using namespace mrsim;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ScannerConfig config(Scheme scheme, int pe = 16, int fe = 16, int nex = 1)
{
  ScannerConfig c;
  c.scheme = scheme;
  c.matrix_pe = pe;
  c.matrix_fe = fe;
  c.nex = nex;
  return c;
}

bool has(std::vector<PlanViolation> const &v, ViolationKind kind)
{
  for (auto const &x : v) {
    if (x.kind == kind) { return true; }
  }
  return false;
}

} // namespace

TEST_CASE("scan time examples")
{
  auto c = config(Scheme::Cartesian, 208, 256, 2);
  c.tr_ms = 400.0;
  CHECK(scan_time_s(c) == 166.4);

  auto t2 = config(Scheme::Cartesian, 187, 256, 1);
  t2.tr_ms = 5725.0;
  CHECK_THAT(scan_time_s(t2), WithinAbs(1070.575, 1e-9));

  auto one = config(Scheme::Spiral, 16, 16);
  one.spiral_interleaves = 1;
  one.tr_ms = 1000.0;
  CHECK(scan_time_s(one) == 1.0);
}

TEST_CASE("default schemes share scan time and sample budget")
{
  for (int n : {8, 16, 64, 256}) {
    double t0 = -1.0;
    for (auto s : {Scheme::Cartesian, Scheme::Radial, Scheme::Spiral}) {
      auto const c = config(s, n, n);
      auto const plan = make_plan(c);
      CHECK(plan.samples_per_excitation() == static_cast<std::size_t>(n) * n);
      CHECK(validate_plan(plan).empty());
      if (t0 < 0) { t0 = scan_time_s(c); }
      CHECK(scan_time_s(c) == t0);
    }
  }
}

TEST_CASE("cartesian plan")
{
  auto const p = cartesian_plan(config(Scheme::Cartesian, 8, 8));
  REQUIRE(p.n_shots_total() == 8);
  for (int i = 0; i < 8; ++i) {
    CHECK(p.shots[i].time_index_tr == i);
    CHECK(p.shots[i].samples.front().ky == (i - 4) / 8.0);
  }
  CHECK(p.shots[0].samples.front().ky == -0.5);
  CHECK(p.shots[6].samples.front().ky == 0.25);

  auto const big = cartesian_plan(config(Scheme::Cartesian, 208, 16, 2));
  CHECK(big.n_shots_total() == 416);
  CHECK(big.shots.back().time_index_tr == 415);

  std::set<std::pair<double, double>> grid;
  for (auto const &s : p.shots) {
    for (auto const &k : s.samples) {
      grid.insert({k.kx, k.ky});
    }
  }
  CHECK(grid.size() == 64);
  CHECK_THROWS_AS(cartesian_plan(config(Scheme::Radial)), Error);
}

TEST_CASE("radial plan")
{
  CHECK(spoke_angle(0, 2, SpokeOrdering::Sequential) == 0.0);
  CHECK(spoke_angle(1, 2, SpokeOrdering::Sequential) == std::numbers::pi / 2);
  auto const s0 = radial_spoke(0.0, 4);
  auto const s1 = radial_spoke(std::numbers::pi / 2, 4);
  for (int j = 0; j < 4; ++j) {
    CHECK(s0[j].ky == 0.0);
    CHECK_THAT(s1[j].kx, WithinAbs(0.0, 1e-16));
  }
  CHECK(s0.front().kx == -0.375);
  CHECK(s0.back().kx == 0.375);

  auto const p = radial_plan(config(Scheme::Radial, 32, 32));
  CHECK(p.n_shots_total() == 32);
  for (auto const &shot : p.shots) {
    double near = 1.0;
    for (auto const &k : shot.samples) {
      near = std::min(near, std::hypot(k.kx, k.ky));
      // Point reflection lies on the spoke within half a sample step.
      double best = 1.0;
      for (auto const &q : shot.samples) {
        best = std::min(best, std::hypot(q.kx + k.kx, q.ky + k.ky));
      }
      CHECK(best <= 0.5 / 32 + 1e-12);
    }
    CHECK(near <= 1.0 / (2 * 32) + 1e-12);
  }
  auto const full = radial_plan(config(Scheme::Radial, 256, 256));
  CHECK(full.samples_per_excitation() == 65536);
}

TEST_CASE("spiral plan")
{
  auto c = config(Scheme::Spiral, 8, 8);
  c.spiral_interleaves = 1;
  c.spiral_turns = 2;
  auto const p = spiral_plan(c);
  REQUIRE(p.n_shots_total() == 1);
  CHECK(p.shots[0].samples.front() == KPoint{0.0, 0.0});
  double const km = kmax(c);
  for (auto const &k : p.shots[0].samples) {
    CHECK(std::hypot(k.kx, k.ky) <= km + 1e-15);
  }

  auto c32 = config(Scheme::Spiral, 256, 256);
  c32.spiral_interleaves = 32;
  auto const p32 = spiral_plan(c32);
  CHECK(p32.n_shots_total() == 32);
  CHECK(p32.shots[0].samples.size() == 2048);
  CHECK(validate_plan(p32).empty());

  auto bad = config(Scheme::Spiral, 16, 16);
  bad.spiral_interleaves = 7;
  CHECK_THROWS_AS(spiral_plan(bad), Error);
}

TEST_CASE("validate_plan reports violations")
{
  auto p = cartesian_plan(config(Scheme::Cartesian));
  CHECK(validate_plan(p).empty());
  auto bounds = p;
  bounds.shots[3].samples[0].kx = 0.7;
  CHECK(has(validate_plan(bounds), ViolationKind::Bounds));
  auto timing = p;
  timing.shots[4].time_index_tr = 3;
  CHECK(has(validate_plan(timing), ViolationKind::Timing));
  auto coverage = p;
  coverage.shots[2].samples = coverage.shots[1].samples;
  CHECK(has(validate_plan(coverage), ViolationKind::Coverage));
}

TEST_CASE("config validation")
{
  auto c = config(Scheme::Cartesian);
  c.matrix_pe = 15;
  CHECK_THROWS_AS(validate(c), Error);
  c = config(Scheme::Cartesian);
  c.nex = 0;
  CHECK_THROWS_AS(validate(c), Error);
  c = config(Scheme::Cartesian);
  c.tr_ms = 0;
  CHECK_THROWS_AS(validate(c), Error);
  CHECK(parse_scheme("spiral") == Scheme::Spiral);
  CHECK_FALSE(parse_scheme("epi").has_value());
}

TEST_CASE("nex repeats the plan on a continuing timeline")
{
  auto const p = make_plan(config(Scheme::Radial, 16, 16, 3));
  CHECK(p.n_shots_total() == 48);
  CHECK(p.shots_per_excitation == 16);
  for (int i = 0; i < 48; ++i) {
    CHECK(p.shots[i].time_index_tr == i);
    CHECK(p.shots[i].samples == p.shots[i % 16].samples);
  }
  std::stringstream ss;
  write_plan_csv(p, ss);
  std::string header;
  std::getline(ss, header);
  CHECK(header == "shot,time_index,kx,ky");
}
