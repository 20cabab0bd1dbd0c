#include "core/error.hpp"
#include "core/fft.hpp"
#include "core/nufft.hpp"
#include "core/recon.hpp"
#include "support.hpp"

#include <catch_amalgamated.hpp>

#include <numbers>

using namespace mrsim;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::vector<KPoint> random_coords(std::size_t n, std::uint64_t seed, double limit = 0.5)
{
  Xoshiro256 rng(seed);
  std::vector<KPoint> k(n);
  for (auto &p : k) {
    p = {limit * (2.0 * rng.uniform() - 1.0), limit * (2.0 * rng.uniform() - 1.0)};
  }
  return k;
}

// sum_j v_j exp(+2 pi i k_j . x) at every pixel position.
ComplexImage adjoint_oracle(std::span<KPoint const> k, std::span<Complex const> v, int w, int h)
{
  ComplexImage out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      Complex acc{};
      for (std::size_t j = 0; j < k.size(); ++j) {
        acc += v[j] * std::polar(1.0, 2.0 * std::numbers::pi * (k[j].kx * (x - w / 2) + k[j].ky * (y - h / 2)));
      }
      out.at(x, y) = acc;
    }
  }
  return out;
}

} // namespace

TEST_CASE("centered impulse has a constant spectrum")
{
  ImageSlice img(16, 16);
  img.at(8, 8) = 2.5;
  auto const g = forward_grid(img);
  for (auto const &v : g.values) {
    CHECK_THAT(std::abs(v), WithinAbs(2.5, 1e-12));
    CHECK_THAT(v.imag(), WithinAbs(0.0, 1e-12));
  }
}

TEST_CASE("constant image puts all energy at DC")
{
  ImageSlice img(16, 12, 1.0, 0.75);
  auto const g = forward_grid(img);
  for (int v = 0; v < 12; ++v) {
    for (int u = 0; u < 16; ++u) {
      double const expect = (u == 8 && v == 6) ? 0.75 * 16 * 12 : 0.0;
      CHECK_THAT(std::abs(g.at(u, v) - expect), WithinAbs(0.0, 1e-10));
    }
  }
}

TEST_CASE("forward_grid matches the direct DFT on every grid point")
{
  auto const img = random_image(16, 16, 21);
  auto const g = forward_grid(img);
  std::vector<KPoint> k;
  for (int v = 0; v < 16; ++v) {
    for (int u = 0; u < 16; ++u) {
      k.push_back({(u - 8) / 16.0, (v - 8) / 16.0});
    }
  }
  auto const ref = direct_dft_oracle(img, k);
  CHECK(rel_error(g.values, ref) <= 1e-10);

  ImageSlice rect = random_image(12, 8, 2);
  auto const gr = forward_grid(rect);
  std::vector<KPoint> kr;
  for (int v = 0; v < 8; ++v) {
    for (int u = 0; u < 12; ++u) {
      kr.push_back({(u - 6) / 12.0, (v - 4) / 8.0});
    }
  }
  CHECK(rel_error(gr.values, direct_dft_oracle(rect, kr)) <= 1e-10);
}

TEST_CASE("FFT round trip")
{
  for (int n : {8, 16, 64, 256}) {
    auto const img = random_image(n, n, 100 + n);
    auto const back = inverse_grid(forward_grid(img));
    CHECK(max_abs_diff(back, img) <= 1e-12);
  }
  auto const zero = inverse_grid(ComplexImage(16, 16));
  for (double p : zero.pixels) {
    CHECK(p == 0.0);
  }
}

TEST_CASE("Parseval")
{
  auto const img = random_image(32, 16, 8);
  auto const g = forward_grid(img);
  double e_img = 0.0;
  double e_k = 0.0;
  for (double p : img.pixels) {
    e_img += p * p;
  }
  for (auto const &v : g.values) {
    e_k += std::norm(v);
  }
  CHECK_THAT(e_k, WithinRel(e_img * 32 * 16, 1e-12));
}

TEST_CASE("inverse of a shifted spectrum is the shifted image")
{
  auto img = random_image(16, 16, 3);
  ImageSlice shifted(16, 16);
  for (int y = 0; y < 16; ++y) {
    for (int x = 0; x < 16; ++x) {
      shifted.at((x + 3) % 16, (y + 14) % 16) = img.at(x, y);
    }
  }
  auto g = forward_grid(img);
  for (int v = 0; v < 16; ++v) {
    for (int u = 0; u < 16; ++u) {
      g.at(u, v) *= std::polar(1.0, -2.0 * std::numbers::pi * ((u - 8) * 3.0 + (v - 8) * -2.0) / 16.0);
    }
  }
  CHECK(max_abs_diff(inverse_grid(g), shifted) <= 1e-12);
}

TEST_CASE("direct oracle on an impulse is constant")
{
  ImageSlice img(16, 16);
  img.at(8, 8) = 1.5;
  for (auto const &v : direct_dft_oracle(img, random_coords(20, 4))) {
    CHECK_THAT(v.real(), WithinAbs(1.5, 1e-12));
    CHECK_THAT(v.imag(), WithinAbs(0.0, 1e-12));
  }
}

TEST_CASE("off-grid evaluator agrees with the direct DFT")
{
  auto const coords = random_coords(100, 77);
  for (std::uint64_t seed : {1, 2, 3}) {
    auto const img = random_image(16, 16, seed);
    OffGridEvaluator ev(16, 16);
    ev.load(img);
    std::vector<Complex> out(coords.size());
    ev.evaluate(coords, out);
    auto const ref = direct_dft_oracle(img, coords);
    CHECK(rel_error(out, ref) <= 1e-4);

    // Real (half-spectrum) and complex loads agree.
    OffGridEvaluator evc(16, 16);
    evc.load(to_complex(img));
    std::vector<Complex> outc(coords.size());
    evc.evaluate(coords, outc);
    CHECK(rel_error(out, outc) <= 1e-12);
  }
}

TEST_CASE("off-grid evaluator on complex images and rectangular shapes")
{
  Xoshiro256 rng(12);
  ComplexImage img(24, 16);
  for (auto &v : img.values) {
    v = {rng.normal(), rng.normal()};
  }
  auto const coords = random_coords(60, 5);
  OffGridEvaluator ev(24, 16);
  ev.load(img);
  std::vector<Complex> out(coords.size());
  ev.evaluate(coords, out);
  CHECK(rel_error(out, direct_dft_oracle(img, coords)) <= 1e-4);
}

TEST_CASE("cubic spectral interpolation is exact on grid points")
{
  auto const img = random_image(16, 16, 8);
  OffGridEvaluator ev(16, 16, {.oversampling = 2.0, .kernel = SpectralKernel::Cubic});
  ev.load(img);
  auto const g = forward_grid(img);
  for (int v = 0; v < 16; ++v) {
    for (int u = 0; u < 16; ++u) {
      auto const z = ev({(u - 8) / 16.0, (v - 8) / 16.0});
      CHECK(std::abs(z - g.at(u, v)) <= 1e-9 * std::abs(g.at(8, 8)));
    }
  }
}

TEST_CASE("gridding adjoint agrees with the direct adjoint sum")
{
  auto const coords = random_coords(200, 31, 0.45);
  Xoshiro256 rng(3);
  std::vector<Complex> v(coords.size());
  for (auto &z : v) {
    z = {rng.normal(), rng.normal()};
  }
  auto const fast = grid_adjoint(coords, v, 16, 16);
  auto const ref = adjoint_oracle(coords, v, 16, 16);
  CHECK(rel_error(fast.values, ref.values) <= 1e-2);

  auto const wide = grid_adjoint(coords, v, 16, 16, {.oversampling = 2.0, .width = 6});
  CHECK(rel_error(wide.values, ref.values) <= 1e-4);
}

TEST_CASE("Kaiser-Bessel window and transform")
{
  KaiserBessel kb(4, KaiserBessel::default_beta(4, 2.0));
  CHECK(kb(2.0) == 0.0);
  CHECK_THAT(kb(0.0), WithinRel(std::cyl_bessel_i(0.0, kb.beta), 1e-13));
  for (double t : {0.3, 1.1, 1.9}) {
    double const r = 2.0 * t / 4;
    CHECK_THAT(kb(t), WithinRel(std::cyl_bessel_i(0.0, kb.beta * std::sqrt(1.0 - r * r)), 1e-13));
    CHECK(kb(t) == kb(-t));
  }
  // Trapezoid integral of the window equals its transform at 0.
  double integral = 0.0;
  int const n = 20000;
  for (int i = 0; i <= n; ++i) {
    double const t = -2.0 + 4.0 * i / n;
    integral += (i == 0 || i == n ? 0.5 : 1.0) * kb(t) * 4.0 / n;
  }
  CHECK_THAT(kb.transform(0.0), WithinRel(integral, 1e-6));
}

TEST_CASE("evaluator argument checks")
{
  OffGridEvaluator ev(16, 16);
  CHECK_THROWS_AS(ev({0.1, 0.1}), Error);
  CHECK_THROWS_AS(ev.load(random_image(8, 8, 1)), Error);
  CHECK_THROWS_AS(OffGridEvaluator(16, 16, {.oversampling = 0.5}), Error);
}
