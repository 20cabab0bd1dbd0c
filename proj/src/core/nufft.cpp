#include "nufft.hpp"

#include "error.hpp"
#include "fft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mrsim {

KaiserBessel::KaiserBessel(int w, double b)
  : width(w)
  , beta(b)
{
  if (width < 2) { fail(ErrorCode::InvalidArgument, "kernel width must be >= 2"); }
}

double KaiserBessel::default_beta(int width, double os)
{
  double const a = width / os * (os - 0.5);
  return std::numbers::pi * std::sqrt(a * a - 0.8);
}

double KaiserBessel::operator()(double t) const
{
  double const r = 2.0 * t / width;
  double const u = 1.0 - r * r;
  if (u <= 0.0) { return 0.0; }
  // I0 by its power series; std::cyl_bessel_i is an order of magnitude slower.
  double const q = 0.25 * beta * beta * u;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 200 && term > 1e-17 * sum; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
  }
  return sum;
}

double KaiserBessel::transform(double xi) const
{
  double const p = std::numbers::pi * width * xi;
  double const a = beta * beta - p * p;
  if (a > 0.0) {
    double const s = std::sqrt(a);
    return width * std::sinh(s) / s;
  }
  if (a < 0.0) {
    double const s = std::sqrt(-a);
    return width * std::sin(s) / s;
  }
  return width;
}

double keys_cubic(double t)
{
  t = std::abs(t);
  constexpr double a = -0.5;
  if (t < 1.0) { return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0; }
  if (t < 2.0) { return ((a * t - 5.0 * a) * t + 8.0 * a) * t - 4.0 * a; }
  return 0.0;
}

namespace {

int padded_size(int n, double os)
{
  if (os < 1.0) { fail(ErrorCode::InvalidArgument, "oversampling must be >= 1"); }
  int g = static_cast<int>(std::ceil(n * os));
  return g % 2 ? g + 1 : g;
}

int wrap(long i, int n)
{
  long const m = i % n;
  return static_cast<int>(m < 0 ? m + n : m);
}

// Taps of a kernel of half-width h centred at continuous grid index u.
template <typename Kernel>
int taps(double u, double half, Kernel const &kernel, long *idx, double *w)
{
  long const first = static_cast<long>(std::floor(u - half)) + 1;
  long const last = static_cast<long>(std::floor(u + half));
  int n = 0;
  for (long j = first; j <= last; ++j) {
    idx[n] = j;
    w[n] = kernel(u - static_cast<double>(j));
    ++n;
  }
  return n;
}

constexpr int kMaxTaps = 32;

} // namespace

OffGridEvaluator::OffGridEvaluator(int width, int height, SpectralInterpParams params)
  : width_(width)
  , height_(height)
  , gw_(padded_size(width, params.oversampling))
  , gh_(padded_size(height, params.oversampling))
  , params_(params)
  , kb_(params.kb_width, KaiserBessel::default_beta(params.kb_width, params.oversampling))
{
  if (params.kb_width + 2 > kMaxTaps) { fail(ErrorCode::InvalidArgument, "kernel too wide"); }
  deapod_x_.assign(width, 1.0);
  deapod_y_.assign(height, 1.0);
  if (params.kernel == SpectralKernel::KaiserBessel) {
    for (int x = 0; x < width; ++x) {
      deapod_x_[x] = 1.0 / kb_.transform(static_cast<double>(x - width / 2) / gw_);
    }
    for (int y = 0; y < height; ++y) {
      deapod_y_[y] = 1.0 / kb_.transform(static_cast<double>(y - height / 2) / gh_);
    }
  }
}

void OffGridEvaluator::load(ImageSlice const &image)
{
  if (image.width != width_ || image.height != height_) {
    fail(ErrorCode::InvalidArgument, "image shape does not match the evaluator");
  }
  hermitian_ = true;
  int const half = gw_ / 2 + 1;
  rows_real_.assign(static_cast<std::size_t>(gw_) * height_, 0.0);
  rows_half_.resize(static_cast<std::size_t>(half) * height_);
  for (int y = 0; y < height_; ++y) {
    double *row = rows_real_.data() + static_cast<std::size_t>(y) * gw_;
    for (int x = 0; x < width_; ++x) {
      row[wrap(x - width_ / 2, gw_)] = image.at(x, y) * deapod_x_[x] * deapod_y_[y];
    }
  }
  // Rows first (only the image rows are non-zero), then every column.
  real_rows_forward(rows_real_, rows_half_, gw_, height_);
  spectrum_.assign(static_cast<std::size_t>(half) * gh_, Complex{});
  for (int y = 0; y < height_; ++y) {
    std::copy_n(rows_half_.data() + static_cast<std::size_t>(y) * half, half,
                spectrum_.data() + static_cast<std::size_t>(wrap(y - height_ / 2, gh_)) * half);
  }
  columns_inplace(spectrum_, gh_, half, false);
}

void OffGridEvaluator::load(ComplexImage const &image)
{
  if (image.width != width_ || image.height != height_) {
    fail(ErrorCode::InvalidArgument, "image shape does not match the evaluator");
  }
  hermitian_ = false;
  spectrum_.assign(static_cast<std::size_t>(gw_) * gh_, Complex{});
  for (int y = 0; y < height_; ++y) {
    Complex *row = spectrum_.data() + static_cast<std::size_t>(wrap(y - height_ / 2, gh_)) * gw_;
    for (int x = 0; x < width_; ++x) {
      row[wrap(x - width_ / 2, gw_)] = image.at(x, y) * (deapod_x_[x] * deapod_y_[y]);
    }
  }
  fft2_inplace(spectrum_, gw_, gh_, false);
}

Complex OffGridEvaluator::operator()(KPoint k) const
{
  if (spectrum_.empty()) { fail(ErrorCode::InvalidArgument, "no image loaded"); }
  long ix[kMaxTaps];
  long iy[kMaxTaps];
  double wx[kMaxTaps];
  double wy[kMaxTaps];
  double const u = k.kx * gw_;
  double const v = k.ky * gh_;
  int nx = 0;
  int ny = 0;
  if (params_.kernel == SpectralKernel::KaiserBessel) {
    double const half = 0.5 * params_.kb_width;
    nx = taps(u, half, kb_, ix, wx);
    ny = taps(v, half, kb_, iy, wy);
  } else {
    nx = taps(u, 2.0, keys_cubic, ix, wx);
    ny = taps(v, 2.0, keys_cubic, iy, wy);
  }
  Complex acc{};
  if (!hermitian_) {
    for (int b = 0; b < ny; ++b) {
      Complex row{};
      Complex const *line = spectrum_.data() + static_cast<std::size_t>(wrap(iy[b], gh_)) * gw_;
      for (int a = 0; a < nx; ++a) {
        row += wx[a] * line[wrap(ix[a], gw_)];
      }
      acc += wy[b] * row;
    }
    return acc;
  }
  int const half = gw_ / 2 + 1;
  for (int b = 0; b < ny; ++b) {
    int const j = wrap(iy[b], gh_);
    Complex const *line = spectrum_.data() + static_cast<std::size_t>(j) * half;
    Complex const *mirror = spectrum_.data() + static_cast<std::size_t>(j == 0 ? 0 : gh_ - j) * half;
    Complex row{};
    for (int a = 0; a < nx; ++a) {
      int const i = wrap(ix[a], gw_);
      row += wx[a] * (i < half ? line[i] : std::conj(mirror[gw_ - i]));
    }
    acc += wy[b] * row;
  }
  return acc;
}

void OffGridEvaluator::evaluate(std::span<KPoint const> coords, std::span<Complex> out) const
{
  if (coords.size() != out.size()) { fail(ErrorCode::InvalidArgument, "output size mismatch"); }
  for (std::size_t i = 0; i < coords.size(); ++i) {
    out[i] = (*this)(coords[i]);
  }
}

namespace {

struct Spreader
{
  int gw;
  int gh;
  KaiserBessel kb;

  template <typename Fn>
  void visit(KPoint k, Fn &&fn) const
  {
    long ix[kMaxTaps];
    long iy[kMaxTaps];
    double wx[kMaxTaps];
    double wy[kMaxTaps];
    double const half = 0.5 * kb.width;
    int const nx = taps(k.kx * gw + gw / 2, half, kb, ix, wx);
    int const ny = taps(k.ky * gh + gh / 2, half, kb, iy, wy);
    for (int b = 0; b < ny; ++b) {
      std::size_t const row = static_cast<std::size_t>(wrap(iy[b], gh)) * gw;
      for (int a = 0; a < nx; ++a) {
        fn(row + wrap(ix[a], gw), wx[a] * wy[b]);
      }
    }
  }
};

Spreader make_spreader(int width, int height, GridKernel const &kernel)
{
  if (kernel.oversampling < 1.25) { fail(ErrorCode::InvalidArgument, "gridding oversampling must be >= 1.25"); }
  if (kernel.width < 2 || kernel.width + 2 > kMaxTaps) {
    fail(ErrorCode::InvalidArgument, "gridding kernel width out of range");
  }
  double const beta =
    kernel.beta > 0.0 ? kernel.beta : KaiserBessel::default_beta(kernel.width, kernel.oversampling);
  return Spreader{padded_size(width, kernel.oversampling), padded_size(height, kernel.oversampling),
                  KaiserBessel(kernel.width, beta)};
}

} // namespace

ComplexImage grid_adjoint(std::span<KPoint const> coords,
                          std::span<Complex const> values,
                          int width,
                          int height,
                          GridKernel const &kernel)
{
  if (coords.size() != values.size()) { fail(ErrorCode::InvalidArgument, "coordinate/value count mismatch"); }
  auto const sp = make_spreader(width, height, kernel);
  ComplexImage grid(sp.gw, sp.gh);
  // Sequential scatter: the summation order, and so every bit of the result,
  // is fixed.
  for (std::size_t j = 0; j < coords.size(); ++j) {
    Complex const v = values[j];
    sp.visit(coords[j], [&](std::size_t idx, double w) { grid.values[idx] += w * v; });
  }
  swap_quadrants(grid);
  fft2_inplace(grid.values, sp.gw, sp.gh, true);
  swap_quadrants(grid);

  ComplexImage out(width, height);
  int const ox = (sp.gw - width) / 2;
  int const oy = (sp.gh - height) / 2;
  for (int y = 0; y < height; ++y) {
    double const ay = sp.kb.transform(static_cast<double>(y - height / 2) / sp.gh);
    for (int x = 0; x < width; ++x) {
      double const ax = sp.kb.transform(static_cast<double>(x - width / 2) / sp.gw);
      out.at(x, y) = grid.at(x + ox, y + oy) / (ax * ay);
    }
  }
  return out;
}

std::vector<double> kernel_density(std::span<KPoint const> coords,
                                   std::span<double const> weights,
                                   int width,
                                   int height,
                                   GridKernel const &kernel)
{
  if (coords.size() != weights.size()) { fail(ErrorCode::InvalidArgument, "coordinate/weight count mismatch"); }
  auto const sp = make_spreader(width, height, kernel);
  std::vector<double> grid(static_cast<std::size_t>(sp.gw) * sp.gh, 0.0);
  for (std::size_t j = 0; j < coords.size(); ++j) {
    double const v = weights[j];
    sp.visit(coords[j], [&](std::size_t idx, double w) { grid[idx] += w * v; });
  }
  std::vector<double> out(coords.size(), 0.0);
  for (std::size_t j = 0; j < coords.size(); ++j) {
    double acc = 0.0;
    sp.visit(coords[j], [&](std::size_t idx, double w) { acc += w * grid[idx]; });
    out[j] = acc;
  }
  return out;
}

} // namespace mrsim
