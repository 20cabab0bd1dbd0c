#include "recon.hpp"

#include "error.hpp"
#include "fft.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <numeric>

namespace mrsim {

void validate(GriddingParams const &p)
{
  if (!(p.oversampling >= 1.25)) { fail(ErrorCode::InvalidArgument, "gridding oversampling must be >= 1.25"); }
  if (p.kernel_width < 2) { fail(ErrorCode::InvalidArgument, "gridding kernel width must be >= 2"); }
  if (p.kernel_beta < 0.0) { fail(ErrorCode::InvalidArgument, "kernel beta must be non-negative"); }
  if (p.readout_upsampling < 1) { fail(ErrorCode::InvalidArgument, "readout upsampling must be >= 1"); }
  if (p.jackson_iterations < 0) { fail(ErrorCode::InvalidArgument, "Jackson iterations must be >= 0"); }
}

KSpaceGrid forward_grid(ComplexImage const &image) { return centered_fft2(image); }

KSpaceGrid forward_grid(ImageSlice const &image) { return centered_fft2(to_complex(image)); }

ComplexImage inverse_grid_complex(KSpaceGrid const &grid) { return centered_ifft2(grid); }

ImageSlice inverse_grid(KSpaceGrid const &grid, double pixel_spacing_mm)
{
  return magnitude(centered_ifft2(grid), pixel_spacing_mm);
}

namespace {

template <typename Pixel>
std::vector<Complex> direct_dft(int width, int height, Pixel &&pixel, std::span<KPoint const> coords)
{
  std::vector<Complex> out(coords.size());
  std::vector<Complex> ex(width);
  std::vector<Complex> ey(height);
  for (std::size_t i = 0; i < coords.size(); ++i) {
    for (int x = 0; x < width; ++x) {
      ex[x] = std::polar(1.0, -2.0 * std::numbers::pi * coords[i].kx * (x - width / 2));
    }
    for (int y = 0; y < height; ++y) {
      ey[y] = std::polar(1.0, -2.0 * std::numbers::pi * coords[i].ky * (y - height / 2));
    }
    Complex acc{};
    for (int y = 0; y < height; ++y) {
      Complex row{};
      for (int x = 0; x < width; ++x) {
        row += pixel(x, y) * ex[x];
      }
      acc += row * ey[y];
    }
    out[i] = acc;
  }
  return out;
}

} // namespace

std::vector<Complex> direct_dft_oracle(ImageSlice const &image, std::span<KPoint const> coords)
{
  return direct_dft(image.width, image.height, [&](int x, int y) { return Complex(image.at(x, y)); }, coords);
}

std::vector<Complex> direct_dft_oracle(ComplexImage const &image, std::span<KPoint const> coords)
{
  return direct_dft(image.width, image.height, [&](int x, int y) { return image.at(x, y); }, coords);
}

namespace {

// Analytic area elements. Radial: ring spacing dk times arc pi/S at radius |k|.
// Spiral (Archimedean, uniform in s): area 2 pi kmax |k| / (samples * arms).
// Samples exactly at the origin share the disc of radius dk/2.
std::vector<double> ramp_area(SamplingPlan const &plan, std::vector<KPoint> const &coords, double readout_spacing)
{
  auto const &cfg = plan.config;
  std::vector<double> w(coords.size());
  double scale = 0.0;
  double ring = 0.0;
  if (cfg.scheme == Scheme::Radial) {
    scale = readout_spacing * std::numbers::pi / cfg.spokes();
    ring = readout_spacing;
  } else {
    auto const per_arm = static_cast<double>(plan.samples_per_excitation()) / plan.shots_per_excitation;
    double const k_max = kmax(cfg);
    scale = 2.0 * std::numbers::pi * k_max / (per_arm * plan.shots_per_excitation);
    ring = k_max / per_arm;
  }
  std::size_t at_origin = 0;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    double const r = std::hypot(coords[i].kx, coords[i].ky);
    w[i] = scale * r;
    at_origin += r == 0.0;
  }
  if (at_origin) {
    double const share = std::numbers::pi * 0.25 * ring * ring / static_cast<double>(at_origin);
    for (std::size_t i = 0; i < coords.size(); ++i) {
      if (coords[i].kx == 0.0 && coords[i].ky == 0.0) { w[i] = share; }
    }
  }
  return w;
}

void require_non_cartesian(SamplingPlan const &plan)
{
  if (plan.config.scheme == Scheme::Cartesian) {
    fail(ErrorCode::Unsupported, "density compensation does not apply to Cartesian plans");
  }
}

std::vector<double> jackson(std::vector<KPoint> const &coords, std::vector<double> w, int width, int height,
                            GridKernel const &kernel, int iterations)
{
  double const area = std::accumulate(w.begin(), w.end(), 0.0);
  for (int it = 0; it < iterations; ++it) {
    auto const d = kernel_density(coords, w, width, height, kernel);
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (d[i] > 0.0) { w[i] /= d[i]; }
    }
  }
  double const now = std::accumulate(w.begin(), w.end(), 0.0);
  for (double &v : w) {
    v *= area / now;
  }
  return w;
}

} // namespace

std::vector<double> density_area_weights(SamplingPlan const &plan, DensityMethod method, GridKernel const &kernel,
                                         int iterations)
{
  require_non_cartesian(plan);
  auto const coords = plan.excitation_coords();
  auto w = ramp_area(plan, coords, 1.0 / plan.config.matrix_fe);
  if (method == DensityMethod::JacksonIterative) {
    w = jackson(coords, std::move(w), plan.config.matrix_fe, plan.config.matrix_pe, kernel, iterations);
  }
  return w;
}

std::vector<double> density_weights(SamplingPlan const &plan, DensityMethod method)
{
  auto w = density_area_weights(plan, method);
  double const total = std::accumulate(w.begin(), w.end(), 0.0);
  double const scale = static_cast<double>(w.size()) / total;
  for (double &v : w) {
    v *= scale;
  }
  return w;
}

KSpaceGrid scatter_cartesian(KSpaceAcquisition const &acq)
{
  auto const coords = acq.plan.excitation_coords();
  if (coords.size() != acq.values.size()) { fail(ErrorCode::InvalidArgument, "plan and value counts differ"); }
  KSpaceGrid grid(acq.width, acq.height);
  for (std::size_t i = 0; i < coords.size(); ++i) {
    double const u = coords[i].kx * acq.width + acq.width / 2;
    double const v = coords[i].ky * acq.height + acq.height / 2;
    long const iu = std::lround(u);
    long const iv = std::lround(v);
    if (std::abs(u - iu) > 1e-9 || std::abs(v - iv) > 1e-9 || iu < 0 || iv < 0 || iu >= acq.width ||
        iv >= acq.height) {
      fail(ErrorCode::InvalidArgument, "sample off the Cartesian grid");
    }
    grid.at(static_cast<int>(iu), static_cast<int>(iv)) += acq.values[i];
  }
  return grid;
}

namespace {

// Trigonometric interpolation of each spoke from n samples at spacing 1/n to
// factor*n samples at spacing 1/(factor n). Exact for objects whose
// projections fit inside the field of view.
struct SpokeUpsampler
{
  int n;
  int m;
  std::vector<Complex> matrix; // m x n

  SpokeUpsampler(int samples, int factor)
    : n(samples)
    , m(samples * factor)
    , matrix(static_cast<std::size_t>(samples) * samples * factor)
  {
    std::vector<double> k_in(n);
    std::vector<double> k_out(m);
    for (int j = 0; j < n; ++j) {
      k_in[j] = (j - 0.5 * (n - 1)) / n;
    }
    for (int j = 0; j < m; ++j) {
      k_out[j] = (j - 0.5 * (m - 1)) / m;
    }
    for (int o = 0; o < m; ++o) {
      for (int i = 0; i < n; ++i) {
        // sum_{p=-n/2}^{n/2-1} exp(i t p) = exp(-i t/2) sin(n t/2) / sin(t/2)
        double const t = 2.0 * std::numbers::pi * (k_in[i] - k_out[o]);
        double const s = std::sin(0.5 * t);
        Complex acc{};
        if (std::abs(s) > 1e-9) {
          acc = std::polar(std::sin(0.5 * n * t) / s, -0.5 * t);
        } else {
          for (int p = -n / 2; p < n / 2; ++p) {
            acc += std::polar(1.0, t * p);
          }
        }
        matrix[static_cast<std::size_t>(o) * n + i] = acc / static_cast<double>(n);
      }
    }
  }

  static std::shared_ptr<SpokeUpsampler const> cached(int samples, int factor)
  {
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::shared_ptr<SpokeUpsampler const>> cache;
    std::lock_guard lock(mutex);
    auto &slot = cache[{samples, factor}];
    if (!slot) { slot = std::make_shared<SpokeUpsampler const>(samples, factor); }
    return slot;
  }

  void apply(Complex const *in, Complex *out) const
  {
    for (int o = 0; o < m; ++o) {
      Complex acc{};
      Complex const *row = matrix.data() + static_cast<std::size_t>(o) * n;
      for (int i = 0; i < n; ++i) {
        acc += row[i] * in[i];
      }
      out[o] = acc;
    }
  }
};

ComplexImage reconstruct_radial_upsampled(KSpaceAcquisition const &acq, GriddingParams const &params,
                                          GridKernel const &kernel)
{
  auto const &plan = acq.plan;
  int const n = plan.config.matrix_fe;
  int const spokes = plan.shots_per_excitation;
  auto const upsampler = SpokeUpsampler::cached(n, params.readout_upsampling);
  auto const &up = *upsampler;
  std::vector<KPoint> coords;
  std::vector<Complex> values(static_cast<std::size_t>(up.m) * spokes);
  coords.reserve(values.size());
  std::size_t offset = 0;
  for (int s = 0; s < spokes; ++s) {
    auto const &samples = plan.shots[s].samples;
    if (static_cast<int>(samples.size()) != n) {
      fail(ErrorCode::InvalidArgument, "radial readout upsampling needs matrix_fe samples per spoke");
    }
    double const dx = samples.back().kx - samples.front().kx;
    double const dy = samples.back().ky - samples.front().ky;
    double const len = std::hypot(dx, dy);
    for (int j = 0; j < up.m; ++j) {
      double const k = (j - 0.5 * (up.m - 1)) / up.m;
      coords.push_back({k * dx / len, k * dy / len});
    }
    up.apply(acq.values.data() + offset, values.data() + static_cast<std::size_t>(s) * up.m);
    offset += samples.size();
  }
  auto w = ramp_area(plan, coords, 1.0 / up.m);
  if (params.density == DensityMethod::JacksonIterative) {
    w = jackson(coords, std::move(w), acq.width, acq.height, kernel, params.jackson_iterations);
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] *= w[i];
  }
  return grid_adjoint(coords, values, acq.width, acq.height, kernel);
}

} // namespace

ComplexImage grid_reconstruct_complex(KSpaceAcquisition const &acq, GriddingParams const &params)
{
  validate(params);
  auto const &plan = acq.plan;
  if (acq.values.size() != plan.samples_per_excitation()) {
    fail(ErrorCode::InvalidArgument, "acquisition has " + std::to_string(acq.values.size()) +
                                       " values but its plan has " + std::to_string(plan.samples_per_excitation()) +
                                       " samples per excitation");
  }
  if (plan.config.scheme == Scheme::Cartesian) { return inverse_grid_complex(scatter_cartesian(acq)); }

  GridKernel const kernel{params.oversampling, params.kernel_width, params.kernel_beta};
  if (plan.config.scheme == Scheme::Radial && params.readout_upsampling > 1) {
    return reconstruct_radial_upsampled(acq, params, kernel);
  }
  auto const coords = plan.excitation_coords();
  auto const w = density_area_weights(plan, params.density, kernel, params.jackson_iterations);
  std::vector<Complex> values(acq.values);
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] *= w[i];
  }
  return grid_adjoint(coords, values, acq.width, acq.height, kernel);
}

ImageSlice grid_reconstruct(KSpaceAcquisition const &acq, GriddingParams const &params)
{
  return magnitude(grid_reconstruct_complex(acq, params), acq.pixel_spacing_mm);
}

} // namespace mrsim
