#pragma once

#include "image.hpp"
#include "sampling.hpp"

#include <span>
#include <vector>

namespace mrsim {

// Kaiser-Bessel window C(t) = I0(beta sqrt(1 - (2t/W)^2)) on |t| < W/2.
struct KaiserBessel
{
  int width = 4;
  double beta = 0.0;

  KaiserBessel(int w, double b);
  // Beatty et al. shape parameter for a given oversampling ratio.
  static double default_beta(int width, double oversampling);

  double operator()(double t) const;
  // Continuous Fourier transform of the window at xi (cycles per grid unit).
  double transform(double xi) const;
};

// Keys cubic convolution kernel, a = -1/2.
double keys_cubic(double t);

enum class SpectralKernel {
  KaiserBessel, // deapodised, width 6: ~1e-5 relative error at 2x
  Cubic,        // plain cubic convolution of the padded spectrum
};

struct SpectralInterpParams
{
  double oversampling = 2.0;
  SpectralKernel kernel = SpectralKernel::KaiserBessel;
  int kb_width = 6;
};

// Evaluates the centered DFT of an image at arbitrary k by interpolating a
// zero-padded FFT. Load an image, then query any number of coordinates.
class OffGridEvaluator
{
public:
  OffGridEvaluator(int width, int height, SpectralInterpParams params = {});

  void load(ImageSlice const &image);
  void load(ComplexImage const &image);

  Complex operator()(KPoint k) const;
  void evaluate(std::span<KPoint const> coords, std::span<Complex> out) const;

  int grid_width() const { return gw_; }
  int grid_height() const { return gh_; }

private:
  int width_;
  int height_;
  int gw_;
  int gh_;
  SpectralInterpParams params_;
  KaiserBessel kb_;
  std::vector<double> deapod_x_;
  std::vector<double> deapod_y_;
  // Spectra are stored unshifted (DC at index 0). A real image keeps only the
  // non-negative kx half; a complex image keeps the full grid.
  bool hermitian_ = true;
  std::vector<double> rows_real_;
  std::vector<Complex> rows_half_;
  std::vector<Complex> spectrum_;
};

struct GridKernel
{
  double oversampling = 2.0;
  int width = 4;
  double beta = 0.0; // 0: KaiserBessel::default_beta
};

// Adjoint non-uniform DFT: out(x) = sum_j values_j exp(+2 pi i k_j . x) at the
// width x height pixel positions of the centered convention, by Kaiser-Bessel
// gridding, inverse FFT and apodisation correction.
ComplexImage grid_adjoint(std::span<KPoint const> coords,
                          std::span<Complex const> values,
                          int width,
                          int height,
                          GridKernel const &kernel = {});

// (w * C)(k_j): weights spread onto the oversampled grid with the kernel, then
// read back at each sample with the same kernel. Used for iterative density
// estimation.
std::vector<double> kernel_density(std::span<KPoint const> coords,
                                   std::span<double const> weights,
                                   int width,
                                   int height,
                                   GridKernel const &kernel = {});

} // namespace mrsim
