#pragma once

#include "image.hpp"
#include "kspace.hpp"
#include "nufft.hpp"
#include "sampling.hpp"

#include <span>
#include <vector>

namespace mrsim {

enum class DensityMethod { Ramp, JacksonIterative };

struct GriddingParams
{
  double oversampling = 2.0;
  int kernel_width = 4;
  double kernel_beta = 0.0; // 0: Beatty formula for (width, oversampling)
  DensityMethod density = DensityMethod::Ramp;
  int jackson_iterations = 20;
  // Radial spokes are trigonometrically interpolated to this many times the
  // acquired readout density before gridding. 1 disables.
  int readout_upsampling = 2;
};

void validate(GriddingParams const &params);

// Centered 2-D DFT of the image (unnormalised forward).
KSpaceGrid forward_grid(ImageSlice const &image);
KSpaceGrid forward_grid(ComplexImage const &image);

// Inverse of forward_grid; the magnitude is the reconstructed image.
ComplexImage inverse_grid_complex(KSpaceGrid const &grid);
ImageSlice inverse_grid(KSpaceGrid const &grid, double pixel_spacing_mm = 1.0);

// Exact DFT sum at arbitrary coordinates, O(W H) per coordinate. Intended for
// images up to about 64x64.
std::vector<Complex> direct_dft_oracle(ImageSlice const &image, std::span<KPoint const> coords);
std::vector<Complex> direct_dft_oracle(ComplexImage const &image, std::span<KPoint const> coords);

// Per-sample density compensation for one excitation of a non-Cartesian plan,
// normalised so the weights sum to the sample count.
std::vector<double> density_weights(SamplingPlan const &plan, DensityMethod method = DensityMethod::Ramp);

// Same weights expressed as k-space area per sample (cycles^2/pixel^2); the
// reconstruction uses these directly.
std::vector<double> density_area_weights(SamplingPlan const &plan, DensityMethod method = DensityMethod::Ramp,
                                         GridKernel const &kernel = {}, int iterations = 20);

// Scatters on-grid Cartesian samples into a centered grid. Throws if any
// sample is off the grid.
KSpaceGrid scatter_cartesian(KSpaceAcquisition const &acq);

ComplexImage grid_reconstruct_complex(KSpaceAcquisition const &acq, GriddingParams const &params = {});
ImageSlice grid_reconstruct(KSpaceAcquisition const &acq, GriddingParams const &params = {});

} // namespace mrsim
