#pragma once

#include "image.hpp"

#include <cstdint>

namespace mrsim {

// Modified Shepp-Logan head phantom (Toft intensities), 2x2 supersampled.
ImageSlice shepp_logan(int width, int height, double pixel_spacing_mm = 1.0);

// Randomised head-like phantom: a skull ring around a brain ellipse with
// several inner structures. Deterministic per seed.
ImageSlice random_head_phantom(int width, int height, std::uint64_t seed, double pixel_spacing_mm = 1.0);

// exp(-r^2 / (2 sigma^2)) about the center, sigma a fraction of the width.
ImageSlice gaussian_phantom(int width, int height, double sigma_fraction = 0.1, double pixel_spacing_mm = 1.0);

// Unit disc with a raised-cosine edge; radius and edge width as fractions of
// the width.
ImageSlice smooth_disc(int width, int height, double radius_fraction = 0.35, double edge_fraction = 0.08,
                       double pixel_spacing_mm = 1.0);

} // namespace mrsim
