#pragma once

#include "image.hpp"

#include <span>

namespace mrsim {

// Unnormalised in-place 2-D DFT of a row-major width x height array.
// Forward uses exp(-2 pi i ...). Thread-safe; plans are cached per shape.
void fft2_inplace(std::span<Complex> data, int width, int height, bool inverse);

// Batched 1-D transforms. real_rows_forward: `rows` contiguous real rows of
// length n to n/2 + 1 complex outputs each. columns_inplace: every column of a
// row-major n x columns array. Forward sign as above, unnormalised.
void real_rows_forward(std::span<double> in, std::span<Complex> out, int n, int rows);
void columns_inplace(std::span<Complex> data, int n, int columns, bool inverse);

// Centered transforms under the library convention: pixel (x, y) sits at
// position (x - W/2, y - H/2), k-index (u, v) at (u - W/2) / W, (v - H/2) / H.
// Forward is unnormalised, inverse carries 1 / (W H). Dimensions must be even.
ComplexImage centered_fft2(ComplexImage const &image);
ComplexImage centered_ifft2(ComplexImage const &spectrum);

// Swaps quadrants (fftshift == ifftshift for even dimensions).
void swap_quadrants(ComplexImage &image);

} // namespace mrsim
