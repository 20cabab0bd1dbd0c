#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace mrsim {

using Complex = std::complex<double>;

// Real-valued slice, row-major, pixel (x, y) at pixels[y * width + x].
struct ImageSlice
{
  int width = 0;
  int height = 0;
  double pixel_spacing_mm = 1.0;
  std::vector<double> pixels;

  ImageSlice() = default;
  ImageSlice(int w, int h, double spacing_mm = 1.0, double fill = 0.0);

  double &at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  double at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  std::size_t size() const { return pixels.size(); }

  bool operator==(ImageSlice const &) const = default;
};

// Complex counterpart used for spectra and for complex reconstructions before
// the magnitude is taken. Same layout as ImageSlice.
struct ComplexImage
{
  int width = 0;
  int height = 0;
  std::vector<Complex> values;

  ComplexImage() = default;
  ComplexImage(int w, int h)
    : width(w)
    , height(h)
    , values(static_cast<std::size_t>(w) * h)
  {
  }

  Complex &at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
  Complex at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
};

// Centered k-space grid: DC sits at (width/2, height/2).
using KSpaceGrid = ComplexImage;

// Throws InvalidArgument unless dimensions are even and >= 8, spacing is
// positive, and every pixel is finite and non-negative.
void validate(ImageSlice const &image);

ComplexImage to_complex(ImageSlice const &image);
ImageSlice magnitude(ComplexImage const &image, double pixel_spacing_mm);

// Rounds every pixel to the nearest float32 value, the precision records are
// stored at.
void quantize_to_float32(ImageSlice &image);

} // namespace mrsim
