#include "image.hpp"

#include "error.hpp"

#include <cmath>
#include <string>

namespace mrsim {

ImageSlice::ImageSlice(int w, int h, double spacing_mm, double fill)
  : width(w)
  , height(h)
  , pixel_spacing_mm(spacing_mm)
  , pixels(static_cast<std::size_t>(w) * h, fill)
{
}

void validate(ImageSlice const &image)
{
  if (image.width < 8 || image.height < 8 || image.width % 2 || image.height % 2) {
    fail(ErrorCode::InvalidArgument,
         "image dimensions must be even and >= 8, got " + std::to_string(image.width) + "x" +
           std::to_string(image.height));
  }
  if (image.pixels.size() != static_cast<std::size_t>(image.width) * image.height) {
    fail(ErrorCode::InvalidArgument, "image pixel count does not match its dimensions");
  }
  if (!(image.pixel_spacing_mm > 0.0) || !std::isfinite(image.pixel_spacing_mm)) {
    fail(ErrorCode::InvalidArgument, "pixel spacing must be positive");
  }
  for (double const v : image.pixels) {
    if (!std::isfinite(v)) { fail(ErrorCode::InvalidArgument, "image contains non-finite values"); }
    if (v < 0.0) { fail(ErrorCode::InvalidArgument, "image contains negative intensities"); }
  }
}

ComplexImage to_complex(ImageSlice const &image)
{
  ComplexImage out(image.width, image.height);
  for (std::size_t i = 0; i < image.pixels.size(); ++i) {
    out.values[i] = image.pixels[i];
  }
  return out;
}

ImageSlice magnitude(ComplexImage const &image, double pixel_spacing_mm)
{
  ImageSlice out(image.width, image.height, pixel_spacing_mm);
  for (std::size_t i = 0; i < image.values.size(); ++i) {
    out.pixels[i] = std::abs(image.values[i]);
  }
  return out;
}

void quantize_to_float32(ImageSlice &image)
{
  for (double &v : image.pixels) {
    v = static_cast<double>(static_cast<float>(v));
  }
}

} // namespace mrsim
