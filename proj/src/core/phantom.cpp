#include "phantom.hpp"

#include "error.hpp"
#include "rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace mrsim {

namespace {

struct Ellipse
{
  double value;
  double a;
  double b;
  double x0;
  double y0;
  double phi_deg;

  bool contains(double x, double y) const
  {
    double const p = phi_deg * std::numbers::pi / 180.0;
    double const dx = x - x0;
    double const dy = y - y0;
    double const u = dx * std::cos(p) + dy * std::sin(p);
    double const v = -dx * std::sin(p) + dy * std::cos(p);
    return (u * u) / (a * a) + (v * v) / (b * b) <= 1.0;
  }
};

// Normalised coordinates in [-1, 1), y up.
ImageSlice render(int width, int height, double spacing, std::vector<Ellipse> const &shapes)
{
  ImageSlice img(width, height, spacing);
  validate(img);
  constexpr int ss = 2;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double acc = 0.0;
      for (int j = 0; j < ss; ++j) {
        for (int i = 0; i < ss; ++i) {
          double const px = 2.0 * (x + (i + 0.5) / ss - 0.5 - width / 2) / width;
          double const py = -2.0 * (y + (j + 0.5) / ss - 0.5 - height / 2) / height;
          for (auto const &e : shapes) {
            if (e.contains(px, py)) { acc += e.value; }
          }
        }
      }
      img.at(x, y) = std::max(0.0, acc / (ss * ss));
    }
  }
  return img;
}

} // namespace

ImageSlice shepp_logan(int width, int height, double spacing)
{
  static std::vector<Ellipse> const shapes = {
    {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},          {-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0},
    {-0.2, 0.11, 0.31, 0.22, 0.0, -18.0},      {-0.2, 0.16, 0.41, -0.22, 0.0, 18.0},
    {0.1, 0.21, 0.25, 0.0, 0.35, 0.0},         {0.1, 0.046, 0.046, 0.0, 0.1, 0.0},
    {0.1, 0.046, 0.046, 0.0, -0.1, 0.0},       {0.1, 0.046, 0.023, -0.08, -0.605, 0.0},
    {0.1, 0.023, 0.023, 0.0, -0.606, 0.0},     {0.1, 0.023, 0.046, 0.06, -0.605, 0.0},
  };
  return render(width, height, spacing, shapes);
}

ImageSlice random_head_phantom(int width, int height, std::uint64_t seed, double spacing)
{
  Xoshiro256 rng(seed);
  auto uni = [&](double lo, double hi) { return lo + (hi - lo) * rng.uniform(); };

  double const a = uni(0.62, 0.75);
  double const b = uni(0.78, 0.9);
  double const tilt = uni(-10.0, 10.0);
  double const skull = uni(0.8, 1.0);
  double const brain = uni(0.35, 0.6);
  double const thick = uni(0.04, 0.07);

  std::vector<Ellipse> shapes;
  shapes.push_back({skull, a, b, 0.0, 0.0, tilt});
  shapes.push_back({brain - skull, a - thick, b - thick, 0.0, 0.0, tilt});
  int const n = 4 + static_cast<int>(rng.below(6));
  for (int i = 0; i < n; ++i) {
    double const r = uni(0.0, 0.55);
    double const ang = uni(0.0, 2.0 * std::numbers::pi);
    double const ea = uni(0.03, 0.2);
    double const eb = uni(0.03, 0.2);
    double const value = uni(-brain, 1.0 - brain);
    shapes.push_back({value, ea, eb, r * a * std::cos(ang), r * b * std::sin(ang), uni(0.0, 180.0)});
  }
  return render(width, height, spacing, shapes);
}

ImageSlice gaussian_phantom(int width, int height, double sigma_fraction, double spacing)
{
  ImageSlice img(width, height, spacing);
  validate(img);
  double const sigma = sigma_fraction * width;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double const dx = x - width / 2;
      double const dy = y - height / 2;
      img.at(x, y) = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
    }
  }
  return img;
}

ImageSlice smooth_disc(int width, int height, double radius_fraction, double edge_fraction, double spacing)
{
  ImageSlice img(width, height, spacing);
  validate(img);
  double const r0 = radius_fraction * width;
  double const e = edge_fraction * width;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double const r = std::hypot(x - width / 2, y - height / 2);
      double v = 0.0;
      if (r <= r0 - e / 2) {
        v = 1.0;
      } else if (r < r0 + e / 2) {
        v = 0.5 * (1.0 + std::cos(std::numbers::pi * (r - (r0 - e / 2)) / e));
      }
      img.at(x, y) = v;
    }
  }
  return img;
}

} // namespace mrsim
