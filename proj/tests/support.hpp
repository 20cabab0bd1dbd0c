#pragma once

#include "core/image.hpp"
#include "core/rng.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <span>
#include <string>

namespace testing {

inline mrsim::ImageSlice random_image(int w, int h, std::uint64_t seed)
{
  mrsim::Xoshiro256 rng(seed);
  mrsim::ImageSlice img(w, h);
  for (auto &p : img.pixels) {
    p = rng.uniform();
  }
  return img;
}

// ||a - b|| / ||b|| over complex samples.
inline double rel_error(std::span<mrsim::Complex const> a, std::span<mrsim::Complex const> b)
{
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return std::sqrt(num / den);
}

inline double max_abs_diff(mrsim::ImageSlice const &a, mrsim::ImageSlice const &b)
{
  double m = 0.0;
  for (std::size_t i = 0; i < a.pixels.size(); ++i) {
    m = std::max(m, std::abs(a.pixels[i] - b.pixels[i]));
  }
  return m;
}

// Fresh, empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(std::string const &name)
{
  auto dir = std::filesystem::temp_directory_path() / ("mrsim_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

} // namespace testing

using namespace testing;
