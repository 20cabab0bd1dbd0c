#pragma once

#include "image.hpp"
#include "sampling.hpp"

#include <vector>

namespace mrsim {

// Measured samples aligned with one excitation of `plan` (shot-major). After
// NEX averaging the excitations have been complex-averaged into one.
struct KSpaceAcquisition
{
  SamplingPlan plan;
  std::vector<Complex> values;
  bool nex_averaged = false;
  int width = 0;
  int height = 0;
  double pixel_spacing_mm = 1.0;
};

} // namespace mrsim
