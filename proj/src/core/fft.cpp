#include "fft.hpp"

#include "error.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <utility>

namespace mrsim {

namespace {

// The FFTW planner is not re-entrant; execution with new-array functions is.
std::mutex &planner_mutex()
{
  static std::mutex m;
  return m;
}

fftw_plan plan_for(int width, int height, bool inverse)
{
  static std::map<std::tuple<int, int, bool>, fftw_plan> cache;
  std::lock_guard lock(planner_mutex());
  auto const key = std::make_tuple(width, height, inverse);
  if (auto it = cache.find(key); it != cache.end()) { return it->second; }
  // FFTW_ESTIMATE keeps plans (and hence results) independent of timing.
  auto *scratch = fftw_alloc_complex(static_cast<std::size_t>(width) * height);
  fftw_plan p = fftw_plan_dft_2d(height, width, scratch, scratch, inverse ? FFTW_BACKWARD : FFTW_FORWARD,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(scratch);
  if (!p) { fail(ErrorCode::Numeric, "FFTW could not create a plan"); }
  cache.emplace(key, p);
  return p;
}

enum class BatchKind { RealRows, Columns };

fftw_plan batch_plan_for(BatchKind kind, int n, int howmany, bool inverse)
{
  static std::map<std::tuple<BatchKind, int, int, bool>, fftw_plan> cache;
  std::lock_guard lock(planner_mutex());
  auto const key = std::make_tuple(kind, n, howmany, inverse);
  if (auto it = cache.find(key); it != cache.end()) { return it->second; }
  fftw_plan p = nullptr;
  if (kind == BatchKind::RealRows) {
    int const half = n / 2 + 1;
    auto *in = fftw_alloc_real(static_cast<std::size_t>(n) * howmany);
    auto *out = fftw_alloc_complex(static_cast<std::size_t>(half) * howmany);
    p = fftw_plan_many_dft_r2c(1, &n, howmany, in, nullptr, 1, n, out, nullptr, 1, half,
                               FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(in);
    fftw_free(out);
  } else {
    auto *buf = fftw_alloc_complex(static_cast<std::size_t>(n) * howmany);
    p = fftw_plan_many_dft(1, &n, howmany, buf, nullptr, howmany, 1, buf, nullptr, howmany, 1,
                           inverse ? FFTW_BACKWARD : FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
  }
  if (!p) { fail(ErrorCode::Numeric, "FFTW could not create a plan"); }
  cache.emplace(key, p);
  return p;
}

} // namespace

void real_rows_forward(std::span<double> in, std::span<Complex> out, int n, int rows)
{
  if (in.size() != static_cast<std::size_t>(n) * rows ||
      out.size() != static_cast<std::size_t>(n / 2 + 1) * rows) {
    fail(ErrorCode::InvalidArgument, "FFT buffer size does not match its shape");
  }
  fftw_execute_dft_r2c(batch_plan_for(BatchKind::RealRows, n, rows, false), in.data(),
                       reinterpret_cast<fftw_complex *>(out.data()));
}

void columns_inplace(std::span<Complex> data, int n, int columns, bool inverse)
{
  if (data.size() != static_cast<std::size_t>(n) * columns) {
    fail(ErrorCode::InvalidArgument, "FFT buffer size does not match its shape");
  }
  auto *buf = reinterpret_cast<fftw_complex *>(data.data());
  fftw_execute_dft(batch_plan_for(BatchKind::Columns, n, columns, inverse), buf, buf);
}

void fft2_inplace(std::span<Complex> data, int width, int height, bool inverse)
{
  if (data.size() != static_cast<std::size_t>(width) * height) {
    fail(ErrorCode::InvalidArgument, "FFT buffer size does not match its shape");
  }
  auto *buf = reinterpret_cast<fftw_complex *>(data.data());
  fftw_execute_dft(plan_for(width, height, inverse), buf, buf);
}

void swap_quadrants(ComplexImage &image)
{
  int const w = image.width;
  int const h = image.height;
  if (w % 2 || h % 2) { fail(ErrorCode::InvalidArgument, "quadrant swap needs even dimensions"); }
  int const hw = w / 2;
  int const hh = h / 2;
  for (int y = 0; y < hh; ++y) {
    for (int x = 0; x < w; ++x) {
      int const x2 = (x + hw) % w;
      std::swap(image.at(x, y), image.at(x2, y + hh));
    }
  }
}

ComplexImage centered_fft2(ComplexImage const &image)
{
  ComplexImage out = image;
  swap_quadrants(out);
  fft2_inplace(out.values, out.width, out.height, false);
  swap_quadrants(out);
  return out;
}

ComplexImage centered_ifft2(ComplexImage const &spectrum)
{
  ComplexImage out = spectrum;
  swap_quadrants(out);
  fft2_inplace(out.values, out.width, out.height, true);
  swap_quadrants(out);
  double const scale = 1.0 / (static_cast<double>(out.width) * out.height);
  for (auto &v : out.values) {
    v *= scale;
  }
  return out;
}

} // namespace mrsim
