#include "fft_plan.hpp"

#include <fftw3.h>

#include <mutex>
#include <vector>

#include "heatsing/errors.hpp"

namespace heatsing::detail {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

ForwardFft::ForwardFft(std::size_t n) : n_(n), plan_(nullptr) {
  require(n >= 1, ErrorKind::InvalidArgument, "FFT length must be positive");
  // FFTW_ESTIMATE leaves the scratch buffer untouched and yields the same
  // plan on every run, which keeps sampled paths bit-reproducible.
  std::vector<std::complex<double>> scratch(n);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  std::lock_guard lock(planner_mutex());
  plan_ = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_FORWARD,
                           FFTW_ESTIMATE | FFTW_UNALIGNED);
  require(plan_ != nullptr, ErrorKind::InvalidArgument, "FFTW could not plan the transform");
}

ForwardFft::~ForwardFft() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_));
}

void ForwardFft::execute(std::span<std::complex<double>> data) const {
  require(data.size() == n_, ErrorKind::InvalidArgument, "FFT buffer length mismatch");
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(static_cast<fftw_plan>(plan_), buf, buf);
}

}  // namespace heatsing::detail
