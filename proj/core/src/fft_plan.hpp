#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace heatsing::detail {

/// In-place forward complex DFT of a fixed length, backed by an FFTW plan.
/// Planning happens under a global lock; execute() is safe to call
/// concurrently on distinct buffers obtained from allocate().
class ForwardFft {
 public:
  explicit ForwardFft(std::size_t n);
  ~ForwardFft();
  ForwardFft(const ForwardFft&) = delete;
  ForwardFft& operator=(const ForwardFft&) = delete;

  std::size_t size() const { return n_; }
  void execute(std::span<std::complex<double>> data) const;

 private:
  std::size_t n_;
  void* plan_;
};

constexpr bool is_power_of_two(std::size_t n) { return n >= 1 && (n & (n - 1)) == 0; }

}  // namespace heatsing::detail
