#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace heatsing {

namespace detail {
class ForwardFft;
}

/// Hurst index H in (0, 1). Values above 1/2 are accepted but flagged as
/// outside the range the scaling theory covers.
class HurstExponent {
 public:
  explicit HurstExponent(double h);
  double value() const { return h_; }
  bool in_theory_range() const { return h_ <= 0.5; }

 private:
  double h_;
};

struct FgnSpec {
  HurstExponent hurst;
  std::size_t grid_len;  // power of two, >= 2
  double dt;
  std::uint64_t seed;
};

/// Discretized trajectory on the uniform grid t_k = k * dt, k = 0..steps.
/// Values are stored row-major, one row of `dim` coordinates per node.
class SamplePath {
 public:
  SamplePath(int dim, double dt, std::vector<double> values,
             std::optional<HurstExponent> hurst = std::nullopt);

  int dim() const { return dim_; }
  double dt() const { return dt_; }
  std::size_t steps() const { return values_.size() / static_cast<std::size_t>(dim_) - 1; }
  double horizon() const { return dt_ * static_cast<double>(steps()); }
  double time(std::size_t k) const { return dt_ * static_cast<double>(k); }
  std::span<const double> node(std::size_t k) const {
    return {values_.data() + k * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }
  std::span<const double> values() const { return values_; }
  const std::optional<HurstExponent>& hurst() const { return hurst_; }

 private:
  int dim_;
  double dt_;
  std::vector<double> values_;
  std::optional<HurstExponent> hurst_;
};

/// rho_H(k) = (|k+1|^{2H} - 2|k|^{2H} + |k-1|^{2H}) / 2.
double fgn_autocovariance(std::size_t k, HurstExponent h);

/// Circulant-embedding sampler for fractional Gaussian noise of a fixed
/// length. The spectrum is computed once; each draw costs one FFT.
class FgnSampler {
 public:
  static constexpr double kEigenTolerance = 1e-9;

  FgnSampler(HurstExponent h, std::size_t grid_len);

  HurstExponent hurst() const { return hurst_; }
  std::size_t grid_len() const { return grid_len_; }

  /// Mean-zero sequence with autocovariance rho_H(k) * dt^{2H}.
  std::vector<double> sample(std::uint64_t seed, double dt) const;

  /// Smallest eigenvalue of the embedding before clamping.
  double min_eigenvalue() const { return min_eigenvalue_; }

 private:
  HurstExponent hurst_;
  std::size_t grid_len_;
  std::vector<double> sqrt_eigen_;  // sqrt(lambda_k / m), m = 2 * grid_len
  std::shared_ptr<const detail::ForwardFft> fft_;
  double min_eigenvalue_ = 0.0;
};

std::vector<double> generate_fgn(const FgnSpec& spec);

/// Seed of scalar component `component` in ensemble member `replica`.
std::uint64_t fbm_component_seed(std::uint64_t base, std::uint64_t replica,
                                 std::uint64_t component);

/// N-dimensional fBm started at the origin: each coordinate is the cumulative
/// sum of an independent fGn stream. Requires T == grid_len * dt.
SamplePath generate_fbm_path(const FgnSpec& spec, int dim, double horizon,
                             std::uint64_t replica = 0);

/// Same as above, reusing a prebuilt sampler (ensemble runs).
SamplePath generate_fbm_path(const FgnSampler& sampler, std::uint64_t base_seed, int dim,
                             double dt, std::uint64_t replica = 0);

/// Empirical autocovariance of fGn against rho_H(k) dt^{2H}, dt = 1 / grid_len.
/// Each replica contributes its lag-k sample autocovariance (known zero mean);
/// the band is `band` standard errors of the mean over replicas.
struct AutocovarianceReport {
  double hurst = 0.0;
  std::size_t grid_len = 0;
  std::size_t replicas = 0;
  double dt = 0.0;
  double band = 3.0;
  std::vector<double> expected;  // index = lag
  std::vector<double> empirical;
  std::vector<double> std_error;
  bool pass = false;

  /// (empirical - expected) / std_error at lag k.
  double z_score(std::size_t k) const;
};

/// Replica i draws from derive_seed(base_seed, {i}); results do not depend on `threads`.
AutocovarianceReport check_autocovariance(const FgnSampler& sampler, std::size_t replicas,
                                          std::size_t max_lag, std::uint64_t base_seed,
                                          double band = 3.0, unsigned threads = 1);

}  // namespace heatsing
