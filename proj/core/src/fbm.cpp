#include "heatsing/fbm.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "fft_plan.hpp"
#include "heatsing/errors.hpp"
#include "heatsing/parallel.hpp"
#include "heatsing/seeding.hpp"

namespace heatsing {

HurstExponent::HurstExponent(double h) : h_(h) {
  require(h > 0.0 && h < 1.0, ErrorKind::InvalidArgument,
          "Hurst exponent must lie in (0,1), got " + std::to_string(h));
}

SamplePath::SamplePath(int dim, double dt, std::vector<double> values,
                       std::optional<HurstExponent> hurst)
    : dim_(dim), dt_(dt), values_(std::move(values)), hurst_(hurst) {
  require(dim >= 1, ErrorKind::InvalidArgument, "path dimension must be >= 1");
  require(dt > 0.0, ErrorKind::InvalidArgument, "path time step must be positive");
  require(values_.size() % static_cast<std::size_t>(dim) == 0 &&
              values_.size() / static_cast<std::size_t>(dim) >= 2,
          ErrorKind::InvalidArgument, "path needs at least two nodes of matching dimension");
}

double fgn_autocovariance(std::size_t k, HurstExponent h) {
  const double two_h = 2.0 * h.value();
  const double kk = static_cast<double>(k);
  if (k == 0) return 1.0;
  return 0.5 * (std::pow(kk + 1.0, two_h) - 2.0 * std::pow(kk, two_h) +
                std::pow(kk - 1.0, two_h));
}

FgnSampler::FgnSampler(HurstExponent h, std::size_t grid_len) : hurst_(h), grid_len_(grid_len) {
  require(grid_len >= 2 && detail::is_power_of_two(grid_len), ErrorKind::InvalidArgument,
          "fGn grid length must be a power of two >= 2");
  const std::size_t m = 2 * grid_len;
  std::vector<std::complex<double>> row(m);
  for (std::size_t k = 0; k <= grid_len; ++k) row[k] = fgn_autocovariance(k, h);
  for (std::size_t k = grid_len + 1; k < m; ++k) row[k] = row[m - k];
  fft_ = std::make_shared<const detail::ForwardFft>(m);
  fft_->execute(row);

  double max_eig = 0.0;
  for (const auto& c : row) max_eig = std::max(max_eig, c.real());
  const double tol = kEigenTolerance * max_eig;
  min_eigenvalue_ = row[0].real();
  sqrt_eigen_.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    double lambda = row[k].real();
    min_eigenvalue_ = std::min(min_eigenvalue_, lambda);
    if (lambda < -tol) {
      fail(ErrorKind::NegativeEigenvalue, "circulant eigenvalue " + std::to_string(lambda) +
                                              " below -" + std::to_string(tol));
    }
    lambda = std::max(lambda, 0.0);
    sqrt_eigen_[k] = std::sqrt(lambda / static_cast<double>(m));
  }
}

std::vector<double> FgnSampler::sample(std::uint64_t seed, double dt) const {
  require(dt > 0.0, ErrorKind::InvalidArgument, "fGn time step must be positive");
  const std::size_t m = sqrt_eigen_.size();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<std::complex<double>> w(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double re = normal(rng);
    const double im = normal(rng);
    w[k] = {sqrt_eigen_[k] * re, sqrt_eigen_[k] * im};
  }
  fft_->execute(w);
  const double scale = std::pow(dt, hurst_.value());
  std::vector<double> out(grid_len_);
  for (std::size_t k = 0; k < grid_len_; ++k) out[k] = scale * w[k].real();
  return out;
}

std::vector<double> generate_fgn(const FgnSpec& spec) {
  return FgnSampler(spec.hurst, spec.grid_len).sample(spec.seed, spec.dt);
}

std::uint64_t fbm_component_seed(std::uint64_t base, std::uint64_t replica,
                                 std::uint64_t component) {
  return derive_seed(base, {replica, component});
}

SamplePath generate_fbm_path(const FgnSampler& sampler, std::uint64_t base_seed, int dim,
                             double dt, std::uint64_t replica) {
  require(dim >= 1, ErrorKind::InvalidArgument, "path dimension must be >= 1");
  const std::size_t n = sampler.grid_len();
  const auto d = static_cast<std::size_t>(dim);
  std::vector<double> values((n + 1) * d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    const auto inc = sampler.sample(fbm_component_seed(base_seed, replica, j), dt);
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      acc += inc[k];
      values[(k + 1) * d + j] = acc;
    }
  }
  return SamplePath(dim, dt, std::move(values), sampler.hurst());
}

SamplePath generate_fbm_path(const FgnSpec& spec, int dim, double horizon,
                             std::uint64_t replica) {
  const double expected = spec.dt * static_cast<double>(spec.grid_len);
  require(std::abs(horizon - expected) <= 1e-12 * expected, ErrorKind::InvalidArgument,
          "horizon must equal grid_len * dt");
  return generate_fbm_path(FgnSampler(spec.hurst, spec.grid_len), spec.seed, dim, spec.dt,
                           replica);
}

double AutocovarianceReport::z_score(std::size_t k) const {
  return (empirical.at(k) - expected.at(k)) / std_error.at(k);
}

AutocovarianceReport check_autocovariance(const FgnSampler& sampler, std::size_t replicas,
                                          std::size_t max_lag, std::uint64_t base_seed,
                                          double band, unsigned threads) {
  const std::size_t n = sampler.grid_len();
  require(replicas >= 2, ErrorKind::InvalidArgument, "autocovariance check needs two replicas");
  require(max_lag < n, ErrorKind::InvalidArgument, "max lag must be below the grid length");
  require(band > 0.0, ErrorKind::InvalidArgument, "band must be positive");
  AutocovarianceReport rep;
  rep.hurst = sampler.hurst().value();
  rep.grid_len = n;
  rep.replicas = replicas;
  rep.dt = 1.0 / static_cast<double>(n);
  rep.band = band;
  const std::size_t lags = max_lag + 1;

  std::vector<double> per(replicas * lags);
  parallel_for(replicas, threads, [&](std::size_t i) {
    const auto x = sampler.sample(derive_seed(base_seed, {i}), rep.dt);
    for (std::size_t k = 0; k < lags; ++k) {
      double acc = 0.0;
      for (std::size_t j = 0; j + k < n; ++j) acc += x[j] * x[j + k];
      per[i * lags + k] = acc / static_cast<double>(n - k);
    }
  });

  const double scale = std::pow(rep.dt, 2.0 * rep.hurst);
  const double m = static_cast<double>(replicas);
  rep.pass = true;
  for (std::size_t k = 0; k < lags; ++k) {
    double mean = 0.0;
    for (std::size_t i = 0; i < replicas; ++i) mean += per[i * lags + k];
    mean /= m;
    double ss = 0.0;
    for (std::size_t i = 0; i < replicas; ++i) ss += (per[i * lags + k] - mean) * (per[i * lags + k] - mean);
    rep.expected.push_back(fgn_autocovariance(k, sampler.hurst()) * scale);
    rep.empirical.push_back(mean);
    rep.std_error.push_back(std::sqrt(ss / (m - 1.0) / m));
    rep.pass = rep.pass && std::abs(rep.z_score(k)) <= band;
  }
  return rep;
}

}  // namespace heatsing
