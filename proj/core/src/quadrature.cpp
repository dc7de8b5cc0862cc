#include "heatsing/quadrature.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>

#include <boost/math/special_functions/legendre.hpp>

namespace heatsing {

GaussLegendre::GaussLegendre(int order) {
  require(order >= 1, ErrorKind::InvalidArgument, "Gauss-Legendre order must be positive");
  const auto zeros = boost::math::legendre_p_zeros<double>(order);
  // zeros holds the nonnegative roots in increasing order.
  for (double x : zeros) {
    const double dp = boost::math::legendre_p_prime(order, x);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    if (x == 0.0) {
      nodes_.push_back(0.0);
      weights_.push_back(w);
    } else {
      nodes_.push_back(-x);
      weights_.push_back(w);
      nodes_.push_back(x);
      weights_.push_back(w);
    }
  }
  std::vector<std::size_t> idx(nodes_.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return nodes_[a] < nodes_[b]; });
  std::vector<double> n, w;
  for (auto i : idx) {
    n.push_back(nodes_[i]);
    w.push_back(weights_[i]);
  }
  nodes_ = std::move(n);
  weights_ = std::move(w);
}

const GaussLegendre& GaussLegendre::get(int order) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<GaussLegendre>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[order];
  if (!slot) slot.reset(new GaussLegendre(order));
  return *slot;
}

std::vector<double> geometric_mesh(double end, int panels, double ratio) {
  require(end > 0.0 && panels >= 1 && ratio > 0.0 && ratio < 1.0, ErrorKind::InvalidArgument,
          "geometric mesh needs end > 0, panels >= 1, ratio in (0,1)");
  std::vector<double> pts;
  pts.reserve(static_cast<std::size_t>(panels) + 2);
  pts.push_back(0.0);
  for (int k = panels; k >= 0; --k) pts.push_back(end * std::pow(ratio, k));
  return pts;
}

std::vector<double> merge_breakpoints(std::span<const double> a, std::span<const double> b,
                                      double lo, double hi) {
  std::vector<double> all;
  all.reserve(a.size() + b.size() + 2);
  all.push_back(lo);
  all.push_back(hi);
  for (double x : a)
    if (x > lo && x < hi) all.push_back(x);
  for (double x : b)
    if (x > lo && x < hi) all.push_back(x);
  std::sort(all.begin(), all.end());
  std::vector<double> out;
  out.reserve(all.size());
  for (double x : all) {
    if (!out.empty() && x - out.back() <= 1e-14 * std::max(std::abs(x), 1e-300)) continue;
    out.push_back(x);
  }
  if (out.back() != hi) out.back() = hi;
  return out;
}

}  // namespace heatsing
