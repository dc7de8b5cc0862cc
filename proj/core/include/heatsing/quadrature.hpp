#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <queue>
#include <span>
#include <vector>

#include "heatsing/errors.hpp"

namespace heatsing {

/// Gauss-Legendre rule on [-1, 1]. Rules are built once per order and cached.
class GaussLegendre {
 public:
  static const GaussLegendre& get(int order);

  int order() const { return static_cast<int>(nodes_.size()); }
  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }

  template <class F>
  double integrate(F&& f, double a, double b) const {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) sum += weights_[i] * f(mid + half * nodes_[i]);
    return half * sum;
  }

 private:
  explicit GaussLegendre(int order);
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

struct AdaptiveOptions {
  int order = 8;
  double rel_tol = 1e-6;
  double abs_tol = 0.0;
  std::size_t max_panels = 1u << 20;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t panels = 0;
};

/// Globally adaptive composite Gauss-Legendre over the given breakpoints.
///
/// Each panel is integrated with orders `order` and `order/2`; their
/// difference is the panel error estimate. The panel with the largest
/// estimate is bisected until the summed estimate is below
/// max(rel_tol * |value|, abs_tol). Throws ToleranceNotMet when the panel
/// budget runs out or panels can no longer be split.
template <class F>
QuadratureResult integrate_adaptive(F&& f, std::span<const double> breakpoints,
                                    const AdaptiveOptions& opt) {
  require(breakpoints.size() >= 2, ErrorKind::InvalidArgument, "need at least one panel");
  const auto& hi = GaussLegendre::get(opt.order);
  const auto& lo = GaussLegendre::get(std::max(2, opt.order / 2));

  struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
  };
  auto make = [&](double a, double b) {
    const double q = hi.integrate(f, a, b);
    const double r = lo.integrate(f, a, b);
    return Panel{a, b, q, std::abs(q - r)};
  };

  std::priority_queue<Panel> heap;
  double value = 0.0;
  double error = 0.0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const double a = breakpoints[i];
    const double b = breakpoints[i + 1];
    if (!(b > a)) continue;
    Panel p = make(a, b);
    value += p.value;
    error += p.error;
    heap.push(p);
  }

  std::vector<Panel> frozen;
  while (!heap.empty()) {
    const double target = std::max(opt.rel_tol * std::abs(value), opt.abs_tol);
    if (error <= target) break;
    if (heap.size() + frozen.size() >= opt.max_panels) break;
    Panel p = heap.top();
    heap.pop();
    const double mid = 0.5 * (p.a + p.b);
    if (!(mid > p.a && mid < p.b) || (p.b - p.a) <= 1e-14 * std::abs(mid)) {
      frozen.push_back(p);
      continue;
    }
    Panel left = make(p.a, mid);
    Panel right = make(mid, p.b);
    value += left.value + right.value - p.value;
    error += left.error + right.error - p.error;
    heap.push(left);
    heap.push(right);
  }

  // Resum from scratch so the result does not depend on the running-sum order.
  QuadratureResult out;
  std::vector<Panel> all = std::move(frozen);
  while (!heap.empty()) {
    all.push_back(heap.top());
    heap.pop();
  }
  std::sort(all.begin(), all.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
  for (const auto& p : all) {
    out.value += p.value;
    out.error += p.error;
  }
  out.panels = all.size();
  const double target = std::max(opt.rel_tol * std::abs(out.value), opt.abs_tol);
  if (out.error > target) {
    fail(ErrorKind::ToleranceNotMet,
         "adaptive quadrature stalled: error estimate " + std::to_string(out.error) +
             " above target " + std::to_string(target));
  }
  return out;
}

/// Geometric mesh on [0, end] accumulating at 0: end, end*ratio, ..., end*ratio^panels, 0.
/// Returned in increasing order.
std::vector<double> geometric_mesh(double end, int panels, double ratio = 0.5);

/// Sorted union of two breakpoint sets restricted to [lo, hi]; near-duplicates are merged.
std::vector<double> merge_breakpoints(std::span<const double> a, std::span<const double> b,
                                      double lo, double hi);

}  // namespace heatsing
