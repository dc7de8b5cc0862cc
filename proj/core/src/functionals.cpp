#include "heatsing/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "heatsing/errors.hpp"

namespace heatsing {

RadiusGrid::RadiusGrid(std::vector<double> radii, double ratio)
    : radii_(std::move(radii)), ratio_(ratio) {}

RadiusGrid RadiusGrid::geometric(double r_max, double ratio, std::size_t count) {
  require(r_max > 0.0, ErrorKind::InvalidArgument, "r_max must be positive");
  require(ratio > 0.0 && ratio < 1.0, ErrorKind::InvalidArgument, "grid ratio must lie in (0,1)");
  require(count >= kMinCount, ErrorKind::InvalidArgument, "radius grid needs at least 8 radii");
  std::vector<double> radii(count);
  for (std::size_t i = 0; i < count; ++i) radii[i] = r_max * std::pow(ratio, static_cast<double>(i));
  return RadiusGrid(std::move(radii), ratio);
}

RadiusGrid RadiusGrid::extended_below(std::size_t extra) const {
  return geometric(radii_.front(), ratio_, radii_.size() + extra);
}

RadiusGrid RadiusGrid::extended_above(std::size_t extra) const {
  std::vector<double> radii(extra);
  for (std::size_t k = 0; k < extra; ++k)
    radii[k] = radii_.front() * std::pow(ratio_, -static_cast<double>(extra - k));
  radii.insert(radii.end(), radii_.begin(), radii_.end());
  return RadiusGrid(std::move(radii), ratio_);
}

namespace {

struct ScanPoint {
  double s;
  double norm;
};

// Scan nodes of eta restricted to [0, s0], with s0 itself as the last node.
std::vector<ScanPoint> scan(const RebasedIncrement& eta, double s0) {
  require(s0 > 0.0 && s0 <= eta.s0() * (1.0 + 1e-12), ErrorKind::OutOfDomain,
          "s0 outside (0, eta.s0]");
  s0 = std::min(s0, eta.s0());
  const auto nodes = eta.scan_nodes();
  std::vector<ScanPoint> out;
  out.reserve(nodes.size());
  for (std::size_t i = 0; i < nodes.size() && nodes[i] < s0; ++i)
    out.push_back({nodes[i], eta.node_norm(i)});
  out.push_back({s0, eta.norm_at(s0)});
  return out;
}

// Crossing of |eta| = r between lo and hi, where inside(lo) != inside(hi).
double bisect(const RebasedIncrement& eta, double r, double lo, double hi, bool lo_inside) {
  const double tol = eta.crossing_tolerance(lo, hi);
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const bool in = eta.norm_at(mid) <= r;
    if (in == lo_inside)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double first_exit_time(const RebasedIncrement& eta, double r, double s0) {
  require(r > 0.0, ErrorKind::InvalidArgument, "radius must be positive");
  const auto pts = scan(eta, s0);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    // Quasi-convexity on each segment: if |eta| exceeds r anywhere inside,
    // it does so at the right endpoint or the segment dips back below.
    if (pts[i].norm > r) return bisect(eta, r, pts[i - 1].s, pts[i].s, true);
  }
  return pts.back().s;
}

std::vector<Interval> occupation_set(const RebasedIncrement& eta, double r, double s0) {
  require(r > 0.0, ErrorKind::InvalidArgument, "radius must be positive");
  const auto pts = scan(eta, s0);
  const auto nodes = eta.scan_nodes();
  std::vector<Interval> out;
  auto add = [&](double a, double b) {
    if (!(b > a)) return;
    if (!out.empty() && a <= out.back().second) {
      out.back().second = std::max(out.back().second, b);
    } else {
      out.emplace_back(a, b);
    }
  };
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double a = pts[i].s;
    const double b = pts[i + 1].s;
    const bool ina = pts[i].norm <= r;
    const bool inb = pts[i + 1].norm <= r;
    if (ina && inb) {
      add(a, b);
    } else if (ina) {
      add(a, bisect(eta, r, a, b, true));
    } else if (inb) {
      add(bisect(eta, r, a, b, false), b);
    } else if (i + 1 < nodes.size() && nodes[i + 1] == b) {
      // Both endpoints outside: the segment may still dip into the ball.
      const auto [smin, nmin] = eta.segment_minimum(i);
      if (nmin <= r && smin > a && smin < b) add(bisect(eta, r, a, smin, false), bisect(eta, r, smin, b, true));
    } else {
      // Truncated last segment [a, s0]: locate the dip by sampling the full segment.
      const auto [smin, nmin] = eta.segment_minimum(i);
      if (nmin <= r && smin > a) {
        const double hi = std::min(smin, b);
        const double left = bisect(eta, r, a, hi, false);
        const double right = smin < b ? bisect(eta, r, smin, b, true) : b;
        add(left, right);
      }
    }
  }
  return out;
}

double occupation_time(const RebasedIncrement& eta, double r, double s0) {
  double total = 0.0;
  for (const auto& [a, b] : occupation_set(eta, r, s0)) total += b - a;
  return total;
}

std::size_t ExitOccupationCurve::index_of(double r) const {
  for (std::size_t i = 0; i < radii.size(); ++i)
    if (std::abs(radii[i] - r) <= 1e-9 * r) return i;
  return npos;
}

double ExitOccupationCurve::tau_at(double l) const {
  if (l >= max_norm) return s0;
  // radii are decreasing.
  if (l >= radii.front()) {
    const double w = (l - radii.front()) / (max_norm - radii.front());
    return tau.front() + w * (s0 - tau.front());
  }
  if (l <= radii.back()) return tau.back() * (l / radii.back());
  std::size_t i = 0;
  while (radii[i + 1] > l) ++i;
  const double w = (l - radii[i + 1]) / (radii[i] - radii[i + 1]);
  return tau[i + 1] + w * (tau[i] - tau[i + 1]);
}

ExitOccupationCurve exit_occupation_curve(const RebasedIncrement& eta, std::span<const double> radii,
                                          double s0) {
  require(std::adjacent_find(radii.begin(), radii.end(), std::less_equal<>()) == radii.end(),
          ErrorKind::InvalidArgument, "radii must be strictly decreasing");
  ExitOccupationCurve curve;
  curve.s0 = std::min(s0, eta.s0());
  curve.max_norm = 0.0;
  for (const auto& p : scan(eta, s0)) curve.max_norm = std::max(curve.max_norm, p.norm);
  curve.radii.assign(radii.begin(), radii.end());
  for (double r : radii) {
    curve.sigma.push_back(first_exit_time(eta, r, s0));
    curve.tau.push_back(occupation_time(eta, r, s0));
  }
  return curve;
}

double tail_integral(const ExitOccupationCurve& curve, double r, int dim, double c0) {
  require(dim >= 1, ErrorKind::InvalidArgument, "dimension must be >= 1");
  require(r > 0.0 && r < c0, ErrorKind::InvalidArgument, "tail integral needs 0 < r < c0");
  require(c0 >= curve.max_norm, ErrorKind::InvalidArgument,
          "c0 must be at least max|eta| so that tau(c0) = s0");

  std::vector<double> knots{r};
  std::size_t inside = 0;
  for (auto it = curve.radii.rbegin(); it != curve.radii.rend(); ++it) {
    if (*it >= r * (1.0 - 1e-12) && *it <= c0) ++inside;
    if (*it > r * (1.0 + 1e-12) && *it < c0) knots.push_back(*it);
  }
  if (inside < 4) {
    fail(ErrorKind::GridTooCoarse, "only " + std::to_string(inside) +
                                       " tabulated radii in [r, c0] (need 4)");
  }
  knots.push_back(c0);

  const double n = static_cast<double>(dim);
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
    const double a = knots[k];
    const double b = knots[k + 1];
    const double ta = curve.tau_at(a);
    const double tb = curve.tau_at(b);
    const double slope = (tb - ta) / (b - a);
    // r^N int_a^b (ta + slope (l - a)) l^{-N-1} dl, with r^N folded into the powers.
    const double w0 = (std::pow(r / a, n) - std::pow(r / b, n)) / n;
    double w1;
    if (dim == 1) {
      w1 = r * std::log(b / a);
    } else {
      w1 = r * (std::pow(r / a, n - 1.0) - std::pow(r / b, n - 1.0)) / (n - 1.0);
    }
    sum += (ta - slope * a) * w0 + slope * w1;
  }
  sum += curve.s0 * std::pow(r / c0, n) / n;
  return sum;
}

}  // namespace heatsing
