#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "heatsing/paths.hpp"

namespace heatsing {

/// Geometric radii r_max, r_max q, ..., r_max q^{m-1}, strictly decreasing.
class RadiusGrid {
 public:
  static constexpr std::size_t kMinCount = 8;

  static RadiusGrid geometric(double r_max, double ratio, std::size_t count);

  std::span<const double> radii() const { return radii_; }
  double ratio() const { return ratio_; }
  std::size_t size() const { return radii_.size(); }
  double operator[](std::size_t i) const { return radii_[i]; }

  /// Same ratio, `extra` additional radii below the smallest one.
  RadiusGrid extended_below(std::size_t extra) const;
  /// Same ratio, `extra` additional radii above the largest one.
  RadiusGrid extended_above(std::size_t extra) const;

 private:
  RadiusGrid(std::vector<double> radii, double ratio);
  std::vector<double> radii_;
  double ratio_;
};

using Interval = std::pair<double, double>;

/// sigma(r) = inf{ s in [0, s0] : |eta(s)| > r }, or s0 if the path never leaves.
double first_exit_time(const RebasedIncrement& eta, double r, double s0);
inline double first_exit_time(const RebasedIncrement& eta, double r) {
  return first_exit_time(eta, r, eta.s0());
}

/// Disjoint, increasing intervals whose union is { s in [0, s0] : |eta(s)| <= r }.
std::vector<Interval> occupation_set(const RebasedIncrement& eta, double r, double s0);

/// tau(r): Lebesgue measure of occupation_set(eta, r, s0).
double occupation_time(const RebasedIncrement& eta, double r, double s0);
inline double occupation_time(const RebasedIncrement& eta, double r) {
  return occupation_time(eta, r, eta.s0());
}

struct ExitOccupationCurve {
  double s0 = 0.0;
  double max_norm = 0.0;        // max |eta| on [0, s0]
  std::vector<double> radii;    // decreasing
  std::vector<double> sigma;
  std::vector<double> tau;

  std::size_t size() const { return radii.size(); }
  /// Index of radius r on the grid (relative match), or npos.
  std::size_t index_of(double r) const;
  /// tau at an arbitrary l: tabulated values interpolated linearly, s0 beyond max_norm.
  double tau_at(double l) const;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

ExitOccupationCurve exit_occupation_curve(const RebasedIncrement& eta, std::span<const double> radii,
                                          double s0);
inline ExitOccupationCurve exit_occupation_curve(const RebasedIncrement& eta,
                                                 const RadiusGrid& grid) {
  return exit_occupation_curve(eta, grid.radii(), eta.s0());
}

/// r^N [ int_r^{c0} tau(l) l^{-N-1} dl + tau(c0) c0^{-N} / N ].
///
/// tau is taken piecewise linear between tabulated radii and each panel is
/// integrated exactly against l^{-N-1}. Requires c0 >= max |eta| so that
/// tau(c0) = s0; throws GridTooCoarse when fewer than four tabulated radii
/// lie in [r, c0].
double tail_integral(const ExitOccupationCurve& curve, double r, int dim, double c0);

}  // namespace heatsing
