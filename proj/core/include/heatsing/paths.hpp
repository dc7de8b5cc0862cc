#pragma once

#include <memory>
#include <utility>
#include <span>
#include <variant>
#include <vector>

#include "heatsing/fbm.hpp"

namespace heatsing {

using Point = std::vector<double>;

double norm(std::span<const double> v);

struct ConstantPath {
  Point point;
};

/// xi(t) = anchor + c (T - t)^alpha * direction, so |xi(T) - xi(t)| = c (T - t)^alpha.
struct HolderPath {
  Point anchor;
  double c;
  double alpha;
  Point direction;  // unit vector
};

struct SampledPath {
  std::shared_ptr<const SamplePath> path;
};

/// Position xi(t) of the singular point for t in [0, T].
class SingularTrajectory {
 public:
  using Variant = std::variant<ConstantPath, HolderPath, SampledPath>;

  static SingularTrajectory constant(Point p, double horizon);
  static SingularTrajectory holder(Point anchor, double c, double alpha, Point direction,
                                   double horizon);
  /// Horizon is the sampled path's own horizon.
  static SingularTrajectory sampled(SamplePath path);

  int dim() const;
  double horizon() const { return horizon_; }
  const Variant& variant() const { return variant_; }

  /// Linear interpolation between nodes for sampled paths. Throws OutOfDomain off [0, T].
  Point eval(double t) const;

 private:
  SingularTrajectory(Variant v, double horizon);
  Variant variant_;
  double horizon_;
};

/// eta(s) = xi(T - s) - xi(T) on [0, s0].
///
/// Besides point evaluation it carries the scan nodes used by the exit and
/// occupation searches and the s-quadrature: the interpolation nodes for
/// sampled paths, a dyadic grid for analytic ones. Between consecutive scan
/// nodes |eta| is either monotone (analytic variants) or the norm of an affine
/// map (sampled variant), so it is quasi-convex on every scan segment.
class RebasedIncrement {
 public:
  int dim() const { return dim_; }
  double s0() const { return s0_; }

  Point eval(double s) const;
  double norm_at(double s) const;

  std::span<const double> scan_nodes() const { return nodes_; }
  /// |eta| at scan_nodes()[i].
  double node_norm(std::size_t i) const { return node_norms_[i]; }
  /// Location and value of the minimum of |eta| on scan segment [nodes[i], nodes[i+1]].
  std::pair<double, double> segment_minimum(std::size_t i) const;
  /// max |eta| over [0, s0].
  double max_norm() const { return max_norm_; }
  /// Absolute bisection tolerance for crossings inside [a, b].
  double crossing_tolerance(double a, double b) const;
  /// Grid spacing for sampled paths, 0 for analytic variants.
  double grid_step() const { return dt_; }

  friend RebasedIncrement rebase(const SingularTrajectory& traj, double s0);

 private:
  enum class Kind { Constant, Holder, Sampled };
  Kind kind_ = Kind::Constant;
  int dim_ = 0;
  double s0_ = 0.0;
  double dt_ = 0.0;
  double c_ = 0.0;
  double alpha_ = 0.0;
  Point direction_;
  std::vector<double> eta_;  // sampled: row-major node values at s_j = j * dt
  std::vector<double> nodes_;
  std::vector<double> node_norms_;
  double max_norm_ = 0.0;
};

/// Throws OutOfDomain unless 0 < s0 <= T.
RebasedIncrement rebase(const SingularTrajectory& traj, double s0);
inline RebasedIncrement rebase(const SingularTrajectory& traj) { return rebase(traj, traj.horizon()); }

}  // namespace heatsing
