#include "heatsing/paths.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "heatsing/errors.hpp"

namespace heatsing {

namespace {

// Dyadic scan grid for analytic paths: s0 * 2^-k down to this depth.
constexpr int kAnalyticScanLevels = 160;

}  // namespace

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

SingularTrajectory::SingularTrajectory(Variant v, double horizon)
    : variant_(std::move(v)), horizon_(horizon) {
  require(horizon > 0.0, ErrorKind::InvalidArgument, "trajectory horizon must be positive");
}

SingularTrajectory SingularTrajectory::constant(Point p, double horizon) {
  require(!p.empty(), ErrorKind::InvalidArgument, "constant path needs a point");
  return SingularTrajectory(ConstantPath{std::move(p)}, horizon);
}

SingularTrajectory SingularTrajectory::holder(Point anchor, double c, double alpha,
                                              Point direction, double horizon) {
  require(!anchor.empty() && anchor.size() == direction.size(), ErrorKind::InvalidArgument,
          "Holder path anchor and direction must share a dimension");
  require(c > 0.0, ErrorKind::InvalidArgument, "Holder constant must be positive");
  require(alpha > 0.0 && alpha <= 1.0, ErrorKind::InvalidArgument,
          "Holder exponent must lie in (0,1]");
  const double len = norm(direction);
  require(len > 0.0, ErrorKind::InvalidArgument, "Holder direction must be nonzero");
  for (double& x : direction) x /= len;
  return SingularTrajectory(HolderPath{std::move(anchor), c, alpha, std::move(direction)},
                            horizon);
}

SingularTrajectory SingularTrajectory::sampled(SamplePath path) {
  const double horizon = path.horizon();
  return SingularTrajectory(SampledPath{std::make_shared<const SamplePath>(std::move(path))},
                            horizon);
}

int SingularTrajectory::dim() const {
  return std::visit(
      [](const auto& v) -> int {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, ConstantPath>) return static_cast<int>(v.point.size());
        if constexpr (std::is_same_v<V, HolderPath>) return static_cast<int>(v.anchor.size());
        if constexpr (std::is_same_v<V, SampledPath>) return v.path->dim();
      },
      variant_);
}

Point SingularTrajectory::eval(double t) const {
  require(t >= 0.0 && t <= horizon_, ErrorKind::OutOfDomain,
          "t = " + std::to_string(t) + " outside [0, T]");
  return std::visit(
      [&](const auto& v) -> Point {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, ConstantPath>) {
          return v.point;
        } else if constexpr (std::is_same_v<V, HolderPath>) {
          Point out = v.anchor;
          const double amp = v.c * std::pow(horizon_ - t, v.alpha);
          for (std::size_t i = 0; i < out.size(); ++i) out[i] += amp * v.direction[i];
          return out;
        } else {
          const SamplePath& p = *v.path;
          const std::size_t n = p.steps();
          const double x = t / p.dt();
          std::size_t k = std::min(static_cast<std::size_t>(x), n);
          if (k == n) {
            auto last = p.node(n);
            return Point(last.begin(), last.end());
          }
          const double w = x - static_cast<double>(k);
          auto a = p.node(k);
          auto b = p.node(k + 1);
          Point out(a.size());
          for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] + w * (b[i] - a[i]);
          return out;
        }
      },
      variant_);
}

RebasedIncrement rebase(const SingularTrajectory& traj, double s0) {
  const double horizon = traj.horizon();
  require(s0 > 0.0 && s0 <= horizon * (1.0 + 1e-12), ErrorKind::OutOfDomain,
          "s0 = " + std::to_string(s0) + " outside (0, T]");
  s0 = std::min(s0, horizon);

  RebasedIncrement out;
  out.dim_ = traj.dim();
  out.s0_ = s0;
  std::visit(
      [&](const auto& v) {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, ConstantPath>) {
          out.kind_ = RebasedIncrement::Kind::Constant;
          out.nodes_ = {0.0, s0};
          out.node_norms_ = {0.0, 0.0};
          out.max_norm_ = 0.0;
        } else if constexpr (std::is_same_v<V, HolderPath>) {
          out.kind_ = RebasedIncrement::Kind::Holder;
          out.c_ = v.c;
          out.alpha_ = v.alpha;
          out.direction_ = v.direction;
          out.nodes_.push_back(0.0);
          for (int k = kAnalyticScanLevels; k >= 0; --k) out.nodes_.push_back(std::ldexp(s0, -k));
          for (double s : out.nodes_) out.node_norms_.push_back(v.c * std::pow(s, v.alpha));
          out.max_norm_ = v.c * std::pow(s0, v.alpha);
        } else {
          out.kind_ = RebasedIncrement::Kind::Sampled;
          const SamplePath& p = *v.path;
          const std::size_t n = p.steps();
          const auto d = static_cast<std::size_t>(p.dim());
          out.dt_ = p.dt();
          // Nodes s_j = j * dt for j <= s0 / dt, plus s0 itself when it falls between nodes.
          const auto full = static_cast<std::size_t>(std::floor(s0 / p.dt() * (1.0 + 1e-12)));
          const std::size_t last = std::min(full, n);
          auto end = p.node(n);
          for (std::size_t j = 0; j <= last; ++j) {
            auto row = p.node(n - j);
            for (std::size_t i = 0; i < d; ++i) out.eta_.push_back(row[i] - end[i]);
            out.nodes_.push_back(static_cast<double>(j) * p.dt());
          }
          if (s0 - out.nodes_.back() > 1e-12 * s0) {
            const Point tail = traj.eval(horizon - s0);
            for (std::size_t i = 0; i < d; ++i) out.eta_.push_back(tail[i] - end[i]);
            out.nodes_.push_back(s0);
          } else {
            out.nodes_.back() = s0;
          }
          for (std::size_t j = 0; j < out.nodes_.size(); ++j) {
            const double r = norm(std::span<const double>(out.eta_.data() + j * d, d));
            out.node_norms_.push_back(r);
            out.max_norm_ = std::max(out.max_norm_, r);
          }
        }
      },
      traj.variant());
  return out;
}

Point RebasedIncrement::eval(double s) const {
  require(s >= 0.0 && s <= s0_, ErrorKind::OutOfDomain,
          "s = " + std::to_string(s) + " outside [0, s0]");
  const auto d = static_cast<std::size_t>(dim_);
  switch (kind_) {
    case Kind::Constant:
      return Point(d, 0.0);
    case Kind::Holder: {
      Point out = direction_;
      const double amp = c_ * std::pow(s, alpha_);
      for (double& x : out) x *= amp;
      return out;
    }
    case Kind::Sampled: {
      // Segments are uniform except possibly the last one, which ends at s0.
      const std::size_t segs = nodes_.size() - 1;
      std::size_t j = std::min(static_cast<std::size_t>(s / dt_), segs - 1);
      const double a = nodes_[j];
      const double b = nodes_[j + 1];
      const double w = (b > a) ? std::clamp((s - a) / (b - a), 0.0, 1.0) : 0.0;
      Point out(d);
      for (std::size_t i = 0; i < d; ++i)
        out[i] = eta_[j * d + i] + w * (eta_[(j + 1) * d + i] - eta_[j * d + i]);
      return out;
    }
  }
  return {};
}

double RebasedIncrement::norm_at(double s) const {
  if (kind_ == Kind::Constant) return 0.0;
  if (kind_ == Kind::Holder) {
    require(s >= 0.0 && s <= s0_, ErrorKind::OutOfDomain, "s outside [0, s0]");
    return c_ * std::pow(s, alpha_);
  }
  require(s >= 0.0 && s <= s0_, ErrorKind::OutOfDomain, "s outside [0, s0]");
  const auto d = static_cast<std::size_t>(dim_);
  const std::size_t segs = nodes_.size() - 1;
  const std::size_t j = std::min(static_cast<std::size_t>(s / dt_), segs - 1);
  const double a = nodes_[j];
  const double b = nodes_[j + 1];
  const double w = (b > a) ? std::clamp((s - a) / (b - a), 0.0, 1.0) : 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double x = eta_[j * d + i] + w * (eta_[(j + 1) * d + i] - eta_[j * d + i]);
    sum += x * x;
  }
  return std::sqrt(sum);
}

std::pair<double, double> RebasedIncrement::segment_minimum(std::size_t i) const {
  const double a = nodes_[i];
  const double b = nodes_[i + 1];
  if (kind_ != Kind::Sampled) {
    return node_norms_[i] <= node_norms_[i + 1] ? std::pair{a, node_norms_[i]}
                                                : std::pair{b, node_norms_[i + 1]};
  }
  // |p + u (q - p)|^2 is a convex quadratic in u on [0, 1].
  const auto d = static_cast<std::size_t>(dim_);
  double pq = 0.0;
  double qq = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    const double p = eta_[i * d + k];
    const double dq = eta_[(i + 1) * d + k] - p;
    pq += p * dq;
    qq += dq * dq;
  }
  const double u = qq > 0.0 ? std::clamp(-pq / qq, 0.0, 1.0) : 0.0;
  double sum = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    const double p = eta_[i * d + k];
    const double x = p + u * (eta_[(i + 1) * d + k] - p);
    sum += x * x;
  }
  return {a + u * (b - a), std::sqrt(sum)};
}

double RebasedIncrement::crossing_tolerance(double /*a*/, double b) const {
  if (kind_ == Kind::Sampled) return dt_ / 100.0;
  return 1e-13 * b;
}

}  // namespace heatsing
