#include "heatsing/heatmass.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "heatsing/errors.hpp"
#include "heatsing/parallel.hpp"
#include "heatsing/quadrature.hpp"

namespace heatsing {

namespace {

constexpr double kPi = std::numbers::pi;
// Gaussian factors beyond this many standard deviations are below 1e-17.
constexpr double kSupportSigmas = 9.0;
constexpr int kRadialOrder = 12;
constexpr int kRadialCheckOrder = 8;
constexpr int kMaxRadialRefinements = 8;

// Surface area of the unit sphere S^k in R^{k+1}.
double sphere_area(int k) {
  const double h = 0.5 * (k + 1);
  return 2.0 * std::pow(kPi, h) / std::tgamma(h);
}

// int_0^pi exp(-kappa (1 - cos phi)) sin^{N-2} phi dphi, for N >= 2.
double angular_factor(double kappa, int dim) {
  if (dim == 3) {
    if (kappa == 0.0) return 2.0;
    return -std::expm1(-2.0 * kappa) / kappa;
  }
  double upper = kPi;
  // 1 - cos(phi) >= 2 phi^2 / pi^2, so the integrand is below e^-90 past this angle.
  if (kappa > 0.0) upper = std::min(kPi, kPi * std::sqrt(45.0 / kappa));
  const auto& gl = GaussLegendre::get(16);
  const int panels = 4;
  const double h = upper / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    sum += gl.integrate(
        [&](double phi) {
          return std::exp(-kappa * (1.0 - std::cos(phi))) * std::pow(std::sin(phi), dim - 2);
        },
        p * h, (p + 1) * h);
  }
  return sum;
}

void check_dim(int dim) { require(dim >= 1, ErrorKind::InvalidArgument, "dimension must be >= 1"); }

}  // namespace

void HeatKernelParams::validate() const {
  check_dim(dim);
  require(horizon > 0.0, ErrorKind::InvalidArgument, "horizon T must be positive");
}

void QuadratureConfig::validate() const {
  require(s_panels >= 16, ErrorKind::InvalidArgument, "quadrature needs at least 16 s-panels");
  require(order >= 4, ErrorKind::InvalidArgument, "Gauss-Legendre order must be >= 4");
  require(grading > 0.0 && grading < 1.0, ErrorKind::InvalidArgument,
          "mesh grading must lie in (0,1)");
  require(rel_tol > 0.0 && rel_tol <= 1e-2, ErrorKind::InvalidArgument,
          "rel_tol must lie in (0, 1e-2]");
}

double unit_ball_volume(int dim) {
  check_dim(dim);
  const double h = 0.5 * dim;
  return std::pow(kPi, h) / std::tgamma(h + 1.0);
}

double heat_kernel(std::span<const double> x, std::span<const double> y, double t) {
  require(t > 0.0, ErrorKind::NonpositiveTime, "heat kernel needs t > 0");
  require(x.size() == y.size() && !x.empty(), ErrorKind::InvalidArgument,
          "heat kernel points must share a dimension");
  double d2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) d2 += (x[i] - y[i]) * (x[i] - y[i]);
  const double n = static_cast<double>(x.size());
  return std::pow(4.0 * kPi * t, -0.5 * n) * std::exp(-d2 / (4.0 * t));
}

double gaussian_ball_mass(double r, double d, double s, int dim, double rel_tol) {
  check_dim(dim);
  require(r > 0.0, ErrorKind::InvalidArgument, "ball radius must be positive");
  require(d >= 0.0, ErrorKind::InvalidArgument, "center distance must be nonnegative");
  require(s > 0.0, ErrorKind::NonpositiveTime, "Gaussian ball mass needs s > 0");

  const double sd = std::sqrt(2.0 * s);
  const double lo = std::max(0.0, d - kSupportSigmas * sd);
  const double hi = std::min(r, d + (kSupportSigmas + std::sqrt(static_cast<double>(dim))) * sd);
  if (!(hi > lo)) return 0.0;

  const double inv4s = 1.0 / (4.0 * s);
  const double kappa_scale = d / (2.0 * s);
  double prefactor;
  if (dim == 1) {
    prefactor = std::pow(4.0 * kPi * s, -0.5);
  } else {
    prefactor = sphere_area(dim - 2) * std::pow(4.0 * kPi * s, -0.5 * dim);
  }
  auto radial = [&](double rho) {
    const double g = std::exp(-(rho - d) * (rho - d) * inv4s);
    if (dim == 1) return g * (1.0 + std::exp(-2.0 * rho * kappa_scale));
    return std::pow(rho, dim - 1) * g * angular_factor(rho * kappa_scale, dim);
  };

  const auto& hi_rule = GaussLegendre::get(kRadialOrder);
  const auto& lo_rule = GaussLegendre::get(kRadialCheckOrder);
  auto panels = static_cast<std::size_t>(std::ceil((hi - lo) / sd));
  panels = std::max<std::size_t>(panels, 1);
  for (int attempt = 0; attempt <= kMaxRadialRefinements; ++attempt) {
    const double h = (hi - lo) / static_cast<double>(panels);
    double fine = 0.0;
    double coarse = 0.0;
    for (std::size_t p = 0; p < panels; ++p) {
      const double a = lo + h * static_cast<double>(p);
      const double b = (p + 1 == panels) ? hi : a + h;
      fine += hi_rule.integrate(radial, a, b);
      coarse += lo_rule.integrate(radial, a, b);
    }
    fine *= prefactor;
    coarse *= prefactor;
    if (std::abs(fine - coarse) <= rel_tol * fine + std::numeric_limits<double>::min()) {
      return std::clamp(fine, 0.0, 1.0);
    }
    panels *= 2;
  }
  fail(ErrorKind::ToleranceNotMet, "Gaussian ball mass did not reach rel_tol");
}

namespace {

double inner_tolerance(const QuadratureConfig& quad) {
  return std::clamp(1e-2 * quad.rel_tol, 1e-12, 1e-8);
}

std::vector<double> s_mesh(const RebasedIncrement& eta, double horizon,
                           const QuadratureConfig& quad) {
  auto mesh = geometric_mesh(horizon, quad.s_panels, quad.grading);
  if (eta.grid_step() > 0.0) {
    std::vector<double> nodes(eta.scan_nodes().begin(), eta.scan_nodes().end());
    if (quad.path_node_steps > 0) {
      const double cap = static_cast<double>(quad.path_node_steps) * eta.grid_step() * (1.0 + 1e-12);
      std::erase_if(nodes, [cap](double s) { return s > cap; });
    }
    mesh = merge_breakpoints(mesh, nodes, 0.0, horizon);
  }
  return mesh;
}

AdaptiveOptions adaptive_options(const QuadratureConfig& quad) {
  AdaptiveOptions opt;
  opt.order = quad.order;
  opt.rel_tol = quad.rel_tol;
  opt.max_panels = quad.max_panels;
  return opt;
}

}  // namespace

MassEstimate singular_mass(const RebasedIncrement& eta, double r, const HeatKernelParams& params,
                           const QuadratureConfig& quad) {
  params.validate();
  quad.validate();
  require(r > 0.0, ErrorKind::InvalidArgument, "ball radius must be positive");
  require(eta.s0() >= params.horizon * (1.0 - 1e-12), ErrorKind::InvalidArgument,
          "singular mass needs eta on the whole of [0, T]");
  const double tol = inner_tolerance(quad);
  const int dim = params.dim;
  auto integrand = [&](double s) { return gaussian_ball_mass(r, eta.norm_at(s), s, dim, tol); };
  const auto mesh = s_mesh(eta, params.horizon, quad);
  const auto res = integrate_adaptive(integrand, mesh, adaptive_options(quad));
  return {res.value, res.error};
}

SingularMassBreakdown singular_mass_breakdown(const RebasedIncrement& eta, double r, double s0,
                                              const HeatKernelParams& params,
                                              const QuadratureConfig& quad) {
  params.validate();
  quad.validate();
  require(s0 > 0.0 && s0 <= params.horizon, ErrorKind::OutOfDomain, "s0 outside (0, T]");
  const double total = singular_mass(eta, r, params, quad).value;
  const double tol = inner_tolerance(quad);
  const int dim = params.dim;
  auto integrand = [&](double s) { return gaussian_ball_mass(r, eta.norm_at(s), s, dim, tol); };

  AdaptiveOptions opt = adaptive_options(quad);
  opt.abs_tol = quad.rel_tol * total;
  const auto mesh = s_mesh(eta, params.horizon, quad);
  auto piece = [&](double a, double b) {
    if (!(b > a)) return 0.0;
    const auto local = merge_breakpoints(mesh, {}, a, b);
    return integrate_adaptive(integrand, local, opt).value;
  };

  SingularMassBreakdown out;
  out.late = piece(s0, params.horizon);
  double cursor = 0.0;
  for (const auto& [a, b] : occupation_set(eta, 2.0 * r, s0)) {
    out.far += piece(cursor, a);
    out.near += piece(a, b);
    cursor = b;
  }
  out.far += piece(cursor, s0);
  return out;
}

MassEstimate pointwise_F(std::span<const double> x, const SingularTrajectory& traj, double horizon,
                         const QuadratureConfig& quad) {
  quad.validate();
  require(horizon > 0.0 && horizon <= traj.horizon() * (1.0 + 1e-12), ErrorKind::OutOfDomain,
          "evaluation time outside (0, T]");
  horizon = std::min(horizon, traj.horizon());
  require(static_cast<int>(x.size()) == traj.dim(), ErrorKind::InvalidArgument,
          "point dimension does not match the trajectory");
  const Point tip = traj.eval(horizon);
  double d0 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) d0 += (x[i] - tip[i]) * (x[i] - tip[i]);
  require(d0 > 0.0, ErrorKind::AtSingularPoint, "F is singular at x = xi(T)");

  const double n = static_cast<double>(x.size());
  auto integrand = [&](double s) {
    const Point p = traj.eval(horizon - s);
    double d2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) d2 += (x[i] - p[i]) * (x[i] - p[i]);
    return std::pow(4.0 * kPi * s, -0.5 * n) * std::exp(-d2 / (4.0 * s));
  };
  auto mesh = geometric_mesh(horizon, quad.s_panels, quad.grading);
  if (const auto* sp = std::get_if<SampledPath>(&traj.variant())) {
    std::vector<double> nodes;
    for (std::size_t k = 0; k <= sp->path->steps(); ++k) {
      const double s = horizon - sp->path->time(k);
      if (s > 0.0) nodes.push_back(s);
    }
    mesh = merge_breakpoints(mesh, nodes, 0.0, horizon);
  }
  const auto res = integrate_adaptive(integrand, mesh, adaptive_options(quad));
  return {res.value, res.error};
}

std::string describe(const InitialData& u0) {
  std::ostringstream os;
  os.precision(17);
  std::visit(
      [&](const auto& v) {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, NoData>) {
          os << "none";
        } else if constexpr (std::is_same_v<V, ConstantData>) {
          os << "constant(" << v.value << ")";
        } else {
          os << "gaussian(amplitude=" << v.amplitude << ",width=" << v.width << ",center=";
          for (std::size_t i = 0; i < v.center.size(); ++i) os << (i ? ";" : "") << v.center[i];
          os << ")";
        }
      },
      u0);
  return os.str();
}

MassEstimate background_mass(const InitialData& u0, double r, double horizon,
                             std::span<const double> center, int dim) {
  check_dim(dim);
  require(r > 0.0, ErrorKind::InvalidArgument, "ball radius must be positive");
  require(horizon > 0.0, ErrorKind::NonpositiveTime, "background mass needs T > 0");
  return std::visit(
      [&](const auto& v) -> MassEstimate {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, NoData>) {
          return {0.0, 0.0};
        } else if constexpr (std::is_same_v<V, ConstantData>) {
          require(v.value > 0.0, ErrorKind::UnsupportedInitialData,
                  "constant initial data must be positive");
          return {v.value * unit_ball_volume(dim) * std::pow(r, dim), 0.0};
        } else {
          require(v.amplitude > 0.0 && v.width > 0.0, ErrorKind::UnsupportedInitialData,
                  "Gaussian bump needs positive amplitude and width");
          require(static_cast<int>(v.center.size()) == dim &&
                      static_cast<int>(center.size()) == dim,
                  ErrorKind::UnsupportedInitialData, "Gaussian bump center has wrong dimension");
          double d2 = 0.0;
          for (int i = 0; i < dim; ++i) d2 += (v.center[i] - center[i]) * (v.center[i] - center[i]);
          const double w2 = v.width * v.width;
          const double scale = v.amplitude * std::pow(2.0 * kPi * w2, 0.5 * dim);
          const double rel_tol = 1e-10;
          const double p = gaussian_ball_mass(r, std::sqrt(d2), 0.5 * (w2 + 2.0 * horizon), dim,
                                              rel_tol);
          return {scale * p, scale * p * rel_tol};
        }
      },
      u0);
}

double background_value(const InitialData& u0, std::span<const double> x, double t) {
  require(t >= 0.0, ErrorKind::NonpositiveTime, "background value needs t >= 0");
  return std::visit(
      [&](const auto& v) -> double {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, NoData>) {
          return 0.0;
        } else if constexpr (std::is_same_v<V, ConstantData>) {
          return v.value;
        } else {
          const double var = v.width * v.width + 2.0 * t;
          double d2 = 0.0;
          for (std::size_t i = 0; i < x.size(); ++i) d2 += (x[i] - v.center[i]) * (x[i] - v.center[i]);
          const double n = static_cast<double>(x.size());
          return v.amplitude * std::pow(v.width * v.width / var, 0.5 * n) * std::exp(-d2 / (2.0 * var));
        }
      },
      u0);
}

std::vector<double> BallMassCurve::totals() const {
  std::vector<double> out(size());
  for (std::size_t i = 0; i < size(); ++i) out[i] = total(i);
  return out;
}

BallMassCurve total_mass_curve(const SingularTrajectory& traj, const InitialData& u0,
                               std::span<const double> radii, const HeatKernelParams& params,
                               const QuadratureConfig& quad, unsigned threads,
                               std::string path_id) {
  params.validate();
  quad.validate();
  require(std::abs(traj.horizon() - params.horizon) <= 1e-12 * params.horizon,
          ErrorKind::InvalidArgument, "trajectory horizon differs from params.horizon");
  require(traj.dim() == params.dim, ErrorKind::InvalidArgument,
          "trajectory dimension differs from params.dim");
  const RebasedIncrement eta = rebase(traj);
  const Point center = traj.eval(params.horizon);

  BallMassCurve curve;
  curve.path_id = std::move(path_id);
  curve.initial_data = describe(u0);
  curve.horizon = params.horizon;
  curve.radii.assign(radii.begin(), radii.end());
  curve.singular.resize(radii.size());
  curve.background.resize(radii.size());
  curve.error.resize(radii.size());
  parallel_for(radii.size(), threads, [&](std::size_t i) {
    const auto sing = singular_mass(eta, radii[i], params, quad);
    const auto bg = background_mass(u0, radii[i], params.horizon, center, params.dim);
    curve.singular[i] = sing.value;
    curve.background[i] = bg.value;
    curve.error[i] = sing.error + bg.error;
  });
  return curve;
}

}  // namespace heatsing
