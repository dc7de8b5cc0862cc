#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "heatsing/errors.hpp"
#include "heatsing/heatmass.hpp"
#include "heatsing/quadrature.hpp"

namespace heatsing {

namespace {

struct Bump1D {
  static double value(double z) {
    if (std::abs(z) >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - z * z));
  }
  static double first(double z) {
    if (std::abs(z) >= 1.0) return 0.0;
    const double q = 1.0 - z * z;
    return value(z) * (-2.0 * z / (q * q));
  }
  static double second(double z) {
    if (std::abs(z) >= 1.0) return 0.0;
    const double q = 1.0 - z * z;
    const double g1 = -2.0 * z / (q * q);
    const double g2 = -2.0 / (q * q) - 8.0 * z * z / (q * q * q);
    return value(z) * (g1 * g1 + g2);
  }
};

constexpr double kNormalCutoff = 9.0;
const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);

// E[f((m + sigma Z - c) / a)] for Z standard normal, f supported on |z| < 1.
template <class F>
double smoothed(F f, double m, double sigma, double c, double a) {
  if (sigma <= 0.0) return f((m - c) / a);
  const double zlo = std::max(-kNormalCutoff, (c - a - m) / sigma);
  const double zhi = std::min(kNormalCutoff, (c + a - m) / sigma);
  if (!(zhi > zlo)) return 0.0;
  std::vector<double> bp(9);
  for (int k = 0; k <= 8; ++k) bp[k] = zlo + (zhi - zlo) * k / 8.0;
  AdaptiveOptions opt;
  opt.order = 10;
  opt.rel_tol = 1e-10;
  opt.abs_tol = 1e-15;
  return integrate_adaptive(
             [&](double z) { return f((m + sigma * z - c) / a) * kInvSqrt2Pi * std::exp(-0.5 * z * z); },
             bp, opt)
      .value;
}

void check_phi(const BumpTestFunction& phi, int dim, double horizon) {
  require(static_cast<int>(phi.center.size()) == dim, ErrorKind::InvalidArgument,
          "test function center has wrong dimension");
  require(phi.half_width > 0.0 && phi.t_half_width > 0.0, ErrorKind::InvalidArgument,
          "test function widths must be positive");
  require(phi.t_center - phi.t_half_width > 0.0 && phi.t_center + phi.t_half_width <= horizon,
          ErrorKind::InvalidArgument, "test function time support must lie in (0, T]");
}

std::vector<double> uniform(double a, double b, int panels) {
  std::vector<double> out(static_cast<std::size_t>(panels) + 1);
  for (int k = 0; k <= panels; ++k) out[k] = a + (b - a) * k / panels;
  return out;
}

// int int |phi_t + Laplacian phi| by tensor Gauss-Legendre over the support.
double psi_l1(const BumpTestFunction& phi) {
  const int dim = static_cast<int>(phi.center.size());
  const int per_axis = std::clamp(static_cast<int>(std::pow(2.5e6, 1.0 / (dim + 1))), 8, 48);
  const int order = 8;
  const int panels = std::max(1, per_axis / order);
  const auto& gl = GaussLegendre::get(order);

  auto axis = [&](double c, double a, std::vector<double>& z, std::vector<double>& w) {
    const double h = 2.0 * a / panels;
    for (int p = 0; p < panels; ++p) {
      const double lo = c - a + p * h;
      for (int k = 0; k < order; ++k) {
        const double x = lo + 0.5 * h * (gl.nodes()[k] + 1.0);
        z.push_back((x - c) / a);
        w.push_back(0.5 * h * gl.weights()[k]);
      }
    }
  };
  std::vector<double> zx, wx, zt, wt;
  axis(0.0, phi.half_width, zx, wx);
  axis(0.0, phi.t_half_width, zt, wt);
  const std::size_t m = zx.size();

  std::vector<double> b(m), b2(m);
  for (std::size_t k = 0; k < m; ++k) {
    b[k] = Bump1D::value(zx[k]);
    b2[k] = Bump1D::second(zx[k]) / (phi.half_width * phi.half_width);
  }
  // Spatial products P = prod b and Q = sum_j b''_j prod_{i != j} b_i with weights.
  std::size_t total = 1;
  for (int i = 0; i < dim; ++i) total *= m;
  std::vector<double> P(total), Q(total), W(total);
  std::vector<std::size_t> idx(static_cast<std::size_t>(dim), 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    double p = 1.0, w = 1.0, q = 0.0;
    for (int i = 0; i < dim; ++i) {
      p *= b[idx[i]];
      w *= wx[idx[i]];
    }
    for (int j = 0; j < dim; ++j) {
      double term = b2[idx[j]];
      for (int i = 0; i < dim; ++i)
        if (i != j) term *= b[idx[i]];
      q += term;
    }
    P[flat] = p;
    Q[flat] = q;
    W[flat] = w;
    for (int i = 0; i < dim; ++i) {
      if (++idx[i] < m) break;
      idx[i] = 0;
    }
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < zt.size(); ++k) {
    const double bt = Bump1D::value(zt[k]);
    const double bt1 = Bump1D::first(zt[k]) / phi.t_half_width;
    double inner = 0.0;
    for (std::size_t f = 0; f < total; ++f) inner += W[f] * std::abs(bt1 * P[f] + bt * Q[f]);
    sum += wt[k] * inner;
  }
  return std::abs(phi.amplitude) * sum;
}

}  // namespace

double BumpTestFunction::value(std::span<const double> x, double t) const {
  double v = amplitude * Bump1D::value((t - t_center) / t_half_width);
  for (std::size_t i = 0; i < x.size() && v != 0.0; ++i) v *= Bump1D::value((x[i] - center[i]) / half_width);
  return v;
}

double BumpTestFunction::time_derivative(std::span<const double> x, double t) const {
  double v = amplitude * Bump1D::first((t - t_center) / t_half_width) / t_half_width;
  for (std::size_t i = 0; i < x.size() && v != 0.0; ++i) v *= Bump1D::value((x[i] - center[i]) / half_width);
  return v;
}

double BumpTestFunction::laplacian(std::span<const double> x, double t) const {
  const double bt = amplitude * Bump1D::value((t - t_center) / t_half_width);
  if (bt == 0.0) return 0.0;
  double sum = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    double term = Bump1D::second((x[j] - center[j]) / half_width) / (half_width * half_width);
    for (std::size_t i = 0; i < x.size() && term != 0.0; ++i)
      if (i != j) term *= Bump1D::value((x[i] - center[i]) / half_width);
    sum += term;
  }
  return bt * sum;
}

double WeakResidual::scaled_error() const {
  return std::abs(value - expected) / (amplitude * psi_l1);
}

double point_source_pairing(const SingularTrajectory& traj, const BumpTestFunction& phi,
                            double rel_tol) {
  check_phi(phi, traj.dim(), traj.horizon());
  AdaptiveOptions opt;
  opt.order = 10;
  opt.rel_tol = rel_tol;
  opt.abs_tol = 1e-300;
  const auto bp = uniform(phi.t_center - phi.t_half_width, phi.t_center + phi.t_half_width, 16);
  const auto res = integrate_adaptive([&](double t) { return phi.value(traj.eval(t), t); }, bp, opt);
  return -res.value;
}

WeakResidual weak_residual(const SingularTrajectory& traj, const InitialData& u0, SolutionPart part,
                           const BumpTestFunction& phi, const QuadratureConfig& quad) {
  quad.validate();
  const int dim = traj.dim();
  check_phi(phi, dim, traj.horizon());
  const double a = phi.half_width;
  const double at = phi.t_half_width;
  const double t_lo = phi.t_center - at;
  const double t_hi = phi.t_center + at;

  AdaptiveOptions outer;
  outer.order = quad.order;
  outer.rel_tol = quad.rel_tol;
  outer.abs_tol = 1e-300;
  outer.max_panels = quad.max_panels;

  WeakResidual out;
  out.psi_l1 = psi_l1(phi);

  // Integrand at fixed t given 1D factors I_i (against b) and J_i (against b'').
  auto combine = [&](double t, const std::vector<double>& I, const std::vector<double>& J) {
    const double zt = (t - phi.t_center) / at;
    const double bt = Bump1D::value(zt);
    const double bt1 = Bump1D::first(zt) / at;
    double prod = 1.0;
    for (double v : I) prod *= v;
    double lap = 0.0;
    for (int j = 0; j < dim; ++j) {
      double term = J[j];
      for (int i = 0; i < dim; ++i)
        if (i != j) term *= I[i];
      lap += term;
    }
    return phi.amplitude * (bt1 * prod + bt * lap);
  };

  const auto t_mesh = uniform(t_lo, t_hi, 16);
  if (part == SolutionPart::Background) {
    AdaptiveOptions ob;
    ob.order = 10;
    ob.rel_tol = 1e-13;
    ob.abs_tol = 1e-300;
    const double bump_integral =
        integrate_adaptive([](double z) { return Bump1D::value(z); }, uniform(-1.0, 1.0, 8), ob).value;
    auto integrand = [&](double t) -> double {
      std::vector<double> I(dim), J(dim);
      double amp = 1.0;
      std::visit(
          [&](const auto& v) {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, NoData>) {
              amp = 0.0;
            } else if constexpr (std::is_same_v<V, ConstantData>) {
              // int b((x - c)/a) dx = a int b; b'' integrates to zero over the support.
              amp = v.value;
              std::fill(I.begin(), I.end(), a * bump_integral);
              std::fill(J.begin(), J.end(), 0.0);
            } else {
              const double var = v.width * v.width + 2.0 * t;
              amp = v.amplitude * std::pow(v.width * v.width / var, 0.5 * dim);
              for (int i = 0; i < dim; ++i) {
                AdaptiveOptions o;
                o.order = 10;
                o.rel_tol = 1e-12;
                o.abs_tol = 1e-16;
                const auto bp = uniform(phi.center[i] - a, phi.center[i] + a, 8);
                auto g = [&](double x) { return std::exp(-(x - v.center[i]) * (x - v.center[i]) / (2.0 * var)); };
                I[i] = integrate_adaptive([&](double x) { return g(x) * Bump1D::value((x - phi.center[i]) / a); }, bp, o).value;
                J[i] = integrate_adaptive([&](double x) { return g(x) * Bump1D::second((x - phi.center[i]) / a) / (a * a); }, bp, o).value;
              }
            }
          },
          u0);
      return amp * combine(t, I, J);
    };
    out.amplitude = std::abs(background_value(u0, phi.center, phi.t_center));
    out.expected = 0.0;
    // The exact value is zero, so the target is absolute, in the units of scaled_error().
    AdaptiveOptions bg = outer;
    bg.abs_tol = std::max(1e-3 * quad.rel_tol * out.amplitude * out.psi_l1, 1e-300);
    out.value = integrate_adaptive(integrand, t_mesh, bg).value;
    return out;
  }

  // Singular part: u = F. By Fubini the spatial integral against G(., xi(t'), t - t')
  // becomes a Gaussian smoothing, which factorizes over coordinates.
  auto inner = [&](double t) -> double {
    auto integrand = [&](double tp) -> double {
      const Point xi = traj.eval(tp);
      const double sigma = std::sqrt(2.0 * std::max(t - tp, 0.0));
      std::vector<double> I(dim), J(dim);
      for (int i = 0; i < dim; ++i) {
        I[i] = smoothed(Bump1D::value, xi[i], sigma, phi.center[i], a);
        J[i] = smoothed(Bump1D::second, xi[i], sigma, phi.center[i], a) / (a * a);
      }
      return combine(t, I, J);
    };
    // Geometric grading toward t' = t, where the smoothing kernel concentrates.
    auto g = geometric_mesh(t, 40, 0.5);
    std::vector<double> bp(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) bp[k] = t - g[g.size() - 1 - k];
    bp.front() = 0.0;
    bp.back() = t;
    AdaptiveOptions o = outer;
    o.abs_tol = 1e-3 * quad.rel_tol * out.psi_l1;
    return integrate_adaptive(integrand, bp, o).value;
  };
  AdaptiveOptions sg = outer;
  sg.abs_tol = 1e-3 * quad.rel_tol * out.psi_l1;
  out.value = integrate_adaptive(inner, t_mesh, sg).value;
  out.expected = point_source_pairing(traj, phi);
  try {
    out.amplitude = pointwise_F(phi.center, traj, phi.t_center, quad).value;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::AtSingularPoint) throw;
    out.amplitude = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

}  // namespace heatsing
