#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "heatsing/functionals.hpp"
#include "heatsing/paths.hpp"

namespace heatsing {

struct HeatKernelParams {
  int dim = 3;
  double horizon = 1.0;

  /// The scaling theory needs N >= 3; N = 1, 2 still evaluate.
  bool in_theory_range() const { return dim >= 3; }
  void validate() const;
};

struct QuadratureConfig {
  int s_panels = 64;       // geometric panels on (0, T]
  double grading = 0.5;    // ratio between consecutive panel ends
  int order = 8;           // Gauss-Legendre points per panel
  double rel_tol = 1e-6;
  std::size_t max_panels = 1u << 20;
  // Sampled paths: merge only the first path_node_steps grid nodes (s <= k dt) into the
  // s-mesh; 0 merges all of them. Beyond that the graded mesh and adaptivity take over.
  std::size_t path_node_steps = 0;

  void validate() const;
};

struct MassEstimate {
  double value = 0.0;
  double error = 0.0;
};

/// Volume of the unit ball in R^N.
double unit_ball_volume(int dim);

/// G(x, y, t) = (4 pi t)^{-N/2} exp(-|x - y|^2 / (4t)). Throws NonpositiveTime for t <= 0.
double heat_kernel(std::span<const double> x, std::span<const double> y, double t);

/// P(|Y| <= r) for Y ~ N(m, 2s I_N) with |m| = d.
///
/// Radial Gauss-Legendre quadrature over rho in [0, r] restricted to the
/// Gaussian's effective support, with the polar-angle factor
/// int_0^pi exp(-kappa (1 - cos phi)) sin^{N-2} phi dphi integrated in closed
/// form for N = 1, 3 and by composite Gauss-Legendre otherwise.
double gaussian_ball_mass(double r, double d, double s, int dim, double rel_tol = 1e-10);

/// int_0^T gaussian_ball_mass(r, |eta(s)|, s, N) ds on the graded s-mesh
/// (merged with the path's interpolation nodes for sampled paths).
MassEstimate singular_mass(const RebasedIncrement& eta, double r, const HeatKernelParams& params,
                           const QuadratureConfig& quad);

/// Diagnostic split of singular_mass: s in [s0, T] (late), s in [0, s0]
/// outside the occupation set of radius 2r (far), and inside it (near).
struct SingularMassBreakdown {
  double late = 0.0;
  double far = 0.0;
  double near = 0.0;
  double total() const { return late + far + near; }
};
SingularMassBreakdown singular_mass_breakdown(const RebasedIncrement& eta, double r, double s0,
                                              const HeatKernelParams& params,
                                              const QuadratureConfig& quad);

/// F(x, T) = int_0^T G(x, xi(t), T - t) dt. Throws AtSingularPoint at x = xi(T).
MassEstimate pointwise_F(std::span<const double> x, const SingularTrajectory& traj, double horizon,
                         const QuadratureConfig& quad);

struct ConstantData {
  double value;
};
/// u0(y) = amplitude * exp(-|y - center|^2 / (2 width^2)).
struct GaussianBump {
  double amplitude;
  double width;
  Point center;
};
struct NoData {};
using InitialData = std::variant<NoData, ConstantData, GaussianBump>;

std::string describe(const InitialData& u0);

/// int_{|x - center| <= r} int G(x, y, T) u0(y) dy dx.
/// Throws UnsupportedInitialData for nonpositive data.
MassEstimate background_mass(const InitialData& u0, double r, double horizon,
                             std::span<const double> center, int dim);

/// Pointwise value of the background solution at (x, t).
double background_value(const InitialData& u0, std::span<const double> x, double t);

struct BallMassCurve {
  std::string path_id;
  std::string initial_data;
  double horizon = 0.0;
  std::vector<double> radii;  // decreasing
  std::vector<double> singular;
  std::vector<double> background;
  std::vector<double> error;  // estimated absolute quadrature error of the total

  std::size_t size() const { return radii.size(); }
  double total(std::size_t i) const { return singular[i] + background[i]; }
  std::vector<double> totals() const;
};

BallMassCurve total_mass_curve(const SingularTrajectory& traj, const InitialData& u0,
                               std::span<const double> radii, const HeatKernelParams& params,
                               const QuadratureConfig& quad, unsigned threads = 1,
                               std::string path_id = {});

/// C^infinity tensor bump phi(x, t) = A prod_i b((x_i - c_i)/a) * b((t - t_c)/a_t),
/// b(z) = exp(-1 / (1 - z^2)) on |z| < 1, with closed-form phi_t and Laplacian.
struct BumpTestFunction {
  Point center;
  double half_width;
  double t_center;
  double t_half_width;
  double amplitude = 1.0;

  double value(std::span<const double> x, double t) const;
  double time_derivative(std::span<const double> x, double t) const;
  double laplacian(std::span<const double> x, double t) const;
};

enum class SolutionPart { Background, Singular };

struct WeakResidual {
  double value = 0.0;      // int int u (phi_t + Laplacian phi) dx dt
  double expected = 0.0;   // 0 for the background, -int phi(xi(t), t) dt for the singular part
  double psi_l1 = 0.0;     // int int |phi_t + Laplacian phi| dx dt
  double amplitude = 0.0;  // |u| at the bump center (NaN when that is the singular point)

  /// |value - expected| / (amplitude * psi_l1).
  double scaled_error() const;
};

WeakResidual weak_residual(const SingularTrajectory& traj, const InitialData& u0, SolutionPart part,
                           const BumpTestFunction& phi, const QuadratureConfig& quad);

/// -int phi(xi(t), t) dt by adaptive quadrature along the path.
double point_source_pairing(const SingularTrajectory& traj, const BumpTestFunction& phi,
                            double rel_tol = 1e-10);

}  // namespace heatsing
