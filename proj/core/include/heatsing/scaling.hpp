#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "heatsing/functionals.hpp"
#include "heatsing/heatmass.hpp"

namespace heatsing {

enum class FitModel { PurePower, PowerLogLog };

std::string_view to_string(FitModel model);
FitModel parse_fit_model(std::string_view text);

/// Least-squares fit of log M = kappa log r + a [+ beta log(log log(1/r))], i.e.
/// M = e^a r^kappa [(log log 1/r)^beta].
struct ExponentFit {
  double kappa = 0.0;
  double log_amplitude = 0.0;
  FitModel model = FitModel::PurePower;
  double beta = 0.0;  // PowerLogLog only
  double rms_residual = 0.0;
  double r_min = 0.0;
  double r_max = 0.0;
  std::size_t points = 0;
};

inline constexpr std::size_t kMinFitPoints = 8;

/// Uses the samples with r_min <= r <= r_max (relative slack 1e-9). Throws
/// DegenerateWindow with fewer than eight radii (or r >= 1/e under PowerLogLog)
/// and NonpositiveMass if any mass in the window is <= 0.
ExponentFit fit_exponent(std::span<const double> radii, std::span<const double> mass, double r_min,
                         double r_max, FitModel model = FitModel::PurePower);

struct BoundReport {
  std::vector<double> radii;
  std::vector<double> ratios;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  double ratio_cap = 0.0;
  bool pass = false;
};

inline constexpr double kDeterministicRatioCap = 50.0;
inline constexpr double kStochasticRatioCap = 200.0;

struct BoundWindow {
  double r_min;
  double r_max;
};

/// Ratios M_total(r) / (sigma(theta r) + r^N) over the window. theta must map
/// every window radius onto a radius of the exit curve (GridMismatch otherwise).
BoundReport verify_lower_bound(const BallMassCurve& mass, const ExitOccupationCurve& exits,
                               double theta, int dim, BoundWindow window,
                               double ratio_cap = kDeterministicRatioCap);

/// Ratios M_total(r) / (min{tail(r), r^2} + r^N) over the window, with
/// tail(r) = tail_integral(exits, r, N, c0).
BoundReport verify_upper_bound(const BallMassCurve& mass, const ExitOccupationCurve& exits, int dim,
                               double c0, BoundWindow window,
                               double ratio_cap = kDeterministicRatioCap);

enum class Removability { CriterionSatisfied, CriterionViolated };
std::string_view to_string(Removability verdict);

struct RemovabilityVerdict {
  Removability verdict;
  double threshold;  // max{2, 1/alpha}
  double kappa;
};

inline constexpr double kRemovabilityMargin = 0.1;

/// CriterionSatisfied iff kappa >= max{2, 1/alpha} + margin. Throws
/// AlphaOutOfRange unless 1/N < alpha < 1.
RemovabilityVerdict classify_removability(const ExponentFit& fit, double alpha, int dim,
                                          double margin = kRemovabilityMargin);
/// Fits M_total over the window with a pure power law first.
RemovabilityVerdict classify_removability(const BallMassCurve& mass, BoundWindow window,
                                          double alpha, int dim,
                                          double margin = kRemovabilityMargin);

struct MomentEstimate {
  double radius = 0.0;
  int order = 1;
  double mean = 0.0;
  double std_error = 0.0;  // jackknife
  std::size_t samples = 0;
};

inline constexpr std::size_t kMinEnsemble = 200;
inline constexpr int kMaxMomentOrder = 3;

/// Sample mean of tau(r)^n over the ensemble with a jackknife standard error.
MomentEstimate moment_estimate(std::span<const RebasedIncrement> ensemble, double r, int order,
                               double s0);
/// Same, from occupation times already computed per ensemble member.
MomentEstimate moment_estimate(std::span<const double> occupation_times, double r, int order);

/// Delete-one jackknife standard error of the mean of g(x).
double jackknife_std_error(std::span<const double> values);

}  // namespace heatsing
