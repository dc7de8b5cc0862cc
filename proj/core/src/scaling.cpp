#include "heatsing/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "heatsing/errors.hpp"

namespace heatsing {

std::string_view to_string(FitModel model) {
  return model == FitModel::PurePower ? "PurePower" : "PowerLogLog";
}

FitModel parse_fit_model(std::string_view text) {
  if (text == "PurePower" || text == "pure" || text == "power") return FitModel::PurePower;
  if (text == "PowerLogLog" || text == "loglog") return FitModel::PowerLogLog;
  fail(ErrorKind::InvalidArgument, "unknown fit model '" + std::string(text) + "'");
}

std::string_view to_string(Removability verdict) {
  return verdict == Removability::CriterionSatisfied ? "CriterionSatisfied" : "CriterionViolated";
}

namespace {

bool in_window(double r, double lo, double hi) {
  return r >= lo * (1.0 - 1e-9) && r <= hi * (1.0 + 1e-9);
}

void finish(BoundReport& rep) {
  rep.min_ratio = std::numeric_limits<double>::infinity();
  rep.max_ratio = 0.0;
  bool finite = !rep.ratios.empty();
  for (double q : rep.ratios) {
    finite = finite && std::isfinite(q);
    rep.min_ratio = std::min(rep.min_ratio, q);
    rep.max_ratio = std::max(rep.max_ratio, q);
  }
  rep.pass = finite && rep.min_ratio > 0.0 && rep.max_ratio / rep.min_ratio <= rep.ratio_cap;
}

}  // namespace

ExponentFit fit_exponent(std::span<const double> radii, std::span<const double> mass, double r_min,
                         double r_max, FitModel model) {
  require(radii.size() == mass.size(), ErrorKind::InvalidArgument,
          "radii and mass must have equal length");
  require(r_min > 0.0 && r_min < r_max, ErrorKind::DegenerateWindow, "window needs 0 < r_min < r_max");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!in_window(radii[i], r_min, r_max)) continue;
    require(mass[i] > 0.0, ErrorKind::NonpositiveMass,
            "mass at r = " + std::to_string(radii[i]) + " is not positive");
    x.push_back(radii[i]);
    y.push_back(std::log(mass[i]));
  }
  require(x.size() >= kMinFitPoints, ErrorKind::DegenerateWindow,
          "only " + std::to_string(x.size()) + " radii in the fit window (need 8)");
  const int cols = model == FitModel::PurePower ? 2 : 3;
  Eigen::MatrixXd A(static_cast<Eigen::Index>(x.size()), cols);
  Eigen::VectorXd b(static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    A(row, 0) = std::log(x[i]);
    A(row, 1) = 1.0;
    if (model == FitModel::PowerLogLog) {
      // M ~ r^kappa (log log 1/r)^beta, so the regressor is log(log log(1/r)).
      const double ll = std::log(std::log(1.0 / x[i]));
      require(ll > 0.0, ErrorKind::DegenerateWindow, "log log(1/r) needs r < 1/e");
      A(row, 2) = std::log(ll);
    }
    b(row) = y[i];
  }
  const Eigen::VectorXd coef = A.colPivHouseholderQr().solve(b);
  const Eigen::VectorXd res = A * coef - b;

  ExponentFit fit;
  fit.model = model;
  fit.kappa = coef(0);
  fit.log_amplitude = coef(1);
  fit.beta = model == FitModel::PowerLogLog ? coef(2) : 0.0;
  fit.rms_residual = std::sqrt(res.squaredNorm() / static_cast<double>(x.size()));
  fit.r_min = *std::min_element(x.begin(), x.end());
  fit.r_max = *std::max_element(x.begin(), x.end());
  fit.points = x.size();
  return fit;
}

BoundReport verify_lower_bound(const BallMassCurve& mass, const ExitOccupationCurve& exits,
                               double theta, int dim, BoundWindow window, double ratio_cap) {
  require(theta > 0.0 && theta < 1.0, ErrorKind::InvalidArgument, "theta must lie in (0,1)");
  BoundReport rep;
  rep.ratio_cap = ratio_cap;
  for (std::size_t i = 0; i < mass.size(); ++i) {
    const double r = mass.radii[i];
    if (!in_window(r, window.r_min, window.r_max)) continue;
    const std::size_t j = exits.index_of(theta * r);
    require(j != ExitOccupationCurve::npos, ErrorKind::GridMismatch,
            "sigma(theta r) not tabulated for r = " + std::to_string(r));
    rep.radii.push_back(r);
    rep.ratios.push_back(mass.total(i) / (exits.sigma[j] + std::pow(r, dim)));
  }
  require(!rep.radii.empty(), ErrorKind::GridMismatch, "no mass radii inside the window");
  finish(rep);
  return rep;
}

BoundReport verify_upper_bound(const BallMassCurve& mass, const ExitOccupationCurve& exits, int dim,
                               double c0, BoundWindow window, double ratio_cap) {
  BoundReport rep;
  rep.ratio_cap = ratio_cap;
  for (std::size_t i = 0; i < mass.size(); ++i) {
    const double r = mass.radii[i];
    if (!in_window(r, window.r_min, window.r_max)) continue;
    require(exits.index_of(r) != ExitOccupationCurve::npos, ErrorKind::GridMismatch,
            "tau not tabulated at r = " + std::to_string(r));
    const double tail = tail_integral(exits, r, dim, c0);
    rep.radii.push_back(r);
    rep.ratios.push_back(mass.total(i) / (std::min(tail, r * r) + std::pow(r, dim)));
  }
  require(!rep.radii.empty(), ErrorKind::GridMismatch, "no mass radii inside the window");
  finish(rep);
  return rep;
}

RemovabilityVerdict classify_removability(const ExponentFit& fit, double alpha, int dim,
                                          double margin) {
  require(dim >= 1, ErrorKind::InvalidArgument, "dimension must be >= 1");
  if (!(alpha > 1.0 / dim && alpha < 1.0)) {
    fail(ErrorKind::AlphaOutOfRange,
         "alpha = " + std::to_string(alpha) + " outside (1/N, 1); the ball mass cannot decide");
  }
  RemovabilityVerdict v;
  v.threshold = std::max(2.0, 1.0 / alpha);
  v.kappa = fit.kappa;
  v.verdict = fit.kappa >= v.threshold + margin ? Removability::CriterionSatisfied
                                                : Removability::CriterionViolated;
  return v;
}

RemovabilityVerdict classify_removability(const BallMassCurve& mass, BoundWindow window,
                                          double alpha, int dim, double margin) {
  if (!(alpha > 1.0 / dim && alpha < 1.0)) {
    fail(ErrorKind::AlphaOutOfRange,
         "alpha = " + std::to_string(alpha) + " outside (1/N, 1); the ball mass cannot decide");
  }
  const auto totals = mass.totals();
  const auto fit = fit_exponent(mass.radii, totals, window.r_min, window.r_max, FitModel::PurePower);
  return classify_removability(fit, alpha, dim, margin);
}

double jackknife_std_error(std::span<const double> values) {
  const std::size_t m = values.size();
  require(m >= 2, ErrorKind::EnsembleTooSmall, "jackknife needs at least two samples");
  double total = 0.0;
  for (double v : values) total += v;
  const double md = static_cast<double>(m);
  double mean_loo = 0.0;
  std::vector<double> loo(m);
  for (std::size_t i = 0; i < m; ++i) {
    loo[i] = (total - values[i]) / (md - 1.0);
    mean_loo += loo[i];
  }
  mean_loo /= md;
  double ss = 0.0;
  for (double v : loo) ss += (v - mean_loo) * (v - mean_loo);
  return std::sqrt((md - 1.0) / md * ss);
}

MomentEstimate moment_estimate(std::span<const double> occupation_times, double r, int order) {
  require(occupation_times.size() >= kMinEnsemble, ErrorKind::EnsembleTooSmall,
          "ensemble of " + std::to_string(occupation_times.size()) + " paths (need 200)");
  require(order >= 1 && order <= kMaxMomentOrder, ErrorKind::InvalidArgument,
          "moment order must be 1, 2 or 3");
  std::vector<double> powered(occupation_times.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < powered.size(); ++i) {
    powered[i] = std::pow(occupation_times[i], order);
    sum += powered[i];
  }
  MomentEstimate est;
  est.radius = r;
  est.order = order;
  est.samples = powered.size();
  est.mean = sum / static_cast<double>(powered.size());
  est.std_error = jackknife_std_error(powered);
  return est;
}

MomentEstimate moment_estimate(std::span<const RebasedIncrement> ensemble, double r, int order,
                               double s0) {
  require(ensemble.size() >= kMinEnsemble, ErrorKind::EnsembleTooSmall,
          "ensemble of " + std::to_string(ensemble.size()) + " paths (need 200)");
  std::vector<double> tau(ensemble.size());
  for (std::size_t i = 0; i < ensemble.size(); ++i) tau[i] = occupation_time(ensemble[i], r, s0);
  return moment_estimate(tau, r, order);
}

}  // namespace heatsing
