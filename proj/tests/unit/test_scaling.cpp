#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "heatsing/errors.hpp"
#include "heatsing/scaling.hpp"

namespace hs = heatsing;

namespace {

std::vector<double> radii_between(double hi, double lo, std::size_t count) {
  std::vector<double> r(count);
  for (std::size_t i = 0; i < count; ++i)
    r[i] = hi * std::pow(lo / hi, static_cast<double>(i) / static_cast<double>(count - 1));
  return r;
}

hs::ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const hs::Error& e) {
    return e.kind();
  }
  return hs::ErrorKind::InvalidArgument;
}

hs::BallMassCurve holder_curve(double c, double alpha, const hs::RadiusGrid& grid) {
  const auto traj = hs::SingularTrajectory::holder({0, 0, 0}, c, alpha, {1, 0, 0}, 1.0);
  return hs::total_mass_curve(traj, hs::NoData{}, grid.radii(), {3, 1.0}, {}, 1, "holder");
}

}  // namespace

TEST(FitExponent, RecoversExactPowerLaw) {
  const auto r = radii_between(0.1, 1e-3, 12);
  std::vector<double> m;
  for (double x : r) m.push_back(5.0 * std::pow(x, 2.5));
  const auto fit = hs::fit_exponent(r, m, 1e-3, 0.1);
  EXPECT_NEAR(fit.kappa, 2.5, 1e-10);
  EXPECT_NEAR(fit.log_amplitude, std::log(5.0), 1e-9);
  EXPECT_LT(fit.rms_residual, 1e-12);
  EXPECT_EQ(fit.points, 12u);
}

TEST(FitExponent, ScalingTheMassOnlyShiftsTheAmplitude) {
  const auto r = radii_between(0.1, 1e-3, 10);
  std::vector<double> m, m7;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> jitter(0.9, 1.1);
  for (double x : r) {
    m.push_back(std::pow(x, 3.0) * jitter(rng));
    m7.push_back(7.0 * m.back());
  }
  const auto a = hs::fit_exponent(r, m, 1e-3, 0.1);
  const auto b = hs::fit_exponent(r, m7, 1e-3, 0.1);
  EXPECT_NEAR(a.kappa, b.kappa, 1e-12);
  EXPECT_NEAR(b.log_amplitude - a.log_amplitude, std::log(7.0), 1e-12);
}

TEST(FitExponent, PowerLogLogRecoversKappa) {
  const auto r = radii_between(0.1, 1e-4, 16);
  std::vector<double> m;
  for (double x : r) m.push_back(std::pow(x, 3.0) * std::pow(std::log(std::log(1.0 / x)), 1.2));
  const auto fit = hs::fit_exponent(r, m, 1e-4, 0.1, hs::FitModel::PowerLogLog);
  EXPECT_NEAR(fit.kappa, 3.0, 0.02);
  EXPECT_NEAR(fit.beta, 1.2, 1e-6);
  // The pure power law absorbs the correction into a biased exponent.
  EXPECT_GT(std::abs(hs::fit_exponent(r, m, 1e-4, 0.1).kappa - 3.0), 0.02);
  EXPECT_THROW(hs::fit_exponent(radii_between(0.5, 0.01, 10), std::vector<double>(10, 1.0), 0.01,
                                0.5, hs::FitModel::PowerLogLog),
               hs::Error);
}

TEST(FitExponent, ReportsDegenerateInput) {
  const auto r = radii_between(0.1, 1e-3, 12);
  std::vector<double> m(r.size(), 1.0);
  EXPECT_EQ(kind_of([&] { hs::fit_exponent(r, m, 0.05, 0.1); }), hs::ErrorKind::DegenerateWindow);
  EXPECT_EQ(kind_of([&] { hs::fit_exponent(r, m, 0.1, 1e-3); }), hs::ErrorKind::DegenerateWindow);
  m[3] = 0.0;
  EXPECT_EQ(kind_of([&] { hs::fit_exponent(r, m, 1e-3, 0.1); }), hs::ErrorKind::NonpositiveMass);
}

TEST(FitModel, ParsesNames) {
  EXPECT_EQ(hs::parse_fit_model("PowerLogLog"), hs::FitModel::PowerLogLog);
  EXPECT_EQ(hs::parse_fit_model("PurePower"), hs::FitModel::PurePower);
  EXPECT_EQ(hs::to_string(hs::FitModel::PowerLogLog), "PowerLogLog");
  EXPECT_THROW(hs::parse_fit_model("cubic"), hs::Error);
}

TEST(Removability, ThresholdAndMargin) {
  hs::ExponentFit fit;
  fit.kappa = 3.0;
  EXPECT_EQ(hs::classify_removability(fit, 0.4, 3).verdict, hs::Removability::CriterionSatisfied);
  fit.kappa = 2.5;
  const auto v = hs::classify_removability(fit, 0.4, 3);
  EXPECT_EQ(v.verdict, hs::Removability::CriterionViolated);
  EXPECT_DOUBLE_EQ(v.threshold, 2.5);
  fit.kappa = 2.05;
  EXPECT_EQ(hs::classify_removability(fit, 0.75, 3).verdict, hs::Removability::CriterionViolated);
  EXPECT_EQ(kind_of([&] { hs::classify_removability(fit, 0.2, 3); }),
            hs::ErrorKind::AlphaOutOfRange);
  EXPECT_EQ(kind_of([&] { hs::classify_removability(fit, 1.0, 3); }),
            hs::ErrorKind::AlphaOutOfRange);
}

TEST(Removability, BoundedSolutionSurrogateIsRemovable) {
  // Background-only curve, mass = |B_r| * u0, kappa = N.
  hs::BallMassCurve curve;
  const auto grid = hs::RadiusGrid::geometric(0.1, std::pow(2.0, -0.25), 27);
  curve.radii.assign(grid.radii().begin(), grid.radii().end());
  for (double r : curve.radii) {
    curve.singular.push_back(0.0);
    curve.background.push_back(4.18879 * r * r * r);
  }
  const auto v = hs::classify_removability(curve, {1e-3, 0.1}, 0.4, 3);
  EXPECT_EQ(v.verdict, hs::Removability::CriterionSatisfied);
  for (double& b : curve.background) b *= 1e5;
  EXPECT_EQ(hs::classify_removability(curve, {1e-3, 0.1}, 0.4, 3).verdict,
            hs::Removability::CriterionSatisfied);
}

TEST(Bounds, HolderHalfPassesBothEnvelopes) {
  const auto mass_grid = hs::RadiusGrid::geometric(0.1, std::pow(2.0, -0.25), 27);
  const auto mass = holder_curve(1.0, 0.5, mass_grid);
  const auto eta = hs::rebase(hs::SingularTrajectory::holder({0, 0, 0}, 1.0, 0.5, {1, 0, 0}, 1.0));
  // Exit grid aligned with the mass grid, from above c0 = max|eta| = 1 down past theta * 1e-3.
  const auto exit_grid = mass_grid.extended_above(14).extended_below(4);
  const auto exits = hs::exit_occupation_curve(eta, exit_grid);
  const auto lower = hs::verify_lower_bound(mass, exits, 0.5, 3, {1e-3, 0.1});
  const auto upper = hs::verify_upper_bound(mass, exits, 3, 1.0, {1e-3, 0.1});
  EXPECT_TRUE(lower.pass) << lower.min_ratio << " " << lower.max_ratio;
  EXPECT_TRUE(upper.pass) << upper.min_ratio << " " << upper.max_ratio;
  EXPECT_EQ(lower.radii.size(), 27u);
}

TEST(Bounds, MisalignedThetaIsAGridMismatch) {
  const auto grid = hs::RadiusGrid::geometric(0.1, 0.5, 10);
  const auto mass = holder_curve(1.0, 0.5, grid);
  const auto eta = hs::rebase(hs::SingularTrajectory::holder({0, 0, 0}, 1.0, 0.5, {1, 0, 0}, 1.0));
  const auto exits = hs::exit_occupation_curve(eta, grid.extended_below(3));
  EXPECT_EQ(kind_of([&] { hs::verify_lower_bound(mass, exits, 0.3, 3, {1e-3, 0.1}); }),
            hs::ErrorKind::GridMismatch);
}

TEST(Moments, ConstantEnsembleIsDegenerate) {
  const auto eta = hs::rebase(hs::SingularTrajectory::constant({0, 0, 0}, 0.7));
  const std::vector<hs::RebasedIncrement> ensemble(200, eta);
  for (int n : {1, 2, 3}) {
    const auto est = hs::moment_estimate(ensemble, 0.1, n, 0.7);
    EXPECT_NEAR(est.mean, std::pow(0.7, n), 1e-14);
    EXPECT_NEAR(est.std_error, 0.0, 1e-13);
  }
  const std::vector<hs::RebasedIncrement> small(199, eta);
  EXPECT_EQ(kind_of([&] { hs::moment_estimate(small, 0.1, 1, 0.7); }),
            hs::ErrorKind::EnsembleTooSmall);
  EXPECT_THROW(hs::moment_estimate(ensemble, 0.1, 4, 0.7), hs::Error);
}

TEST(Moments, JackknifeOfTheMeanIsTheClassicalStandardError) {
  std::mt19937_64 rng(8);
  std::exponential_distribution<double> e(2.0);
  std::vector<double> v(500);
  for (double& x : v) x = e(rng);
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double se = std::sqrt(ss / (v.size() - 1) / v.size());
  EXPECT_NEAR(hs::jackknife_std_error(v), se, 1e-12);
}
