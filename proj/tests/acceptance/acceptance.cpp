// Acceptance suite: one PASS/FAIL line per criterion. Run with criterion numbers
// as arguments to select a subset.

#include <algorithm>
#include <boost/math/distributions/non_central_chi_squared.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <nlohmann/json.hpp>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "heatsing/heatsing.hpp"

namespace hs = heatsing;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;
const double kQuarter = std::pow(2.0, -0.25);

unsigned worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      note("violated: " + what);
    }
  }
  void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

std::string fmt(double v, int digits = 4) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Radii r_max q^k that are >= r_min.
std::vector<double> radii_down_to(double r_max, double q, double r_min) {
  std::vector<double> out;
  for (double r = r_max; r >= r_min * (1.0 - 1e-12); r *= q) out.push_back(r);
  return out;
}

std::vector<double> singular_curve(const hs::RebasedIncrement& eta, const std::vector<double>& radii,
                                   double T, const hs::QuadratureConfig& quad, unsigned threads) {
  std::vector<double> m(radii.size());
  hs::parallel_for(radii.size(), threads,
                   [&](std::size_t i) { m[i] = hs::singular_mass(eta, radii[i], {3, T}, quad).value; });
  return m;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct HolderCase {
  double alpha;
  double c;
};

// Amplitudes per exponent, shared by the exponent, envelope and r^2-bound checks.
const HolderCase kHolder[] = {{0.25, 1.0}, {0.4, 10.0}, {0.5, 1.0}, {0.75, 1.0}};

hs::SingularTrajectory holder_path(const HolderCase& h) {
  return hs::SingularTrajectory::holder({0, 0, 0}, h.c, h.alpha, {1, 0, 0}, 1.0);
}

const std::vector<double>& two_decades() {
  static const std::vector<double> r = radii_down_to(0.1, kQuarter, 1e-3);
  return r;
}

// 1. Static source closed form.
Verdict static_source() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  hs::QuadratureConfig quad;
  quad.rel_tol = 1e-10;
  double worst_erfc = 0.0, worst_far = 0.0;
  for (double d : {0.05, 0.2, 1.0}) {
    const std::vector<double> x = {d, 0.0, 0.0};
    const auto near = hs::SingularTrajectory::constant({0, 0, 0}, 1.0);
    const double f1 = hs::pointwise_F(x, near, 1.0, quad).value;
    const double want1 = std::erfc(d / 2.0) / (4.0 * kPi * d);
    worst_erfc = std::max(worst_erfc, std::abs(f1 / want1 - 1.0));
    const auto far = hs::SingularTrajectory::constant({0, 0, 0}, 1e4);
    const double f2 = hs::pointwise_F(x, far, 1e4, quad).value;
    worst_far = std::max(worst_far, std::abs(f2 * 4.0 * kPi * d - 1.0));
  }
  const double secs = seconds_since(t0);
  v.note("max rel err vs erfc form " + fmt(worst_erfc) + ", vs 1/(4 pi d) at T=1e4 " + fmt(worst_far) +
         ", " + fmt(secs, 3) + " s");
  v.require(worst_erfc <= 1e-6, "erfc form to 1e-6");
  v.require(worst_far <= 1e-2, "Newtonian profile to 1%");
  v.require(secs < 1.0, "runtime < 1 s");
  return v;
}

// 2. Gaussian ball mass against the chi closed form, the noncentral chi-square CDF and Monte Carlo.
Verdict ball_mass() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  struct Triple {
    double r, d, s;
  };
  std::vector<Triple> triples(20);
  for (auto& t : triples) {
    t.r = 0.05 * std::pow(20.0, unit(rng));  // [0.05, 1]
    t.s = 1e-3 * std::pow(1e3, unit(rng));   // [1e-3, 1]
    t.d = unit(rng) * (t.r + 2.0 * std::sqrt(2.0 * t.s));
  }
  constexpr std::size_t kDraws = 10'000'000;
  std::vector<double> quad(20), centered(20), centered_exact(20), ncx2(20), mc(20), se(20);
  hs::parallel_for(triples.size(), worker_count(), [&](std::size_t i) {
    const auto& t = triples[i];
    quad[i] = hs::gaussian_ball_mass(t.r, t.d, t.s, 3);
    centered[i] = hs::gaussian_ball_mass(t.r, 0.0, t.s, 3);
    centered_exact[i] = boost::math::gamma_p(1.5, t.r * t.r / (4.0 * t.s));
    const boost::math::non_central_chi_squared dist(3.0, t.d * t.d / (2.0 * t.s));
    ncx2[i] = boost::math::cdf(dist, t.r * t.r / (2.0 * t.s));
    std::mt19937_64 g(hs::derive_seed(77, {i}));
    std::normal_distribution<double> z;
    const double sd = std::sqrt(2.0 * t.s);
    std::size_t hits = 0;
    for (std::size_t k = 0; k < kDraws; ++k) {
      const double x = t.d + sd * z(g), y = sd * z(g), w = sd * z(g);
      hits += (x * x + y * y + w * w <= t.r * t.r);
    }
    mc[i] = static_cast<double>(hits) / kDraws;
    se[i] = std::sqrt(quad[i] * (1.0 - quad[i]) / kDraws);
  });
  double worst_closed = 0.0, worst_ncx2 = 0.0, worst_z = 0.0;
  for (std::size_t i = 0; i < triples.size(); ++i) {
    worst_closed = std::max(worst_closed, std::abs(centered[i] / centered_exact[i] - 1.0));
    worst_ncx2 = std::max(worst_ncx2, std::abs(quad[i] / ncx2[i] - 1.0));
    worst_z = std::max(worst_z, std::abs(mc[i] - quad[i]) / std::max(se[i], 1e-300));
  }
  const double secs = seconds_since(t0);
  v.note("d=0 closed form max rel err " + fmt(worst_closed) + ", noncentral chi2 max rel err " +
         fmt(worst_ncx2) + ", Monte Carlo max |z| " + fmt(worst_z, 3) + " (1e7 draws), " + fmt(secs, 3) + " s");
  v.require(worst_closed <= 1e-8, "d=0 closed form to 1e-8");
  v.require(worst_ncx2 <= 1e-8, "noncentral chi-square CDF to 1e-8");
  v.require(worst_z <= 3.0, "Monte Carlo within 3 standard errors");
  v.require(secs < 60.0, "runtime < 1 min");
  return v;
}

// 3. Universal r^2 bound.
Verdict universal_bound() {
  Verdict v;
  const auto& radii = two_decades();
  struct PathCase {
    std::string name;
    hs::SingularTrajectory traj;
    bool exponent_two;
  };
  std::vector<PathCase> cases;
  cases.push_back({"constant", hs::SingularTrajectory::constant({0, 0, 0}, 1.0), true});
  for (const auto& h : kHolder)
    cases.push_back({"holder " + fmt(h.alpha), holder_path(h), h.alpha >= 0.5});
  for (double H : {0.25, 1.0 / 3.0, 0.45}) {
    const std::size_t n = 1u << 14;
    const hs::FgnSampler sampler{hs::HurstExponent(H), n};
    cases.push_back({"fbm " + fmt(H, 3),
                     hs::SingularTrajectory::sampled(hs::generate_fbm_path(sampler, 31, 3, 1.0 / n)), false});
  }
  // Static-source bound from the Anderson inequality: M_sing(r) <= r^2 / (2 (N - 2)).
  const double universal = 0.5;
  for (const auto& pc : cases) {
    const auto eta = hs::rebase(pc.traj);
    const auto m = singular_curve(eta, radii, 1.0, hs::QuadratureConfig{}, worker_count());
    double lo = INFINITY, hi = 0.0;
    bool finite = true;
    for (std::size_t i = 0; i < radii.size(); ++i) {
      const double q = m[i] / (radii[i] * radii[i]);
      finite = finite && std::isfinite(q) && q > 0.0;
      lo = std::min(lo, q);
      hi = std::max(hi, q);
    }
    const double C = hi;  // fitted constant: max_r M / r^2
    bool bounded = true;
    for (std::size_t i = 0; i < radii.size(); ++i) bounded = bounded && m[i] <= C * radii[i] * radii[i] * (1.0 + 1e-12);
    v.note(pc.name + ": C=" + fmt(C) + " spread=" + fmt(hi / lo, 3));
    v.require(finite, pc.name + " ratio finite and positive");
    v.require(bounded, pc.name + " M <= C r^2");
    v.require(C <= universal, pc.name + " C <= 1/2");
    if (pc.exponent_two) v.require(hi / lo <= 50.0, pc.name + " spread <= 50 (exponent 2)");
  }
  return v;
}

double holder_kappa(const HolderCase& h) {
  const auto& radii = two_decades();
  const auto m = singular_curve(hs::rebase(holder_path(h)), radii, 1.0, hs::QuadratureConfig{}, worker_count());
  return hs::fit_exponent(radii, m, 1e-3, 1e-1).kappa;
}

// 4. Exponent dichotomy.
Verdict exponent_dichotomy() {
  Verdict v;
  for (const auto& h : kHolder) {
    if (h.alpha > 0.5) continue;
    const auto t0 = std::chrono::steady_clock::now();
    const double kappa = holder_kappa(h);
    const double secs = seconds_since(t0);
    const bool above = h.alpha > 1.0 / 3.0;
    const double target = above ? 1.0 / h.alpha : 3.0;
    const double tol = above ? 0.15 : 0.2;
    v.note("alpha " + fmt(h.alpha) + " (c=" + fmt(h.c) + "): kappa " + fmt(kappa, 5) + " target " + fmt(target) +
           " +- " + fmt(tol) + ", " + fmt(secs, 3) + " s");
    v.require(std::abs(kappa - target) <= tol, "alpha " + fmt(h.alpha) + " exponent");
    v.require(secs < 300.0, "runtime < 5 min");
  }
  return v;
}

// 5. Above one half the mass scales like the static profile, r^2.
Verdict above_half() {
  Verdict v;
  const double kappa = holder_kappa(kHolder[3]);
  v.note("alpha 0.75: kappa " + fmt(kappa, 5) + " target 2 +- 0.15");
  v.require(std::abs(kappa - 2.0) <= 0.15, "alpha 0.75 exponent");
  return v;
}

// 6. Exit-time lower and tail-integral upper envelopes.
Verdict envelopes() {
  Verdict v;
  const auto& radii = two_decades();
  for (const auto& h : kHolder) {
    if (h.alpha > 0.5) continue;
    const auto eta = hs::rebase(holder_path(h));
    const auto m = singular_curve(eta, radii, 1.0, hs::QuadratureConfig{}, worker_count());
    hs::BallMassCurve curve;
    curve.horizon = 1.0;
    curve.radii = radii;
    curve.singular = m;
    curve.background.assign(m.size(), 0.0);
    curve.error.assign(m.size(), 0.0);
    // Exit grid on the same lattice: up to c0 >= max|eta| and four steps below (theta = q^4).
    std::size_t up = 3;
    while (radii.front() * std::pow(kQuarter, -static_cast<double>(up)) < eta.max_norm()) ++up;
    const auto grid = hs::RadiusGrid::geometric(radii.front(), kQuarter, radii.size())
                          .extended_above(up)
                          .extended_below(4);
    const auto exits = hs::exit_occupation_curve(eta, grid);
    const double c0 = grid[0];
    const hs::BoundWindow window{1e-3, 1e-1};
    const auto lower = hs::verify_lower_bound(curve, exits, 0.5, 3, window, 50.0);
    const auto upper = hs::verify_upper_bound(curve, exits, 3, c0, window, 50.0);
    v.note("alpha " + fmt(h.alpha) + ": lower ratios [" + fmt(lower.min_ratio) + ", " + fmt(lower.max_ratio) +
           "], upper ratios [" + fmt(upper.min_ratio) + ", " + fmt(upper.max_ratio) + "]");
    v.require(lower.pass, "alpha " + fmt(h.alpha) + " lower envelope");
    v.require(upper.pass, "alpha " + fmt(h.alpha) + " upper envelope");
  }
  return v;
}

// 7. fBm exponent statistics. Setup rule (same for every H):
//   horizon T with heat-to-path ratio sqrt(2 s_r)/r = 0.1 at r = T^H / 2, where s_r = T (r/T^H)^{1/H};
//   window [(10 dt/T)^H, 1/2] T^H on a 2^{-1/8} grid.
Verdict fbm_exponents() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t n = 1u << 14;
  const std::size_t paths = 100;
  const double q = std::pow(2.0, -0.125);
  hs::QuadratureConfig quad;
  quad.rel_tol = 1e-4;
  quad.path_node_steps = 256;
  struct Case {
    double H;
    double target;
    double tol;
  };
  for (const Case c : {Case{0.45, 1.0 / 0.45, 0.3}, Case{1.0 / 3.0, 3.0, 0.4}, Case{0.25, 3.0, 0.35}}) {
    const double H = c.H;
    const double T = std::pow(0.1 / (std::sqrt(2.0) * std::pow(0.5, 1.0 / (2.0 * H) - 1.0)), 1.0 / (0.5 - H));
    const double scale = std::pow(T, H);
    const double lo = std::pow(10.0 / static_cast<double>(n), H) * scale;
    const double hi = 0.5 * scale;
    const auto radii = radii_down_to(hi, q, lo);
    const hs::FgnSampler sampler{hs::HurstExponent(H), n};
    std::vector<double> pure(paths);
    hs::parallel_for(paths, worker_count(), [&](std::size_t p) {
      const auto eta = hs::rebase(
          hs::SingularTrajectory::sampled(hs::generate_fbm_path(sampler, 4242, 3, T / static_cast<double>(n), p)));
      const auto m = singular_curve(eta, radii, T, quad, 1);
      pure[p] = hs::fit_exponent(radii, m, lo, hi).kappa;
    });
    const double med = median(pure);
    v.note("H " + fmt(H, 3) + " (T=" + fmt(T, 3) + ", " + std::to_string(radii.size()) + " radii): median kappa " +
           fmt(med, 4) + " target " + fmt(c.target, 4) + " +- " + fmt(c.tol));
    v.require(std::abs(med - c.target) <= c.tol, "H " + fmt(H, 3) + " median exponent");
  }
  const double secs = seconds_since(t0);
  v.note(fmt(secs, 4) + " s");
  v.require(secs <= 1800.0, "runtime <= 30 min");
  return v;
}

// 8. Exit and occupation functionals.
Verdict functionals() {
  Verdict v;
  double worst_holder = 0.0;
  for (const auto& h : kHolder) {
    const auto eta = hs::rebase(holder_path(h));
    for (double r : radii_down_to(0.5 * h.c, 0.5, 1e-4)) {
      const double exact = std::min(std::pow(r / h.c, 1.0 / h.alpha), 1.0);
      const double sigma = hs::first_exit_time(eta, r);
      const double tau = hs::occupation_time(eta, r);
      const double tol = eta.crossing_tolerance(0.0, 2.0 * exact);
      worst_holder = std::max(worst_holder, std::max(std::abs(sigma - exact), std::abs(tau - exact)) / tol);
    }
  }
  v.note("Holder closed form: max error " + fmt(worst_holder, 3) + " tol_s");
  v.require(worst_holder <= 1.0, "Holder sigma = tau = (r/c)^{1/alpha} to tol_s");

  std::size_t order_violations = 0, oracle_sigma = 0, oracle_tau = 0, checks = 0;
  for (double H : {0.25, 1.0 / 3.0, 0.45}) {
    const std::size_t n = 1u << 10;
    const double dt = 1.0 / n, h = dt / 10.0;
    const hs::FgnSampler sampler{hs::HurstExponent(H), n};
    for (std::size_t p = 0; p < 20; ++p) {
      const auto eta = hs::rebase(hs::SingularTrajectory::sampled(hs::generate_fbm_path(sampler, 99, 3, dt, p)));
      for (double frac : {0.05, 0.1, 0.2, 0.4, 0.7}) {
        const double r = frac * eta.max_norm();
        const double sigma = hs::first_exit_time(eta, r);
        const double tau = hs::occupation_time(eta, r);
        order_violations += sigma > tau;
        if (p >= 3) continue;
        // Brute-force scan of the interpolant on a 10x finer grid (left-endpoint rule for tau).
        double fs = eta.s0(), ft = 0.0;
        bool exited = false;
        for (std::size_t k = 0; k <= 10 * n; ++k) {
          const double s = std::min(eta.s0(), static_cast<double>(k) * h);
          const bool in = eta.norm_at(s) <= r;
          if (!in && !exited) {
            fs = s;
            exited = true;
          }
          if (in && k < 10 * n) ft += h;
        }
        const auto set = hs::occupation_set(eta, r, eta.s0());
        ++checks;
        oracle_sigma += std::abs(sigma - fs) > h + dt / 100.0;
        oracle_tau += std::abs(tau - ft) > 2.0 * h * static_cast<double>(set.size());
      }
    }
  }
  v.note("fBm: sigma > tau in " + std::to_string(order_violations) + " of 300 cases; fine-grid oracle misses " +
         std::to_string(oracle_sigma) + " (sigma) / " + std::to_string(oracle_tau) + " (tau) of " +
         std::to_string(checks));
  v.require(order_violations == 0, "sigma <= tau on fBm paths");
  v.require(oracle_sigma == 0, "sigma within one fine step of the oracle");
  v.require(oracle_tau == 0, "tau within two fine steps per occupation interval");
  return v;
}

// 9. Occupation-moment scaling. The normalized moment depends on r only through r/T^H,
// so T places the five radii where the 2^18-node interpolant resolves them: e^-6 / T^H = 0.03.
Verdict occupation_moments() {
  Verdict v;
  const std::size_t n = 1u << 18;
  const std::size_t paths = 500;
  std::vector<double> radii;
  for (int m = 2; m <= 6; ++m) radii.push_back(std::exp(-m));
  for (double H : {0.45, 0.25}) {
    const double T = std::pow(std::exp(-6.0) / 0.03, 1.0 / H);
    const double p = H > 1.0 / 3.0 ? 1.0 / H : 3.0;
    const hs::FgnSampler sampler{hs::HurstExponent(H), n};
    std::vector<std::vector<double>> tau(radii.size(), std::vector<double>(paths));
    hs::parallel_for(paths, worker_count(), [&](std::size_t e) {
      const auto eta = hs::rebase(
          hs::SingularTrajectory::sampled(hs::generate_fbm_path(sampler, 555, 3, T / static_cast<double>(n), e)));
      for (std::size_t i = 0; i < radii.size(); ++i) tau[i][e] = hs::occupation_time(eta, radii[i]);
    });
    double lo = INFINITY, hi = 0.0, worst_oracle = 0.0;
    for (std::size_t i = 0; i < radii.size(); ++i) {
      const auto est = hs::moment_estimate(tau[i], radii[i], 1);
      const double normalized = est.mean * std::pow(radii[i], -p);
      lo = std::min(lo, normalized);
      hi = std::max(hi, normalized);
      // Continuous-path expectation int_0^T P(|B_H(s)| <= r) ds, for the record.
      const double r = radii[i];
      auto f = [&](double s) { return s <= 0.0 ? 1.0 : boost::math::gamma_p(1.5, r * r / (2.0 * std::pow(s, 2.0 * H))); };
      const double exact = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, T, 15, 1e-10);
      worst_oracle = std::max(worst_oracle, std::abs(est.mean / exact - 1.0));
    }
    v.note("H " + fmt(H) + " (T=" + fmt(T, 3) + "): normalized E[tau] in [" + fmt(lo) + ", " + fmt(hi) +
           "], max/min " + fmt(hi / lo, 3) + "; max deviation from the continuous-path mean " + fmt(worst_oracle, 3));
    v.require(hi / lo <= 20.0, "H " + fmt(H) + " max/min <= 20");
  }
  return v;
}

// 10. Weak residual identity.
Verdict weak_residual() {
  Verdict v;
  const hs::BumpTestFunction phi{{0.1, -0.05, 0.0}, 0.5, 0.5, 0.3, 1.0};
  const auto still = hs::SingularTrajectory::constant({0, 0, 0}, 1.0);
  for (const hs::InitialData& u0 : {hs::InitialData{hs::ConstantData{2.0}},
                                    hs::InitialData{hs::GaussianBump{1.0, 0.4, {0.2, 0, 0}}}}) {
    const auto res = hs::weak_residual(still, u0, hs::SolutionPart::Background, phi, {});
    v.note("background " + hs::describe(u0) + ": scaled residual " + fmt(res.scaled_error(), 3));
    v.require(res.scaled_error() <= 1e-4, "background residual <= 1e-4");
  }
  const auto moving = hs::SingularTrajectory::holder({0, 0, 0}, 0.3, 0.4, {1, 1, 0}, 1.0);
  const auto offset = hs::SingularTrajectory::constant({0.05, 0.0, 0.0}, 1.0);
  for (const auto* traj : {&offset, &moving}) {
    const auto res = hs::weak_residual(*traj, hs::NoData{}, hs::SolutionPart::Singular, phi, {});
    const double rel = std::abs(res.value - res.expected) / std::abs(res.expected);
    v.note(std::string(traj == &offset ? "constant" : "holder") + " source: pairing " + fmt(res.value, 6) +
           " vs -int phi " + fmt(res.expected, 6) + " (rel " + fmt(rel, 3) + ")");
    v.require(rel <= 0.02, "singular pairing within 2%");
  }
  return v;
}

// 11. fGn sampler exactness.
Verdict sampler_exactness() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  std::uint64_t k = 0;
  for (double H : {0.2, 0.3, 0.5}) {
    const hs::FgnSampler sampler{hs::HurstExponent(H), 1024};
    const auto rep = hs::check_autocovariance(sampler, 2000, 10, hs::derive_seed(11, {k++}), 3.0, worker_count());
    double worst = 0.0;
    for (std::size_t lag = 0; lag <= 10; ++lag) worst = std::max(worst, std::abs(rep.z_score(lag)));
    v.note("H " + fmt(H) + ": max |z| over lags 0-10 " + fmt(worst, 3));
    v.require(rep.pass, "H " + fmt(H) + " within 3 standard errors");
  }
  const double secs = seconds_since(t0);
  v.note(fmt(secs, 3) + " s");
  v.require(secs < 120.0, "runtime < 2 min");
  return v;
}

// 12. CLI reproducibility across worker counts.
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Verdict reproducibility() {
  Verdict v;
  const fs::path root = fs::temp_directory_path() / "heatsing_acceptance_cli";
  fs::remove_all(root);
  fs::create_directories(root);
  const std::vector<std::pair<std::string, std::string>> runs = {
      {"mass-curve", "path.variant = holder\npath.c = 10\npath.alpha = 0.4\nu0.variant = gaussian\n"},
      {"fit",
       "path.variant = fbm\npath.hurst = 0.45\npath.grid_len = 16384\ngrid.r_max = 0.5\ngrid.count = 9\n"
       "ensemble.size = 4\nquad.rel_tol = 1e-4\nquad.path_node_steps = 64\n"},
      {"verify-bounds", "path.variant = holder\npath.alpha = 0.5\n"},
      {"moments",
       "path.variant = fbm\npath.hurst = 0.45\npath.grid_len = 4096\ngrid.r_max = 0.5\ngrid.ratio = 0.5\n"
       "grid.count = 2\nensemble.size = 200\n"},
      {"fbm-check", "fbm_check.replicas = 200\nfbm_check.grid_len = 256\n"},
  };
  std::size_t files = 0;
  for (const auto& [experiment, body] : runs) {
    const fs::path cfg = root / (experiment + ".cfg");
    std::ofstream(cfg) << body;
    std::vector<fs::path> dirs;
    for (int threads : {1, 8}) {
      const fs::path out = root / (experiment + "_t" + std::to_string(threads));
      const std::string cmd = std::string("\"") + HEATSING_CLI + "\" " + experiment + " --config \"" + cfg.string() +
                              "\" --seed 12345 --threads " + std::to_string(threads) + " --out \"" +
                              out.string() + "\" > \"" + (root / (experiment + ".log")).string() + "\" 2>&1";
      const int status = std::system(cmd.c_str());
      v.require(WIFEXITED(status) && WEXITSTATUS(status) <= 1, experiment + " ran (exit status)");
      dirs.push_back(out);
    }
    std::vector<std::string> names;
    for (const auto& e : fs::directory_iterator(dirs[0])) names.push_back(e.path().filename().string());
    std::sort(names.begin(), names.end());
    for (const auto& name : names) {
      ++files;
      if (name == "manifest.json") {
        // Wall clock, start time, thread count and output directory are run facts, not results.
        auto a = nlohmann::json::parse(slurp(dirs[0] / name));
        auto b = nlohmann::json::parse(slurp(dirs[1] / name));
        for (auto* m : {&a, &b}) {
          for (const char* key : {"threads", "wall_clock_seconds", "started_utc"}) m->erase(key);
          (*m)["config"].erase("output.dir");
        }
        v.require(a == b, experiment + "/manifest.json identical apart from run facts");
      } else {
        v.require(slurp(dirs[0] / name) == slurp(dirs[1] / name), experiment + "/" + name + " byte-identical");
      }
    }
  }
  v.note(std::to_string(files) + " output files compared across 1 and 8 threads for 5 subcommands");
  return v;
}

struct Criterion {
  int id;
  const char* name;
  std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "static-source closed form", static_source},
      {2, "Gaussian ball mass", ball_mass},
      {3, "universal r^2 bound", universal_bound},
      {4, "exponent dichotomy", exponent_dichotomy},
      {5, "alpha > 1/2 regime", above_half},
      {6, "exit-time envelopes", envelopes},
      {7, "fBm exponent statistics", fbm_exponents},
      {8, "exit and occupation functionals", functionals},
      {9, "occupation-moment scaling", occupation_moments},
      {10, "weak residual identity", weak_residual},
      {11, "fGn sampler exactness", sampler_exactness},
      {12, "CLI reproducibility", reproducibility},
  };
  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& c : all) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.pass = false;
      v.note(std::string("exception: ") + e.what());
    }
    failures += !v.pass;
    std::printf("%s %2d %s (%.1f s): %s\n", v.pass ? "PASS" : "FAIL", c.id, c.name, seconds_since(t0),
                v.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
