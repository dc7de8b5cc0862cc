#include "heatsing/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <limits>
#include <nlohmann/json.hpp>

namespace heatsing::cli {

namespace {

using Json = nlohmann::ordered_json;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class Output {
 public:
  explicit Output(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) fail(ErrorKind::IoError, "cannot create output directory " + dir_.string() + ": " + ec.message());
  }

  void csv(const std::string& name, const std::vector<std::string>& header,
           const std::vector<std::vector<double>>& rows) {
    std::string body;
    for (std::size_t j = 0; j < header.size(); ++j) body += (j ? "," : "") + header[j];
    body += '\n';
    for (const auto& row : rows) {
      for (std::size_t j = 0; j < row.size(); ++j) body += (j ? "," : "") + format_real(row[j]);
      body += '\n';
    }
    write(name, body);
  }

  void json(const std::string& name, const Json& doc) { write(name, doc.dump(2) + "\n"); }

  const std::vector<std::string>& written() const { return written_; }

 private:
  void write(const std::string& name, const std::string& body) {
    const auto path = dir_ / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << body;
    if (!out) fail(ErrorKind::IoError, "cannot write " + path.string());
    written_.push_back(name);
  }

  std::filesystem::path dir_;
  std::vector<std::string> written_;
};

Json real_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

// Fields shared by every report.json; experiment-specific extras are appended.
Json base_report(double kappa, const std::string& model, double lo, double hi, double min_ratio,
                 double max_ratio, bool pass) {
  Json r;
  r["kappa"] = real_or_null(kappa);
  r["model"] = model.empty() ? Json(nullptr) : Json(model);
  r["window"] = (std::isfinite(lo) && std::isfinite(hi)) ? Json::array({lo, hi}) : Json(nullptr);
  r["min_ratio"] = real_or_null(min_ratio);
  r["max_ratio"] = real_or_null(max_ratio);
  r["pass"] = pass;
  return r;
}

struct RadiusMass {
  double singular = kNaN;
  double background = kNaN;
  double error = kNaN;
  std::string problem;

  double total() const { return singular + background; }
};

RadiusMass mass_at(const RebasedIncrement& eta, const Point& center, double r,
                   const ExperimentConfig& cfg) {
  RadiusMass m;
  try {
    const HeatKernelParams params{cfg.dim, cfg.horizon};
    const auto sing = singular_mass(eta, r, params, cfg.quad);
    const auto bg = background_mass(cfg.u0, r, cfg.horizon, center, cfg.dim);
    m.singular = sing.value;
    m.background = bg.value;
    m.error = sing.error + bg.error;
  } catch (const Error& e) {
    m.problem = "r = " + format_real(r) + ": " + std::string(e.what());
  }
  return m;
}

// Walks the ensemble in batches so at most a batch of rebased paths is alive;
// inside a batch the (replica, radius) units run in parallel.
void for_each_unit(const PathSource& paths, std::size_t replicas, std::size_t radii, unsigned threads,
                   const std::function<void(std::size_t, std::size_t, const RebasedIncrement&,
                                            const Point&)>& unit) {
  const std::size_t batch = std::max<std::size_t>(4, 2 * static_cast<std::size_t>(threads));
  for (std::size_t first = 0; first < replicas; first += batch) {
    const std::size_t b = std::min(batch, replicas - first);
    std::vector<RebasedIncrement> etas(b);
    std::vector<Point> centers(b);
    parallel_for(b, threads, [&](std::size_t k) {
      const auto traj = paths.trajectory(first + k);
      centers[k] = traj.eval(traj.horizon());
      etas[k] = rebase(traj);
    });
    parallel_for(b * radii, threads, [&](std::size_t u) {
      const std::size_t k = u / radii;
      unit(first + k, u % radii, etas[k], centers[k]);
    });
  }
}

double median(std::vector<double> v) {
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Exit grid on the same geometric lattice as the mass radii: `up` radii above r_max
// (so c0 sits on the lattice and every mass radius has four tabulated radii above
// it) and `down` below r_min (so theta r is tabulated).
struct ExitGrid {
  std::vector<double> radii;
  double c0 = 0.0;
};

ExitGrid exit_grid(const ExperimentConfig& cfg, double max_norm, std::size_t down) {
  const double q = cfg.ratio;
  const double reach = std::max(max_norm, cfg.c0);
  std::size_t up = 3;
  while (cfg.r_max * std::pow(q, -static_cast<double>(up)) < reach * (1.0 - 1e-12)) ++up;
  ExitGrid g;
  for (long long k = -static_cast<long long>(up); k < static_cast<long long>(cfg.count + down); ++k)
    g.radii.push_back(cfg.r_max * std::pow(q, static_cast<double>(k)));
  g.c0 = cfg.c0 > 0.0 ? cfg.c0 : g.radii.front();
  return g;
}

std::size_t theta_steps(const ExperimentConfig& cfg) {
  const double j = std::log(cfg.theta) / std::log(cfg.ratio);
  const auto k = static_cast<long long>(std::llround(j));
  if (k < 1 || std::abs(std::pow(cfg.ratio, static_cast<double>(k)) / cfg.theta - 1.0) > 1e-9) {
    fail(ErrorKind::ConfigError, "theta = " + format_real(cfg.theta) +
                                     " must be a positive integer power of grid.ratio");
  }
  return static_cast<std::size_t>(k);
}

void write_exit_table(Output& out, const ExitOccupationCurve& exits, double c0, int dim) {
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < exits.size(); ++i) {
    double tail = kNaN;
    const double r = exits.radii[i];
    // The tail integral needs four tabulated radii in [r, c0]; above that it is undefined.
    if (r < c0) {
      try {
        tail = tail_integral(exits, r, dim, c0);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::GridTooCoarse) throw;
      }
    }
    rows.push_back({r, exits.sigma[i], exits.tau[i], tail});
  }
  out.csv("exit_occupation.csv", {"r", "sigma", "tau", "tail_integral"}, rows);
}

void write_mass_table(Output& out, const std::vector<double>& radii, const std::vector<RadiusMass>& m) {
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < radii.size(); ++i)
    rows.push_back({radii[i], m[i].singular, m[i].background, m[i].total(), m[i].error});
  out.csv("mass_curve.csv", {"r", "M_sing", "M_bg", "M_total", "err_est"}, rows);
}

BallMassCurve to_curve(const ExperimentConfig& cfg, const std::vector<double>& radii,
                       const std::vector<RadiusMass>& m) {
  BallMassCurve c;
  c.path_id = cfg.path_label();
  c.initial_data = describe(cfg.u0);
  c.horizon = cfg.horizon;
  c.radii = radii;
  for (const auto& x : m) {
    c.singular.push_back(x.singular);
    c.background.push_back(x.background);
    c.error.push_back(x.error);
  }
  return c;
}

struct Context {
  const ExperimentConfig& cfg;
  const RunOptions& opts;
  const PathSource& paths;
  Output& out;
  RunOutcome& outcome;
  Json seeds = Json::array();
  Json errors = Json::object();

  void note_seeds(std::size_t replica) {
    if (!paths.stochastic()) return;
    seeds.push_back({{"replica", replica}, {"components", paths.component_seeds(replica)}});
  }
  void problem(std::string p) { outcome.problems.push_back(std::move(p)); }
};

// One path, every radius: mass curve, exit curve and the fitted exponent.
struct SinglePath {
  std::vector<double> radii;
  std::vector<RadiusMass> mass;
  ExitOccupationCurve exits;
  double c0 = 0.0;
  ExponentFit fit;
  bool fitted = false;
};

SinglePath single_path(Context& ctx, std::size_t theta_down) {
  const auto& cfg = ctx.cfg;
  SinglePath sp;
  sp.radii = cfg.radii();
  sp.mass.resize(sp.radii.size());
  const std::size_t replica = cfg.path.replica;
  ctx.note_seeds(replica);
  const auto traj = ctx.paths.trajectory(replica);
  const auto eta = rebase(traj);
  const Point center = traj.eval(cfg.horizon);
  parallel_for(sp.radii.size(), ctx.opts.threads,
               [&](std::size_t i) { sp.mass[i] = mass_at(eta, center, sp.radii[i], cfg); });
  double max_err = 0.0;
  for (const auto& m : sp.mass) {
    if (!m.problem.empty()) ctx.problem(m.problem);
    if (std::isfinite(m.error)) max_err = std::max(max_err, m.error);
  }
  ctx.errors["max_mass_err_est"] = max_err;

  const auto grid = exit_grid(cfg, eta.max_norm(), theta_down);
  sp.c0 = grid.c0;
  sp.exits = exit_occupation_curve(eta, grid.radii, eta.s0());
  ctx.errors["max_norm"] = eta.max_norm();
  ctx.errors["c0"] = sp.c0;

  try {
    const auto curve = to_curve(cfg, sp.radii, sp.mass);
    sp.fit = fit_exponent(curve.radii, curve.totals(), cfg.window_min(), cfg.window_max(), cfg.model);
    sp.fitted = true;
    ctx.errors["fit_rms_residual"] = sp.fit.rms_residual;
  } catch (const Error& e) {
    ctx.problem("fit: " + std::string(e.what()));
  }
  return sp;
}

void run_mass_curve(Context& ctx) {
  const auto sp = single_path(ctx, 0);
  write_mass_table(ctx.out, sp.radii, sp.mass);
  write_exit_table(ctx.out, sp.exits, sp.c0, ctx.cfg.dim);
  ctx.outcome.pass = ctx.outcome.problems.empty();
  ctx.out.json("report.json", base_report(sp.fitted ? sp.fit.kappa : kNaN, std::string(to_string(ctx.cfg.model)),
                                          ctx.cfg.window_min(), ctx.cfg.window_max(), kNaN, kNaN,
                                          ctx.outcome.pass));
}

void run_verify_bounds(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const std::size_t down = theta_steps(cfg);
  const auto sp = single_path(ctx, down);
  write_mass_table(ctx.out, sp.radii, sp.mass);
  write_exit_table(ctx.out, sp.exits, sp.c0, cfg.dim);

  Json extra;
  double lo = kNaN, hi = kNaN;
  bool pass = ctx.outcome.problems.empty();
  if (pass) {
    const auto curve = to_curve(cfg, sp.radii, sp.mass);
    const BoundWindow window{cfg.window_min(), cfg.window_max()};
    const auto lower = verify_lower_bound(curve, sp.exits, cfg.theta, cfg.dim, window, cfg.ratio_cap);
    const auto upper = verify_upper_bound(curve, sp.exits, cfg.dim, sp.c0, window, cfg.ratio_cap);
    lo = std::min(lower.min_ratio, upper.min_ratio);
    hi = std::max(lower.max_ratio, upper.max_ratio);
    pass = lower.pass && upper.pass;
    auto side = [](const BoundReport& b) {
      return Json{{"min_ratio", b.min_ratio}, {"max_ratio", b.max_ratio}, {"ratio_cap", b.ratio_cap},
                  {"pass", b.pass}};
    };
    extra["lower"] = side(lower);
    extra["lower"]["theta"] = cfg.theta;
    extra["upper"] = side(upper);
    extra["upper"]["c0"] = sp.c0;
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < lower.radii.size(); ++i)
      rows.push_back({lower.radii[i], lower.ratios[i], upper.ratios[i]});
    ctx.out.csv("bounds.csv", {"r", "lower_ratio", "upper_ratio"}, rows);
  }
  ctx.outcome.pass = pass && ctx.outcome.problems.empty();
  auto report = base_report(sp.fitted ? sp.fit.kappa : kNaN, std::string(to_string(cfg.model)),
                            cfg.window_min(), cfg.window_max(), lo, hi, ctx.outcome.pass);
  report.update(extra);
  ctx.out.json("report.json", report);
}

void run_fit(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const std::size_t replicas = ctx.paths.stochastic() ? cfg.ensemble : 1;
  const auto radii = cfg.radii();
  std::vector<RadiusMass> mass(replicas * radii.size());
  for (std::size_t e = 0; e < replicas; ++e) ctx.note_seeds(e);
  for_each_unit(ctx.paths, replicas, radii.size(), ctx.opts.threads,
                [&](std::size_t e, std::size_t i, const RebasedIncrement& eta, const Point& center) {
                  mass[e * radii.size() + i] = mass_at(eta, center, radii[i], cfg);
                });

  std::vector<std::vector<double>> rows;
  std::vector<double> kappas;
  double max_err = 0.0;
  for (std::size_t e = 0; e < replicas; ++e) {
    const std::vector<RadiusMass> m(mass.begin() + static_cast<std::ptrdiff_t>(e * radii.size()),
                                    mass.begin() + static_cast<std::ptrdiff_t>((e + 1) * radii.size()));
    bool ok = true;
    for (const auto& x : m) {
      if (!x.problem.empty()) {
        ctx.problem("replica " + std::to_string(e) + ": " + x.problem);
        ok = false;
      } else {
        max_err = std::max(max_err, x.error);
      }
    }
    if (e == 0) write_mass_table(ctx.out, radii, m);
    if (!ok) continue;
    try {
      const auto curve = to_curve(cfg, radii, m);
      const auto fit = fit_exponent(radii, curve.totals(), cfg.window_min(), cfg.window_max(), cfg.model);
      kappas.push_back(fit.kappa);
      rows.push_back({static_cast<double>(e), fit.kappa, fit.beta, fit.rms_residual,
                      static_cast<double>(fit.points)});
    } catch (const Error& err) {
      ctx.problem("replica " + std::to_string(e) + ": fit: " + err.what());
    }
  }
  ctx.out.csv("fits.csv", {"replica", "kappa", "beta", "rms_residual", "points"}, rows);
  ctx.errors["max_mass_err_est"] = max_err;

  const double kappa = median(kappas);
  bool pass = ctx.outcome.problems.empty() && !kappas.empty();
  Json extra;
  extra["replicas"] = replicas;
  extra["fitted"] = kappas.size();
  if (cfg.expected_kappa) {
    extra["expected_kappa"] = *cfg.expected_kappa;
    extra["tolerance"] = cfg.kappa_tolerance;
    pass = pass && std::abs(kappa - *cfg.expected_kappa) <= cfg.kappa_tolerance;
  }
  ctx.outcome.pass = pass;
  auto report = base_report(kappa, std::string(to_string(cfg.model)), cfg.window_min(), cfg.window_max(),
                            kNaN, kNaN, pass);
  report.update(extra);
  ctx.out.json("report.json", report);
}

void run_moments(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto radii = cfg.radii();
  const std::size_t replicas = cfg.ensemble;
  std::vector<std::vector<double>> tau(radii.size(), std::vector<double>(replicas));
  for (std::size_t e = 0; e < replicas; ++e) ctx.note_seeds(e);
  for_each_unit(ctx.paths, replicas, radii.size(), ctx.opts.threads,
                [&](std::size_t e, std::size_t i, const RebasedIncrement& eta, const Point&) {
                  tau[i][e] = occupation_time(eta, radii[i], eta.s0());
                });

  const double p = cfg.moment_power();
  std::vector<std::vector<double>> rows;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  // Least-squares slope of log E[tau^n] against log r.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  bool positive = true;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const auto est = moment_estimate(tau[i], radii[i], cfg.moment_order);
    const double normalized = est.mean * std::pow(radii[i], -cfg.moment_order * p);
    rows.push_back({radii[i], static_cast<double>(cfg.moment_order), est.mean, est.std_error, normalized});
    lo = std::min(lo, normalized);
    hi = std::max(hi, normalized);
    positive = positive && est.mean > 0.0;
    if (est.mean > 0.0) {
      const double x = std::log(radii[i]), y = std::log(est.mean);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
  }
  ctx.out.csv("moments.csv", {"r", "order", "mean", "std_error", "normalized"}, rows);
  const double n = static_cast<double>(radii.size());
  const double slope = positive ? (n * sxy - sx * sy) / (n * sxx - sx * sx) : kNaN;
  if (!positive) ctx.problem("an occupation moment is zero; the normalized spread is undefined");
  const bool pass = ctx.outcome.problems.empty() && hi / lo <= cfg.spread_cap;
  ctx.outcome.pass = pass;
  auto report = base_report(slope, "", radii.back(), radii.front(), lo, hi, pass);
  report["normalizing_exponent"] = p;
  report["order"] = cfg.moment_order;
  report["spread"] = real_or_null(hi / lo);
  report["spread_cap"] = cfg.spread_cap;
  report["replicas"] = replicas;
  ctx.out.json("report.json", report);
}

void run_fbm_check(Context& ctx) {
  const auto& cfg = ctx.cfg;
  std::vector<std::vector<double>> rows;
  Json per = Json::array();
  bool pass = true;
  double worst = 0.0;
  for (std::size_t k = 0; k < cfg.check_hurst.size(); ++k) {
    const double h = cfg.check_hurst[k];
    const std::uint64_t base = derive_seed(cfg.seed, {k});
    const FgnSampler sampler(HurstExponent(h), cfg.check_grid_len);
    const auto rep = check_autocovariance(sampler, cfg.check_replicas, cfg.check_max_lag, base,
                                          cfg.check_band, ctx.opts.threads);
    double max_z = 0.0;
    for (std::size_t lag = 0; lag < rep.expected.size(); ++lag) {
      const double z = rep.z_score(lag);
      max_z = std::max(max_z, std::abs(z));
      rows.push_back({h, static_cast<double>(lag), rep.expected[lag], rep.empirical[lag],
                      rep.std_error[lag], z});
    }
    worst = std::max(worst, max_z);
    pass = pass && rep.pass;
    per.push_back({{"hurst", h}, {"base_seed", base}, {"max_abs_z", max_z}, {"pass", rep.pass}});
    ctx.seeds.push_back({{"hurst", h}, {"base_seed", base}});
  }
  ctx.out.csv("fbm_check.csv", {"hurst", "lag", "expected", "empirical", "std_error", "z"}, rows);
  ctx.outcome.pass = pass;
  auto report = base_report(kNaN, "", kNaN, kNaN, kNaN, kNaN, pass);
  report["band"] = cfg.check_band;
  report["max_abs_z"] = worst;
  report["replicas"] = cfg.check_replicas;
  report["grid_len"] = cfg.check_grid_len;
  report["checks"] = per;
  ctx.out.json("report.json", report);
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

PathSource::PathSource(const ExperimentConfig& cfg) : cfg_(cfg) {
  if (cfg.path.kind == PathKind::Fbm && cfg.experiment != Experiment::FbmCheck)
    sampler_ = std::make_shared<const FgnSampler>(HurstExponent(cfg.path.hurst), cfg.path.grid_len);
}

SingularTrajectory PathSource::trajectory(std::size_t replica) const {
  const auto& p = cfg_.path;
  switch (p.kind) {
    case PathKind::Constant: return SingularTrajectory::constant(p.anchor, cfg_.horizon);
    case PathKind::Holder:
      return SingularTrajectory::holder(p.anchor, p.c, p.alpha, p.direction, cfg_.horizon);
    case PathKind::Fbm: break;
  }
  const double dt = cfg_.horizon / static_cast<double>(p.grid_len);
  const auto raw = generate_fbm_path(*sampler_, cfg_.seed, cfg_.dim, dt, replica);
  std::vector<double> values(raw.values().begin(), raw.values().end());
  const auto d = static_cast<std::size_t>(cfg_.dim);
  for (std::size_t k = 0; k < values.size(); ++k) values[k] += p.anchor[k % d];
  return SingularTrajectory::sampled(SamplePath(cfg_.dim, dt, std::move(values), raw.hurst()));
}

std::vector<std::uint64_t> PathSource::component_seeds(std::size_t replica) const {
  std::vector<std::uint64_t> out;
  if (!stochastic()) return out;
  for (int j = 0; j < cfg_.dim; ++j)
    out.push_back(fbm_component_seed(cfg_.seed, replica, static_cast<std::uint64_t>(j)));
  return out;
}

RunOutcome run_experiment(const ExperimentConfig& cfg, const RunOptions& opts) {
  const auto started = std::chrono::steady_clock::now();
  const std::string started_utc = utc_now();
  RunOutcome outcome;
  Output out(opts.out_dir);
  const PathSource paths(cfg);
  Context ctx{cfg, opts, paths, out, outcome};

  switch (cfg.experiment) {
    case Experiment::MassCurve: run_mass_curve(ctx); break;
    case Experiment::Fit: run_fit(ctx); break;
    case Experiment::VerifyBounds: run_verify_bounds(ctx); break;
    case Experiment::Moments: run_moments(ctx); break;
    case Experiment::FbmCheck: run_fbm_check(ctx); break;
  }

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  Json manifest;
  manifest["experiment"] = std::string(to_string(cfg.experiment));
  manifest["pass"] = outcome.pass;
  manifest["config"] = opts.config_echo;
  manifest["base_seed"] = cfg.seed;
  manifest["derived_seeds"] = ctx.seeds;
  manifest["versions"] = {{"heatsing", std::string(version())},
                          {"fftw", std::string(fft_backend_version())},
                          {"compiler", __VERSION__}};
  manifest["threads"] = opts.threads;
  manifest["started_utc"] = started_utc;
  manifest["wall_clock_seconds"] = wall;
  ctx.errors["quad_rel_tol"] = cfg.quad.rel_tol;
  manifest["error_estimates"] = ctx.errors;
  manifest["problems"] = outcome.problems;
  outcome.outputs = out.written();
  manifest["outputs"] = outcome.outputs;
  out.json("manifest.json", manifest);
  outcome.outputs.push_back("manifest.json");
  return outcome;
}

}  // namespace heatsing::cli
