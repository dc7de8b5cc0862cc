#include "heatsing/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace heatsing::cli {

namespace {

[[noreturn]] void config_error(const std::string& what) { fail(ErrorKind::ConfigError, what); }

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <class T>
T parse_number(const std::string& key, const std::string& v) {
  T out{};
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) config_error(key + ": cannot parse '" + v + "' as a number");
  return out;
}

std::string format(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format(v[i]);
  return out;
}

}  // namespace

std::string environment_name(std::string_view key) {
  std::string out = "HEATSING_";
  for (char c : key) {
    out += (c == '.' || c == '-') ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  return out;
}

Settings Settings::parse(std::string_view text, std::string_view origin) {
  Settings s;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    const std::string where = std::string(origin) + ":" + std::to_string(lineno);
    if (eq == std::string::npos) config_error(where + ": expected 'key = value'");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) config_error(where + ": empty key");
    if (!s.file_.emplace(key, value).second) config_error(where + ": duplicate key '" + key + "'");
  }
  return s;
}

Settings Settings::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) fail(ErrorKind::IoError, "cannot read config file " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), file.string());
}

void Settings::override_value(const std::string& key, std::string value) {
  overrides_[key] = std::move(value);
}

std::optional<std::string> Settings::lookup(const std::string& key) const {
  if (auto it = overrides_.find(key); it != overrides_.end()) return it->second;
  if (const char* env = std::getenv(environment_name(key).c_str())) return trim(env);
  if (auto it = file_.find(key); it != file_.end()) return it->second;
  return std::nullopt;
}

void Settings::remember(const std::string& key, const std::string& value) const {
  resolved_[key] = value;
}

bool Settings::has(const std::string& key) const { return lookup(key).has_value(); }

std::string Settings::text(const std::string& key, const std::string& fallback) const {
  const std::string v = lookup(key).value_or(fallback);
  remember(key, v);
  return v;
}

double Settings::real(const std::string& key, double fallback) const {
  const auto v = lookup(key);
  const double out = v ? parse_number<double>(key, *v) : fallback;
  if (!std::isfinite(out)) config_error(key + ": value must be finite");
  remember(key, format(out));
  return out;
}

long long Settings::integer(const std::string& key, long long fallback) const {
  const auto v = lookup(key);
  const long long out = v ? parse_number<long long>(key, *v) : fallback;
  remember(key, std::to_string(out));
  return out;
}

std::uint64_t Settings::u64(const std::string& key, std::uint64_t fallback) const {
  const auto v = lookup(key);
  const std::uint64_t out = v ? parse_number<std::uint64_t>(key, *v) : fallback;
  remember(key, std::to_string(out));
  return out;
}

bool Settings::flag(const std::string& key, bool fallback) const {
  const auto v = lookup(key);
  bool out = fallback;
  if (v) {
    if (*v == "true" || *v == "1" || *v == "yes") {
      out = true;
    } else if (*v == "false" || *v == "0" || *v == "no") {
      out = false;
    } else {
      config_error(key + ": expected true/false, got '" + *v + "'");
    }
  }
  remember(key, out ? "true" : "false");
  return out;
}

std::vector<double> Settings::reals(const std::string& key, const std::vector<double>& fallback) const {
  const auto v = lookup(key);
  std::vector<double> out;
  if (!v) {
    out = fallback;
  } else {
    std::stringstream ss(*v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_number<double>(key, trim(item)));
  }
  remember(key, join(out));
  return out;
}

std::vector<std::string> Settings::unused_keys() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : file_)
    if (!resolved_.count(k)) out.push_back(k);
  return out;
}

std::string_view to_string(Experiment e) {
  switch (e) {
    case Experiment::MassCurve: return "mass-curve";
    case Experiment::Fit: return "fit";
    case Experiment::VerifyBounds: return "verify-bounds";
    case Experiment::Moments: return "moments";
    case Experiment::FbmCheck: return "fbm-check";
  }
  return "?";
}

Experiment parse_experiment(std::string_view text) {
  for (auto e : {Experiment::MassCurve, Experiment::Fit, Experiment::VerifyBounds,
                 Experiment::Moments, Experiment::FbmCheck}) {
    if (to_string(e) == text) return e;
  }
  config_error("unknown experiment '" + std::string(text) + "'");
}

std::vector<double> ExperimentConfig::radii() const {
  std::vector<double> out(count);
  for (std::size_t k = 0; k < count; ++k) out[k] = r_max * std::pow(ratio, static_cast<double>(k));
  return out;
}

double ExperimentConfig::window_min() const {
  return fit_r_min > 0.0 ? fit_r_min : r_max * std::pow(ratio, static_cast<double>(count - 1));
}

double ExperimentConfig::window_max() const { return fit_r_max > 0.0 ? fit_r_max : r_max; }

double ExperimentConfig::moment_power() const {
  if (moment_exponent) return *moment_exponent;
  if (path.kind == PathKind::Fbm && path.hurst > 1.0 / dim) return 1.0 / path.hurst;
  return static_cast<double>(dim);
}

std::string ExperimentConfig::path_label() const {
  std::ostringstream os;
  os.precision(17);
  switch (path.kind) {
    case PathKind::Constant: os << "constant"; break;
    case PathKind::Holder: os << "holder(c=" << path.c << ",alpha=" << path.alpha << ")"; break;
    case PathKind::Fbm: os << "fbm(H=" << path.hurst << ",n=" << path.grid_len << ")"; break;
  }
  return os.str();
}

ExperimentConfig ExperimentConfig::from_settings(const Settings& s) {
  ExperimentConfig c;
  c.experiment = parse_experiment(s.text("experiment", "mass-curve"));
  c.dim = static_cast<int>(s.integer("dim", 3));
  if (c.dim < 1 || c.dim > 16) config_error("dim must lie in [1, 16]");
  c.horizon = s.real("horizon", 1.0);
  if (!(c.horizon > 0.0)) config_error("horizon must be positive");
  c.seed = s.u64("seed", 0);
  c.out_dir = s.text("output.dir", "out");

  const Point origin(static_cast<std::size_t>(c.dim), 0.0);
  Point e1 = origin;
  e1[0] = 1.0;
  auto point = [&](const std::string& key, const Point& fallback) {
    const auto p = s.reals(key, fallback);
    if (p.size() != static_cast<std::size_t>(c.dim))
      config_error(key + " needs " + std::to_string(c.dim) + " coordinates");
    return p;
  };

  const std::string variant = s.text("path.variant", "holder");
  if (variant == "constant") {
    c.path.kind = PathKind::Constant;
  } else if (variant == "holder") {
    c.path.kind = PathKind::Holder;
  } else if (variant == "fbm") {
    c.path.kind = PathKind::Fbm;
  } else {
    config_error("path.variant must be constant, holder or fbm");
  }
  c.path.anchor = point("path.anchor", origin);
  if (c.path.kind == PathKind::Holder) {
    c.path.c = s.real("path.c", 1.0);
    c.path.alpha = s.real("path.alpha", 0.4);
    c.path.direction = point("path.direction", e1);
    if (!(c.path.c > 0.0)) config_error("path.c must be positive");
    if (!(c.path.alpha > 0.0 && c.path.alpha <= 1.0)) config_error("path.alpha must lie in (0, 1]");
    if (norm(c.path.direction) == 0.0) config_error("path.direction must be nonzero");
  }
  if (c.path.kind == PathKind::Fbm) {
    c.path.hurst = s.real("path.hurst", 0.45);
    const long long n = s.integer("path.grid_len", 1 << 14);
    if (!(c.path.hurst > 0.0 && c.path.hurst < 1.0)) config_error("path.hurst must lie in (0, 1)");
    if (n < 2 || (n & (n - 1)) != 0) config_error("path.grid_len must be a power of two >= 2");
    c.path.grid_len = static_cast<std::size_t>(n);
    const long long rep = s.integer("path.replica", 0);
    if (rep < 0) config_error("path.replica must be >= 0");
    c.path.replica = static_cast<std::size_t>(rep);
  }

  const std::string u0 = s.text("u0.variant", "none");
  if (u0 == "none") {
    c.u0 = NoData{};
  } else if (u0 == "constant") {
    const double v = s.real("u0.value", 1.0);
    if (!(v > 0.0)) config_error("u0.value must be positive");
    c.u0 = ConstantData{v};
  } else if (u0 == "gaussian") {
    GaussianBump g{s.real("u0.amplitude", 1.0), s.real("u0.width", 0.5), point("u0.center", origin)};
    if (!(g.amplitude > 0.0 && g.width > 0.0)) config_error("u0.amplitude and u0.width must be positive");
    c.u0 = g;
  } else {
    config_error("u0.variant must be none, constant or gaussian");
  }

  const bool moments = c.experiment == Experiment::Moments;
  c.r_max = s.real("grid.r_max", moments ? std::exp(-2.0) : 0.1);
  c.ratio = s.real("grid.ratio", moments ? std::exp(-1.0) : std::pow(2.0, -0.25));
  const long long count = s.integer("grid.count", moments ? 5 : 17);
  if (!(c.r_max > 0.0)) config_error("grid.r_max must be positive");
  if (!(c.ratio > 0.0 && c.ratio < 1.0)) config_error("grid.ratio must lie in (0, 1)");
  const long long min_count = moments ? 2 : static_cast<long long>(RadiusGrid::kMinCount);
  if (count < min_count) config_error("grid.count must be >= " + std::to_string(min_count));
  c.count = static_cast<std::size_t>(count);

  c.quad.s_panels = static_cast<int>(s.integer("quad.s_panels", c.quad.s_panels));
  c.quad.grading = s.real("quad.grading", c.quad.grading);
  c.quad.order = static_cast<int>(s.integer("quad.order", c.quad.order));
  c.quad.rel_tol = s.real("quad.rel_tol", c.quad.rel_tol);
  const long long max_panels = s.integer("quad.max_panels", static_cast<long long>(c.quad.max_panels));
  const long long node_steps = s.integer("quad.path_node_steps", 0);
  if (max_panels < 1 || node_steps < 0) config_error("quad.max_panels and quad.path_node_steps must be >= 0");
  c.quad.max_panels = static_cast<std::size_t>(max_panels);
  c.quad.path_node_steps = static_cast<std::size_t>(node_steps);
  try {
    c.quad.validate();
  } catch (const Error& e) {
    config_error(e.what());
  }

  const long long ensemble = s.integer("ensemble.size", moments ? 500 : 1);
  if (ensemble < 1) config_error("ensemble.size must be >= 1");
  c.ensemble = static_cast<std::size_t>(ensemble);
  if (moments && c.ensemble < kMinEnsemble)
    config_error("moments needs ensemble.size >= " + std::to_string(kMinEnsemble));

  c.theta = s.real("theta", 0.5);
  if (!(c.theta > 0.0 && c.theta < 1.0)) config_error("theta must lie in (0, 1)");
  c.resolution_factor = s.real("resolution.factor", 100.0);
  if (!(c.resolution_factor > 0.0)) config_error("resolution.factor must be positive");

  c.model = [&] {
    try {
      return parse_fit_model(s.text("fit.model", "PurePower"));
    } catch (const Error& e) {
      config_error(e.what());
    }
  }();
  c.fit_r_min = s.real("fit.r_min", 0.0);
  c.fit_r_max = s.real("fit.r_max", 0.0);
  if (c.fit_r_min < 0.0 || c.fit_r_max < 0.0) config_error("fit window bounds must be >= 0");
  if (s.has("fit.expected_kappa")) c.expected_kappa = s.real("fit.expected_kappa", 0.0);
  c.kappa_tolerance = s.real("fit.tolerance", 0.15);
  if (!(c.kappa_tolerance > 0.0)) config_error("fit.tolerance must be positive");

  c.ratio_cap = s.real("bounds.ratio_cap", c.path.kind == PathKind::Fbm ? kStochasticRatioCap
                                                                       : kDeterministicRatioCap);
  c.c0 = s.real("bounds.c0", 0.0);
  if (!(c.ratio_cap > 1.0)) config_error("bounds.ratio_cap must exceed 1");
  if (c.c0 < 0.0) config_error("bounds.c0 must be >= 0");

  c.moment_order = static_cast<int>(s.integer("moments.order", 1));
  if (c.moment_order < 1 || c.moment_order > kMaxMomentOrder) config_error("moments.order must be 1, 2 or 3");
  if (s.has("moments.exponent")) c.moment_exponent = s.real("moments.exponent", 0.0);
  c.spread_cap = s.real("moments.spread_cap", 20.0);
  if (!(c.spread_cap >= 1.0)) config_error("moments.spread_cap must be >= 1");

  c.check_hurst = s.reals("fbm_check.hurst", c.check_hurst);
  const long long cn = s.integer("fbm_check.grid_len", 1024);
  const long long cr = s.integer("fbm_check.replicas", 2000);
  const long long cl = s.integer("fbm_check.max_lag", 10);
  c.check_band = s.real("fbm_check.band", 3.0);
  if (c.check_hurst.empty()) config_error("fbm_check.hurst needs at least one value");
  for (double h : c.check_hurst)
    if (!(h > 0.0 && h < 1.0)) config_error("fbm_check.hurst values must lie in (0, 1)");
  if (cn < 2 || (cn & (cn - 1)) != 0) config_error("fbm_check.grid_len must be a power of two >= 2");
  if (cr < 2) config_error("fbm_check.replicas must be >= 2");
  if (cl < 0 || cl >= cn) config_error("fbm_check.max_lag must lie in [0, grid_len)");
  if (!(c.check_band > 0.0)) config_error("fbm_check.band must be positive");
  c.check_grid_len = static_cast<std::size_t>(cn);
  c.check_replicas = static_cast<std::size_t>(cr);
  c.check_max_lag = static_cast<std::size_t>(cl);

  if (c.experiment != Experiment::FbmCheck) {
    if (!(c.window_min() < c.window_max())) config_error("fit window needs r_min < r_max");
    if (c.path.kind == PathKind::Fbm) {
      // Linear interpolation resolves radius r only when dt <= r^{1/H} / factor.
      double smallest = c.radii().back();
      if (c.experiment == Experiment::VerifyBounds) smallest *= c.theta;
      const double dt = c.horizon / static_cast<double>(c.path.grid_len);
      const double need = std::pow(smallest, 1.0 / c.path.hurst) / c.resolution_factor;
      if (dt > need) {
        config_error("grid too coarse: dt = " + format(dt) + " exceeds r_min^{1/H}/" +
                     format(c.resolution_factor) + " = " + format(need) +
                     " (raise path.grid_len, shrink horizon or raise grid.r_max)");
      }
    }
  }
  return c;
}

}  // namespace heatsing::cli
