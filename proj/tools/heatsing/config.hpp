#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "heatsing/heatsing.hpp"

namespace heatsing::cli {

/// Flat `key = value` settings with dotted section names (path.alpha, quad.rel_tol).
/// '#' starts a comment. Lookup precedence: explicit override (command-line flag),
/// then the environment (path.alpha -> HEATSING_PATH_ALPHA), then the file, then
/// the caller's default. Every resolved value is remembered for the manifest.
class Settings {
 public:
  static Settings parse(std::string_view text, std::string_view origin = "<string>");
  static Settings load(const std::filesystem::path& file);

  void override_value(const std::string& key, std::string value);

  std::string text(const std::string& key, const std::string& fallback) const;
  double real(const std::string& key, double fallback) const;
  long long integer(const std::string& key, long long fallback) const;
  std::uint64_t u64(const std::string& key, std::uint64_t fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  /// Comma-separated reals.
  std::vector<double> reals(const std::string& key, const std::vector<double>& fallback) const;
  bool has(const std::string& key) const;

  /// File keys that no lookup asked for (usually typos).
  std::vector<std::string> unused_keys() const;
  const std::map<std::string, std::string>& resolved() const { return resolved_; }

 private:
  std::optional<std::string> lookup(const std::string& key) const;
  void remember(const std::string& key, const std::string& value) const;

  std::map<std::string, std::string> file_;
  std::map<std::string, std::string> overrides_;
  mutable std::map<std::string, std::string> resolved_;
};

/// HEATSING_ + key upper-cased with '.' and '-' replaced by '_'.
std::string environment_name(std::string_view key);

enum class Experiment { MassCurve, Fit, VerifyBounds, Moments, FbmCheck };
std::string_view to_string(Experiment e);
Experiment parse_experiment(std::string_view text);

enum class PathKind { Constant, Holder, Fbm };

struct PathConfig {
  PathKind kind = PathKind::Holder;
  Point anchor;
  double c = 1.0;
  double alpha = 0.4;
  Point direction;
  double hurst = 0.45;
  std::size_t grid_len = 1u << 14;
  std::size_t replica = 0;  // single-path experiments on an fBm path use this member
};

struct ExperimentConfig {
  Experiment experiment = Experiment::MassCurve;
  int dim = 3;
  double horizon = 1.0;
  PathConfig path;
  InitialData u0 = NoData{};

  // Radius grid r_max q^k, k < count.
  double r_max = 0.1;
  double ratio = 0.8408964152537145;  // 2^{-1/4}
  std::size_t count = 17;

  QuadratureConfig quad;
  std::size_t ensemble = 1;
  std::uint64_t seed = 0;
  double theta = 0.5;
  double resolution_factor = 100.0;

  FitModel model = FitModel::PurePower;
  double fit_r_min = 0.0;  // 0: smallest grid radius
  double fit_r_max = 0.0;  // 0: largest grid radius
  std::optional<double> expected_kappa;
  double kappa_tolerance = 0.15;

  double ratio_cap = kDeterministicRatioCap;
  double c0 = 0.0;  // 0: smallest radius of the exit grid >= max |eta|

  int moment_order = 1;
  std::optional<double> moment_exponent;  // default from H and N
  double spread_cap = 20.0;

  std::vector<double> check_hurst = {0.2, 0.3, 0.5};
  std::size_t check_grid_len = 1024;
  std::size_t check_replicas = 2000;
  std::size_t check_max_lag = 10;
  double check_band = 3.0;

  std::filesystem::path out_dir = "out";

  std::vector<double> radii() const;
  double window_min() const;
  double window_max() const;
  /// Normalizing exponent p in E[tau^n] r^{-n p}: 1/H above 1/N, N otherwise.
  double moment_power() const;
  std::string path_label() const;

  /// Reads every known key, validates ranges; throws Error{ConfigError}.
  static ExperimentConfig from_settings(const Settings& s);
};

}  // namespace heatsing::cli
