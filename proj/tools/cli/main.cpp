#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <string>

#include "heatsing/config.hpp"
#include "heatsing/experiment.hpp"

namespace hc = heatsing::cli;

namespace {

// Exit codes: 0 all pass flags true, 1 a check failed, 2 configuration error,
// 3 I/O error, 4 any other library error.
int exit_code(const heatsing::Error& e) {
  switch (e.kind()) {
    case heatsing::ErrorKind::ConfigError: return 2;
    case heatsing::ErrorKind::IoError: return 3;
    default: return 4;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heat-equation ball-mass experiments for moving point singularities"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(heatsing::version()));

  std::string config_file;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  unsigned threads = 1;
  app.add_option("--config", config_file, "flat key = value configuration file");
  app.add_option("--seed", seed, "base seed (overrides the seed key)");
  app.add_option("--out", out_dir, "output directory (overrides output.dir)");
  app.add_option("--threads", threads, "worker threads")->check(CLI::Range(1u, 1024u));

  const char* names[] = {"mass-curve", "fit", "verify-bounds", "moments", "fbm-check"};
  const char* help[] = {"singular and background ball mass over the radius grid",
                        "fit the ball-mass exponent (median over an fBm ensemble)",
                        "check the exit-time lower and tail-integral upper envelopes",
                        "normalized occupation-time moments over an fBm ensemble",
                        "empirical fGn autocovariance against the exact model"};
  for (std::size_t i = 0; i < 5; ++i) app.add_subcommand(names[i], help[i])->fallthrough();

  CLI11_PARSE(app, argc, argv);
  const std::string experiment = app.get_subcommands().front()->get_name();

  try {
    auto settings = config_file.empty() ? hc::Settings{} : hc::Settings::load(config_file);
    settings.override_value("experiment", experiment);
    if (seed) settings.override_value("seed", std::to_string(*seed));
    if (!out_dir.empty()) settings.override_value("output.dir", out_dir);
    const auto cfg = hc::ExperimentConfig::from_settings(settings);
    if (const auto unused = settings.unused_keys(); !unused.empty()) {
      std::string list;
      for (const auto& k : unused) list += (list.empty() ? "" : ", ") + k;
      heatsing::fail(heatsing::ErrorKind::ConfigError, "unknown or unused config keys: " + list);
    }

    hc::RunOptions opts;
    opts.out_dir = cfg.out_dir;
    opts.threads = threads;
    opts.config_echo = settings.resolved();
    const auto outcome = hc::run_experiment(cfg, opts);
    for (const auto& p : outcome.problems) std::cerr << "problem: " << p << '\n';
    std::cout << experiment << ": " << (outcome.pass ? "pass" : "FAIL") << " (" << cfg.out_dir.string()
              << ")\n";
    return outcome.pass ? 0 : 1;
  } catch (const heatsing::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e);
  }
}
