#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "heatsing/config.hpp"

namespace heatsing::cli {

struct RunOptions {
  std::filesystem::path out_dir;
  unsigned threads = 1;
  /// Resolved settings echoed into the manifest.
  std::map<std::string, std::string> config_echo;
};

struct RunOutcome {
  bool pass = false;
  std::vector<std::string> problems;  // per-radius or per-replica numerical failures
  std::vector<std::string> outputs;   // file names written into out_dir
};

/// Builds the trajectory of ensemble member `replica`. fBm members draw their
/// coordinates from fbm_component_seed(seed, replica, j) and are shifted to start
/// at path.anchor; deterministic paths ignore the replica index.
class PathSource {
 public:
  explicit PathSource(const ExperimentConfig& cfg);

  SingularTrajectory trajectory(std::size_t replica) const;
  /// Empty for deterministic paths.
  std::vector<std::uint64_t> component_seeds(std::size_t replica) const;
  bool stochastic() const { return sampler_ != nullptr; }

 private:
  const ExperimentConfig& cfg_;
  std::shared_ptr<const FgnSampler> sampler_;
};

/// Runs cfg.experiment and writes its CSV/JSON artifacts plus manifest.json into
/// opts.out_dir. Results do not depend on opts.threads: work units are
/// (replica, radius) pairs whose results land in fixed slots.
RunOutcome run_experiment(const ExperimentConfig& cfg, const RunOptions& opts);

}  // namespace heatsing::cli
