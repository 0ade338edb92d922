#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "stew/platform.hpp"
#include "stew/stewarding.hpp"

namespace stew {

struct EquilibriumSweep {
  double v_min = 0.5;
  double v_max = 1.0;
  int v_steps = 51;
  int gamma_steps = 21;
  int check_trials = 1000;
};

struct StewardPlan {
  int agents = 100;
  int timesteps = 100;
  int batches = 10;
  double spread = 0.0;
  std::vector<StewardingMode> modes{StewardingMode::participatory,
                                    StewardingMode::ideological_approval, StewardingMode::none};
  std::vector<double> alphas{0.5, 0.6};
};

struct PlatformPlan {
  int users = 100;
  int timesteps = 100;
  int seeds = 10;
  double spread = 2.0;
  bool weighted_d = false;
};

/// Everything one CLI invocation can be configured with. Blocks that several experiments
/// share (game, opinions, beliefs, planning) live once at the top level.
struct ExperimentConfig {
  std::uint64_t seed = 0;
  int threads = 1;
  GameParams game;
  double mu1 = 0.4;
  double mu2 = 0.6;
  double sigma = 0.2;
  double mix = 0.5;
  ConstraintWindow window;
  int n_samples = kPosteriorSamples;
  int posterior_bins = kPosteriorBins;
  BeliefInit belief_init;  ///< spread is taken from the steward/platform blocks
  PlanningSettings planning;
  double planning_concentration = 8.0;
  EquilibriumSweep equilibrium;
  StewardPlan steward;
  PlatformPlan platform;

  OpinionDistribution opinions() const { return OpinionDistribution::bimodal(mu1, mu2, sigma, mix); }
};

/// Parses INI text. Unknown sections or keys, malformed numbers and out-of-range values
/// raise ConfigError naming "section.key".
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);

/// Every key with its resolved value, in the same INI format parse_config reads.
std::string render_config(const ExperimentConfig& cfg);

SimConfig sim_config(const ExperimentConfig& cfg, StewardingMode mode, double alpha);
PlatformConfig platform_config(const ExperimentConfig& cfg, std::uint64_t seed);
PlanningContext planning_context(const ExperimentConfig& cfg);

StewardingMode parse_mode(const std::string& text);

}  // namespace stew
