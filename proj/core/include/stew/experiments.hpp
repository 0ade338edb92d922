#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "stew/config.hpp"
#include "stew/table.hpp"

namespace stew {

/// One randomized instance of the silence-iff check.
struct TheoremTrial {
  GameParams params;
  double v_bar = 0.0;
  double threshold = 0.0;
  double gamma_star = 0.0;
  bool predicted_silent = false;  ///< v_bar < threshold
  bool observed_silent = false;   ///< gamma_star == 0 exactly

  bool pass() const { return predicted_silent == observed_silent; }
};

/// alpha ~ U[0,2], n_hat in {0.3,0.5,0.7}, lambda_in ~ U(1,3], lambda_out ~ U(0,1),
/// v_bar ~ U[0.5,1] redrawn while within 1e-4 of the threshold.
std::vector<TheoremTrial> theorem_battery(int trials, std::uint64_t seed);

struct EquilibriumReport {
  Table best_response{{"v_bar", "gamma_other", "best_response"}};
  Table equilibria{{"v_bar", "gamma_star", "silence_threshold", "silent"}};
  std::optional<Table> theorem;
  int theorem_failures = 0;
};

EquilibriumReport run_equilibrium(const ExperimentConfig& cfg, bool check_theorem);

struct PolicyEntry {
  OrgType org;
  Side side;
  SignalingPolicy policy;
};

struct PolicyReport {
  std::vector<PolicyEntry> policies;  ///< all three organizations x both sides
  Table summary{{"org", "side", "iterations", "bellman_residual", "max_reward", "direction_check",
                 "violations"}};
};

/// Tables for one solved policy.
Table policy_table(const SignalingPolicy& policy);
Table heatmap_table(const SignalingPolicy& policy);

PolicyReport run_policy(const ExperimentConfig& cfg);

struct StewardRun {
  StewardingMode mode;
  double alpha;
  double terminal_participation;
  double terminal_distortion;  ///< |belief_out - true out-group mean|, approval holders
};

struct StewardReport {
  std::vector<StewardRun> runs;
  Table trace{{"batch", "t", "mode", "alpha", "participation", "mean_belief_out_approval_side",
               "mean_belief_out_disapproval_side", "mean_belief_in_approval_side",
               "mean_belief_in_disapproval_side", "mean_expressed_approval",
               "mean_expressed_disapproval", "signal_side", "signal", "signal_rejected"}};
  Table aggregate{{"t", "mode", "alpha", "participation_mean", "participation_sd",
                   "belief_out_approval_side_mean", "belief_out_approval_side_sd",
                   "belief_out_disapproval_side_mean", "belief_out_disapproval_side_sd",
                   "belief_in_approval_side_mean", "belief_in_approval_side_sd",
                   "belief_in_disapproval_side_mean", "belief_in_disapproval_side_sd"}};
  Table orderings{{"check", "scope", "lhs", "rhs", "holds"}};
};

StewardReport run_steward(const ExperimentConfig& cfg);

struct PlatformReport {
  Table stats{{"seed", "class", "opinion_group", "n", "opinion_mean", "opinion_sd",
               "belief_out_mean", "belief_out_sd", "belief_in_mean", "belief_in_sd", "empty"}};
  Table effects{{"seed", "opinion_group", "pair", "measure", "cohens_d"}};
  Table battery{{"seed", "opinion_group", "opinion_order", "belief_out_order", "silent_moderate",
                 "silent_belief_in", "pass"}};
  Table summary{{"metric", "value"}};
  int seeds = 0;
  int approval_passes = 0;
  std::vector<double> opinion_d;  ///< ideological vs participatory, approval group, per seed
  double mean_opinion_d = 0.0;    ///< NaN when no seed defines it
};

/// Seeds run as cfg.seed + k for k in [0, platform.seeds).
PlatformReport run_platform_experiment(const ExperimentConfig& cfg);

/// Writers: every output directory also receives resolved_config.ini.
void write_equilibrium(const EquilibriumReport& r, const ExperimentConfig& cfg,
                       const std::filesystem::path& dir);
void write_policy(const PolicyReport& r, const ExperimentConfig& cfg,
                  const std::filesystem::path& dir);
void write_steward(const StewardReport& r, const ExperimentConfig& cfg,
                   const std::filesystem::path& dir);
void write_platform(const PlatformReport& r, const ExperimentConfig& cfg,
                    const std::filesystem::path& dir);

}  // namespace stew
