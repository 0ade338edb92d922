#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stew/beliefs.hpp"
#include "stew/expression.hpp"
#include "stew/game.hpp"
#include "stew/opinion_distribution.hpp"
#include "stew/organizations.hpp"
#include "stew/rng.hpp"

namespace stew {

enum class StewardingMode { participatory, ideological_approval, ideological_disapproval, none };

const char* to_string(StewardingMode mode);
std::optional<OrgType> org_for(StewardingMode mode);

/// A population member. The opinion never changes; beliefs are kept per described group.
struct Agent {
  double opinion = 0.5;
  BetaBelief approval_belief{5.0, 3.0, Side::approval};
  BetaBelief disapproval_belief{3.0, 5.0, Side::disapproval};
  double last_gamma = 0.0;
  bool expressed = false;

  Side side() const { return side_of(opinion); }
  BetaBelief& belief_about(Side group) {
    return group == Side::approval ? approval_belief : disapproval_belief;
  }
  const BetaBelief& belief_about(Side group) const {
    return group == Side::approval ? approval_belief : disapproval_belief;
  }
  const BetaBelief& belief_in() const { return belief_about(side()); }
  const BetaBelief& belief_out() const { return belief_about(other(side())); }
};

/// Initial Beta beliefs. spread == 0 gives every agent exactly the mean parameters;
/// otherwise each parameter is drawn uniformly within +-spread and floored at 0.5.
struct BeliefInit {
  double approval_a = 5.0;
  double approval_b = 3.0;
  double disapproval_a = 3.0;
  double disapproval_b = 5.0;
  double spread = 0.0;
};

struct SimConfig {
  int n_agents = 100;
  int timesteps = 100;
  int batches = 10;
  OpinionDistribution opinions = OpinionDistribution::bimodal();
  GameParams game;
  ConstraintWindow window;
  StewardingMode mode = StewardingMode::participatory;
  BeliefInit belief_init;
  std::uint64_t seed = 0;
  int n_samples = kPosteriorSamples;
  int posterior_bins = kPosteriorBins;
  PlanningSettings planning;
  double planning_concentration = 8.0;
  int threads = 1;
  bool keep_agents = false;  ///< store per-agent gammas and flags in the trace

  void validate() const;
};

/// Planning context matching a simulation config.
PlanningContext planning_context(const SimConfig& cfg);

std::vector<Agent> sample_population(const OpinionDistribution& dist, int n,
                                     const BeliefInit& init, Rng& opinion_rng, Rng& belief_rng);

/// One timestep's summary.
struct StepRecord {
  int t = 0;
  std::optional<Side> signal_side;
  double signal = 0.0;
  bool signal_rejected = false;
  double participation = 0.0;
  double mean_expressed_approval = 0.0;   ///< NaN when nobody on the side expressed
  double mean_expressed_disapproval = 0.0;
  double belief_out_approval_side = 0.0;  ///< mean belief_out of approval-opinion agents
  double belief_out_disapproval_side = 0.0;
  double belief_in_approval_side = 0.0;
  double belief_in_disapproval_side = 0.0;
  std::vector<double> gammas;  ///< filled when keep_agents is set
  std::vector<char> expressed;
};

/// Per-batch random substreams.
struct StepStreams {
  Rng signals;
  Rng posterior;
};

/// One stewarding cycle: signal, window update, expression, community update.
/// `policies` may be null only in mode none.
StepRecord stewarding_step(std::vector<Agent>& pop, const PolicyPair* policies, int t,
                           const SimConfig& cfg, StepStreams& streams);

double participation_rate(const std::vector<Agent>& pop);
/// Mean over agents holding `side` opinions of their belief_out / belief_in means (NaN if none).
double mean_outgroup_belief(const std::vector<Agent>& pop, Side side);
double mean_ingroup_belief(const std::vector<Agent>& pop, Side side);

struct Aggregate {
  double mean = 0.0;
  double sd = 0.0;
};

/// Across-batch statistics at one timestep (population sd).
struct AggregateRow {
  int t = 0;
  Aggregate participation;
  Aggregate belief_out_approval_side;
  Aggregate belief_out_disapproval_side;
  Aggregate belief_in_approval_side;
  Aggregate belief_in_disapproval_side;
  Aggregate mean_expressed_approval;
  Aggregate mean_expressed_disapproval;
};

struct SimTrace {
  StewardingMode mode = StewardingMode::none;
  double alpha = 0.0;
  std::vector<std::vector<StepRecord>> batches;
  std::vector<AggregateRow> aggregate;
  std::vector<double> initial_opinions;  ///< batch 0
  std::vector<double> final_opinions;    ///< batch 0
};

/// Mean and population sd of the finite entries; NaN mean when none are finite.
Aggregate aggregate_of(const std::vector<double>& values);

/// Runs all batches with seeds seed + batch index. Policies are solved when needed.
SimTrace run_simulation(const SimConfig& cfg);
SimTrace run_simulation(const SimConfig& cfg, const PolicyPair* policies);

}  // namespace stew
