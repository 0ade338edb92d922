#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "stew/beliefs.hpp"
#include "stew/game.hpp"
#include "stew/opinion_distribution.hpp"
#include "stew/rng.hpp"

namespace stew {

enum class OrgType { participatory, ideological_approval, ideological_disapproval };

const char* to_string(OrgType org);

/// R_pa: 2 * (fraction - 0.5).
double reward_participatory(double expressed_fraction);
/// R_id: 4 * mean - 3 on the approval scale; callers reflect disapproval means first.
double reward_ideological(double mean_expressed_approval);

/// Uniform cells over one side's support, shared by states and actions.
struct BeliefGrid {
  Side side = Side::approval;
  int bins = 50;

  double width() const { return support_of(side).width() / bins; }
  double left(int k) const { return support_of(side).lo + k * width(); }
  double center(int k) const { return left(k) + 0.5 * width(); }
  /// Cell containing x; values outside the support map to the edge cells.
  int index_of(double x) const;
};

/// Everything the planning transition needs to replay one stewarding cycle.
struct PlanningContext {
  GameParams game;
  OpinionDistribution opinions = OpinionDistribution::bimodal();
  ConstraintWindow window;
  int population = 100;                 ///< size of the deterministic quantile population
  int n_samples = kPosteriorSamples;    ///< Monte Carlo draws per state
  int posterior_bins = kPosteriorBins;
  double concentration = 8.0;           ///< pseudo-count total of the state's Beta belief
  BetaBelief approval_prior{5.0, 3.0, Side::approval};
  BetaBelief disapproval_prior{3.0, 5.0, Side::disapproval};
  std::uint64_t seed = 0;
};

/// Result of replaying one cycle from (state, action).
struct CycleOutcome {
  int next_state = 0;
  double next_mean = 0.0;
  bool rejected = false;
  double participation = 0.0;
  int expressed_approval = 0;
  int expressed_disapproval = 0;
  double mean_expressed_approval = 0.0;
  double mean_expressed_disapproval = 0.0;
};

/// Immediate reward an organization of type `org` collects from a cycle.
double cycle_reward(OrgType org, const CycleOutcome& outcome);

/// Deterministic transition model for signals about one group: every
/// (state, action) cell of the grid replayed once against the quantile population.
class SignalTransitions {
 public:
  SignalTransitions(Side side, int bins, const PlanningContext& ctx);

  const BeliefGrid& grid() const noexcept { return grid_; }
  const CycleOutcome& outcome(int state, int action) const {
    return outcomes_[static_cast<std::size_t>(state) * grid_.bins + action];
  }

 private:
  BeliefGrid grid_;
  std::vector<CycleOutcome> outcomes_;
};

/// Replays a single cycle: window update from `signal`, equilibrium expression of the
/// quantile population, community update. `draws` are prior samples of the state belief.
CycleOutcome transition(const BeliefGrid& grid, int state, double signal,
                        const PlanningContext& ctx, std::span<const double> opinions,
                        std::span<const double> draws);

/// Finite deterministic MDP: next[s * A + a], reward[s * A + a].
struct TabularMdp {
  int n_states = 0;
  int n_actions = 0;
  double discount = 0.9;
  std::vector<int> next;
  std::vector<double> reward;
  /// Optional per-state action preferred on ties (closest index wins).
  std::vector<int> tie_anchor;

  std::size_t at(int s, int a) const { return static_cast<std::size_t>(s) * n_actions + a; }
  void validate() const;
};

struct ValueTable {
  std::vector<double> values;
  std::vector<int> policy;
  int iterations = 0;
  double residual = 0.0;
};

inline constexpr int kMaxValueSweeps = 10000;

/// Value iteration to sup-norm Bellman residual <= tol, then greedy policy extraction.
ValueTable value_iteration(const TabularMdp& mdp, double tol, int max_sweeps = kMaxValueSweeps);

/// max_a |R(s,a) + discount * V(next(s,a))| - V(s)| over states.
double bellman_residual(const TabularMdp& mdp, const std::vector<double>& values);

/// Reward/transition tables of one organization's MDP over a side's signals.
TabularMdp build_mdp(const SignalTransitions& transitions, OrgType org, double discount);

/// Solved signaling policy for one (organization, side).
struct SignalingPolicy {
  OrgType org = OrgType::participatory;
  BeliefGrid grid;
  ValueTable table;
  TabularMdp mdp;

  int action(int state) const { return table.policy.at(static_cast<std::size_t>(state)); }
  /// Largest immediate reward reachable from `state` over all signals.
  double max_reward(int state) const;
  double max_reward() const;
};

SignalingPolicy solve_policy(const SignalTransitions& transitions, OrgType org, double discount,
                             double tol);

/// Policy action cell centre plus uniform jitter inside the cell.
double sample_signal(const SignalingPolicy& policy, int state, Rng& rng);

/// Grid size and solver settings for the signaling MDPs.
struct PlanningSettings {
  int bins = 50;
  double discount = 0.9;
  double tol = 1e-6;
};

/// An organization's two independently solved policies, one per signal side.
struct PolicyPair {
  SignalingPolicy approval;
  SignalingPolicy disapproval;

  const SignalingPolicy& for_side(Side side) const {
    return side == Side::approval ? approval : disapproval;
  }
};

using PolicyBook = std::map<OrgType, PolicyPair>;

/// Solves both side MDPs for every organization in `orgs`; transitions are built once per side.
PolicyBook solve_policy_book(const PlanningContext& ctx, const PlanningSettings& settings,
                             std::span<const OrgType> orgs);

/// Interior states: cell centres at least tau from both ends of the side's support.
std::vector<int> interior_states(const BeliefGrid& grid, const ConstraintWindow& window);
/// Interior states whose greedy action breaks |action - 0.5| <= |state - 0.5| + bin width.
std::vector<int> moderation_violations(const SignalingPolicy& policy,
                                       const ConstraintWindow& window);
/// Interior states whose greedy action is more than one bin less extreme than the state
/// (toward 0.5), with extremity measured away from 0.5 on the policy's side.
std::vector<int> extremization_violations(const SignalingPolicy& policy,
                                          const ConstraintWindow& window);

/// Dense R(s,a) with rows indexed by state and columns by action.
std::vector<std::vector<double>> reward_heatmap(const TabularMdp& mdp);

}  // namespace stew
