#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stew/organizations.hpp"
#include "stew/stewarding.hpp"

namespace stew {

/// The two recommender arms kept per user.
enum class Arm { participatory = 0, ideological = 1 };

const char* to_string(Arm arm);

/// Ideological organization whose target extreme matches the user's side.
OrgType aligned_org(double opinion);
OrgType org_of(Arm arm, double opinion);

struct ArmStats {
  int pulls = 0;
  int reward = 0;  ///< rewards are 0/1, so reward <= pulls

  double mean() const { return pulls == 0 ? 0.0 : static_cast<double>(reward) / pulls; }
};

using ArmPair = std::array<ArmStats, 2>;

/// UCB1 index mean + sqrt(2 ln t / n).
double ucb_index(const ArmStats& arm, int t);
/// Unpulled arms first (participatory before ideological), then argmax of the index with
/// ties toward participatory. `t` is the user's total pull count.
Arm ucb_select(const ArmPair& arms);

struct RecommenderState {
  std::vector<ArmPair> users;

  explicit RecommenderState(int n_users = 0) : users(static_cast<std::size_t>(n_users)) {}
  int total_pulls(int user) const;
  Arm select(int user) const { return ucb_select(users.at(static_cast<std::size_t>(user))); }
  void credit(int user, Arm arm, bool expressed);
};

/// P(approval-side info) given the two maxima, after shifting rewards by +1.
double approval_side_probability(double max_reward_approval, double max_reward_disapproval);
/// Samples the side an organization's signal describes, proportional to shifted max rewards
/// at the user's believed state for each side.
Side choose_signal_side(const PolicyPair& policies, const Agent& user, Rng& rng);

/// Users who have expressed in an organization's digital space.
struct Community {
  OrgType org = OrgType::participatory;
  std::vector<char> member;
  /// Expressed opinions per step: (user index, opinion).
  std::vector<std::vector<std::pair<int, double>>> record;

  int size() const;
};

/// What happened to one user at one step.
struct UserStep {
  Arm arm = Arm::participatory;
  OrgType org = OrgType::participatory;
  Side side = Side::approval;
  double signal = 0.0;
  bool rejected = false;
  double gamma = 0.0;
  bool expressed = false;
};

struct PlatformConfig {
  int n_users = 100;
  int timesteps = 100;
  OpinionDistribution opinions = OpinionDistribution::bimodal();
  GameParams game;
  ConstraintWindow window;
  BeliefInit belief_init{5.0, 3.0, 3.0, 5.0, 2.0};
  std::uint64_t seed = 0;
  int n_samples = kPosteriorSamples;
  int posterior_bins = kPosteriorBins;
  PlanningSettings planning;
  double planning_concentration = 8.0;
  int threads = 1;

  void validate() const;
};

PlanningContext planning_context(const PlatformConfig& cfg);

struct PlatformState {
  std::uint64_t seed = 0;
  std::vector<Agent> users;
  std::vector<double> initial_opinions;
  RecommenderState recommender;
  std::array<Community, 3> communities;  ///< indexed by OrgType
  std::vector<std::vector<UserStep>> history;  ///< [t][user]

  Community& community(OrgType org) { return communities[static_cast<std::size_t>(org)]; }
  const Community& community(OrgType org) const {
    return communities[static_cast<std::size_t>(org)];
  }
};

PlatformState init_platform(const PlatformConfig& cfg);

/// One platform step: per-user recommend/signal/update/express against a frozen snapshot,
/// then a serial commit of community membership, community updates and arm credit.
void platform_step(PlatformState& state, const PolicyBook& book, const PlatformConfig& cfg);

enum class CommunityClass { participatory = 0, ideological = 1, silent = 2 };

const char* to_string(CommunityClass c);

/// Class of a user over history steps [from, end): majority community of their expressions,
/// silent if they never expressed. Exact ties are settled by a coin flip from the user's
/// "class ties" substream (UCB alternates arms for users who always express, so any
/// order-based rule would classify them by step parity).
CommunityClass classify_user(const PlatformState& state, int user, int from);

struct SampleStats {
  int n = 0;
  double mean = 0.0;
  double sd = 0.0;  ///< sample sd (n - 1); 0 when n < 2
};

SampleStats sample_stats(const std::vector<double>& values);

/// Cohen's d; unweighted pooled sd sqrt((sa^2 + sb^2) / 2) unless `weighted`, which uses
/// the (n - 1)-weighted pooled variance. Throws DomainError when the pooled sd is 0.
double cohens_d(const SampleStats& a, const SampleStats& b, bool weighted = false);

enum class Measure { opinion = 0, belief_out = 1, belief_in = 2 };

const char* to_string(Measure m);

struct ClassSummary {
  CommunityClass cls = CommunityClass::silent;
  Side group = Side::approval;
  bool empty = true;
  std::array<SampleStats, 3> measures;  ///< indexed by Measure

  const SampleStats& at(Measure m) const { return measures[static_cast<std::size_t>(m)]; }
};

struct EffectSize {
  Side group = Side::approval;
  CommunityClass a = CommunityClass::ideological;
  CommunityClass b = CommunityClass::participatory;
  Measure measure = Measure::opinion;
  std::optional<double> d;  ///< empty when a class is empty or the pooled sd is 0
};

struct CommunityStats {
  int window_start = 0;
  std::vector<CommunityClass> classes;       ///< per user
  std::vector<ClassSummary> summaries;       ///< 3 classes x 2 groups
  std::vector<EffectSize> effects;

  const ClassSummary& summary(CommunityClass c, Side group) const;
  std::optional<double> effect(CommunityClass a, CommunityClass b, Measure m, Side group) const;
};

/// Statistics over the second half of the run, using final opinions and beliefs.
CommunityStats community_stats(const PlatformState& state, bool weighted_d = false);

/// Qualitative checks for one opinion group; extremity is distance from 0.5.
struct Battery {
  Side group = Side::approval;
  bool opinion_order = false;     ///< ideological opinion more extreme than participatory
  bool belief_out_order = false;  ///< ideological belief_out more extreme than participatory
  bool silent_moderate = false;   ///< silent opinion within 0.05 of 0.5
  bool silent_belief_in = false;  ///< silent belief_in more extreme than both communities'

  bool pass() const { return opinion_order && belief_out_order && silent_moderate && silent_belief_in; }
};

Battery evaluate_battery(const CommunityStats& stats, Side group = Side::approval);

struct PlatformRun {
  PlatformState state;
  CommunityStats stats;
  Battery approval_battery;
  Battery disapproval_battery;
};

/// Runs the full loop. The policy book must hold all three organizations.
PlatformRun run_platform(const PlatformConfig& cfg, const PolicyBook& book);
PlatformRun run_platform(const PlatformConfig& cfg);

/// Solves the three organizations' policies for a platform config.
PolicyBook solve_platform_policies(const PlatformConfig& cfg);

}  // namespace stew
