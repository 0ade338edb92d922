#include "stew/organizations.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "stew/errors.hpp"
#include "stew/expression.hpp"

namespace stew {

const char* to_string(OrgType org) {
  switch (org) {
    case OrgType::participatory:
      return "participatory";
    case OrgType::ideological_approval:
      return "ideological_approval";
    case OrgType::ideological_disapproval:
      return "ideological_disapproval";
  }
  return "unknown";
}

double reward_participatory(double expressed_fraction) {
  if (!(expressed_fraction >= 0.0 && expressed_fraction <= 1.0)) {
    throw DomainError("expressed fraction must lie in [0,1]");
  }
  return 2.0 * (expressed_fraction - 0.5);
}

double reward_ideological(double mean_expressed_approval) {
  if (!(mean_expressed_approval >= 0.5 && mean_expressed_approval <= 1.0)) {
    throw DomainError("mean expressed approval must lie in [0.5,1], got " +
                      std::to_string(mean_expressed_approval));
  }
  return 4.0 * mean_expressed_approval - 3.0;
}

int BeliefGrid::index_of(double x) const {
  const Support s = support_of(side);
  const int k = static_cast<int>(std::floor((x - s.lo) / width()));
  return std::clamp(k, 0, bins - 1);
}

double cycle_reward(OrgType org, const CycleOutcome& outcome) {
  switch (org) {
    case OrgType::participatory:
      return reward_participatory(outcome.participation);
    case OrgType::ideological_approval:
      if (outcome.expressed_approval == 0) return -1.0;
      return reward_ideological(outcome.mean_expressed_approval);
    case OrgType::ideological_disapproval:
      if (outcome.expressed_disapproval == 0) return -1.0;
      return reward_ideological(1.0 - outcome.mean_expressed_disapproval);
  }
  return -1.0;
}

CycleOutcome transition(const BeliefGrid& grid, int state, double signal,
                        const PlanningContext& ctx, std::span<const double> opinions,
                        std::span<const double> draws) {
  const Side side = grid.side;
  const double center = grid.center(state);
  BetaBelief belief{center * ctx.concentration, (1.0 - center) * ctx.concentration, side};

  CycleOutcome out;
  const Posterior post = posterior_from_draws(draws, side, signal, ctx.window, ctx.posterior_bins,
                                              GriddedBelief::uniform(side, ctx.posterior_bins));
  out.rejected = post.rejected;
  if (!post.rejected) belief = moment_match(belief, post.belief.mean());

  const BetaBelief& approval = side == Side::approval ? belief : ctx.approval_prior;
  const BetaBelief& disapproval = side == Side::disapproval ? belief : ctx.disapproval_prior;
  const double v_bar = belief_v_bar(approval.mean(), disapproval.mean(), ctx.game);
  const double gamma_ex = symmetric_equilibrium(v_bar, ctx.game);

  std::vector<char> expressed(opinions.size());
  for (std::size_t i = 0; i < opinions.size(); ++i) {
    expressed[i] = interim_response(opinions[i], gamma_ex, ctx.game) >= ctx.game.gamma_silence;
  }
  const ExpressionSummary summary = summarize_expression(opinions, expressed);
  out.participation = summary.participation;
  out.expressed_approval = summary.expressed_approval;
  out.expressed_disapproval = summary.expressed_disapproval;
  out.mean_expressed_approval = summary.has_approval() ? summary.mean_expressed_approval : 0.0;
  out.mean_expressed_disapproval =
      summary.has_disapproval() ? summary.mean_expressed_disapproval : 0.0;

  if (side == Side::approval && summary.has_approval()) {
    belief = beta_update_from_community(belief, summary.mean_expressed_approval);
  } else if (side == Side::disapproval && summary.has_disapproval()) {
    belief = beta_update_from_community(belief, summary.mean_expressed_disapproval);
  }
  out.next_mean = belief.mean();
  out.next_state = out.rejected ? state : grid.index_of(out.next_mean);
  return out;
}

SignalTransitions::SignalTransitions(Side side, int bins, const PlanningContext& ctx)
    : grid_{side, bins} {
  if (bins < 2) throw DomainError("MDP grid needs at least two bins");
  ctx.game.validate();
  ctx.window.validate();
  if (!(ctx.concentration > 0.0)) throw DomainError("planning concentration must be > 0");
  const auto opinions = ctx.opinions.quantile_population(ctx.population);
  outcomes_.resize(static_cast<std::size_t>(bins) * bins);
  const std::uint64_t side_tag = side == Side::approval ? 0 : 1;
  for (int s = 0; s < bins; ++s) {
    const double center = grid_.center(s);
    const BetaBelief belief{center * ctx.concentration, (1.0 - center) * ctx.concentration, side};
    Rng rng = make_stream(ctx.seed, "planning", side_tag * 1000003u + static_cast<unsigned>(s));
    const auto draws = draw_beta(belief, ctx.n_samples, rng);
    for (int a = 0; a < bins; ++a) {
      outcomes_[static_cast<std::size_t>(s) * bins + a] =
          transition(grid_, s, grid_.center(a), ctx, opinions, draws);
    }
  }
}

void TabularMdp::validate() const {
  if (n_states <= 0 || n_actions <= 0) throw DomainError("MDP needs states and actions");
  if (!(discount >= 0.0 && discount < 1.0)) throw DomainError("discount must lie in [0,1)");
  const auto cells = static_cast<std::size_t>(n_states) * n_actions;
  if (next.size() != cells || reward.size() != cells) {
    throw DomainError("MDP tables do not match n_states * n_actions");
  }
  for (int n : next) {
    if (n < 0 || n >= n_states) throw DomainError("MDP transition leaves the state space");
  }
  for (double r : reward) {
    if (!std::isfinite(r)) throw DomainError("MDP reward is not finite");
  }
  if (!tie_anchor.empty() && tie_anchor.size() != static_cast<std::size_t>(n_states)) {
    throw DomainError("tie anchors must cover every state");
  }
}

namespace {

double backup(const TabularMdp& mdp, const std::vector<double>& v, int s, int a) {
  const auto i = mdp.at(s, a);
  return mdp.reward[i] + mdp.discount * v[static_cast<std::size_t>(mdp.next[i])];
}

}  // namespace

double bellman_residual(const TabularMdp& mdp, const std::vector<double>& values) {
  double worst = 0.0;
  for (int s = 0; s < mdp.n_states; ++s) {
    double best = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < mdp.n_actions; ++a) best = std::max(best, backup(mdp, values, s, a));
    worst = std::max(worst, std::fabs(best - values[static_cast<std::size_t>(s)]));
  }
  return worst;
}

ValueTable value_iteration(const TabularMdp& mdp, double tol, int max_sweeps) {
  mdp.validate();
  if (!(tol > 0.0)) throw DomainError("value iteration tolerance must be > 0");

  ValueTable table;
  std::vector<double> v(static_cast<std::size_t>(mdp.n_states), 0.0);
  std::vector<double> next_v(v.size());
  bool converged = false;
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    double diff = 0.0;
    for (int s = 0; s < mdp.n_states; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < mdp.n_actions; ++a) best = std::max(best, backup(mdp, v, s, a));
      next_v[static_cast<std::size_t>(s)] = best;
      diff = std::max(diff, std::fabs(best - v[static_cast<std::size_t>(s)]));
    }
    v.swap(next_v);
    table.iterations = sweep;
    if (diff <= tol) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw SolverError("value iteration did not converge within " + std::to_string(max_sweeps) +
                      " sweeps");
  }

  table.residual = bellman_residual(mdp, v);
  table.policy.resize(v.size());
  for (int s = 0; s < mdp.n_states; ++s) {
    double best = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < mdp.n_actions; ++a) best = std::max(best, backup(mdp, v, s, a));
    const double slack = 1e-12 * std::max(1.0, std::fabs(best));
    const int anchor = mdp.tie_anchor.empty() ? 0 : mdp.tie_anchor[static_cast<std::size_t>(s)];
    int chosen = -1;
    for (int a = 0; a < mdp.n_actions; ++a) {
      if (backup(mdp, v, s, a) < best - slack) continue;
      if (chosen < 0 || std::abs(a - anchor) < std::abs(chosen - anchor)) chosen = a;
    }
    table.policy[static_cast<std::size_t>(s)] = chosen;
  }
  table.values = std::move(v);
  return table;
}

TabularMdp build_mdp(const SignalTransitions& transitions, OrgType org, double discount) {
  const int bins = transitions.grid().bins;
  TabularMdp mdp;
  mdp.n_states = bins;
  mdp.n_actions = bins;
  mdp.discount = discount;
  mdp.next.resize(static_cast<std::size_t>(bins) * bins);
  mdp.reward.resize(mdp.next.size());
  // Ties go to the signal that best fits the organization's mission: the most moderate cell
  // for participatory organizations, the most extreme one for ideological ones.
  const Side side = transitions.grid().side;
  const bool toward_middle = org == OrgType::participatory;
  const int moderate_cell = side == Side::approval ? 0 : bins - 1;
  const int anchor = toward_middle ? moderate_cell : bins - 1 - moderate_cell;
  mdp.tie_anchor.assign(static_cast<std::size_t>(bins), anchor);
  for (int s = 0; s < bins; ++s) {
    for (int a = 0; a < bins; ++a) {
      const CycleOutcome& o = transitions.outcome(s, a);
      mdp.next[mdp.at(s, a)] = o.next_state;
      mdp.reward[mdp.at(s, a)] = cycle_reward(org, o);
    }
  }
  return mdp;
}

double SignalingPolicy::max_reward(int state) const {
  double best = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < mdp.n_actions; ++a) best = std::max(best, mdp.reward[mdp.at(state, a)]);
  return best;
}

double SignalingPolicy::max_reward() const {
  return *std::max_element(mdp.reward.begin(), mdp.reward.end());
}

SignalingPolicy solve_policy(const SignalTransitions& transitions, OrgType org, double discount,
                             double tol) {
  SignalingPolicy policy;
  policy.org = org;
  policy.grid = transitions.grid();
  policy.mdp = build_mdp(transitions, org, discount);
  policy.table = value_iteration(policy.mdp, tol);
  return policy;
}

PolicyBook solve_policy_book(const PlanningContext& ctx, const PlanningSettings& settings,
                             std::span<const OrgType> orgs) {
  PolicyBook book;
  if (orgs.empty()) return book;
  const SignalTransitions approval(Side::approval, settings.bins, ctx);
  const SignalTransitions disapproval(Side::disapproval, settings.bins, ctx);
  for (OrgType org : orgs) {
    book[org] = PolicyPair{solve_policy(approval, org, settings.discount, settings.tol),
                           solve_policy(disapproval, org, settings.discount, settings.tol)};
  }
  return book;
}

double sample_signal(const SignalingPolicy& policy, int state, Rng& rng) {
  if (state < 0 || state >= policy.grid.bins) throw DomainError("state outside the policy grid");
  std::uniform_real_distribution<double> jitter(0.0, 1.0);
  const int a = policy.action(state);
  return policy.grid.left(a) + jitter(rng) * policy.grid.width();
}

std::vector<int> interior_states(const BeliefGrid& grid, const ConstraintWindow& window) {
  const Support sup = support_of(grid.side);
  std::vector<int> out;
  for (int s = 0; s < grid.bins; ++s) {
    const double c = grid.center(s);
    if (c - sup.lo >= window.tau && sup.hi - c >= window.tau) out.push_back(s);
  }
  return out;
}

std::vector<int> moderation_violations(const SignalingPolicy& policy,
                                       const ConstraintWindow& window) {
  std::vector<int> bad;
  const BeliefGrid& g = policy.grid;
  for (int s : interior_states(g, window)) {
    const double action = g.center(policy.action(s));
    if (std::fabs(action - 0.5) > std::fabs(g.center(s) - 0.5) + g.width() + 1e-12) {
      bad.push_back(s);
    }
  }
  return bad;
}

std::vector<int> extremization_violations(const SignalingPolicy& policy,
                                          const ConstraintWindow& window) {
  std::vector<int> bad;
  const BeliefGrid& g = policy.grid;
  for (int s : interior_states(g, window)) {
    const double action = g.center(policy.action(s));
    if (std::fabs(action - 0.5) < std::fabs(g.center(s) - 0.5) - g.width() - 1e-12) {
      bad.push_back(s);
    }
  }
  return bad;
}

std::vector<std::vector<double>> reward_heatmap(const TabularMdp& mdp) {
  std::vector<std::vector<double>> grid(static_cast<std::size_t>(mdp.n_states),
                                        std::vector<double>(static_cast<std::size_t>(mdp.n_actions)));
  for (int s = 0; s < mdp.n_states; ++s) {
    for (int a = 0; a < mdp.n_actions; ++a) {
      grid[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)] = mdp.reward[mdp.at(s, a)];
    }
  }
  return grid;
}

}  // namespace stew
