#include "stew/platform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stew/errors.hpp"
#include "stew/parallel.hpp"

namespace stew {
namespace {

constexpr std::array<CommunityClass, 3> kClasses = {
    CommunityClass::participatory, CommunityClass::ideological, CommunityClass::silent};
constexpr std::array<Measure, 3> kMeasures = {Measure::opinion, Measure::belief_out,
                                              Measure::belief_in};
constexpr std::array<Side, 2> kGroups = {Side::approval, Side::disapproval};

double extremity(double x) { return std::fabs(x - 0.5); }

struct SideMeans {
  double approval_sum = 0.0;
  int approval_n = 0;
  double disapproval_sum = 0.0;
  int disapproval_n = 0;

  void add(double opinion) {
    if (side_of(opinion) == Side::approval) {
      approval_sum += opinion;
      ++approval_n;
    } else {
      disapproval_sum += opinion;
      ++disapproval_n;
    }
  }
};

}  // namespace

const char* to_string(Arm arm) {
  return arm == Arm::participatory ? "participatory" : "ideological";
}

OrgType aligned_org(double opinion) {
  return side_of(opinion) == Side::approval ? OrgType::ideological_approval
                                            : OrgType::ideological_disapproval;
}

OrgType org_of(Arm arm, double opinion) {
  return arm == Arm::participatory ? OrgType::participatory : aligned_org(opinion);
}

double ucb_index(const ArmStats& arm, int t) {
  if (arm.pulls <= 0) return std::numeric_limits<double>::infinity();
  return arm.mean() + std::sqrt(2.0 * std::log(static_cast<double>(t)) / arm.pulls);
}

Arm ucb_select(const ArmPair& arms) {
  if (arms[0].pulls == 0) return Arm::participatory;
  if (arms[1].pulls == 0) return Arm::ideological;
  const int t = arms[0].pulls + arms[1].pulls;
  return ucb_index(arms[1], t) > ucb_index(arms[0], t) ? Arm::ideological : Arm::participatory;
}

int RecommenderState::total_pulls(int user) const {
  const ArmPair& a = users.at(static_cast<std::size_t>(user));
  return a[0].pulls + a[1].pulls;
}

void RecommenderState::credit(int user, Arm arm, bool expressed) {
  ArmStats& s = users.at(static_cast<std::size_t>(user))[static_cast<std::size_t>(arm)];
  ++s.pulls;
  if (expressed) ++s.reward;
}

double approval_side_probability(double max_reward_approval, double max_reward_disapproval) {
  const double wa = std::max(0.0, max_reward_approval + 1.0);
  const double wd = std::max(0.0, max_reward_disapproval + 1.0);
  if (wa + wd <= 0.0) return 0.5;
  return wa / (wa + wd);
}

Side choose_signal_side(const PolicyPair& policies, const Agent& user, Rng& rng) {
  const auto best = [&](Side side) {
    const SignalingPolicy& p = policies.for_side(side);
    return p.max_reward(p.grid.index_of(user.belief_about(side).mean()));
  };
  const double p = approval_side_probability(best(Side::approval), best(Side::disapproval));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return u(rng) < p ? Side::approval : Side::disapproval;
}

int Community::size() const {
  return static_cast<int>(std::count(member.begin(), member.end(), char{1}));
}

void PlatformConfig::validate() const {
  if (n_users < 1 || timesteps < 2) throw DomainError("need >= 1 user and >= 2 timesteps");
  if (n_samples < 1 || posterior_bins < 1) throw DomainError("posterior sizes must be >= 1");
  game.validate();
  window.validate();
}

PlanningContext planning_context(const PlatformConfig& cfg) {
  SimConfig sim;
  sim.n_agents = cfg.n_users;
  sim.opinions = cfg.opinions;
  sim.game = cfg.game;
  sim.window = cfg.window;
  sim.belief_init = cfg.belief_init;
  sim.seed = cfg.seed;
  sim.n_samples = cfg.n_samples;
  sim.posterior_bins = cfg.posterior_bins;
  sim.planning_concentration = cfg.planning_concentration;
  return planning_context(sim);
}

PolicyBook solve_platform_policies(const PlatformConfig& cfg) {
  const OrgType orgs[] = {OrgType::participatory, OrgType::ideological_approval,
                          OrgType::ideological_disapproval};
  return solve_policy_book(planning_context(cfg), cfg.planning, orgs);
}

PlatformState init_platform(const PlatformConfig& cfg) {
  cfg.validate();
  PlatformState state;
  state.seed = cfg.seed;
  Rng opinion_rng = make_stream(cfg.seed, "population");
  Rng belief_rng = make_stream(cfg.seed, "beliefs");
  state.users = sample_population(cfg.opinions, cfg.n_users, cfg.belief_init, opinion_rng,
                                  belief_rng);
  for (const Agent& a : state.users) state.initial_opinions.push_back(a.opinion);
  state.recommender = RecommenderState(cfg.n_users);
  for (OrgType org : {OrgType::participatory, OrgType::ideological_approval,
                      OrgType::ideological_disapproval}) {
    Community& c = state.community(org);
    c.org = org;
    c.member.assign(static_cast<std::size_t>(cfg.n_users), 0);
  }
  return state;
}

void platform_step(PlatformState& state, const PolicyBook& book, const PlatformConfig& cfg) {
  const auto n = state.users.size();
  const auto t = static_cast<std::uint64_t>(state.history.size());
  std::vector<UserStep> steps(n);

  // steps 1-3: each user touches only its own agent; the recommender is read-only here
  parallel_for(n, cfg.threads, [&](std::size_t i) {
    Agent& user = state.users[i];
    UserStep& step = steps[i];
    const std::uint64_t stream = t * n + i;
    step.arm = state.recommender.select(static_cast<int>(i));
    step.org = org_of(step.arm, user.opinion);
    const PolicyPair& policies = book.at(step.org);

    Rng signal_rng = make_stream(cfg.seed, "signals", stream);
    step.side = choose_signal_side(policies, user, signal_rng);
    const SignalingPolicy& policy = policies.for_side(step.side);
    BetaBelief& prior = user.belief_about(step.side);
    step.signal = sample_signal(policy, policy.grid.index_of(prior.mean()), signal_rng);

    Rng posterior_rng = make_stream(cfg.seed, "posterior", stream);
    const Posterior post = posterior_from_signal(prior, step.signal, cfg.window, cfg.n_samples,
                                                 posterior_rng, cfg.posterior_bins);
    step.rejected = post.rejected;
    if (!post.rejected) prior = moment_match(prior, post.belief.mean());

    const double v_bar =
        belief_v_bar(user.approval_belief.mean(), user.disapproval_belief.mean(), cfg.game);
    step.gamma = interim_response(user.opinion, symmetric_equilibrium(v_bar, cfg.game), cfg.game);
    step.expressed = step.gamma >= cfg.game.gamma_silence;
    user.last_gamma = step.gamma;
    user.expressed = step.expressed;
  });

  // steps 4-6, serial commit
  for (Community& c : state.communities) {
    auto& expressed_now = c.record.emplace_back();
    SideMeans means;
    for (std::size_t i = 0; i < n; ++i) {
      if (!steps[i].expressed || steps[i].org != c.org) continue;
      c.member[i] = 1;
      expressed_now.emplace_back(static_cast<int>(i), state.users[i].opinion);
      means.add(state.users[i].opinion);
    }
    const bool approval_visible =
        means.approval_n > 0 && c.org != OrgType::ideological_disapproval;
    const bool disapproval_visible =
        means.disapproval_n > 0 && c.org != OrgType::ideological_approval;
    for (const auto& [i, opinion] : expressed_now) {
      Agent& user = state.users[static_cast<std::size_t>(i)];
      if (approval_visible) {
        user.approval_belief = beta_update_from_community(
            user.approval_belief, means.approval_sum / means.approval_n);
      }
      if (disapproval_visible) {
        user.disapproval_belief = beta_update_from_community(
            user.disapproval_belief, means.disapproval_sum / means.disapproval_n);
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    state.recommender.credit(static_cast<int>(i), steps[i].arm, steps[i].expressed);
  }
  state.history.push_back(std::move(steps));
}

const char* to_string(CommunityClass c) {
  switch (c) {
    case CommunityClass::participatory:
      return "participatory";
    case CommunityClass::ideological:
      return "ideological";
    case CommunityClass::silent:
      return "silent";
  }
  return "unknown";
}

const char* to_string(Measure m) {
  switch (m) {
    case Measure::opinion:
      return "opinion";
    case Measure::belief_out:
      return "belief_out";
    case Measure::belief_in:
      return "belief_in";
  }
  return "unknown";
}

CommunityClass classify_user(const PlatformState& state, int user, int from) {
  int participatory = 0;
  int ideological = 0;
  for (std::size_t t = static_cast<std::size_t>(std::max(0, from)); t < state.history.size();
       ++t) {
    const UserStep& s = state.history[t].at(static_cast<std::size_t>(user));
    if (!s.expressed) continue;
    if (s.arm == Arm::participatory) {
      ++participatory;
    } else {
      ++ideological;
    }
  }
  if (participatory > ideological) return CommunityClass::participatory;
  if (ideological > participatory) return CommunityClass::ideological;
  if (participatory == 0) return CommunityClass::silent;
  Rng ties = make_stream(state.seed, "class ties", static_cast<std::uint64_t>(user));
  return std::bernoulli_distribution(0.5)(ties) ? CommunityClass::ideological
                                                : CommunityClass::participatory;
}

SampleStats sample_stats(const std::vector<double>& values) {
  SampleStats s;
  s.n = static_cast<int>(values.size());
  if (s.n == 0) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / s.n;
  if (s.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / (s.n - 1));
  }
  return s;
}

double cohens_d(const SampleStats& a, const SampleStats& b, bool weighted) {
  double pooled = 0.0;
  if (weighted) {
    const int dof = a.n + b.n - 2;
    if (dof <= 0) throw DomainError("weighted pooling needs at least two observations in total");
    pooled = std::sqrt(((a.n - 1) * a.sd * a.sd + (b.n - 1) * b.sd * b.sd) / dof);
  } else {
    pooled = std::sqrt((a.sd * a.sd + b.sd * b.sd) / 2.0);
  }
  if (!(pooled > 0.0)) throw DomainError("pooled sd is zero; effect size undefined");
  return (a.mean - b.mean) / pooled;
}

const ClassSummary& CommunityStats::summary(CommunityClass c, Side group) const {
  for (const ClassSummary& s : summaries) {
    if (s.cls == c && s.group == group) return s;
  }
  throw DomainError("no summary for requested class");
}

std::optional<double> CommunityStats::effect(CommunityClass a, CommunityClass b, Measure m,
                                             Side group) const {
  for (const EffectSize& e : effects) {
    if (e.a == a && e.b == b && e.measure == m && e.group == group) return e.d;
  }
  return std::nullopt;
}

CommunityStats community_stats(const PlatformState& state, bool weighted_d) {
  CommunityStats stats;
  const int steps = static_cast<int>(state.history.size());
  if (steps < 2) throw DomainError("community stats need at least two steps");
  stats.window_start = steps / 2;
  for (std::size_t i = 0; i < state.users.size(); ++i) {
    stats.classes.push_back(classify_user(state, static_cast<int>(i), stats.window_start));
  }

  for (Side group : kGroups) {
    for (CommunityClass c : kClasses) {
      std::array<std::vector<double>, 3> values;
      for (std::size_t i = 0; i < state.users.size(); ++i) {
        const Agent& u = state.users[i];
        if (stats.classes[i] != c || u.side() != group) continue;
        values[0].push_back(u.opinion);
        values[1].push_back(u.belief_out().mean());
        values[2].push_back(u.belief_in().mean());
      }
      ClassSummary s;
      s.cls = c;
      s.group = group;
      s.empty = values[0].empty();
      for (std::size_t m = 0; m < 3; ++m) s.measures[m] = sample_stats(values[m]);
      stats.summaries.push_back(s);
    }
  }

  const std::pair<CommunityClass, CommunityClass> pairs[] = {
      {CommunityClass::ideological, CommunityClass::participatory},
      {CommunityClass::ideological, CommunityClass::silent},
      {CommunityClass::participatory, CommunityClass::silent}};
  for (Side group : kGroups) {
    for (const auto& [a, b] : pairs) {
      const ClassSummary& sa = stats.summary(a, group);
      const ClassSummary& sb = stats.summary(b, group);
      for (Measure m : kMeasures) {
        EffectSize e{group, a, b, m, std::nullopt};
        if (!sa.empty && !sb.empty) {
          try {
            e.d = cohens_d(sa.at(m), sb.at(m), weighted_d);
          } catch (const DomainError&) {
            e.d.reset();
          }
        }
        stats.effects.push_back(e);
      }
    }
  }
  return stats;
}

Battery evaluate_battery(const CommunityStats& stats, Side group) {
  Battery b;
  b.group = group;
  const ClassSummary& part = stats.summary(CommunityClass::participatory, group);
  const ClassSummary& ideo = stats.summary(CommunityClass::ideological, group);
  const ClassSummary& silent = stats.summary(CommunityClass::silent, group);
  const auto ext = [](const ClassSummary& s, Measure m) { return extremity(s.at(m).mean); };
  if (!part.empty && !ideo.empty) {
    b.opinion_order = ext(ideo, Measure::opinion) > ext(part, Measure::opinion);
    b.belief_out_order = ext(ideo, Measure::belief_out) > ext(part, Measure::belief_out);
  }
  if (!silent.empty) {
    b.silent_moderate = ext(silent, Measure::opinion) <= 0.05;
    if (!part.empty && !ideo.empty) {
      b.silent_belief_in = ext(silent, Measure::belief_in) >
                           std::max(ext(part, Measure::belief_in), ext(ideo, Measure::belief_in));
    }
  }
  return b;
}

PlatformRun run_platform(const PlatformConfig& cfg, const PolicyBook& book) {
  PlatformRun run;
  run.state = init_platform(cfg);
  for (int t = 0; t < cfg.timesteps; ++t) platform_step(run.state, book, cfg);
  run.stats = community_stats(run.state);
  run.approval_battery = evaluate_battery(run.stats, Side::approval);
  run.disapproval_battery = evaluate_battery(run.stats, Side::disapproval);
  return run;
}

PlatformRun run_platform(const PlatformConfig& cfg) {
  return run_platform(cfg, solve_platform_policies(cfg));
}

}  // namespace stew
