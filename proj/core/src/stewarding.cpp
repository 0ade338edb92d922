#include "stew/stewarding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <utility>

#include "stew/errors.hpp"
#include "stew/parallel.hpp"

namespace stew {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

BetaBelief draw_belief(double a, double b, double spread, Side side, Rng& rng) {
  if (spread <= 0.0) return BetaBelief{a, b, side};
  std::uniform_real_distribution<double> da(a - spread, a + spread);
  std::uniform_real_distribution<double> db(b - spread, b + spread);
  const double ra = da(rng);
  const double rb = db(rng);
  return BetaBelief{std::max(0.5, ra), std::max(0.5, rb), side};
}

double mean_belief(const std::vector<Agent>& pop, Side side, bool out_group) {
  double sum = 0.0;
  int count = 0;
  for (const Agent& a : pop) {
    if (a.side() != side) continue;
    sum += out_group ? a.belief_out().mean() : a.belief_in().mean();
    ++count;
  }
  return count == 0 ? kNaN : sum / count;
}

}  // namespace

const char* to_string(StewardingMode mode) {
  switch (mode) {
    case StewardingMode::participatory:
      return "participatory";
    case StewardingMode::ideological_approval:
      return "ideological_approval";
    case StewardingMode::ideological_disapproval:
      return "ideological_disapproval";
    case StewardingMode::none:
      return "none";
  }
  return "unknown";
}

std::optional<OrgType> org_for(StewardingMode mode) {
  switch (mode) {
    case StewardingMode::participatory:
      return OrgType::participatory;
    case StewardingMode::ideological_approval:
      return OrgType::ideological_approval;
    case StewardingMode::ideological_disapproval:
      return OrgType::ideological_disapproval;
    case StewardingMode::none:
      return std::nullopt;
  }
  return std::nullopt;
}

void SimConfig::validate() const {
  if (n_agents < 1 || timesteps < 1 || batches < 1) {
    throw DomainError("agent, timestep and batch counts must be >= 1");
  }
  if (n_samples < 1 || posterior_bins < 1) throw DomainError("posterior sizes must be >= 1");
  game.validate();
  window.validate();
}

PlanningContext planning_context(const SimConfig& cfg) {
  PlanningContext ctx;
  ctx.game = cfg.game;
  ctx.opinions = cfg.opinions;
  ctx.window = cfg.window;
  ctx.population = cfg.n_agents;
  ctx.n_samples = cfg.n_samples;
  ctx.posterior_bins = cfg.posterior_bins;
  ctx.concentration = cfg.planning_concentration;
  ctx.approval_prior = {cfg.belief_init.approval_a, cfg.belief_init.approval_b, Side::approval};
  ctx.disapproval_prior = {cfg.belief_init.disapproval_a, cfg.belief_init.disapproval_b,
                           Side::disapproval};
  ctx.seed = cfg.seed;
  return ctx;
}

std::vector<Agent> sample_population(const OpinionDistribution& dist, int n,
                                     const BeliefInit& init, Rng& opinion_rng, Rng& belief_rng) {
  std::vector<Agent> pop(static_cast<std::size_t>(n));
  for (Agent& a : pop) a.opinion = dist.sample(opinion_rng);
  for (Agent& a : pop) {
    a.approval_belief =
        draw_belief(init.approval_a, init.approval_b, init.spread, Side::approval, belief_rng);
    a.disapproval_belief = draw_belief(init.disapproval_a, init.disapproval_b, init.spread,
                                       Side::disapproval, belief_rng);
  }
  return pop;
}

StepRecord stewarding_step(std::vector<Agent>& pop, const PolicyPair* policies, int t,
                           const SimConfig& cfg, StepStreams& streams) {
  StepRecord rec;
  rec.t = t;

  if (cfg.mode != StewardingMode::none) {
    if (policies == nullptr) throw DomainError("stewarding mode needs solved policies");
    // (1) signal about the approval group on even steps, the disapproval group on odd steps
    const Side side = t % 2 == 0 ? Side::approval : Side::disapproval;
    const SignalingPolicy& policy = policies->for_side(side);
    double state_mean = 0.0;
    for (const Agent& a : pop) state_mean += a.belief_about(side).mean();
    state_mean /= static_cast<double>(pop.size());
    const double signal = sample_signal(policy, policy.grid.index_of(state_mean), streams.signals);
    rec.signal_side = side;
    rec.signal = signal;

    // (2) window update, one Monte Carlo posterior per distinct prior
    std::map<std::pair<double, double>, std::optional<double>> posterior_means;
    bool any_rejected = false;
    for (Agent& a : pop) {
      BetaBelief& prior = a.belief_about(side);
      const auto key = std::make_pair(prior.a, prior.b);
      auto it = posterior_means.find(key);
      if (it == posterior_means.end()) {
        const Posterior post = posterior_from_signal(prior, signal, cfg.window, cfg.n_samples,
                                                     streams.posterior, cfg.posterior_bins);
        std::optional<double> m;
        if (!post.rejected) m = post.belief.mean();
        it = posterior_means.emplace(key, m).first;
      }
      if (it->second) {
        prior = moment_match(prior, *it->second);
      } else {
        any_rejected = true;
      }
    }
    rec.signal_rejected = any_rejected;
  }

  // (3) equilibrium expression
  EquilibriumCache equilibrium(cfg.game);
  std::vector<double> opinions(pop.size());
  std::vector<char> expressed(pop.size());
  for (std::size_t i = 0; i < pop.size(); ++i) {
    Agent& a = pop[i];
    const double v_bar =
        belief_v_bar(a.approval_belief.mean(), a.disapproval_belief.mean(), cfg.game);
    a.last_gamma = interim_response(a.opinion, equilibrium(v_bar), cfg.game);
    a.expressed = a.last_gamma >= cfg.game.gamma_silence;
    opinions[i] = a.opinion;
    expressed[i] = a.expressed;
  }
  const ExpressionSummary summary = summarize_expression(opinions, expressed);

  // (4) community update for everyone, per side with at least one expresser
  for (Agent& a : pop) {
    if (summary.has_approval()) {
      a.approval_belief = beta_update_from_community(a.approval_belief,
                                                     summary.mean_expressed_approval);
    }
    if (summary.has_disapproval()) {
      a.disapproval_belief = beta_update_from_community(a.disapproval_belief,
                                                        summary.mean_expressed_disapproval);
    }
  }

  rec.participation = summary.participation;
  rec.mean_expressed_approval = summary.has_approval() ? summary.mean_expressed_approval : kNaN;
  rec.mean_expressed_disapproval =
      summary.has_disapproval() ? summary.mean_expressed_disapproval : kNaN;
  rec.belief_out_approval_side = mean_outgroup_belief(pop, Side::approval);
  rec.belief_out_disapproval_side = mean_outgroup_belief(pop, Side::disapproval);
  rec.belief_in_approval_side = mean_ingroup_belief(pop, Side::approval);
  rec.belief_in_disapproval_side = mean_ingroup_belief(pop, Side::disapproval);
  if (cfg.keep_agents) {
    rec.gammas.reserve(pop.size());
    for (const Agent& a : pop) rec.gammas.push_back(a.last_gamma);
    rec.expressed = expressed;
  }
  return rec;
}

double participation_rate(const std::vector<Agent>& pop) {
  if (pop.empty()) return 0.0;
  const auto n = std::count_if(pop.begin(), pop.end(), [](const Agent& a) { return a.expressed; });
  return static_cast<double>(n) / static_cast<double>(pop.size());
}

double mean_outgroup_belief(const std::vector<Agent>& pop, Side side) {
  return mean_belief(pop, side, true);
}

double mean_ingroup_belief(const std::vector<Agent>& pop, Side side) {
  return mean_belief(pop, side, false);
}

Aggregate aggregate_of(const std::vector<double>& values) {
  double sum = 0.0;
  int n = 0;
  for (double v : values) {
    if (std::isfinite(v)) {
      sum += v;
      ++n;
    }
  }
  if (n == 0) return {kNaN, kNaN};
  const double mean = sum / n;
  double ss = 0.0;
  for (double v : values) {
    if (std::isfinite(v)) ss += (v - mean) * (v - mean);
  }
  return {mean, std::sqrt(ss / n)};
}

SimTrace run_simulation(const SimConfig& cfg) {
  const auto org = org_for(cfg.mode);
  if (!org) return run_simulation(cfg, nullptr);
  const OrgType orgs[] = {*org};
  const PolicyBook book = solve_policy_book(planning_context(cfg), cfg.planning, orgs);
  return run_simulation(cfg, &book.at(*org));
}

SimTrace run_simulation(const SimConfig& cfg, const PolicyPair* policies) {
  cfg.validate();
  if (cfg.mode != StewardingMode::none && policies == nullptr) {
    throw DomainError("stewarding mode needs solved policies");
  }
  SimTrace trace;
  trace.mode = cfg.mode;
  trace.alpha = cfg.game.alpha;
  trace.batches.resize(static_cast<std::size_t>(cfg.batches));

  std::vector<double> first_initial;
  std::vector<double> first_final;
  parallel_for(trace.batches.size(), cfg.threads, [&](std::size_t b) {
    const std::uint64_t seed = cfg.seed + b;
    Rng opinion_rng = make_stream(seed, "population");
    Rng belief_rng = make_stream(seed, "beliefs");
    StepStreams streams{make_stream(seed, "signals"), make_stream(seed, "posterior")};
    auto pop = sample_population(cfg.opinions, cfg.n_agents, cfg.belief_init, opinion_rng,
                                 belief_rng);
    std::vector<double> initial;
    for (const Agent& a : pop) initial.push_back(a.opinion);
    auto& steps = trace.batches[b];
    steps.reserve(static_cast<std::size_t>(cfg.timesteps));
    for (int t = 0; t < cfg.timesteps; ++t) {
      steps.push_back(stewarding_step(pop, policies, t, cfg, streams));
    }
    if (b == 0) {
      first_initial = std::move(initial);
      for (const Agent& a : pop) first_final.push_back(a.opinion);
    }
  });
  trace.initial_opinions = std::move(first_initial);
  trace.final_opinions = std::move(first_final);

  trace.aggregate.resize(static_cast<std::size_t>(cfg.timesteps));
  for (int t = 0; t < cfg.timesteps; ++t) {
    auto column = [&](double StepRecord::*field) {
      std::vector<double> v;
      for (const auto& steps : trace.batches) v.push_back(steps[static_cast<std::size_t>(t)].*field);
      return aggregate_of(v);
    };
    AggregateRow& row = trace.aggregate[static_cast<std::size_t>(t)];
    row.t = t;
    row.participation = column(&StepRecord::participation);
    row.belief_out_approval_side = column(&StepRecord::belief_out_approval_side);
    row.belief_out_disapproval_side = column(&StepRecord::belief_out_disapproval_side);
    row.belief_in_approval_side = column(&StepRecord::belief_in_approval_side);
    row.belief_in_disapproval_side = column(&StepRecord::belief_in_disapproval_side);
    row.mean_expressed_approval = column(&StepRecord::mean_expressed_approval);
    row.mean_expressed_disapproval = column(&StepRecord::mean_expressed_disapproval);
  }
  return trace;
}

}  // namespace stew
