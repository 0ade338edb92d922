#include "stew/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "stew/errors.hpp"

namespace stew {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string yes_no(bool b) { return b ? "true" : "false"; }

std::string opt_number(const std::optional<double>& x) {
  return x ? format_number(*x) : std::string("nan");
}

void write_config(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
  write_text(dir / "resolved_config.ini", render_config(cfg));
}

bool is_ideological(StewardingMode m) {
  return m == StewardingMode::ideological_approval || m == StewardingMode::ideological_disapproval;
}

}  // namespace

std::vector<TheoremTrial> theorem_battery(int trials, std::uint64_t seed) {
  Rng rng = make_stream(seed, "theorem");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double n_hats[] = {0.3, 0.5, 0.7};
  std::vector<TheoremTrial> out;
  out.reserve(static_cast<std::size_t>(trials));
  for (int i = 0; i < trials; ++i) {
    TheoremTrial t;
    t.params.alpha = 2.0 * unit(rng);
    t.params.n_hat = n_hats[std::uniform_int_distribution<int>(0, 2)(rng)];
    t.params.lambda_in = 3.0 - 2.0 * unit(rng);  // (1,3]
    do {
      t.params.lambda_out = unit(rng);
    } while (t.params.lambda_out <= 0.0);
    t.threshold = silence_threshold(t.params);
    do {
      t.v_bar = 0.5 + 0.5 * unit(rng);
    } while (std::fabs(t.v_bar - t.threshold) < 1e-4);
    t.gamma_star = symmetric_equilibrium(t.v_bar, t.params);
    t.predicted_silent = t.v_bar < t.threshold;
    t.observed_silent = t.gamma_star == 0.0;
    out.push_back(t);
  }
  return out;
}

EquilibriumReport run_equilibrium(const ExperimentConfig& cfg, bool check_theorem) {
  EquilibriumReport r;
  const auto& sw = cfg.equilibrium;
  const double threshold = silence_threshold(cfg.game);
  for (int i = 0; i < sw.v_steps; ++i) {
    const double v = sw.v_min + (sw.v_max - sw.v_min) * i / (sw.v_steps - 1);
    for (int j = 0; j < sw.gamma_steps; ++j) {
      const double g = static_cast<double>(j) / (sw.gamma_steps - 1);
      r.best_response.add_row(
          {format_number(v), format_number(g), format_number(best_response(g, v, cfg.game))});
    }
    const double star = symmetric_equilibrium(v, cfg.game);
    r.equilibria.add_row({format_number(v), format_number(star), format_number(threshold),
                          yes_no(star == 0.0)});
  }
  if (check_theorem) {
    Table t({"trial", "alpha", "n_hat", "lambda_in", "lambda_out", "v_bar", "threshold",
             "gamma_star", "predicted_silent", "observed_silent", "pass"});
    const auto trials = theorem_battery(sw.check_trials, cfg.seed);
    for (std::size_t i = 0; i < trials.size(); ++i) {
      const TheoremTrial& x = trials[i];
      if (!x.pass()) ++r.theorem_failures;
      t.add_row({std::to_string(i), format_number(x.params.alpha), format_number(x.params.n_hat),
                 format_number(x.params.lambda_in), format_number(x.params.lambda_out),
                 format_number(x.v_bar), format_number(x.threshold), format_number(x.gamma_star),
                 yes_no(x.predicted_silent), yes_no(x.observed_silent), yes_no(x.pass())});
    }
    r.theorem = std::move(t);
  }
  return r;
}

Table policy_table(const SignalingPolicy& policy) {
  Table t({"state_center", "action_center"});
  for (int s = 0; s < policy.grid.bins; ++s) {
    t.add_row({format_number(policy.grid.center(s)),
               format_number(policy.grid.center(policy.action(s)))});
  }
  return t;
}

Table heatmap_table(const SignalingPolicy& policy) {
  // rows: actions, columns: states
  std::vector<std::string> header{"action\\state"};
  for (int s = 0; s < policy.grid.bins; ++s) header.push_back(format_number(policy.grid.center(s)));
  Table t(std::move(header));
  const auto grid = reward_heatmap(policy.mdp);
  for (int a = 0; a < policy.grid.bins; ++a) {
    std::vector<std::string> row{format_number(policy.grid.center(a))};
    for (int s = 0; s < policy.grid.bins; ++s) {
      row.push_back(format_number(grid[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)]));
    }
    t.add_row(std::move(row));
  }
  return t;
}

PolicyReport run_policy(const ExperimentConfig& cfg) {
  PolicyReport r;
  const OrgType orgs[] = {OrgType::participatory, OrgType::ideological_approval,
                          OrgType::ideological_disapproval};
  const PolicyBook book = solve_policy_book(planning_context(cfg), cfg.planning, orgs);
  for (OrgType org : orgs) {
    for (Side side : {Side::approval, Side::disapproval}) {
      const SignalingPolicy& p = book.at(org).for_side(side);
      r.policies.push_back({org, side, p});
      std::string check = "none";
      std::vector<int> bad;
      if (org == OrgType::participatory) {
        check = "moderation";
        bad = moderation_violations(p, cfg.window);
      } else if ((org == OrgType::ideological_approval) == (side == Side::approval)) {
        check = "extremization";
        bad = extremization_violations(p, cfg.window);
      }
      r.summary.add_row({to_string(org), to_string(side), std::to_string(p.table.iterations),
                         format_number(p.table.residual), format_number(p.max_reward()), check,
                         std::to_string(bad.size())});
    }
  }
  return r;
}

StewardReport run_steward(const ExperimentConfig& cfg) {
  StewardReport r;
  const OpinionDistribution dist = cfg.opinions();
  const double truth_out = dist.group_mean(Side::disapproval);
  for (double alpha : cfg.steward.alphas) {
    std::vector<OrgType> orgs;
    for (auto m : cfg.steward.modes) {
      if (auto o = org_for(m); o && std::find(orgs.begin(), orgs.end(), *o) == orgs.end()) {
        orgs.push_back(*o);
      }
    }
    const SimConfig base = sim_config(cfg, StewardingMode::none, alpha);
    const PolicyBook book = solve_policy_book(planning_context(base), base.planning, orgs);
    for (auto mode : cfg.steward.modes) {
      const SimConfig sim = sim_config(cfg, mode, alpha);
      const auto org = org_for(mode);
      const SimTrace trace = run_simulation(sim, org ? &book.at(*org) : nullptr);
      const std::string mode_name = to_string(mode);
      const std::string alpha_text = format_number(alpha);
      for (std::size_t b = 0; b < trace.batches.size(); ++b) {
        for (const StepRecord& s : trace.batches[b]) {
          r.trace.add_row({std::to_string(b), std::to_string(s.t), mode_name, alpha_text,
                           format_number(s.participation),
                           format_number(s.belief_out_approval_side),
                           format_number(s.belief_out_disapproval_side),
                           format_number(s.belief_in_approval_side),
                           format_number(s.belief_in_disapproval_side),
                           format_number(s.mean_expressed_approval),
                           format_number(s.mean_expressed_disapproval),
                           s.signal_side ? to_string(*s.signal_side) : "none",
                           s.signal_side ? format_number(s.signal) : "nan",
                           yes_no(s.signal_rejected)});
        }
      }
      for (const AggregateRow& a : trace.aggregate) {
        r.aggregate.add_row({std::to_string(a.t), mode_name, alpha_text,
                             format_number(a.participation.mean), format_number(a.participation.sd),
                             format_number(a.belief_out_approval_side.mean),
                             format_number(a.belief_out_approval_side.sd),
                             format_number(a.belief_out_disapproval_side.mean),
                             format_number(a.belief_out_disapproval_side.sd),
                             format_number(a.belief_in_approval_side.mean),
                             format_number(a.belief_in_approval_side.sd),
                             format_number(a.belief_in_disapproval_side.mean),
                             format_number(a.belief_in_disapproval_side.sd)});
      }
      const AggregateRow& last = trace.aggregate.back();
      r.runs.push_back({mode, alpha, last.participation.mean,
                        std::fabs(last.belief_out_approval_side.mean - truth_out)});
    }
  }

  auto find = [&](double alpha, auto pred) -> const StewardRun* {
    for (const auto& run : r.runs) {
      if (run.alpha == alpha && pred(run.mode)) return &run;
    }
    return nullptr;
  };
  auto add = [&](const std::string& check, const std::string& scope, double lhs, double rhs,
                 bool holds) {
    r.orderings.add_row({check, scope, format_number(lhs), format_number(rhs), yes_no(holds)});
  };
  for (double alpha : cfg.steward.alphas) {
    const std::string scope = "alpha=" + format_number(alpha);
    const auto* part = find(alpha, [](auto m) { return m == StewardingMode::participatory; });
    const auto* none = find(alpha, [](auto m) { return m == StewardingMode::none; });
    const auto* ideo = find(alpha, [](auto m) { return is_ideological(m); });
    if (part && none) {
      add("participation participatory > none", scope, part->terminal_participation,
          none->terminal_participation,
          part->terminal_participation > none->terminal_participation);
    }
    if (none && ideo) {
      add("participation none > ideological", scope, none->terminal_participation,
          ideo->terminal_participation,
          none->terminal_participation > ideo->terminal_participation);
    }
    if (ideo) {
      double others = -1.0;
      for (const auto& run : r.runs) {
        if (run.alpha == alpha && !is_ideological(run.mode)) {
          others = std::max(others, run.terminal_distortion);
        }
      }
      if (others >= 0.0) {
        add("distortion ideological largest", scope, ideo->terminal_distortion, others,
            ideo->terminal_distortion > others);
      }
    }
  }
  std::vector<double> alphas = cfg.steward.alphas;
  std::sort(alphas.begin(), alphas.end());
  for (auto mode : cfg.steward.modes) {
    for (std::size_t i = 0; i + 1 < alphas.size(); ++i) {
      const auto* lo = find(alphas[i], [&](auto m) { return m == mode; });
      const auto* hi = find(alphas[i + 1], [&](auto m) { return m == mode; });
      if (!lo || !hi) continue;
      add("participation lower alpha >= higher alpha",
          std::string(to_string(mode)) + " alpha=" + format_number(alphas[i]) + " vs " +
              format_number(alphas[i + 1]),
          lo->terminal_participation, hi->terminal_participation,
          lo->terminal_participation >= hi->terminal_participation);
    }
  }
  return r;
}

PlatformReport run_platform_experiment(const ExperimentConfig& cfg) {
  PlatformReport r;
  const PolicyBook book = solve_platform_policies(platform_config(cfg, cfg.seed));
  const CommunityClass classes[] = {CommunityClass::participatory, CommunityClass::ideological,
                                    CommunityClass::silent};
  int disapproval_passes = 0;
  double d_sum = 0.0;
  int d_count = 0;
  for (int k = 0; k < cfg.platform.seeds; ++k) {
    const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(k);
    PlatformRun run = run_platform(platform_config(cfg, seed), book);
    if (cfg.platform.weighted_d) run.stats = community_stats(run.state, true);
    const std::string seed_text = std::to_string(seed);
    for (Side group : {Side::approval, Side::disapproval}) {
      for (CommunityClass c : classes) {
        const ClassSummary& s = run.stats.summary(c, group);
        r.stats.add_row({seed_text, to_string(c), to_string(group), std::to_string(s.at(Measure::opinion).n),
                         format_number(s.empty ? kNaN : s.at(Measure::opinion).mean),
                         format_number(s.empty ? kNaN : s.at(Measure::opinion).sd),
                         format_number(s.empty ? kNaN : s.at(Measure::belief_out).mean),
                         format_number(s.empty ? kNaN : s.at(Measure::belief_out).sd),
                         format_number(s.empty ? kNaN : s.at(Measure::belief_in).mean),
                         format_number(s.empty ? kNaN : s.at(Measure::belief_in).sd),
                         yes_no(s.empty)});
      }
    }
    for (const EffectSize& e : run.stats.effects) {
      r.effects.add_row({seed_text, to_string(e.group),
                         std::string(to_string(e.a)) + "_vs_" + to_string(e.b),
                         to_string(e.measure), opt_number(e.d)});
    }
    for (const Battery& b : {run.approval_battery, run.disapproval_battery}) {
      r.battery.add_row({seed_text, to_string(b.group), yes_no(b.opinion_order),
                         yes_no(b.belief_out_order), yes_no(b.silent_moderate),
                         yes_no(b.silent_belief_in), yes_no(b.pass())});
    }
    if (run.approval_battery.pass()) ++r.approval_passes;
    if (run.disapproval_battery.pass()) ++disapproval_passes;
    const auto d = run.stats.effect(CommunityClass::ideological, CommunityClass::participatory,
                                    Measure::opinion, Side::approval);
    r.opinion_d.push_back(d ? *d : kNaN);
    if (d) {
      d_sum += *d;
      ++d_count;
    }
  }
  r.seeds = cfg.platform.seeds;
  r.mean_opinion_d = d_count ? d_sum / d_count : kNaN;
  r.summary.add_row({"seeds", std::to_string(r.seeds)});
  r.summary.add_row({"approval_battery_passes", std::to_string(r.approval_passes)});
  r.summary.add_row({"disapproval_battery_passes", std::to_string(disapproval_passes)});
  r.summary.add_row({"mean_opinion_d_ideological_vs_participatory", format_number(r.mean_opinion_d)});
  return r;
}

void write_equilibrium(const EquilibriumReport& r, const ExperimentConfig& cfg,
                       const std::filesystem::path& dir) {
  r.best_response.save(dir / "best_response.csv");
  r.equilibria.save(dir / "equilibrium.csv");
  if (r.theorem) r.theorem->save(dir / "theorem_check.csv");
  write_config(cfg, dir);
}

void write_policy(const PolicyReport& r, const ExperimentConfig& cfg,
                  const std::filesystem::path& dir) {
  for (const PolicyEntry& e : r.policies) {
    const std::string stem = std::string(to_string(e.org)) + "_" + to_string(e.side);
    policy_table(e.policy).save(dir / ("policy_" + stem + ".csv"));
    heatmap_table(e.policy).save(dir / ("heatmap_" + stem + ".csv"));
  }
  r.summary.save(dir / "policy_summary.csv");
  write_config(cfg, dir);
}

void write_steward(const StewardReport& r, const ExperimentConfig& cfg,
                   const std::filesystem::path& dir) {
  r.trace.save(dir / "steward_trace.csv");
  r.aggregate.save(dir / "steward_aggregate.csv");
  r.orderings.save(dir / "steward_orderings.csv");
  write_config(cfg, dir);
}

void write_platform(const PlatformReport& r, const ExperimentConfig& cfg,
                    const std::filesystem::path& dir) {
  r.stats.save(dir / "community_stats.csv");
  r.effects.save(dir / "cohens_d.csv");
  r.battery.save(dir / "battery.csv");
  r.summary.save(dir / "platform_summary.csv");
  write_config(cfg, dir);
}

}  // namespace stew
