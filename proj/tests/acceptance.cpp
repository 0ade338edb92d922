// Acceptance run: one PASS/FAIL line per criterion. Exit status is nonzero when any fails.
// usage: stew_acceptance <path to stewsim> [scratch dir]
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <sys/wait.h>

#include "oracles.hpp"
#include "stew/beliefs.hpp"
#include "stew/config.hpp"
#include "stew/experiments.hpp"
#include "stew/game.hpp"
#include "stew/opinion_distribution.hpp"
#include "stew/organizations.hpp"
#include "stew/platform.hpp"

using namespace stew;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Verdict()>& check) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = check();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!v.pass) ++failures;
  fmt::print("{} criterion {:>2} {}: {} [{:.2f}s]\n", v.pass ? "PASS" : "FAIL", id, name, v.detail,
             secs);
  std::fflush(stdout);
}

GameParams random_game(Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  GameParams p;
  p.alpha = 2.0 * u(rng);
  p.lambda_in = 1.0 + 2.0 * (1.0 - u(rng));  // (1, 3]
  p.lambda_out = u(rng);
  while (p.lambda_out <= 0.0) p.lambda_out = u(rng);
  return p;
}

Verdict theorem_iff() {
  Rng rng = make_stream(101, "acceptance theorem");
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double hats[] = {0.3, 0.5, 0.7};
  int bad = 0;
  for (int i = 0; i < 1000; ++i) {
    GameParams p = random_game(rng);
    p.n_hat = hats[std::uniform_int_distribution<int>(0, 2)(rng)];
    const double thr = oracle::silence_threshold({p.alpha, p.lambda_in, p.lambda_out, p.n_hat});
    double v = 0.5 + 0.5 * u(rng);
    while (std::fabs(v - thr) < 1e-4) v = 0.5 + 0.5 * u(rng);
    if ((symmetric_equilibrium(v, p) == 0.0) != (v < thr)) ++bad;
  }
  return {bad == 0, fmt::format("1000 tuples, {} failures", bad)};
}

Verdict best_response_oracle() {
  Rng rng = make_stream(102, "acceptance br");
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int bad = 0;
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    GameParams p = random_game(rng);
    p.n_hat = 0.05 + 0.9 * u(rng);
    const double go = 0.001 + 0.998 * u(rng);
    const double v = 0.5 + 0.5 * u(rng);
    const double grid = oracle::grid_argmax([&](double g) { return ex_ante_utility(g, go, v, p); });
    const double err = std::fabs(best_response(go, v, p) - grid);
    worst = std::max(worst, err);
    if (err > 1e-3) ++bad;
  }
  return {bad == 0, fmt::format("100 instances, {} failures, max |diff| {:.2e}", bad, worst)};
}

Verdict lemma_monte_carlo() {
  Rng rng = make_stream(103, "acceptance lemma");
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int bad = 0;
  double worst_z = 0.0;
  for (int f = 0; f < 20; ++f) {
    GameParams p = random_game(rng);
    p.n_hat = 0.5;
    const double d = 0.3 * u(rng);
    const double sigma = 0.05 + 0.25 * u(rng);
    const auto dist = OpinionDistribution::bimodal(0.5 - d, 0.5 + d, sigma, 0.5);
    const double g = 0.05 + 0.95 * u(rng), go = u(rng);
    const int n = 100000;
    double sum = 0.0, sq = 0.0;
    for (int k = 0; k < n; ++k) {
      const double x = utility(g, go, dist.sample(rng), p);
      sum += x;
      sq += x * x;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sq / n - mean * mean) / (n - 1));
    const double v_bar = oracle::clipped_mixture_value_mean(0.5 - d, 0.5 + d, sigma, 0.5);
    const double z = std::fabs(ex_ante_utility(g, go, v_bar, p) - mean) / se;
    worst_z = std::max(worst_z, z);
    if (z > 3.0) ++bad;
  }
  return {bad == 0, fmt::format("20 distributions, {} outside 3 SE, max z {:.2f}", bad, worst_z)};
}

Verdict posterior_tv() {
  Rng rng = make_stream(104, "acceptance posterior");
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int bad_tv = 0, bad_norm = 0, bad_outside = 0, compared = 0;
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const Side side = i % 2 == 0 ? Side::approval : Side::disapproval;
    const BetaBelief prior{0.5 + 9.5 * u(rng), 0.5 + 9.5 * u(rng), side};
    const ConstraintWindow w{0.05 + 0.25 * u(rng)};
    const Support s = support_of(side);
    const double signal = s.lo + s.width() * u(rng);
    const auto post = posterior_from_signal(prior, signal, w, 10000, rng, 100);
    const auto weights = post.belief.weights();
    double total = 0.0;
    for (double x : weights) total += x;
    if (std::fabs(total - 1.0) > 1e-9) ++bad_norm;
    if (post.rejected) continue;
    const double lo = std::max(s.lo, signal - w.tau / 2), hi = std::min(s.hi, signal + w.tau / 2);
    const auto ref = oracle::truncated_beta_bins(prior.a, prior.b, lo, hi, s.lo, s.hi, 100);
    const double tv = oracle::total_variation(weights, ref);
    worst = std::max(worst, tv);
    if (tv > 0.02) ++bad_tv;
    for (int k = 0; k < post.belief.bins(); ++k) {
      const double l = post.belief.bin_left(k), r = l + post.belief.bin_width();
      if ((r <= lo || l >= hi) && weights[k] != 0.0) ++bad_outside;
    }
    ++compared;
  }
  // the worked example: Beta(5,3), signal 0.9, tau 0.2
  const auto ex = posterior_from_signal(BetaBelief{5.0, 3.0, Side::approval}, 0.9,
                                        ConstraintWindow{0.2}, 10000, rng, 100);
  const double ex_tv = oracle::total_variation(
      ex.belief.weights(), oracle::truncated_beta_bins(5.0, 3.0, 0.8, 1.0, 0.5, 1.0, 100));
  const bool ok = bad_tv == 0 && bad_norm == 0 && bad_outside == 0 && ex_tv <= 0.02 && compared > 0;
  return {ok, fmt::format("{} posteriors vs truncation: max TV {:.4f}, {} over 0.02, {} unnormalized, "
                          "{} with mass outside; Beta(5,3)@0.9 TV {:.4f}",
                          compared, worst, bad_tv, bad_norm, bad_outside, ex_tv)};
}

const PolicyBook& default_book() {
  static const PolicyBook book = [] {
    const ExperimentConfig cfg;
    const OrgType orgs[] = {OrgType::participatory, OrgType::ideological_approval,
                            OrgType::ideological_disapproval};
    return solve_policy_book(planning_context(cfg), cfg.planning, orgs);
  }();
  return book;
}

double residual_of(const TabularMdp& m, const std::vector<double>& v) {
  double worst = 0.0;
  for (int s = 0; s < m.n_states; ++s) {
    double best = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < m.n_actions; ++a) {
      const auto i = static_cast<std::size_t>(s) * m.n_actions + a;
      best = std::max(best, m.reward[i] + m.discount * v[static_cast<std::size_t>(m.next[i])]);
    }
    worst = std::max(worst, std::fabs(best - v[static_cast<std::size_t>(s)]));
  }
  return worst;
}

Verdict value_iteration_certified() {
  double worst = 0.0;
  int solved = 0;
  for (const auto& [org, pair] : default_book()) {
    for (const SignalingPolicy* p : {&pair.approval, &pair.disapproval}) {
      if (p->mdp.n_states != 50 || p->mdp.discount != 0.9) return {false, "unexpected MDP shape"};
      worst = std::max(worst, residual_of(p->mdp, p->table.values));
      ++solved;
    }
  }
  const oracle::ToyMdp toy;
  TabularMdp m;
  m.n_states = m.n_actions = 2;
  m.discount = toy.discount;
  m.next = {0, 1, 1, 0};
  m.reward = {toy.r0, 0.0, toy.r1, 0.0};
  const auto t = value_iteration(m, 1e-12);
  const double toy_err = std::max(std::fabs(t.values[0] - toy.v0()), std::fabs(t.values[1] - toy.v1()));
  return {worst <= 1e-6 && toy_err <= 1e-9,
          fmt::format("{} MDPs, max Bellman residual {:.2e}; toy MDP error {:.2e}", solved, worst,
                      toy_err)};
}

Verdict policy_directions() {
  const ConstraintWindow window;
  const PolicyBook& book = default_book();
  auto count = [&](const SignalingPolicy& p, bool moderate) {
    int bad = 0, states = 0;
    const BeliefGrid& g = p.grid;
    const Support s = support_of(g.side);
    for (int k = 0; k < g.bins; ++k) {
      const double c = g.center(k);
      if (c - s.lo < window.tau || s.hi - c < window.tau) continue;
      ++states;
      const double xs = std::fabs(c - 0.5), xa = std::fabs(g.center(p.action(k)) - 0.5);
      if (moderate ? xa > xs + g.width() + 1e-12 : xa < xs - g.width() - 1e-12) ++bad;
    }
    return std::make_pair(bad, states);
  };
  const auto pa = count(book.at(OrgType::participatory).approval, true);
  const auto pd = count(book.at(OrgType::participatory).disapproval, true);
  const auto ia = count(book.at(OrgType::ideological_approval).approval, false);
  const auto id = count(book.at(OrgType::ideological_disapproval).disapproval, false);
  const int direction_bad = pa.first + pd.first + ia.first + id.first;

  auto best = [](const SignalingPolicy& p) { return p.max_reward(); };
  const double a_in = best(book.at(OrgType::ideological_approval).approval);
  const double a_out = best(book.at(OrgType::ideological_approval).disapproval);
  const double d_in = best(book.at(OrgType::ideological_disapproval).disapproval);
  const double d_out = best(book.at(OrgType::ideological_disapproval).approval);
  const bool out_higher = a_out > a_in && d_out > d_in;
  return {direction_bad == 0 && out_higher,
          fmt::format("direction violations {} over {} interior states; ideological max reward "
                      "out-group vs in-group: approval org {:.6f} vs {:.6f}, disapproval org {:.6f} "
                      "vs {:.6f} (out > in {})",
                      direction_bad, pa.second + pd.second + ia.second + id.second, a_out, a_in,
                      d_out, d_in, out_higher ? "holds" : "does not hold")};
}

Verdict steward_orderings() {
  ExperimentConfig cfg;
  const StewardReport r = run_steward(cfg);
  auto find = [&](StewardingMode m, double alpha) -> const StewardRun& {
    for (const auto& run : r.runs) {
      if (run.mode == m && run.alpha == alpha) return run;
    }
    throw std::runtime_error("missing steward run");
  };
  std::vector<std::string> broken;
  std::string levels;
  for (double alpha : {0.5, 0.6}) {
    const auto& p = find(StewardingMode::participatory, alpha);
    const auto& n = find(StewardingMode::none, alpha);
    const auto& i = find(StewardingMode::ideological_approval, alpha);
    levels += fmt::format(" a={}: part {:.3f} none {:.3f} ideo {:.3f} (distortion {:.3f}/{:.3f}/{:.3f});",
                          alpha, p.terminal_participation, n.terminal_participation,
                          i.terminal_participation, p.terminal_distortion, n.terminal_distortion,
                          i.terminal_distortion);
    if (!(p.terminal_participation > n.terminal_participation)) {
      broken.push_back(fmt::format("participatory > none at a={}", alpha));
    }
    if (!(n.terminal_participation > i.terminal_participation)) {
      broken.push_back(fmt::format("none > ideological at a={}", alpha));
    }
    if (!(i.terminal_distortion > p.terminal_distortion &&
          i.terminal_distortion > n.terminal_distortion)) {
      broken.push_back(fmt::format("ideological distortion largest at a={}", alpha));
    }
  }
  for (auto m : {StewardingMode::participatory, StewardingMode::ideological_approval,
                 StewardingMode::none}) {
    if (!(find(m, 0.5).terminal_participation >= find(m, 0.6).terminal_participation)) {
      broken.push_back(fmt::format("a=0.5 >= a=0.6 for {}", to_string(m)));
    }
  }
  std::string why = broken.empty() ? "all orderings hold" : "broken:";
  for (const auto& b : broken) why += " [" + b + "]";
  return {broken.empty(), why + ";" + levels};
}

Verdict platform_battery() {
  ExperimentConfig cfg;
  const PlatformReport r = run_platform_experiment(cfg);
  const double d = r.mean_opinion_d;
  const bool d_ok = std::isfinite(d) && d > 0.1 && d < 0.8;
  int disapproval = 0;
  for (const auto& row : r.battery.rows()) {
    if (row[1] == "disapproval" && row.back() == "true") ++disapproval;
  }
  return {r.approval_passes >= 8 && d_ok,
          fmt::format("battery passes {}/{} seeds (approval group; disapproval {}/{}); "
                      "ideological-vs-participatory opinion d = {:.3f} over {} seeds",
                      r.approval_passes, r.seeds, disapproval, r.seeds, d, r.opinion_d.size())};
}

Verdict cohens_d_formula() {
  const double d = cohens_d({100, 0.703, 0.104}, {100, 0.666, 0.114});
  return {std::fabs(d - 0.339) <= 0.002, fmt::format("d = {:.4f}", d)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& exe, const std::string& args) {
  const std::string cmd = exe + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Verdict determinism(const std::string& exe, const fs::path& root) {
  fs::remove_all(root);
  int compared = 0, differ = 0;
  std::string notes;
  for (const std::string sub : {"equilibrium --check-theorem", "policy", "steward", "platform"}) {
    const std::string name = sub.substr(0, sub.find(' '));
    const fs::path a = root / (name + "_a"), b = root / (name + "_b"), c = root / (name + "_c");
    if (run_cli(exe, fmt::format("{} --seed 3 --out {}", sub, a.string())) != 0 ||
        run_cli(exe, fmt::format("{} --seed 3 --out {}", sub, b.string())) != 0 ||
        run_cli(exe, fmt::format("{} --config {} --out {}", sub, (a / "resolved_config.ini").string(),
                                 c.string())) != 0) {
      return {false, name + " run failed"};
    }
    for (const auto& e : fs::directory_iterator(a)) {
      for (const fs::path& other : {b / e.path().filename(), c / e.path().filename()}) {
        ++compared;
        if (!fs::exists(other) || slurp(e.path()) != slurp(other)) {
          ++differ;
          notes += " " + other.string();
        }
      }
    }
  }
  return {differ == 0 && compared > 0,
          fmt::format("{} file comparisons (same flags twice, and via resolved config), {} differ{}",
                      compared, differ, notes)};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: stew_acceptance <stewsim executable> [scratch dir]\n";
    return 2;
  }
  const std::string exe = argv[1];
  const fs::path scratch =
      argc > 2 ? fs::path(argv[2]) : fs::temp_directory_path() / "stewsim_acceptance";

  report(1, "silence iff below threshold", theorem_iff);
  report(2, "best response vs grid maximizer", best_response_oracle);
  report(3, "ex-ante utility vs Monte Carlo", lemma_monte_carlo);
  report(4, "window posterior vs truncation", posterior_tv);
  report(5, "value iteration certified", value_iteration_certified);
  report(6, "policy directions", policy_directions);
  report(7, "stewarding orderings", steward_orderings);
  report(8, "platform community battery", platform_battery);
  report(9, "Cohen's d formula", cohens_d_formula);
  report(10, "byte-identical reruns", [&] { return determinism(exe, scratch); });

  fmt::print("{} of 10 criteria passed\n", 10 - failures);
  return failures == 0 ? 0 : 1;
}
