#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "oracles.hpp"
#include "stew/errors.hpp"
#include "stew/platform.hpp"

using namespace stew;

namespace {

PlatformConfig small_config(std::uint64_t seed = 0) {
  PlatformConfig cfg;
  cfg.n_users = 40;
  cfg.timesteps = 24;
  cfg.n_samples = 2000;
  cfg.seed = seed;
  return cfg;
}

const PolicyBook& book() {
  static const PolicyBook b = solve_platform_policies(PlatformConfig{});
  return b;
}

const PlatformRun& small_run() {
  static const PlatformRun r = run_platform(small_config(), book());
  return r;
}

ArmStats arm(int pulls, int reward) { return ArmStats{pulls, reward}; }

}  // namespace

TEST(Ucb, UnpulledArmsFirst) {
  EXPECT_EQ(ucb_select({arm(0, 0), arm(0, 0)}), Arm::participatory);
  EXPECT_EQ(ucb_select({arm(1, 1), arm(0, 0)}), Arm::ideological);
  EXPECT_EQ(ucb_select({arm(0, 0), arm(3, 3)}), Arm::participatory);
}

TEST(Ucb, IndexArithmetic) {
  // t=20: bonus sqrt(2 ln 20 / 10) = 0.774 for both
  EXPECT_NEAR(ucb_index(arm(10, 9), 20), 0.9 + 0.774, 1e-3);
  EXPECT_NEAR(ucb_index(arm(10, 2), 20), 0.2 + 0.774, 1e-3);
  EXPECT_EQ(ucb_select({arm(10, 9), arm(10, 2)}), Arm::participatory);
  EXPECT_EQ(ucb_select({arm(10, 2), arm(10, 9)}), Arm::ideological);
  // t=101: 0.5 + 0.304 vs 0 + 3.04
  EXPECT_NEAR(ucb_index(arm(100, 50), 101), 0.5 + 0.304, 1e-3);
  EXPECT_NEAR(ucb_index(arm(1, 0), 101), 3.04, 1e-2);
  EXPECT_EQ(ucb_select({arm(100, 50), arm(1, 0)}), Arm::ideological);
}

TEST(Ucb, TiesGoToParticipatory) {
  EXPECT_EQ(ucb_select({arm(5, 2), arm(5, 2)}), Arm::participatory);
}

TEST(Recommender, Credit) {
  RecommenderState r(2);
  r.credit(1, Arm::ideological, true);
  r.credit(1, Arm::ideological, false);
  r.credit(1, Arm::participatory, true);
  EXPECT_EQ(r.total_pulls(1), 3);
  EXPECT_EQ(r.users[1][1].pulls, 2);
  EXPECT_EQ(r.users[1][1].reward, 1);
  EXPECT_EQ(r.total_pulls(0), 0);
}

TEST(SideChoice, Probabilities) {
  EXPECT_DOUBLE_EQ(approval_side_probability(0.3, 0.3), 0.5);
  // shifted weights 2 (disapproval) vs 1 (approval)
  EXPECT_NEAR(1.0 - approval_side_probability(0.0, 1.0), 2.0 / 3.0, 1e-12);
  EXPECT_DOUBLE_EQ(approval_side_probability(-1.0, -1.0), 0.5);
  EXPECT_DOUBLE_EQ(approval_side_probability(-1.0, 0.0), 0.0);
}

TEST(SideChoice, SeededDeterminism) {
  const auto& pair = book().at(OrgType::ideological_approval);
  Agent user;
  user.opinion = 0.7;
  Rng a = make_stream(5, "signals"), b = make_stream(5, "signals");
  for (int i = 0; i < 50; ++i) EXPECT_EQ(choose_signal_side(pair, user, a), choose_signal_side(pair, user, b));
}

TEST(Arms, Alignment) {
  EXPECT_EQ(aligned_org(0.7), OrgType::ideological_approval);
  EXPECT_EQ(aligned_org(0.5), OrgType::ideological_approval);
  EXPECT_EQ(aligned_org(0.2), OrgType::ideological_disapproval);
  EXPECT_EQ(org_of(Arm::participatory, 0.2), OrgType::participatory);
}

TEST(CohensD, ReferenceTableValue) {
  const SampleStats ideo{100, 0.703, 0.104};
  const SampleStats part{100, 0.666, 0.114};
  EXPECT_NEAR(cohens_d(ideo, part), 0.339, 0.002);
  EXPECT_NEAR(cohens_d(ideo, part), oracle::pooled_d(0.703, 0.104, 0.666, 0.114), 1e-12);
}

TEST(CohensD, TrivialCases) {
  EXPECT_EQ(cohens_d({10, 0.4, 0.1}, {10, 0.4, 0.1}), 0.0);
  EXPECT_DOUBLE_EQ(cohens_d({10, 0.6, 0.1}, {10, 0.5, 0.1}), 1.0);
  EXPECT_THROW(cohens_d({10, 0.6, 0.0}, {10, 0.5, 0.0}), DomainError);
  // weighted pooling
  const double w = cohens_d({5, 0.6, 0.1}, {21, 0.5, 0.2}, true);
  EXPECT_NEAR(w, 0.1 / std::sqrt((4 * 0.01 + 20 * 0.04) / 24.0), 1e-12);
}

TEST(SampleStats, MatchesOracle) {
  const std::vector<double> x{0.1, 0.4, 0.35, 0.9, 0.55};
  const auto s = sample_stats(x);
  EXPECT_EQ(s.n, 5);
  EXPECT_NEAR(s.mean, 0.46, 1e-12);
  EXPECT_NEAR(s.sd, oracle::sample_sd(x), 1e-12);
  EXPECT_EQ(sample_stats({0.3}).sd, 0.0);
}

TEST(Platform, OpinionsNeverChange) {
  const auto& r = small_run();
  for (std::size_t i = 0; i < r.state.users.size(); ++i) {
    EXPECT_EQ(r.state.users[i].opinion, r.state.initial_opinions[i]);
  }
}

TEST(Platform, RewardBookkeeping) {
  const auto& r = small_run();
  for (std::size_t i = 0; i < r.state.users.size(); ++i) {
    int expressed = 0;
    for (const auto& step : r.state.history) expressed += step[i].expressed;
    const ArmPair& a = r.state.recommender.users[i];
    EXPECT_EQ(a[0].reward + a[1].reward, expressed);
    EXPECT_EQ(a[0].pulls + a[1].pulls, static_cast<int>(r.state.history.size()));
    EXPECT_LE(a[0].reward, a[0].pulls);
    EXPECT_LE(a[1].reward, a[1].pulls);
  }
}

TEST(Platform, ArmAlignment) {
  const auto& r = small_run();
  for (const auto& step : r.state.history) {
    for (std::size_t i = 0; i < step.size(); ++i) {
      EXPECT_EQ(step[i].org, org_of(step[i].arm, r.state.users[i].opinion));
      const OrgType opposing = side_of(r.state.users[i].opinion) == Side::approval
                                   ? OrgType::ideological_disapproval
                                   : OrgType::ideological_approval;
      EXPECT_NE(step[i].org, opposing);
    }
  }
}

TEST(Platform, CommunitiesMatchHistory) {
  const auto& r = small_run();
  std::map<OrgType, std::vector<char>> member;
  for (auto org : {OrgType::participatory, OrgType::ideological_approval, OrgType::ideological_disapproval}) {
    member[org].assign(r.state.users.size(), 0);
  }
  for (std::size_t t = 0; t < r.state.history.size(); ++t) {
    for (std::size_t i = 0; i < r.state.users.size(); ++i) {
      const auto& s = r.state.history[t][i];
      if (!s.expressed) continue;
      member[s.org][i] = 1;
    }
  }
  for (const auto& c : r.state.communities) {
    EXPECT_EQ(c.member, member[c.org]);
    EXPECT_EQ(c.record.size(), r.state.history.size());
  }
  // the ideological-approval community only ever holds approval users
  for (const auto& rec : r.state.community(OrgType::ideological_approval).record) {
    for (const auto& [user, opinion] : rec) EXPECT_GE(opinion, 0.5);
  }
  for (const auto& rec : r.state.community(OrgType::ideological_disapproval).record) {
    for (const auto& [user, opinion] : rec) EXPECT_LT(opinion, 0.5);
  }
}

TEST(Platform, CommunityUpdatesAreOneSidedForIdeological) {
  // Window updates keep the pseudo-count total and community updates add exactly one,
  // so the change in concentration reveals which sides a user was updated on.
  PlatformConfig cfg = small_config(3);
  PlatformState state = init_platform(cfg);
  for (int t = 0; t < 12; ++t) {
    const auto before = state.users;
    platform_step(state, book(), cfg);
    const auto& steps = state.history.back();
    std::map<OrgType, std::pair<bool, bool>> visible;  // approval, disapproval expressers
    for (std::size_t i = 0; i < steps.size(); ++i) {
      if (!steps[i].expressed) continue;
      auto& v = visible[steps[i].org];
      (side_of(state.users[i].opinion) == Side::approval ? v.first : v.second) = true;
    }
    for (std::size_t i = 0; i < steps.size(); ++i) {
      const double da = state.users[i].approval_belief.concentration() -
                        before[i].approval_belief.concentration();
      const double dd = state.users[i].disapproval_belief.concentration() -
                        before[i].disapproval_belief.concentration();
      if (!steps[i].expressed) {
        EXPECT_NEAR(da, 0.0, 1e-9);
        EXPECT_NEAR(dd, 0.0, 1e-9);
        continue;
      }
      const OrgType org = steps[i].org;
      const auto v = visible[org];
      const bool expect_a = v.first && org != OrgType::ideological_disapproval;
      const bool expect_d = v.second && org != OrgType::ideological_approval;
      EXPECT_NEAR(da, expect_a ? 1.0 : 0.0, 1e-9) << "t=" << t << " user=" << i;
      EXPECT_NEAR(dd, expect_d ? 1.0 : 0.0, 1e-9) << "t=" << t << " user=" << i;
    }
  }
}

TEST(Platform, StatsIgnoreFirstHalf) {
  const auto& r = small_run();
  PlatformState scrambled = r.state;
  const std::size_t half = scrambled.history.size() / 2;
  for (std::size_t t = 0; t < half; ++t) {
    for (auto& s : scrambled.history[t]) {
      s.expressed = !s.expressed;
      s.arm = s.arm == Arm::participatory ? Arm::ideological : Arm::participatory;
    }
  }
  const auto a = community_stats(r.state);
  const auto b = community_stats(scrambled);
  EXPECT_EQ(a.window_start, static_cast<int>(half));
  EXPECT_EQ(a.classes, b.classes);
  for (std::size_t k = 0; k < a.effects.size(); ++k) EXPECT_EQ(a.effects[k].d, b.effects[k].d);
}

TEST(Platform, ClassMeansMatchIndependentTabulation) {
  const auto& r = small_run();
  const auto& st = r.stats;
  const int from = static_cast<int>(r.state.history.size()) / 2;
  for (std::size_t i = 0; i < r.state.users.size(); ++i) {
    int p = 0, q = 0;
    for (std::size_t t = static_cast<std::size_t>(from); t < r.state.history.size(); ++t) {
      const auto& s = r.state.history[t][i];
      if (!s.expressed) continue;
      (s.arm == Arm::participatory ? p : q)++;
    }
    if (p == 0 && q == 0) EXPECT_EQ(st.classes[i], CommunityClass::silent);
    if (p > q) EXPECT_EQ(st.classes[i], CommunityClass::participatory);
    if (q > p) EXPECT_EQ(st.classes[i], CommunityClass::ideological);
    if (p == q && p > 0) EXPECT_NE(st.classes[i], CommunityClass::silent);
  }
  for (Side g : {Side::approval, Side::disapproval}) {
    for (auto c : {CommunityClass::participatory, CommunityClass::ideological, CommunityClass::silent}) {
      std::vector<double> op, out;
      for (std::size_t i = 0; i < r.state.users.size(); ++i) {
        const auto& u = r.state.users[i];
        if (st.classes[i] != c || u.side() != g) continue;
        op.push_back(u.opinion);
        out.push_back(u.belief_out().mean());
      }
      const auto& s = st.summary(c, g);
      EXPECT_EQ(s.empty, op.empty());
      EXPECT_EQ(s.at(Measure::opinion).n, static_cast<int>(op.size()));
      if (op.empty()) continue;
      double m = 0.0;
      for (double x : op) m += x;
      EXPECT_NEAR(s.at(Measure::opinion).mean, m / op.size(), 1e-12);
      if (out.size() > 1) EXPECT_NEAR(s.at(Measure::belief_out).sd, oracle::sample_sd(out), 1e-12);
    }
  }
}

TEST(Platform, EmptyClassesAreFlagged) {
  PlatformState state = init_platform(small_config());
  state.history.assign(4, std::vector<UserStep>(state.users.size()));  // nobody ever expressed
  const auto st = community_stats(state);
  for (std::size_t i = 0; i < state.users.size(); ++i) EXPECT_EQ(st.classes[i], CommunityClass::silent);
  EXPECT_TRUE(st.summary(CommunityClass::participatory, Side::approval).empty);
  EXPECT_FALSE(st.effect(CommunityClass::ideological, CommunityClass::participatory, Measure::opinion,
                         Side::approval)
                   .has_value());
  const auto b = evaluate_battery(st);
  EXPECT_FALSE(b.pass());
}

TEST(Platform, SeededReproducibility) {
  PlatformConfig cfg = small_config(7);
  const auto a = run_platform(cfg, book());
  cfg.threads = 3;
  const auto b = run_platform(cfg, book());
  EXPECT_EQ(a.stats.classes, b.stats.classes);
  for (std::size_t i = 0; i < a.state.users.size(); ++i) {
    EXPECT_EQ(a.state.users[i].approval_belief.a, b.state.users[i].approval_belief.a);
    EXPECT_EQ(a.state.users[i].disapproval_belief.b, b.state.users[i].disapproval_belief.b);
  }
}

TEST(Platform, ConfigValidation) {
  PlatformConfig cfg;
  cfg.timesteps = 1;
  EXPECT_THROW(init_platform(cfg), DomainError);
}
