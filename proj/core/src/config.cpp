#include "stew/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "stew/errors.hpp"

namespace stew {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& raw) {
  const std::string text = trim(raw);
  T value{};
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (text.empty() || ec != std::errc() || ptr != last) {
    throw ConfigError(key, "not a valid number: '" + raw + "'");
  }
  return value;
}

bool parse_bool(const std::string& key, const std::string& raw) {
  const std::string text = trim(raw);
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError(key, "expected true or false, got '" + raw + "'");
}

std::vector<std::string> split_list(const std::string& raw) {
  std::vector<std::string> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string num(double x) { return fmt::format("{:.9g}", x); }

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError(key, what);
}

struct Field {
  std::string section;
  std::string name;
  std::function<void(ExperimentConfig&, const std::string& key, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

Field real(std::string section, std::string name, double ExperimentConfig::*member,
           std::function<bool(double)> ok, std::string what) {
  return {section, name,
          [=](ExperimentConfig& c, const std::string& key, const std::string& raw) {
            const double v = parse_number<double>(key, raw);
            require(ok(v), key, what);
            c.*member = v;
          },
          [=](const ExperimentConfig& c) { return num(c.*member); }};
}

template <class Block, class T>
Field nested(std::string section, std::string name, Block ExperimentConfig::*block,
             T Block::*member, std::function<bool(T)> ok, std::string what) {
  return {section, name,
          [=](ExperimentConfig& c, const std::string& key, const std::string& raw) {
            T v{};
            if constexpr (std::is_same_v<T, bool>) {
              v = parse_bool(key, raw);
            } else {
              v = parse_number<T>(key, raw);
            }
            require(ok(v), key, what);
            (c.*block).*member = v;
          },
          [=](const ExperimentConfig& c) {
            const T v = (c.*block).*member;
            if constexpr (std::is_same_v<T, bool>) {
              return std::string(v ? "true" : "false");
            } else if constexpr (std::is_floating_point_v<T>) {
              return num(v);
            } else {
              return std::to_string(v);
            }
          }};
}

const std::vector<Field>& fields() {
  using C = ExperimentConfig;
  const auto positive = [](double v) { return v > 0.0; };
  const auto positive_int = [](int v) { return v >= 1; };
  const auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  static const std::vector<Field> table = {
      {"run", "seed",
       [](C& c, const std::string& key, const std::string& raw) {
         c.seed = parse_number<std::uint64_t>(key, raw);
       },
       [](const C& c) { return std::to_string(c.seed); }},
      {"run", "threads",
       [](C& c, const std::string& key, const std::string& raw) {
         c.threads = parse_number<int>(key, raw);
         require(c.threads >= 1, key, "must be >= 1");
       },
       [](const C& c) { return std::to_string(c.threads); }},
      nested<GameParams, double>("game", "alpha", &C::game, &GameParams::alpha,
                                 [](double v) { return v >= 0.0; }, "must be >= 0"),
      nested<GameParams, double>("game", "lambda_in", &C::game, &GameParams::lambda_in,
                                 [](double v) { return v > 1.0; }, "must be > 1"),
      nested<GameParams, double>("game", "lambda_out", &C::game, &GameParams::lambda_out,
                                 [](double v) { return v > 0.0 && v < 1.0; }, "must lie in (0,1)"),
      nested<GameParams, double>("game", "n_hat", &C::game, &GameParams::n_hat, unit,
                                 "must lie in [0,1]"),
      nested<GameParams, double>("game", "gamma_silence", &C::game, &GameParams::gamma_silence,
                                 unit, "must lie in [0,1]"),
      real("opinions", "mu1", &C::mu1, unit, "must lie in [0,1]"),
      real("opinions", "mu2", &C::mu2, unit, "must lie in [0,1]"),
      real("opinions", "sigma", &C::sigma, positive, "must be > 0"),
      real("opinions", "mix", &C::mix, unit, "must lie in [0,1]"),
      nested<ConstraintWindow, double>("beliefs", "tau", &C::window, &ConstraintWindow::tau,
                                       positive, "must be > 0"),
      {"beliefs", "n_samples",
       [](C& c, const std::string& key, const std::string& raw) {
         c.n_samples = parse_number<int>(key, raw);
         require(c.n_samples >= 1, key, "must be >= 1");
       },
       [](const C& c) { return std::to_string(c.n_samples); }},
      {"beliefs", "posterior_bins",
       [](C& c, const std::string& key, const std::string& raw) {
         c.posterior_bins = parse_number<int>(key, raw);
         require(c.posterior_bins >= 1, key, "must be >= 1");
       },
       [](const C& c) { return std::to_string(c.posterior_bins); }},
      nested<BeliefInit, double>("beliefs", "approval_a", &C::belief_init, &BeliefInit::approval_a,
                                 positive, "must be > 0"),
      nested<BeliefInit, double>("beliefs", "approval_b", &C::belief_init, &BeliefInit::approval_b,
                                 positive, "must be > 0"),
      nested<BeliefInit, double>("beliefs", "disapproval_a", &C::belief_init,
                                 &BeliefInit::disapproval_a, positive, "must be > 0"),
      nested<BeliefInit, double>("beliefs", "disapproval_b", &C::belief_init,
                                 &BeliefInit::disapproval_b, positive, "must be > 0"),
      nested<PlanningSettings, int>("planning", "bins", &C::planning, &PlanningSettings::bins,
                                    [](int v) { return v >= 2; }, "must be >= 2"),
      nested<PlanningSettings, double>("planning", "discount", &C::planning,
                                       &PlanningSettings::discount,
                                       [](double v) { return v >= 0.0 && v < 1.0; },
                                       "must lie in [0,1)"),
      nested<PlanningSettings, double>("planning", "tol", &C::planning, &PlanningSettings::tol,
                                       positive, "must be > 0"),
      real("planning", "concentration", &C::planning_concentration, positive, "must be > 0"),
      nested<EquilibriumSweep, double>("equilibrium", "v_min", &C::equilibrium,
                                       &EquilibriumSweep::v_min,
                                       [](double v) { return v >= 0.5 && v <= 1.0; },
                                       "must lie in [0.5,1]"),
      nested<EquilibriumSweep, double>("equilibrium", "v_max", &C::equilibrium,
                                       &EquilibriumSweep::v_max,
                                       [](double v) { return v >= 0.5 && v <= 1.0; },
                                       "must lie in [0.5,1]"),
      nested<EquilibriumSweep, int>("equilibrium", "v_steps", &C::equilibrium,
                                    &EquilibriumSweep::v_steps, [](int v) { return v >= 2; },
                                    "must be >= 2"),
      nested<EquilibriumSweep, int>("equilibrium", "gamma_steps", &C::equilibrium,
                                    &EquilibriumSweep::gamma_steps, [](int v) { return v >= 2; },
                                    "must be >= 2"),
      nested<EquilibriumSweep, int>("equilibrium", "check_trials", &C::equilibrium,
                                    &EquilibriumSweep::check_trials, positive_int,
                                    "must be >= 1"),
      nested<StewardPlan, int>("steward", "agents", &C::steward, &StewardPlan::agents,
                               positive_int, "must be >= 1"),
      nested<StewardPlan, int>("steward", "timesteps", &C::steward, &StewardPlan::timesteps,
                               positive_int, "must be >= 1"),
      nested<StewardPlan, int>("steward", "batches", &C::steward, &StewardPlan::batches,
                               positive_int, "must be >= 1"),
      nested<StewardPlan, double>("steward", "spread", &C::steward, &StewardPlan::spread,
                                  [](double v) { return v >= 0.0; }, "must be >= 0"),
      {"steward", "modes",
       [](C& c, const std::string& key, const std::string& raw) {
         std::vector<StewardingMode> modes;
         for (const auto& item : split_list(raw)) {
           try {
             modes.push_back(parse_mode(item));
           } catch (const ConfigError& e) {
             throw ConfigError(key, e.what());
           }
         }
         require(!modes.empty(), key, "needs at least one mode");
         c.steward.modes = std::move(modes);
       },
       [](const C& c) {
         std::string out;
         for (auto m : c.steward.modes) out += (out.empty() ? "" : ",") + std::string(to_string(m));
         return out;
       }},
      {"steward", "alphas",
       [](C& c, const std::string& key, const std::string& raw) {
         std::vector<double> alphas;
         for (const auto& item : split_list(raw)) {
           const double a = parse_number<double>(key, item);
           require(a >= 0.0, key, "alphas must be >= 0");
           alphas.push_back(a);
         }
         require(!alphas.empty(), key, "needs at least one alpha");
         c.steward.alphas = std::move(alphas);
       },
       [](const C& c) {
         std::string out;
         for (double a : c.steward.alphas) out += (out.empty() ? "" : ",") + num(a);
         return out;
       }},
      nested<PlatformPlan, int>("platform", "users", &C::platform, &PlatformPlan::users,
                                positive_int, "must be >= 1"),
      nested<PlatformPlan, int>("platform", "timesteps", &C::platform, &PlatformPlan::timesteps,
                                [](int v) { return v >= 2; }, "must be >= 2"),
      nested<PlatformPlan, int>("platform", "seeds", &C::platform, &PlatformPlan::seeds,
                                positive_int, "must be >= 1"),
      nested<PlatformPlan, double>("platform", "spread", &C::platform, &PlatformPlan::spread,
                                   [](double v) { return v >= 0.0; }, "must be >= 0"),
      nested<PlatformPlan, bool>("platform", "weighted_d", &C::platform, &PlatformPlan::weighted_d,
                                 [](bool) { return true; }, ""),
  };
  return table;
}

const Field* find_field(const std::string& section, const std::string& name) {
  for (const Field& f : fields()) {
    if (f.section == section && f.name == name) return &f;
  }
  return nullptr;
}

void cross_check(const ExperimentConfig& c) {
  require(c.mu1 <= c.mu2, "opinions.mu1", "must not exceed opinions.mu2");
  require(c.equilibrium.v_min <= c.equilibrium.v_max, "equilibrium.v_min",
          "must not exceed equilibrium.v_max");
  try {
    c.game.validate();
  } catch (const DomainError& e) {
    throw ConfigError("game", e.what());
  }
}

}  // namespace

StewardingMode parse_mode(const std::string& text) {
  for (auto m : {StewardingMode::participatory, StewardingMode::ideological_approval,
                 StewardingMode::ideological_disapproval, StewardingMode::none}) {
    if (text == to_string(m)) return m;
  }
  throw ConfigError("", "unknown stewarding mode '" + text + "'");
}

ExperimentConfig parse_config(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("", std::string("malformed config: ") + e.message() + " (line " +
                              std::to_string(e.line()) + ")");
  }
  ExperimentConfig cfg;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError(section, "keys must live inside a [section]");
    for (const auto& [name, value] : body) {
      const std::string key = section + "." + name;
      const Field* f = find_field(section, name);
      if (f == nullptr) throw ConfigError(key, "unknown key");
      f->set(cfg, key, value.data());
    }
  }
  cross_check(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
  return parse_config(in);
}

std::string render_config(const ExperimentConfig& cfg) {
  std::string out;
  std::string section;
  for (const Field& f : fields()) {
    if (f.section != section) {
      if (!section.empty()) out += "\n";
      section = f.section;
      out += "[" + section + "]\n";
    }
    out += f.name + " = " + f.get(cfg) + "\n";
  }
  return out;
}

SimConfig sim_config(const ExperimentConfig& cfg, StewardingMode mode, double alpha) {
  SimConfig sim;
  sim.n_agents = cfg.steward.agents;
  sim.timesteps = cfg.steward.timesteps;
  sim.batches = cfg.steward.batches;
  sim.opinions = cfg.opinions();
  sim.game = cfg.game;
  sim.game.alpha = alpha;
  sim.window = cfg.window;
  sim.mode = mode;
  sim.belief_init = cfg.belief_init;
  sim.belief_init.spread = cfg.steward.spread;
  sim.seed = cfg.seed;
  sim.n_samples = cfg.n_samples;
  sim.posterior_bins = cfg.posterior_bins;
  sim.planning = cfg.planning;
  sim.planning_concentration = cfg.planning_concentration;
  sim.threads = cfg.threads;
  return sim;
}

PlatformConfig platform_config(const ExperimentConfig& cfg, std::uint64_t seed) {
  PlatformConfig p;
  p.n_users = cfg.platform.users;
  p.timesteps = cfg.platform.timesteps;
  p.opinions = cfg.opinions();
  p.game = cfg.game;
  p.window = cfg.window;
  p.belief_init = cfg.belief_init;
  p.belief_init.spread = cfg.platform.spread;
  p.seed = seed;
  p.n_samples = cfg.n_samples;
  p.posterior_bins = cfg.posterior_bins;
  p.planning = cfg.planning;
  p.planning_concentration = cfg.planning_concentration;
  p.threads = cfg.threads;
  return p;
}

PlanningContext planning_context(const ExperimentConfig& cfg) {
  return planning_context(sim_config(cfg, StewardingMode::participatory, cfg.game.alpha));
}

}  // namespace stew
