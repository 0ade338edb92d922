#include "stew/game.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "stew/errors.hpp"

namespace stew {
namespace {

void require_unit(double x, const char* name) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError(std::string(name) + " must lie in [0,1], got " + std::to_string(x));
  }
}

void require_value(double v, const char* name) {
  if (!(v >= 0.5 && v <= 1.0)) {
    throw DomainError(std::string(name) + " must lie in [0.5,1], got " + std::to_string(v));
  }
}

// gamma_self^(1 - gamma_other) with 0^0 = 1.
double in_group_power(double gamma_self, double gamma_other) {
  const double exponent = 1.0 - gamma_other;
  if (exponent == 0.0) return 1.0;
  return std::pow(gamma_self, exponent);
}

double expression_payoff(double gamma_self, double gamma_other, double value, double w_in,
                         double w_out, const GameParams& p) {
  return w_in * value * p.lambda_in * in_group_power(gamma_self, gamma_other) +
         w_out * value * std::pow(p.lambda_out, gamma_other) * gamma_self - p.alpha * gamma_self;
}

double bisect_fixed_point(double lo, double hi, double g_lo, double v_bar, const GameParams& p) {
  auto g = [&](double x) { return best_response(x, v_bar, p) - x; };
  double mid = lo;
  double g_mid = g_lo;
  for (int it = 0; it < kBisectionMaxIter; ++it) {
    mid = 0.5 * (lo + hi);
    g_mid = g(mid);
    if (std::fabs(g_mid) <= kFixedPointResidual * 1e-3 || hi - lo <= 1e-15) break;
    if ((g_mid > 0.0) == (g_lo > 0.0)) {
      lo = mid;
      g_lo = g_mid;
    } else {
      hi = mid;
    }
  }
  if (std::fabs(g_mid) > kFixedPointResidual) {
    throw SolverError("bisection did not reach the fixed-point residual", lo, hi);
  }
  return mid;
}

}  // namespace

void GameParams::validate() const {
  if (!(alpha >= 0.0)) throw DomainError("alpha must be >= 0");
  if (!(lambda_in > 1.0)) throw DomainError("lambda_in must be > 1");
  if (!(lambda_out > 0.0 && lambda_out < 1.0)) throw DomainError("lambda_out must lie in (0,1)");
  require_unit(n_hat, "n_hat");
  require_unit(gamma_silence, "gamma_silence");
}

double opinion_value(double opinion) {
  require_unit(opinion, "opinion");
  return opinion >= 0.5 ? opinion : 1.0 - opinion;
}

double utility(double gamma_self, double gamma_other, double opinion, const GameParams& params) {
  require_unit(gamma_self, "gamma_self");
  require_unit(gamma_other, "gamma_other");
  require_unit(opinion, "opinion");
  if (opinion >= 0.5) {
    return expression_payoff(gamma_self, gamma_other, opinion, params.n_hat, 1.0 - params.n_hat,
                             params);
  }
  return expression_payoff(gamma_self, gamma_other, 1.0 - opinion, 1.0 - params.n_hat,
                           params.n_hat, params);
}

double ex_ante_utility(double gamma_self, double gamma_other, double v_bar,
                       const GameParams& params) {
  require_unit(gamma_self, "gamma_self");
  require_unit(gamma_other, "gamma_other");
  require_value(v_bar, "v_bar");
  return expression_payoff(gamma_self, gamma_other, v_bar, params.n_hat, 1.0 - params.n_hat,
                           params);
}

double best_response(double gamma_other, double v, const GameParams& params) {
  require_unit(gamma_other, "gamma_other");
  require_value(v, "v");
  const double n = params.n_hat;

  // Linear payoff at gamma_other = 0: corner solution by sign of the slope.
  if (gamma_other == 0.0) {
    const double slope = n * v * params.lambda_in + (1.0 - n) * v - params.alpha;
    return slope > 0.0 ? 1.0 : 0.0;
  }

  const double denom = params.alpha - (1.0 - n) * v * std::pow(params.lambda_out, gamma_other);
  if (denom <= 0.0) return 1.0;
  const double base = n * v * params.lambda_in * (1.0 - gamma_other) / denom;
  if (base <= 0.0) return 0.0;
  const double response = std::pow(base, 1.0 / gamma_other);
  if (!std::isfinite(response)) return 1.0;
  return std::clamp(response, 0.0, 1.0);
}

double silence_threshold(const GameParams& params) {
  return params.alpha / (1.0 - params.n_hat * (1.0 - params.lambda_in));
}

std::vector<double> symmetric_fixed_points(double v_bar, const GameParams& params) {
  require_value(v_bar, "v_bar");
  auto g = [&](double x) { return best_response(x, v_bar, params) - x; };

  std::vector<double> grid(kBracketCells + 1);
  std::vector<double> values(kBracketCells + 1);
  for (int k = 0; k <= kBracketCells; ++k) {
    grid[k] = static_cast<double>(k) / kBracketCells;
    values[k] = g(grid[k]);
  }

  std::vector<double> roots;
  for (int k = 0; k < kBracketCells; ++k) {
    if (values[k] == 0.0) {
      roots.push_back(grid[k]);
    } else if (values[k + 1] != 0.0 && (values[k] > 0.0) != (values[k + 1] > 0.0)) {
      roots.push_back(bisect_fixed_point(grid[k], grid[k + 1], values[k], v_bar, params));
    }
  }
  if (values[kBracketCells] == 0.0) roots.push_back(1.0);
  return roots;
}

double symmetric_equilibrium(double v_bar, const GameParams& params) {
  require_value(v_bar, "v_bar");
  if (v_bar < silence_threshold(params)) return 0.0;
  const auto roots = symmetric_fixed_points(v_bar, params);
  if (roots.empty()) {
    throw SolverError("no symmetric fixed point bracketed on [0,1]", 0.0, 1.0);
  }
  return roots.back();
}

double interim_response(double opinion, double gamma_ex_ante, const GameParams& params) {
  return best_response(gamma_ex_ante, opinion_value(opinion), params);
}

}  // namespace stew
