#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <unordered_map>
#include <vector>

#include "stew/game.hpp"

namespace stew {

/// Mean opinion value implied by beliefs about the two group means:
/// n_hat * o_A + (1 - n_hat) * (1 - o_D), with each mean clamped to its side.
double belief_v_bar(double approval_mean, double disapproval_mean, const GameParams& params);

/// Memoizes symmetric_equilibrium by v_bar for one fixed GameParams.
class EquilibriumCache {
 public:
  explicit EquilibriumCache(const GameParams& params) : params_(params) {}
  double operator()(double v_bar);
  const GameParams& params() const noexcept { return params_; }

 private:
  GameParams params_;
  std::unordered_map<double, double> solved_;
};

/// Aggregates of one round of expression decisions.
struct ExpressionSummary {
  double participation = 0.0;
  int expressed_approval = 0;
  int expressed_disapproval = 0;
  double mean_expressed_approval = std::numeric_limits<double>::quiet_NaN();
  double mean_expressed_disapproval = std::numeric_limits<double>::quiet_NaN();

  bool has_approval() const { return expressed_approval > 0; }
  bool has_disapproval() const { return expressed_disapproval > 0; }
};

ExpressionSummary summarize_expression(std::span<const double> opinions,
                                       std::span<const char> expressed);

}  // namespace stew
