#pragma once

#include <vector>

namespace stew {

/// Exogenous constants of one opinion-expression game.
struct GameParams {
  double alpha = 0.6;         ///< cost per unit of rhetoric
  double lambda_in = 2.0;     ///< in-group boost, > 1
  double lambda_out = 0.5;    ///< out-group dampening, in (0,1)
  double n_hat = 0.5;         ///< believed approval-group share
  double gamma_silence = 0.3; ///< intensities below this count as silence

  /// Throws DomainError when any invariant is violated.
  void validate() const;
};

/// Extremity transform: o on the approval side, 1 - o on the disapproval side.
double opinion_value(double opinion);

/// Payoff of intensity `gamma_self` against `gamma_other` for a player holding `opinion`.
/// Uses the 0^0 = 1 convention for the in-group power term.
double utility(double gamma_self, double gamma_other, double opinion, const GameParams& params);

/// Expected payoff over types when the mean opinion value is `v_bar` (equal group support).
double ex_ante_utility(double gamma_self, double gamma_other, double v_bar, const GameParams& params);

/// Maximizer of ex_ante_utility in gamma_self for a player of value `v`.
double best_response(double gamma_other, double v, const GameParams& params);

/// Mean opinion value below which the all-silent profile is the symmetric equilibrium.
double silence_threshold(const GameParams& params);

/// Every symmetric fixed point of best_response found by the 64-cell bracket scan, ascending.
/// Includes 0 when the all-silent profile is a fixed point.
std::vector<double> symmetric_fixed_points(double v_bar, const GameParams& params);

/// Symmetric ex-ante equilibrium intensity. Zero when v_bar is under the silence
/// threshold, otherwise the largest fixed point located by bisection.
double symmetric_equilibrium(double v_bar, const GameParams& params);

/// Ex-interim response of a player who knows their own opinion and faces the
/// population-level equilibrium intensity.
double interim_response(double opinion, double gamma_ex_ante, const GameParams& params);

/// Bisection settings shared by the equilibrium solver.
inline constexpr double kFixedPointResidual = 1e-6;
inline constexpr int kBisectionMaxIter = 200;
inline constexpr int kBracketCells = 64;

}  // namespace stew
