#include "stew/expression.hpp"

#include <algorithm>

#include "stew/errors.hpp"

namespace stew {

double belief_v_bar(double approval_mean, double disapproval_mean, const GameParams& params) {
  const double o_a = std::clamp(approval_mean, 0.5, 1.0);
  const double o_d = std::clamp(disapproval_mean, 0.0, 0.5);
  const double v = params.n_hat * o_a + (1.0 - params.n_hat) * (1.0 - o_d);
  return std::clamp(v, 0.5, 1.0);
}

double EquilibriumCache::operator()(double v_bar) {
  if (auto it = solved_.find(v_bar); it != solved_.end()) return it->second;
  const double gamma = symmetric_equilibrium(v_bar, params_);
  solved_.emplace(v_bar, gamma);
  return gamma;
}

ExpressionSummary summarize_expression(std::span<const double> opinions,
                                       std::span<const char> expressed) {
  if (opinions.size() != expressed.size()) throw DomainError("opinion/flag length mismatch");
  ExpressionSummary out;
  double sum_a = 0.0;
  double sum_d = 0.0;
  for (std::size_t i = 0; i < opinions.size(); ++i) {
    if (!expressed[i]) continue;
    if (opinions[i] >= 0.5) {
      ++out.expressed_approval;
      sum_a += opinions[i];
    } else {
      ++out.expressed_disapproval;
      sum_d += opinions[i];
    }
  }
  const int total = out.expressed_approval + out.expressed_disapproval;
  out.participation =
      opinions.empty() ? 0.0 : static_cast<double>(total) / static_cast<double>(opinions.size());
  if (out.has_approval()) out.mean_expressed_approval = sum_a / out.expressed_approval;
  if (out.has_disapproval()) out.mean_expressed_disapproval = sum_d / out.expressed_disapproval;
  return out;
}

}  // namespace stew
