#pragma once

#include <vector>

#include "stew/rng.hpp"

namespace stew {

enum class Side { approval, disapproval };

inline Side side_of(double opinion) { return opinion >= 0.5 ? Side::approval : Side::disapproval; }
inline Side other(Side s) { return s == Side::approval ? Side::disapproval : Side::approval; }
const char* to_string(Side s);

/// Population opinion density f. Draws are clipped to [0,1].
class OpinionDistribution {
 public:
  enum class Kind { bimodal_gaussian, custom_samples };

  /// Two equal-width Gaussian components; `mix` is the weight of the `mu2` component.
  static OpinionDistribution bimodal(double mu1 = 0.4, double mu2 = 0.6, double sigma = 0.2,
                                     double mix = 0.5);
  /// Empirical distribution over the given opinions.
  static OpinionDistribution from_samples(std::vector<double> samples);

  Kind kind() const noexcept { return kind_; }
  double mu1() const noexcept { return mu1_; }
  double mu2() const noexcept { return mu2_; }
  double sigma() const noexcept { return sigma_; }
  double mix() const noexcept { return mix_; }

  double sample(Rng& rng) const;
  /// CDF of the clipped distribution.
  double cdf(double x) const;
  /// Smallest x in [0,1] with cdf(x) >= p.
  double quantile(double p) const;
  /// Deterministic population at percentiles (k + 0.5) / n.
  std::vector<double> quantile_population(int n) const;
  /// Reference mean opinion of a group: the component mean for the mixture,
  /// the conditional sample mean for custom samples.
  double group_mean(Side side) const;

 private:
  Kind kind_ = Kind::bimodal_gaussian;
  double mu1_ = 0.4;
  double mu2_ = 0.6;
  double sigma_ = 0.2;
  double mix_ = 0.5;
  std::vector<double> samples_;  // sorted, custom kind only
};

}  // namespace stew
