#pragma once

#include <span>
#include <vector>

#include "stew/opinion_distribution.hpp"
#include "stew/rng.hpp"

namespace stew {

/// Opinion interval a group lives on: [0.5,1] for approval, [0,0.5] for disapproval.
struct Support {
  double lo;
  double hi;
  double width() const { return hi - lo; }
  bool contains(double x) const { return x >= lo && x <= hi; }
  double clamp(double x) const { return x < lo ? lo : (x > hi ? hi : x); }
};

Support support_of(Side side);

/// Beta belief about a group's mean opinion. The Beta mean is read directly as the
/// believed mean opinion; `side` only records which group is described.
struct BetaBelief {
  double a = 1.0;
  double b = 1.0;
  Side side = Side::approval;

  double mean() const { return a / (a + b); }
  double concentration() const { return a + b; }
  void validate() const;
};

/// Uniform bounded-confidence window of width tau centred on the belief.
struct ConstraintWindow {
  double tau = 0.2;
  void validate() const;
};

/// Probability masses over `bins` equal cells of a side's support.
class GriddedBelief {
 public:
  GriddedBelief(Side side, std::vector<double> weights);
  static GriddedBelief uniform(Side side, int bins);
  /// Exact cell masses of a Beta prior restricted and renormalized to the side's support.
  static GriddedBelief from_beta(const BetaBelief& belief, int bins);

  Side side() const noexcept { return side_; }
  int bins() const noexcept { return static_cast<int>(weights_.size()); }
  double bin_width() const;
  double bin_left(int k) const;
  double bin_center(int k) const;
  std::span<const double> weights() const noexcept { return weights_; }
  double mean() const;
  double total_mass() const;
  /// Draw from the piecewise-uniform density.
  double sample(Rng& rng) const;

 private:
  Side side_;
  std::vector<double> weights_;
};

struct Posterior {
  GriddedBelief belief;
  bool rejected = false;     ///< no prior mass inside the window; `belief` is the prior
  std::size_t accepted = 0;  ///< draws behind the histogram
};

inline constexpr int kPosteriorBins = 100;
inline constexpr int kPosteriorSamples = 10000;

/// Window likelihood C(signal; o_hat, tau): 1/tau inside |signal - o_hat| <= tau/2, else 0.
double constraint_likelihood(double signal, double o_hat, const ConstraintWindow& window);

/// Monte Carlo window posterior over the signal side's support: histogram of n_samples
/// stratified draws from the prior restricted to the window. Rejected (prior returned) with
/// the probability that n plain prior draws all miss the window.
Posterior posterior_from_signal(const BetaBelief& prior, double signal,
                                const ConstraintWindow& window, int n_samples, Rng& rng,
                                int bins = kPosteriorBins);
Posterior posterior_from_signal(const GriddedBelief& prior, double signal,
                                const ConstraintWindow& window, int n_samples, Rng& rng);

/// Posterior from pre-drawn prior samples; lets callers reuse one draw set across signals.
/// `fallback` is returned as the belief when the signal is rejected.
Posterior posterior_from_draws(std::span<const double> draws, Side side, double signal,
                               const ConstraintWindow& window, int bins,
                               const GriddedBelief& fallback);

/// Draw `n` samples from a Beta prior.
std::vector<double> draw_beta(const BetaBelief& belief, int n, Rng& rng);

/// Conjugate update Beta(a + s, b + 1 - s) from the mean expressed opinion s.
BetaBelief beta_update_from_community(const BetaBelief& belief, double mean_expressed);

/// Beta with the prior's pseudo-count total and the given mean.
BetaBelief moment_match(const BetaBelief& prior, double mean);

double belief_mean(const BetaBelief& belief);
double belief_mean(const GriddedBelief& belief);

}  // namespace stew
