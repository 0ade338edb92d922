#include "stew/beliefs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <boost/math/special_functions/beta.hpp>

#include "stew/errors.hpp"

namespace stew {
namespace {

using DoublePolicy = boost::math::policies::policy<boost::math::policies::promote_double<false>>;

double beta_cdf(double a, double b, double x) {
  return boost::math::ibeta(a, b, x, DoublePolicy());
}

void normalize(std::vector<double>& w) {
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  if (!(total > 0.0)) throw DomainError("belief has no mass");
  for (double& x : w) x /= total;
}

// Window posterior on `bins` cells of the side's support from n prior draws.
// The draws are stratified over the prior restricted to the window: draw i sits at
// conditional quantile (i + U_i) / n, so bin counts are floor/ceil of n * mass and only
// the straddling strata are random. The signal is rejected with the probability that
// none of n unconditional prior draws would land in the window.
template <class Cdf, class Fallback>
Posterior windowed_posterior(Side side, int bins, double signal, const ConstraintWindow& window,
                             int n_samples, Rng& rng, const Cdf& cdf, const Fallback& fallback) {
  const Support s = support_of(side);
  const double lo = std::max(s.lo, signal - 0.5 * window.tau);
  const double hi = std::min(s.hi, signal + 0.5 * window.tau);
  const double width = s.width() / bins;
  std::vector<double> w(static_cast<std::size_t>(bins), 0.0);
  if (!(lo < hi)) return Posterior{fallback(), true, 0};

  const int first = std::clamp(static_cast<int>((lo - s.lo) / width), 0, bins - 1);
  const int last = std::clamp(static_cast<int>((hi - s.lo) / width), 0, bins - 1);
  std::vector<double> cum(static_cast<std::size_t>(last - first + 2), 0.0);
  const double base = cdf(lo);
  for (int k = first; k <= last; ++k) {
    const double right = std::min(hi, k + 1 == bins ? s.hi : s.lo + (k + 1) * width);
    cum[static_cast<std::size_t>(k - first + 1)] = std::max(0.0, cdf(right) - base);
  }
  const double mass = cum.back();
  if (!(mass > 0.0)) return Posterior{fallback(), true, 0};

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double n = n_samples;
  if (unit(rng) < std::exp(n * std::log1p(-std::min(mass, 1.0)))) {
    return Posterior{fallback(), true, 0};
  }

  long stratum = -1;
  double u = 0.0;
  auto below = [&](double c) -> long {
    if (c >= 1.0) return n_samples;
    const double x = n * c;
    const auto j = static_cast<long>(x);
    if (j != stratum) {
      stratum = j;
      u = unit(rng);
    }
    return j + (u < x - static_cast<double>(j) ? 1 : 0);
  };
  long prev = 0;
  for (int k = first; k <= last; ++k) {
    const std::size_t i = static_cast<std::size_t>(k - first + 1);
    const long now = k == last ? n_samples : below(std::min(1.0, cum[i] / mass));
    w[static_cast<std::size_t>(k)] = static_cast<double>(now - prev);
    prev = now;
  }
  return Posterior{GriddedBelief(side, std::move(w)), false, static_cast<std::size_t>(n_samples)};
}

}  // namespace

Support support_of(Side side) {
  return side == Side::approval ? Support{0.5, 1.0} : Support{0.0, 0.5};
}

void BetaBelief::validate() const {
  if (!(a > 0.0 && b > 0.0)) throw DomainError("Beta pseudo-counts must be positive");
}

void ConstraintWindow::validate() const {
  if (!(tau > 0.0)) throw DomainError("window width tau must be > 0");
}

GriddedBelief::GriddedBelief(Side side, std::vector<double> weights)
    : side_(side), weights_(std::move(weights)) {
  if (weights_.empty()) throw DomainError("gridded belief needs at least one bin");
  for (double w : weights_) {
    if (!(w >= 0.0)) throw DomainError("gridded belief weights must be nonnegative");
  }
  normalize(weights_);
}

GriddedBelief GriddedBelief::uniform(Side side, int bins) {
  return GriddedBelief(side, std::vector<double>(static_cast<std::size_t>(bins), 1.0));
}

GriddedBelief GriddedBelief::from_beta(const BetaBelief& belief, int bins) {
  belief.validate();
  const Support s = support_of(belief.side);
  std::vector<double> w(static_cast<std::size_t>(bins));
  const double width = s.width() / bins;
  double prev = beta_cdf(belief.a, belief.b, s.lo);
  for (int k = 0; k < bins; ++k) {
    const double right = k + 1 == bins ? s.hi : s.lo + (k + 1) * width;
    const double cur = beta_cdf(belief.a, belief.b, right);
    w[k] = std::max(0.0, cur - prev);
    prev = cur;
  }
  if (std::accumulate(w.begin(), w.end(), 0.0) <= 0.0) std::fill(w.begin(), w.end(), 1.0);
  return GriddedBelief(belief.side, std::move(w));
}

double GriddedBelief::bin_width() const { return support_of(side_).width() / bins(); }

double GriddedBelief::bin_left(int k) const { return support_of(side_).lo + k * bin_width(); }

double GriddedBelief::bin_center(int k) const { return bin_left(k) + 0.5 * bin_width(); }

double GriddedBelief::mean() const {
  double m = 0.0;
  for (int k = 0; k < bins(); ++k) m += weights_[k] * bin_center(k);
  return m;
}

double GriddedBelief::total_mass() const {
  return std::accumulate(weights_.begin(), weights_.end(), 0.0);
}

double GriddedBelief::sample(Rng& rng) const {
  std::discrete_distribution<int> pick(weights_.begin(), weights_.end());
  std::uniform_real_distribution<double> within(0.0, 1.0);
  const int k = pick(rng);
  return bin_left(k) + within(rng) * bin_width();
}

double constraint_likelihood(double signal, double o_hat, const ConstraintWindow& window) {
  window.validate();
  return std::fabs(signal - o_hat) <= 0.5 * window.tau ? 1.0 / window.tau : 0.0;
}

std::vector<double> draw_beta(const BetaBelief& belief, int n, Rng& rng) {
  belief.validate();
  std::gamma_distribution<double> ga(belief.a, 1.0);
  std::gamma_distribution<double> gb(belief.b, 1.0);
  std::vector<double> out(static_cast<std::size_t>(n));
  for (double& x : out) {
    const double u = ga(rng);
    const double v = gb(rng);
    x = u / (u + v);
  }
  return out;
}

Posterior posterior_from_draws(std::span<const double> draws, Side side, double signal,
                               const ConstraintWindow& window, int bins,
                               const GriddedBelief& fallback) {
  window.validate();
  const Support s = support_of(side);
  const double width = s.width() / bins;
  std::vector<double> w(static_cast<std::size_t>(bins), 0.0);
  std::size_t accepted = 0;
  for (double x : draws) {
    if (!s.contains(x)) continue;
    const double like = constraint_likelihood(signal, x, window);
    if (like == 0.0) continue;
    const int k = std::min(bins - 1, static_cast<int>((x - s.lo) / width));
    w[k] += like;
    ++accepted;
  }
  if (accepted == 0) return Posterior{fallback, true, 0};
  return Posterior{GriddedBelief(side, std::move(w)), false, accepted};
}

Posterior posterior_from_signal(const BetaBelief& prior, double signal,
                                const ConstraintWindow& window, int n_samples, Rng& rng,
                                int bins) {
  prior.validate();
  window.validate();
  if (n_samples < 1 || bins < 1) throw DomainError("posterior sizes must be >= 1");
  const auto cdf = [&](double x) { return beta_cdf(prior.a, prior.b, x); };
  return windowed_posterior(prior.side, bins, signal, window, n_samples, rng, cdf,
                            [&] { return GriddedBelief::from_beta(prior, bins); });
}

Posterior posterior_from_signal(const GriddedBelief& prior, double signal,
                                const ConstraintWindow& window, int n_samples, Rng& rng) {
  window.validate();
  if (n_samples < 1) throw DomainError("posterior sizes must be >= 1");
  // piecewise-linear cdf of the piecewise-uniform prior
  const auto w = prior.weights();
  const double lo = prior.bin_left(0);
  const double width = prior.bin_width();
  const auto cdf = [&](double x) {
    const double u = std::clamp((x - lo) / width, 0.0, static_cast<double>(w.size()));
    const auto k = static_cast<std::size_t>(u);
    double c = std::accumulate(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(k), 0.0);
    if (k < w.size()) c += w[k] * (u - static_cast<double>(k));
    return c;
  };
  return windowed_posterior(prior.side(), prior.bins(), signal, window, n_samples, rng, cdf,
                            [&] { return prior; });
}

BetaBelief beta_update_from_community(const BetaBelief& belief, double mean_expressed) {
  if (!(mean_expressed >= 0.0 && mean_expressed <= 1.0)) {
    throw DomainError("mean expressed opinion must lie in [0,1], got " +
                      std::to_string(mean_expressed));
  }
  return BetaBelief{belief.a + mean_expressed, belief.b + (1.0 - mean_expressed), belief.side};
}

BetaBelief moment_match(const BetaBelief& prior, double mean) {
  if (!(mean > 0.0 && mean < 1.0)) throw DomainError("moment-matched mean must lie in (0,1)");
  const double k = prior.concentration();
  return BetaBelief{mean * k, (1.0 - mean) * k, prior.side};
}

double belief_mean(const BetaBelief& belief) { return belief.mean(); }

double belief_mean(const GriddedBelief& belief) { return belief.mean(); }

}  // namespace stew
