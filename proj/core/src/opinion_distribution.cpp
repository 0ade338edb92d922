#include "stew/opinion_distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "stew/errors.hpp"

namespace stew {
namespace {

double normal_cdf(double x, double mu, double sigma) {
  return 0.5 * std::erfc(-(x - mu) / (sigma * std::sqrt(2.0)));
}

}  // namespace

const char* to_string(Side s) { return s == Side::approval ? "approval" : "disapproval"; }

OpinionDistribution OpinionDistribution::bimodal(double mu1, double mu2, double sigma,
                                                 double mix) {
  if (!(sigma > 0.0)) throw DomainError("sigma must be > 0");
  if (!(mix >= 0.0 && mix <= 1.0)) throw DomainError("mixture weight must lie in [0,1]");
  OpinionDistribution d;
  d.kind_ = Kind::bimodal_gaussian;
  d.mu1_ = mu1;
  d.mu2_ = mu2;
  d.sigma_ = sigma;
  d.mix_ = mix;
  return d;
}

OpinionDistribution OpinionDistribution::from_samples(std::vector<double> samples) {
  if (samples.empty()) throw DomainError("custom opinion distribution needs samples");
  for (double& s : samples) s = std::clamp(s, 0.0, 1.0);
  std::sort(samples.begin(), samples.end());
  OpinionDistribution d;
  d.kind_ = Kind::custom_samples;
  d.samples_ = std::move(samples);
  return d;
}

double OpinionDistribution::sample(Rng& rng) const {
  if (kind_ == Kind::custom_samples) {
    std::uniform_int_distribution<std::size_t> pick(0, samples_.size() - 1);
    return samples_[pick(rng)];
  }
  std::bernoulli_distribution second(mix_);
  const double mu = second(rng) ? mu2_ : mu1_;
  std::normal_distribution<double> noise(mu, sigma_);
  return std::clamp(noise(rng), 0.0, 1.0);
}

double OpinionDistribution::cdf(double x) const {
  if (x < 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  if (kind_ == Kind::custom_samples) {
    const auto it = std::upper_bound(samples_.begin(), samples_.end(), x);
    return static_cast<double>(it - samples_.begin()) / static_cast<double>(samples_.size());
  }
  return (1.0 - mix_) * normal_cdf(x, mu1_, sigma_) + mix_ * normal_cdf(x, mu2_, sigma_);
}

double OpinionDistribution::quantile(double p) const {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile level must lie in [0,1]");
  if (kind_ == Kind::custom_samples) {
    const auto n = samples_.size();
    auto idx = static_cast<std::size_t>(std::ceil(p * static_cast<double>(n)));
    idx = std::clamp<std::size_t>(idx, 1, n);
    return samples_[idx - 1];
  }
  if (p <= cdf(0.0)) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (cdf(mid) >= p) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

std::vector<double> OpinionDistribution::quantile_population(int n) const {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) out[k] = quantile((k + 0.5) / n);
  return out;
}

double OpinionDistribution::group_mean(Side side) const {
  if (kind_ == Kind::bimodal_gaussian) return side == Side::approval ? mu2_ : mu1_;
  double sum = 0.0;
  std::size_t count = 0;
  for (double s : samples_) {
    if (side_of(s) == side) {
      sum += s;
      ++count;
    }
  }
  return count == 0 ? (side == Side::approval ? 0.75 : 0.25) : sum / static_cast<double>(count);
}

}  // namespace stew
