#pragma once

// Probability mass functions on the non-negative integers.
//
// BasicPmf<T> stores dense weights w[0..K]. A truncated family (Poisson)
// additionally records the probability mass and the first moment that were
// discarded above K; every derived object propagates those numbers so that
// downstream quantities can report error bars.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "fpt/error.hpp"
#include "fpt/numeric.hpp"

namespace fpt {

template <Scalar T>
class BasicPmf {
 public:
  BasicPmf() : weights_{T(1)} {}

  /// Dense weights; no validation beyond trimming trailing zeros.
  BasicPmf(std::vector<T> weights, T truncation_error = T(0), T tail_mean = T(0), std::string label = {})
      : weights_(std::move(weights)),
        truncation_error_(std::move(truncation_error)),
        tail_mean_(std::move(tail_mean)),
        label_(std::move(label)) {
    while (weights_.size() > 1 && weights_.back() == 0) weights_.pop_back();
    if (weights_.empty()) weights_.push_back(T(0));
  }

  static BasicPmf point_mass(std::size_t k) {
    std::vector<T> w(k + 1, T(0));
    w[k] = T(1);
    return BasicPmf(std::move(w), T(0), T(0), "delta(" + std::to_string(k) + ")");
  }

  [[nodiscard]] const std::vector<T>& weights() const noexcept { return weights_; }
  [[nodiscard]] const T& weight(std::size_t k) const {
    static const T zero(0);
    return k < weights_.size() ? weights_[k] : zero;
  }
  [[nodiscard]] std::size_t max_value() const noexcept { return weights_.size() - 1; }
  [[nodiscard]] std::size_t min_value() const noexcept {
    std::size_t k = 0;
    while (k + 1 < weights_.size() && weights_[k] == 0) ++k;
    return k;
  }
  [[nodiscard]] std::vector<std::size_t> support() const {
    std::vector<std::size_t> s;
    for (std::size_t k = 0; k < weights_.size(); ++k) {
      if (weights_[k] > 0) s.push_back(k);
    }
    return s;
  }
  /// Mass discarded above max_value() (0 for genuinely finite support).
  [[nodiscard]] const T& truncation_error() const noexcept { return truncation_error_; }
  /// sum_{k > max_value()} k p_k of the untruncated law.
  [[nodiscard]] const T& tail_mean() const noexcept { return tail_mean_; }
  [[nodiscard]] bool truncated() const noexcept { return truncation_error_ > 0; }
  [[nodiscard]] const std::string& label() const noexcept { return label_; }
  void set_label(std::string l) { label_ = std::move(l); }

  [[nodiscard]] T total_mass() const {
    Accumulator<T> acc;
    for (const T& w : weights_) acc += w;
    return acc.value();
  }

  friend bool operator==(const BasicPmf& a, const BasicPmf& b) {
    return a.weights_ == b.weights_ && a.truncation_error_ == b.truncation_error_;
  }

 private:
  std::vector<T> weights_;
  T truncation_error_{0};
  T tail_mean_{0};
  std::string label_;
};

using Pmf = BasicPmf<double>;
using ExactPmf = BasicPmf<Rational>;

inline constexpr double kNormalizationTolerance = 1e-12;
inline constexpr double kPruneBelow = 1e-300;
inline constexpr double kDefaultPoissonEps = 1e-12;

/// Validates (k, probability) entries; zero weights are dropped, doubles are
/// renormalized, rationals must sum to exactly 1.
template <Scalar T>
BasicPmf<T> make_pmf(const std::vector<std::pair<std::size_t, T>>& entries, std::string label = {}) {
  std::map<std::size_t, T> by_key;
  for (const auto& [k, w] : entries) {
    if (w < 0) throw Error(Errc::NegativeWeight, "weight of " + std::to_string(k) + " is negative");
    if (!by_key.emplace(k, w).second) throw Error(Errc::DuplicateKey, "value " + std::to_string(k) + " given twice");
  }
  Accumulator<T> acc;
  for (const auto& [k, w] : by_key) acc += w;
  const T sum = acc.value();
  if constexpr (is_exact_v<T>) {
    if (sum != 1) throw Error(Errc::NotNormalized, "weights sum to " + to_string(sum));
  } else {
    if (!(std::abs(sum - 1.0) <= kNormalizationTolerance)) {
      throw Error(Errc::NotNormalized, "weights sum to " + std::to_string(sum));
    }
  }
  if (by_key.empty()) throw Error(Errc::NotNormalized, "empty pmf");
  std::vector<T> dense(by_key.rbegin()->first + 1, T(0));
  for (const auto& [k, w] : by_key) {
    if constexpr (is_exact_v<T>) {
      dense[k] = w;
    } else {
      dense[k] = w / sum;
    }
  }
  return BasicPmf<T>(std::move(dense), T(0), T(0), std::move(label));
}

template <Scalar T>
T mean(const BasicPmf<T>& p) {
  Accumulator<T> acc;
  const auto& w = p.weights();
  for (std::size_t k = 1; k < w.size(); ++k) acc += w[k] * T(static_cast<long long>(k));
  return acc.value();
}

/// Mean of the untruncated law: mean(p) + tail_mean(p).
template <Scalar T>
T full_mean(const BasicPmf<T>& p) {
  return mean(p) + p.tail_mean();
}

/// p~_k = k p_k / mu, with mu the untruncated mean.
template <Scalar T>
BasicPmf<T> size_biased(const BasicPmf<T>& p) {
  const T mu = full_mean(p);
  if (!(mu > 0)) throw Error(Errc::ZeroMean, "size-biasing needs a positive mean");
  std::vector<T> w(p.weights().size(), T(0));
  for (std::size_t k = 1; k < w.size(); ++k) w[k] = p.weights()[k] * T(static_cast<long long>(k)) / mu;
  return BasicPmf<T>(std::move(w), p.tail_mean() / mu, T(0), "size-biased " + p.label());
}

namespace detail {

template <Scalar T>
T combine_truncation(const T& a, const T& b) {
  return a + b - a * b;
}

}  // namespace detail

/// Distribution of the sum of independent draws from a and b.
template <Scalar T>
BasicPmf<T> convolve(const BasicPmf<T>& a, const BasicPmf<T>& b) {
  const auto& x = a.weights();
  const auto& y = b.weights();
  const std::size_t xlo = a.min_value(), ylo = b.min_value();
  std::vector<T> out(x.size() + y.size() - 1, T(0));
  if constexpr (is_exact_v<T>) {
    for (std::size_t i = xlo; i < x.size(); ++i) {
      if (x[i] == 0) continue;
      for (std::size_t j = ylo; j < y.size(); ++j) {
        if (y[j] != 0) out[i + j] += x[i] * y[j];
      }
    }
  } else {
    // Each output entry is a short sum of non-negative terms; accumulate per
    // output index with compensation.
    for (std::size_t s = xlo + ylo; s < out.size(); ++s) {
      Accumulator<double> acc;
      const std::size_t i_lo = s >= y.size() - 1 ? s - (y.size() - 1) : 0;
      const std::size_t i_hi = std::min(s, x.size() - 1);
      for (std::size_t i = std::max(i_lo, xlo); i <= i_hi; ++i) acc += x[i] * y[s - i];
      double v = acc.value();
      out[s] = v < kPruneBelow ? 0.0 : v;
    }
  }
  return BasicPmf<T>(std::move(out), detail::combine_truncation(a.truncation_error(), b.truncation_error()));
}

/// Law of S_k = X_1 + ... + X_k; S_0 is the point mass at 0.
template <Scalar T>
BasicPmf<T> convolve_power(const BasicPmf<T>& p, std::size_t k) {
  BasicPmf<T> acc = BasicPmf<T>::point_mass(0);
  for (std::size_t i = 0; i < k; ++i) acc = convolve(acc, p);
  acc.set_label("S_" + std::to_string(k));
  return acc;
}

/// Poisson(lambda) restricted to [0, K] with K the smallest cut whose
/// discarded upper tail is below eps.
inline Pmf poisson_truncated(double lambda, double eps = kDefaultPoissonEps) {
  if (!(lambda > 0) || !std::isfinite(lambda)) throw Error(Errc::InvalidRate, "Poisson rate must be positive");
  if (!(eps > 0) || eps > 1e-6) throw Error(Errc::InvalidInput, "Poisson tail eps must lie in (0, 1e-6]");
  const auto horizon = static_cast<std::size_t>(std::ceil(lambda + 40.0 * std::sqrt(lambda) + 60.0));
  std::vector<double> w(horizon + 1);
  const double log_lambda = std::log(lambda);
  for (std::size_t j = 0; j <= horizon; ++j) {
    w[j] = std::exp(-lambda + static_cast<double>(j) * log_lambda - std::lgamma(static_cast<double>(j) + 1.0));
  }
  // tail[j] = sum_{i > j} w[i], tail_mean[j] = sum_{i > j} i w[i]
  std::vector<double> tail(horizon + 1, 0.0), tail_mean(horizon + 1, 0.0);
  for (std::size_t j = horizon; j-- > 0;) {
    tail[j] = tail[j + 1] + w[j + 1];
    tail_mean[j] = tail_mean[j + 1] + static_cast<double>(j + 1) * w[j + 1];
  }
  std::size_t cut = static_cast<std::size_t>(std::floor(lambda));
  while (cut < horizon && !(tail[cut] < eps)) ++cut;
  w.resize(cut + 1);
  for (double& x : w) {
    if (x < kPruneBelow) x = 0.0;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "Poisson(%g)", lambda);
  return Pmf(std::move(w), tail[cut], tail_mean[cut], buf);
}

struct GwConditionReport {
  bool p0_zero = true;
  bool p1_below_one = true;
  /// sum k log k p_k < infinity; automatic for finite or truncated support.
  bool klogk_finite = true;
  bool supercritical = true;
  std::vector<std::string> warnings;
  std::vector<std::string> errors;
  [[nodiscard]] bool ok() const noexcept { return errors.empty(); }
  [[nodiscard]] bool hypotheses_hold() const noexcept { return p0_zero && p1_below_one && klogk_finite; }
};

template <Scalar T>
GwConditionReport validate_gw_conditions(const BasicPmf<T>& p) {
  GwConditionReport r;
  r.p0_zero = p.weight(0) == 0;
  r.p1_below_one = p.weight(1) < 1;
  r.supercritical = full_mean(p) > 1;
  if (!r.p0_zero) r.warnings.push_back("p_0 > 0: extinction is possible, outside the p_0 = 0 hypothesis");
  if (!r.p1_below_one) r.errors.push_back("p_1 = 1: the tree is a single infinite path");
  if (!r.supercritical && r.p1_below_one) r.warnings.push_back("mean offspring <= 1: the process dies out almost surely");
  if (p.truncated()) {
    r.warnings.push_back("support truncated at " + std::to_string(p.max_value()) +
                         "; the k log k condition holds automatically for the truncated law");
  }
  return r;
}

/// Converts an exact pmf to floating point.
inline Pmf to_float(const ExactPmf& p) {
  std::vector<double> w;
  w.reserve(p.weights().size());
  for (const auto& x : p.weights()) w.push_back(to_double(x));
  return Pmf(std::move(w), to_double(p.truncation_error()), to_double(p.tail_mean()), p.label());
}

}  // namespace fpt
