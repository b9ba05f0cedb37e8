#pragma once

// Limiting vertex-type and edge-type densities of a Galton-Watson tree, the
// significance verdict, the monotonicity criterion for negative correlation of
// positive vertices, and pointwise checks of the two auxiliary inequalities
// used to prove it.
//
// Notation: p is the offspring law, p~ its size-biased version, S_k a sum of k
// independent draws from p. A non-root vertex with k children is positive iff
//   X~ + S_k - k(k+1) > 0
// where X~ ~ p~ is the offspring count of its parent.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fpt/error.hpp"
#include "fpt/numeric.hpp"
#include "fpt/pmf.hpp"
#include "fpt/tree.hpp"

namespace fpt {

/// A probability together with an upper bound on how much truncated mass
/// could still be missing from it.
template <Scalar T>
struct Bounded {
  T value{0};
  T slack{0};
};

/// Law of S_k with prefix and suffix sums for O(1) tail queries.
template <Scalar T>
class PowerEntry {
 public:
  PowerEntry(BasicPmf<T> pmf, std::int64_t base_max) : pmf_(std::move(pmf)), base_max_(base_max) {
    const auto& w = pmf_.weights();
    const std::size_t n = w.size();
    prefix_.resize(n);
    suffix_.assign(n + 1, T(0));
    if constexpr (is_exact_v<T>) {
      T run(0);
      for (std::size_t i = 0; i < n; ++i) prefix_[i] = run += w[i];
      for (std::size_t i = n; i-- > 0;) suffix_[i] = suffix_[i + 1] + w[i];
    } else {
      Accumulator<double> lo, hi;
      for (std::size_t i = 0; i < n; ++i) {
        lo += w[i];
        prefix_[i] = lo.value();
      }
      for (std::size_t i = n; i-- > 0;) {
        hi += w[i];
        suffix_[i] = hi.value();
      }
    }
  }

  [[nodiscard]] const BasicPmf<T>& pmf() const noexcept { return pmf_; }
  /// Mass discarded from S_k by truncating p; all of it lies above base_max.
  [[nodiscard]] const T& missing() const noexcept { return pmf_.truncation_error(); }

  [[nodiscard]] T at(std::int64_t v) const {
    if (v < 0 || static_cast<std::size_t>(v) >= prefix_.size()) return T(0);
    return pmf_.weights()[static_cast<std::size_t>(v)];
  }

  /// P(S <= t) over the stored mass; exact whenever t <= base_max.
  [[nodiscard]] T lower(std::int64_t t) const {
    if (t < 0) return T(0);
    if (static_cast<std::size_t>(t) >= prefix_.size()) return prefix_.back();
    return prefix_[static_cast<std::size_t>(t)];
  }

  /// P(S > t). Below base_max the missing mass is known to lie above t and is
  /// included; beyond it the result is a lower bound with slack = missing().
  [[nodiscard]] Bounded<T> upper(std::int64_t t) const {
    if (t < 0) return {T(1), T(0)};
    const auto i = static_cast<std::size_t>(t) + 1;
    T direct = i < suffix_.size() ? suffix_[i] : T(0);
    if constexpr (is_exact_v<T>) {
      return {direct, T(0)};
    } else {
      if (t > base_max_) return {direct, missing()};
      direct += missing();
      // Take whichever side is small so the result stays accurate near 0 and 1.
      if (direct < 0.5) return {direct, 0.0};
      return {1.0 - lower(t), 0.0};
    }
  }

 private:
  BasicPmf<T> pmf_;
  std::int64_t base_max_;
  std::vector<T> prefix_;
  std::vector<T> suffix_;
};

/// Lazily extended cache of S_0, S_1, ... for one offspring law.
/// Not safe for concurrent extension.
template <Scalar T>
class PowerTable {
 public:
  explicit PowerTable(BasicPmf<T> p) : p_(std::move(p)) {
    entries_.emplace_back(BasicPmf<T>::point_mass(0), base_max());
  }

  [[nodiscard]] const BasicPmf<T>& base() const noexcept { return p_; }

  const PowerEntry<T>& operator[](std::size_t k) {
    while (entries_.size() <= k) {
      entries_.emplace_back(convolve(entries_.back().pmf(), p_), base_max());
    }
    return entries_[k];
  }

 private:
  [[nodiscard]] std::int64_t base_max() const { return static_cast<std::int64_t>(p_.max_value()); }

  BasicPmf<T> p_;
  std::deque<PowerEntry<T>> entries_;
};

template <Scalar T>
struct SignProbs {
  T negative{0};
  T zero{0};
  T positive{0};
  T slack{0};

  [[nodiscard]] const T& of(VertexType t) const {
    switch (t) {
      case VertexType::Negative: return negative;
      case VertexType::Neutral: return zero;
      case VertexType::Positive: return positive;
    }
    return zero;
  }
};

/// Sign probabilities of Y + S - c with Y ~ parent independent of S.
template <Scalar T>
SignProbs<T> sign_probabilities(const BasicPmf<T>& parent, const PowerEntry<T>& s, std::int64_t c) {
  Accumulator<T> neg, zero, pos, slack;
  const auto& w = parent.weights();
  for (std::size_t j = 0; j < w.size(); ++j) {
    if (w[j] == 0) continue;
    const std::int64_t t = c - static_cast<std::int64_t>(j);
    const Bounded<T> up = s.upper(t);
    pos += w[j] * up.value;
    zero += w[j] * s.at(t);
    neg += w[j] * s.lower(t - 1);
    if constexpr (!is_exact_v<T>) slack += w[j] * up.slack;
  }
  return {neg.value(), zero.value(), pos.value(), slack.value()};
}

inline std::int64_t pronic(std::size_t k) {
  const auto kk = static_cast<std::int64_t>(k);
  return kk * (kk + 1);
}

/// (P(<0), P(=0), P(>0)) of parent + S_k - k(k+1).
template <Scalar T>
SignProbs<T> sign_statistic_pmf(const BasicPmf<T>& p, std::size_t k, const BasicPmf<T>& parent) {
  PowerTable<T> table(p);
  return sign_probabilities(parent, table[k], pronic(k));
}

enum class Significance { StrictlySignificant, Significant, Insignificant };

constexpr std::string_view to_string(Significance s) noexcept {
  switch (s) {
    case Significance::StrictlySignificant: return "StrictlySignificant";
    case Significance::Significant: return "Significant";
    case Significance::Insignificant: return "Insignificant";
  }
  return "?";
}

template <class T>
using TypeMap = std::array<T, 3>;  // indexed by index_of(VertexType)

template <class T>
using EdgeMap = std::array<std::array<T, 3>, 3>;  // [parent type][child type]

template <Scalar T>
struct DensityReport {
  TypeMap<T> f{};
  EdgeMap<T> f_edge{};
  TypeMap<T> f_parent{};
  T mean{0};
  /// Bound on the error the truncated tail can cause in any vertex density.
  double vertex_truncation_bound = 0;
  /// Same for edge densities and the parent marginal.
  double truncation_error = 0;
  Significance significance = Significance::Significant;
  std::vector<std::string> warnings;

  [[nodiscard]] const T& vertex(VertexType t) const { return f[index_of(t)]; }
  [[nodiscard]] const T& parent(VertexType t) const { return f_parent[index_of(t)]; }
  [[nodiscard]] const T& edge(VertexType parent, VertexType child) const {
    return f_edge[index_of(parent)][index_of(child)];
  }
  /// f++ - f~+ f+.
  [[nodiscard]] T correlation_gap() const {
    return edge(VertexType::Positive, VertexType::Positive) -
           parent(VertexType::Positive) * vertex(VertexType::Positive);
  }
};

inline constexpr double kDensityTolerance = 1e-10;

/// Holds p, p~ and the S_k cache; all density formulas are methods.
template <Scalar T>
class GwModel {
 public:
  explicit GwModel(BasicPmf<T> p) : p_(std::move(p)), pt_(size_biased(p_)), table_(p_) {}

  [[nodiscard]] const BasicPmf<T>& offspring() const noexcept { return p_; }
  [[nodiscard]] const BasicPmf<T>& size_biased_offspring() const noexcept { return pt_; }
  PowerTable<T>& table() noexcept { return table_; }

  /// f^chi = sum_k p_k P(sign[X~ + S_k - k(k+1)] = chi).
  TypeMap<T> vertex_densities() { return mix(p_, pt_); }

  /// f~^chi = sum_k p~_k P(sign[X~ + S_k - k(k+1)] = chi).
  TypeMap<T> parent_marginal() { return mix(pt_, pt_); }

  /// f^{chi~ chi} = sum_{k~,k} p~_k~ p_k P(sign[X~ + S_{k~-1} + k - k~(k~+1)] = chi~)
  ///                                    P(sign[k~ + S_k - k(k+1)] = chi).
  EdgeMap<T> edge_densities() {
    std::array<std::array<Accumulator<T>, 3>, 3> acc;
    const auto& wt = pt_.weights();
    const auto& w = p_.weights();
    for (std::size_t kt = 1; kt < wt.size(); ++kt) {
      if (wt[kt] == 0) continue;
      const PowerEntry<T>& s_parent = table_[kt - 1];
      for (std::size_t k = 0; k < w.size(); ++k) {
        if (w[k] == 0) continue;
        const SignProbs<T> a = sign_probabilities(pt_, s_parent, pronic(kt) - static_cast<std::int64_t>(k));
        const Bounded<T> up = table_[k].upper(pronic(k) - static_cast<std::int64_t>(kt));
        const T& zero = table_[k].at(pronic(k) - static_cast<std::int64_t>(kt));
        SignProbs<T> b{T(1) - up.value - zero, zero, up.value, up.slack};
        if constexpr (!is_exact_v<T>) {
          // Recompute the negative side directly so that it is accurate when small.
          b.negative = table_[k].lower(pronic(k) - static_cast<std::int64_t>(kt) - 1);
        }
        const T weight = wt[kt] * w[k];
        const std::array<T, 3> av{a.negative, a.zero, a.positive};
        const std::array<T, 3> bv{b.negative, b.zero, b.positive};
        for (std::size_t i = 0; i < 3; ++i) {
          const T wa = weight * av[i];
          for (std::size_t j = 0; j < 3; ++j) acc[i][j] += wa * bv[j];
        }
      }
    }
    EdgeMap<T> out{};
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) out[i][j] = acc[i][j].value();
    }
    return out;
  }

  /// f(k~, k) = P(k~ + S_k - k(k+1) > 0).
  Bounded<T> mono_value(std::size_t k_tilde, std::size_t k) {
    return table_[k].upper(pronic(k) - static_cast<std::int64_t>(k_tilde));
  }

  /// P(X~ + S_k - k(k+1) > 0).
  Bounded<T> positive_given_children(std::size_t k) {
    SignProbs<T> s = sign_probabilities(pt_, table_[k], pronic(k));
    return {s.positive, s.slack};
  }

  [[nodiscard]] double vertex_truncation_bound() const {
    const double ep = to_double(p_.truncation_error());
    return ep + to_double(pt_.truncation_error()) + to_double(full_mean(p_)) * ep;
  }
  [[nodiscard]] double edge_truncation_bound() const {
    const double ep = to_double(p_.truncation_error());
    return ep + 2.0 * to_double(pt_.truncation_error()) +
           (to_double(full_mean(p_)) + to_double(full_mean(pt_))) * ep;
  }

  DensityReport<T> report() {
    DensityReport<T> r;
    r.f = vertex_densities();
    r.f_parent = parent_marginal();
    r.f_edge = edge_densities();
    r.mean = full_mean(p_);
    r.vertex_truncation_bound = vertex_truncation_bound();
    r.truncation_error = edge_truncation_bound();
    r.significance = classify(r.f, r.vertex_truncation_bound);
    auto gw = validate_gw_conditions(p_);
    r.warnings = gw.warnings;
    for (auto& e : gw.errors) r.warnings.push_back(e);
    return r;
  }

  static Significance classify(const TypeMap<T>& f, double truncation) {
    const T diff = f[index_of(VertexType::Positive)] - f[index_of(VertexType::Negative)];
    if constexpr (is_exact_v<T>) {
      if (diff > 0) return Significance::StrictlySignificant;
      if (diff < 0) return Significance::Insignificant;
      return Significance::Significant;
    } else {
      const double tol = kDensityTolerance + truncation;
      if (diff > tol) return Significance::StrictlySignificant;
      if (diff < -tol) return Significance::Insignificant;
      return Significance::Significant;
    }
  }

 private:
  TypeMap<T> mix(const BasicPmf<T>& weights, const BasicPmf<T>& parent) {
    std::array<Accumulator<T>, 3> acc;
    const auto& w = weights.weights();
    for (std::size_t k = 0; k < w.size(); ++k) {
      if (w[k] == 0) continue;
      const SignProbs<T> s = sign_probabilities(parent, table_[k], pronic(k));
      acc[0] += w[k] * s.negative;
      acc[1] += w[k] * s.zero;
      acc[2] += w[k] * s.positive;
    }
    return {acc[0].value(), acc[1].value(), acc[2].value()};
  }

  BasicPmf<T> p_;
  BasicPmf<T> pt_;
  PowerTable<T> table_;
};

template <Scalar T>
TypeMap<T> vertex_densities(const BasicPmf<T>& p) {
  return GwModel<T>(p).vertex_densities();
}

template <Scalar T>
EdgeMap<T> edge_densities(const BasicPmf<T>& p) {
  return GwModel<T>(p).edge_densities();
}

template <Scalar T>
TypeMap<T> parent_marginal(const BasicPmf<T>& p) {
  return GwModel<T>(p).parent_marginal();
}

template <Scalar T>
DensityReport<T> density_report(const BasicPmf<T>& p) {
  return GwModel<T>(p).report();
}

template <Scalar T>
Significance classify_significance(const BasicPmf<T>& p) {
  GwModel<T> m(p);
  return GwModel<T>::classify(m.vertex_densities(), m.vertex_truncation_bound());
}

template <Scalar T>
T correlation_gap(const BasicPmf<T>& p) {
  GwModel<T> m(p);
  const auto fe = m.edge_densities();
  const auto fp = m.parent_marginal();
  const auto f = m.vertex_densities();
  const std::size_t pos = index_of(VertexType::Positive);
  return fe[pos][pos] - fp[pos] * f[pos];
}

// ---------------------------------------------------------------------------
// Monotonicity criterion

enum class MonoVerdict { Holds, Fails, Inconclusive };

constexpr std::string_view to_string(MonoVerdict v) noexcept {
  switch (v) {
    case MonoVerdict::Holds: return "Holds";
    case MonoVerdict::Fails: return "Fails";
    case MonoVerdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

template <Scalar T>
struct MonoPoint {
  std::size_t k_tilde = 0;
  std::size_t k = 0;
  T value{0};
  T slack{0};
};

template <Scalar T>
struct MonoWitness {
  std::size_t k_tilde = 0;
  std::size_t k = 0;
  std::size_t k_next = 0;
  T value_k{0};
  T value_next{0};
};

template <Scalar T>
struct MonoResult {
  MonoVerdict verdict = MonoVerdict::Holds;
  std::optional<MonoWitness<T>> witness;
  /// First and last k of supp(p) that were compared.
  std::pair<std::size_t, std::size_t> certified_k_range{0, 0};
  std::vector<std::size_t> k_tildes;
  std::vector<MonoPoint<T>> points;
  /// f(max k~, next k beyond k_max) plus its slack, when a tail had to be certified.
  std::optional<MonoPoint<T>> tail;
  std::vector<std::string> notes;
};

struct MonoOptions {
  /// Largest k compared; defaults to the largest support point of p.
  std::optional<std::size_t> k_max;
  double cert_eps = 1e-9;
  /// Restrict the k~ values; defaults to supp(p~).
  std::optional<std::vector<std::size_t>> k_tildes;
  /// Return at the first strict increase instead of evaluating the whole grid.
  bool stop_at_first = true;
};

/// Checks that k -> P(k~ + S_k - k(k+1) > 0) is non-increasing along
/// consecutive support points of p, for every requested k~.
template <Scalar T>
MonoResult<T> mono_condition(GwModel<T>& model, const MonoOptions& opt = {}) {
  const BasicPmf<T>& p = model.offspring();
  const BasicPmf<T>& pt = model.size_biased_offspring();
  MonoResult<T> r;
  const std::size_t k_max = opt.k_max.value_or(p.max_value());
  std::vector<std::size_t> ks;
  for (std::size_t k : p.support()) {
    if (k <= k_max) ks.push_back(k);
  }
  r.k_tildes = opt.k_tildes.value_or(pt.support());
  if (ks.empty() || r.k_tildes.empty()) {
    r.notes.push_back("no support points to compare");
    return r;
  }
  r.certified_k_range = {ks.front(), ks.back()};

  bool within_slack_increase = false;
  for (std::size_t kt : r.k_tildes) {
    Bounded<T> prev = model.mono_value(kt, ks.front());
    r.points.push_back({kt, ks.front(), prev.value, prev.slack});
    for (std::size_t i = 1; i < ks.size(); ++i) {
      const Bounded<T> cur = model.mono_value(kt, ks[i]);
      r.points.push_back({kt, ks[i], cur.value, cur.slack});
      if (cur.value > prev.value) {
        if (cur.value - prev.value > prev.slack + cur.slack) {
          if (!r.witness) {
            r.witness = MonoWitness<T>{kt, ks[i - 1], ks[i], prev.value, cur.value};
            r.verdict = MonoVerdict::Fails;
            if (opt.stop_at_first) return r;
          }
        } else {
          within_slack_increase = true;
        }
      }
      prev = cur;
    }
  }
  if (r.witness) return r;
  if (within_slack_increase) {
    r.verdict = MonoVerdict::Inconclusive;
    r.notes.push_back("an increase smaller than the truncation slack was found");
  }

  // Support of p beyond k_max (the truncated tail, or points the caller skipped).
  std::optional<std::size_t> k_next;
  if (p.truncated()) {
    k_next = ks.back() + 1;
  } else {
    for (std::size_t k : p.support()) {
      if (k > k_max) {
        k_next = k;
        break;
      }
    }
  }
  if (k_next) {
    const std::size_t kt = *std::max_element(r.k_tildes.begin(), r.k_tildes.end());
    const Bounded<T> last = model.mono_value(kt, ks.back());
    const Bounded<T> nxt = model.mono_value(kt, *k_next);
    r.tail = MonoPoint<T>{kt, *k_next, nxt.value, nxt.slack};
    const bool small = to_double(nxt.value) + to_double(nxt.slack) < opt.cert_eps;
    // No increase detectable beyond the combined slack.
    const bool below = !(nxt.value > last.value && nxt.value - last.value > last.slack + nxt.slack);
    if (!(small && below)) {
      r.verdict = MonoVerdict::Inconclusive;
      r.notes.push_back("tail beyond k = " + std::to_string(ks.back()) + " could not be certified");
    }
  }
  if (!opt.k_tildes && to_double(pt.truncation_error()) > opt.cert_eps) {
    r.verdict = MonoVerdict::Inconclusive;
    r.notes.push_back("size-biased tail mass exceeds cert_eps");
  }
  return r;
}

template <Scalar T>
MonoResult<T> mono_condition(const BasicPmf<T>& p, const MonoOptions& opt = {}) {
  GwModel<T> model(p);
  return mono_condition(model, opt);
}

inline MonoResult<double> mono_condition_poisson(double lambda, const MonoOptions& opt = {},
                                                 double eps = kDefaultPoissonEps) {
  return mono_condition(poisson_truncated(lambda, eps), opt);
}

struct MonoScanPoint {
  double lambda = 0;
  MonoVerdict verdict = MonoVerdict::Holds;
};

struct MonoTransition {
  double lambda_lo = 0;  // last point with verdict `from`
  double lambda_hi = 0;  // first point with verdict `to`
  MonoVerdict from = MonoVerdict::Holds;
  MonoVerdict to = MonoVerdict::Holds;
};

struct MonoScan {
  std::vector<MonoScanPoint> points;
  std::vector<MonoTransition> transitions;
};

/// Verdict changes of the Poisson family between lo and hi, with each change
/// refined by bisection to width `resolution`.
inline MonoTransition bisect_transition(double lo, double hi, MonoVerdict v_lo, MonoVerdict v_hi,
                                        const MonoOptions& opt, double eps, double resolution) {
  while (hi - lo > resolution) {
    const double mid = 0.5 * (lo + hi);
    const MonoVerdict v = mono_condition_poisson(mid, opt, eps).verdict;
    if (v == v_lo) {
      lo = mid;
    } else {
      hi = mid;
      v_hi = v;
    }
  }
  return {lo, hi, v_lo, v_hi};
}

inline MonoScan scan_poisson_mono(double lo, double hi, double step, const MonoOptions& opt = {},
                                  double eps = kDefaultPoissonEps, double resolution = 1e-4) {
  if (!(step > 0) || !(hi >= lo) || !(lo > 0)) throw Error(Errc::InvalidInput, "scan needs 0 < lo <= hi and step > 0");
  MonoScan out;
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  for (std::size_t i = 0; i < n; ++i) {
    const double lambda = lo + static_cast<double>(i) * step;
    out.points.push_back({lambda, mono_condition_poisson(lambda, opt, eps).verdict});
  }
  for (std::size_t i = 1; i < out.points.size(); ++i) {
    const auto& a = out.points[i - 1];
    const auto& b = out.points[i];
    if (a.verdict != b.verdict) {
      out.transitions.push_back(bisect_transition(a.lambda, b.lambda, a.verdict, b.verdict, opt, eps, resolution));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Auxiliary inequalities behind the correlation criterion

template <Scalar T>
struct LemmaViolation {
  std::string part;  // "a", "a_prime", "b"
  std::size_t k_tilde = 0;
  std::size_t k = 0;
  T lhs{0};
  T rhs{0};
};

template <Scalar T>
struct Lemma31Report {
  std::size_t checks_a = 0;
  std::size_t checks_a_prime = 0;
  std::size_t checks_b = 0;
  std::vector<LemmaViolation<T>> violations;
  [[nodiscard]] bool holds() const noexcept { return violations.empty(); }
};

namespace detail {

template <Scalar T>
bool exceeds(const T& a, const T& b, double tol) {
  if constexpr (is_exact_v<T>) {
    return a > b;
  } else {
    return a - b > tol;
  }
}

}  // namespace detail

/// Verifies pointwise, for k in [k_lo, k_hi]:
///  (a)  k -> P(k~ + S_X - X(X+1) > 0 | X > k) is non-increasing over integer k, each k~ in supp(p~);
///  (a') the same with k~ replaced by X~;
///  (b)  P(Y > k) >= P(Y > k | X~ + S_Y - Y(Y+1) > 0), with Y ~ p~ unless given.
/// Throws HypothesisNotMet unless the monotonicity criterion holds for p.
template <Scalar T>
Lemma31Report<T> lemma31_check(const BasicPmf<T>& p, std::size_t k_lo, std::size_t k_hi,
                               std::optional<BasicPmf<T>> y = std::nullopt) {
  GwModel<T> model(p);
  if (auto mono = mono_condition(model); mono.verdict != MonoVerdict::Holds) {
    throw Error(Errc::HypothesisNotMet, std::string("monotonicity criterion is ") + std::string(to_string(mono.verdict)));
  }
  const double tol = kDensityTolerance + model.vertex_truncation_bound();
  const BasicPmf<T>& pt = model.size_biased_offspring();
  const auto supp = p.support();
  Lemma31Report<T> rep;

  // Conditional mean of rho over {X > k}: returns nullopt when P(X > k) = 0.
  auto conditional = [&](auto&& rho, std::size_t k) -> std::optional<T> {
    Accumulator<T> num, den;
    for (std::size_t s : supp) {
      if (s <= k) continue;
      num += p.weight(s) * rho(s);
      den += p.weight(s);
    }
    if (!(den.value() > 0)) return std::nullopt;
    return num.value() / den.value();
  };

  std::vector<std::size_t> ks;
  for (std::size_t k = k_lo; k <= k_hi; ++k) ks.push_back(k);

  auto check_chain = [&](auto&& rho, const std::string& part, std::size_t kt, std::size_t& counter) {
    std::optional<T> prev;
    std::size_t prev_k = 0;
    for (std::size_t k : ks) {
      auto cur = conditional(rho, k);
      if (!cur) break;
      if (prev) {
        ++counter;
        if (detail::exceeds(*cur, *prev, tol)) rep.violations.push_back({part, kt, prev_k, *prev, *cur});
      }
      prev = cur;
      prev_k = k;
    }
  };

  for (std::size_t kt : pt.support()) {
    check_chain([&](std::size_t s) { return model.mono_value(kt, s).value; }, "a", kt, rep.checks_a);
  }
  check_chain([&](std::size_t s) { return model.positive_given_children(s).value; }, "a_prime", 0,
              rep.checks_a_prime);

  const BasicPmf<T>& yl = y ? *y : pt;
  Accumulator<T> total;
  std::vector<T> joint(yl.weights().size(), T(0));
  for (std::size_t s = 0; s < joint.size(); ++s) {
    if (yl.weight(s) == 0) continue;
    joint[s] = yl.weight(s) * model.positive_given_children(s).value;
    total += joint[s];
  }
  const T z = total.value();
  if (z > 0) {
    for (std::size_t k = k_lo; k <= k_hi; ++k) {
      Accumulator<T> tail_y, tail_joint;
      for (std::size_t s = k + 1; s < joint.size(); ++s) {
        tail_y += yl.weight(s);
        tail_joint += joint[s];
      }
      const T lhs = tail_y.value();
      const T rhs = tail_joint.value() / z;
      ++rep.checks_b;
      if (detail::exceeds(rhs, lhs, tol)) rep.violations.push_back({"b", 0, k, lhs, rhs});
    }
  }
  return rep;
}

}  // namespace fpt
