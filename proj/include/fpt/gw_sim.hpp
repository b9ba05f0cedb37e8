#pragma once

// Monte Carlo Galton-Watson trees truncated at depth m, exact typing of every
// vertex whose neighbourhood is known, and across-replica estimates of the
// vertex-type and edge-type fractions.
//
// Vertex ids are assigned in breadth-first order, so the vertices of
// generation <= m are exactly the ids 0..N_m-1.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "fpt/error.hpp"
#include "fpt/gw_exact.hpp"
#include "fpt/pmf.hpp"
#include "fpt/tree.hpp"

namespace fpt {

/// Counter-based SplitMix64: the value for (seed, replica, counter) does not
/// depend on evaluation order, so serial and parallel runs agree bit for bit.
class CounterRng {
 public:
  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  constexpr CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept : key_(mix(mix(seed) ^ stream)) {}

  [[nodiscard]] constexpr std::uint64_t bits(std::uint64_t counter) const noexcept { return mix(key_ ^ mix(counter)); }
  /// Uniform on [0, 1) with 53 random bits.
  [[nodiscard]] constexpr double uniform(std::uint64_t counter) const noexcept {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t key_;
};

/// Inverse-CDF sampler over the stored (renormalized) weights of a pmf.
class OffspringSampler {
 public:
  explicit OffspringSampler(const Pmf& p) {
    const double total = p.total_mass();
    Accumulator<double> acc;
    cdf_.reserve(p.weights().size());
    for (double w : p.weights()) {
      acc += w / total;
      cdf_.push_back(acc.value());
    }
    cdf_.back() = 2.0;  // u < 1 always lands inside the support
  }
  [[nodiscard]] std::uint32_t operator()(double u) const {
    return static_cast<std::uint32_t>(std::upper_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin());
  }

 private:
  std::vector<double> cdf_;
};

inline constexpr std::uint64_t kDefaultSeed = 42;
inline constexpr std::size_t kDefaultVertexCap = 100'000'000;

struct SampledTree {
  /// Generations 0..m+1; generation-(m+1) vertices carry offspring counts only.
  Tree tree;
  std::vector<std::uint32_t> generation;
  /// Number of children drawn for every materialized vertex.
  std::vector<std::uint32_t> offspring;
  std::size_t m = 0;
  std::uint64_t seed = 0;
  std::uint64_t replica = 0;
  /// Z_{m+2} == 0.
  bool extinct = false;
  /// Z_0 .. Z_{m+2}.
  std::vector<std::uint64_t> gen_sizes;

  /// N_j = Z_0 + ... + Z_j.
  [[nodiscard]] std::uint64_t ball_size(std::size_t j) const {
    std::uint64_t s = 0;
    for (std::size_t i = 0; i <= j && i < gen_sizes.size(); ++i) s += gen_sizes[i];
    return s;
  }
  /// Degree in the infinite tree: offspring plus the parent edge.
  [[nodiscard]] std::int64_t full_degree(Vertex v) const {
    return static_cast<std::int64_t>(offspring[v]) + (v == tree.root() ? 0 : 1);
  }
};

inline SampledTree sample_tree(const Pmf& p, std::size_t m, std::uint64_t seed, std::uint64_t replica = 0,
                               std::size_t vertex_cap = kDefaultVertexCap) {
  const OffspringSampler draw(p);
  const CounterRng rng(seed, replica);
  SampledTree st;
  st.m = m;
  st.seed = seed;
  st.replica = replica;
  std::vector<Vertex> parent{kNoVertex};
  st.generation = {0};
  std::size_t begin = 0, end = 1;
  st.gen_sizes.push_back(1);
  for (std::size_t g = 0; g <= m; ++g) {
    for (std::size_t v = begin; v < end; ++v) {
      const std::uint32_t x = draw(rng.uniform(v));
      st.offspring.push_back(x);
      if (parent.size() + x > vertex_cap) {
        throw Error(Errc::VertexCapExceeded, "more than " + std::to_string(vertex_cap) + " vertices by generation " +
                                                 std::to_string(g + 1));
      }
      for (std::uint32_t i = 0; i < x; ++i) {
        parent.push_back(static_cast<Vertex>(v));
        st.generation.push_back(static_cast<std::uint32_t>(g + 1));
      }
    }
    begin = end;
    end = parent.size();
    st.gen_sizes.push_back(end - begin);
  }
  std::uint64_t z_next = 0;
  for (std::size_t v = begin; v < end; ++v) {
    const std::uint32_t x = draw(rng.uniform(v));
    st.offspring.push_back(x);
    z_next += x;
  }
  st.gen_sizes.push_back(z_next);
  st.extinct = z_next == 0;
  st.tree = Tree::from_parents(std::move(parent), 0);
  return st;
}

/// Types, in the infinite tree, of the vertices of generation <= depth
/// (ids 0..N_depth-1). The root is typed with its degree X.
inline std::vector<VertexType> classify_to_depth(const SampledTree& st, std::optional<std::size_t> depth = std::nullopt) {
  const std::size_t d = depth.value_or(st.m);
  if (st.extinct) throw Error(Errc::InsufficientDepth, "tree died out before generation " + std::to_string(st.m + 2));
  if (d > st.m) throw Error(Errc::InsufficientDepth, "tree was sampled to depth " + std::to_string(st.m));
  const auto n = static_cast<std::size_t>(st.ball_size(d));
  std::vector<VertexType> types(n);
  for (Vertex v = 0; v < n; ++v) {
    std::int64_t sum = 0;
    st.tree.for_each_neighbor(v, [&](Vertex w) { sum += st.full_degree(w); });
    types[v] = type_from_sign(bias_numerator(st.full_degree(v), sum));
  }
  return types;
}

struct Stat {
  double mean = 0;
  double se = 0;
};

struct SimEstimate {
  TypeMap<Stat> vertex{};
  EdgeMap<Stat> edge{};
  std::size_t replicas = 0;
  std::size_t surviving = 0;
  std::size_t m = 0;
  std::uint64_t seed = 0;
  double survival_rate = 0;
  std::string pmf_label;
  std::vector<std::string> warnings;

  [[nodiscard]] const Stat& of(VertexType t) const { return vertex[index_of(t)]; }
  [[nodiscard]] const Stat& of(VertexType parent, VertexType child) const {
    return edge[index_of(parent)][index_of(child)];
  }
};

/// Type fractions of one tree. Denominator N_m - 1 (the root is excluded);
/// edges count parent -> child with a non-root parent and child generation <= m.
struct ReplicaRatios {
  TypeMap<double> vertex{};
  EdgeMap<double> edge{};
};

inline ReplicaRatios replica_ratios(const SampledTree& st, const std::vector<VertexType>& types, std::size_t depth) {
  const std::uint64_t n = st.ball_size(depth);
  ReplicaRatios r;
  if (n < 2) return r;
  std::array<std::uint64_t, 3> vc{};
  std::array<std::array<std::uint64_t, 3>, 3> ec{};
  for (Vertex v = 1; v < n; ++v) {
    ++vc[index_of(types[v])];
    const Vertex u = st.tree.parent(v);
    if (u != st.tree.root()) ++ec[index_of(types[u])][index_of(types[v])];
  }
  const auto denom = static_cast<double>(n - 1);
  for (std::size_t i = 0; i < 3; ++i) {
    r.vertex[i] = static_cast<double>(vc[i]) / denom;
    for (std::size_t j = 0; j < 3; ++j) r.edge[i][j] = static_cast<double>(ec[i][j]) / denom;
  }
  return r;
}

struct SimOptions {
  std::size_t m = 10;
  std::size_t replicas = 200;
  std::uint64_t seed = kDefaultSeed;
  unsigned threads = 1;
  std::size_t vertex_cap = kDefaultVertexCap;
};

/// Vertex and edge fraction estimates averaged over surviving replicas.
inline SimEstimate estimate(const Pmf& p, const SimOptions& opt) {
  if (opt.replicas == 0) throw Error(Errc::InvalidInput, "need at least one replica");
  if (opt.m == 0) throw Error(Errc::InvalidInput, "depth must be at least 1 (the root is excluded from counts)");
  const auto gw = validate_gw_conditions(p);
  if (!gw.ok()) throw Error(Errc::InvalidInput, gw.errors.front());

  std::vector<std::optional<ReplicaRatios>> per(opt.replicas);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (std::size_t r; !failed && (r = next.fetch_add(1)) < opt.replicas;) {
      try {
        SampledTree st = sample_tree(p, opt.m, opt.seed, r, opt.vertex_cap);
        if (st.extinct) continue;
        per[r] = replica_ratios(st, classify_to_depth(st), opt.m);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned i = 1; i < std::max(1u, opt.threads); ++i) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);

  SimEstimate est;
  est.replicas = opt.replicas;
  est.m = opt.m;
  est.seed = opt.seed;
  est.pmf_label = p.label();
  est.warnings = gw.warnings;
  std::vector<const ReplicaRatios*> alive;
  for (const auto& r : per) {
    if (r) alive.push_back(&*r);
  }
  est.surviving = alive.size();
  est.survival_rate = static_cast<double>(alive.size()) / static_cast<double>(opt.replicas);
  if (alive.empty()) throw Error(Errc::AllExtinct, "all " + std::to_string(opt.replicas) + " replicas died out");

  // Replica order is fixed, so the reduction is reproducible.
  auto summarize = [&](auto&& get) {
    const double n = static_cast<double>(alive.size());
    Accumulator<double> s;
    for (const auto* r : alive) s += get(*r);
    const double mean = s.value() / n;
    Accumulator<double> ss;
    for (const auto* r : alive) {
      const double d = get(*r) - mean;
      ss += d * d;
    }
    const double sd = alive.size() > 1 ? std::sqrt(ss.value() / (n - 1.0)) : 0.0;
    return Stat{mean, sd / std::sqrt(n)};
  };
  for (std::size_t i = 0; i < 3; ++i) {
    est.vertex[i] = summarize([i](const ReplicaRatios& r) { return r.vertex[i]; });
    for (std::size_t j = 0; j < 3; ++j) {
      est.edge[i][j] = summarize([i, j](const ReplicaRatios& r) { return r.edge[i][j]; });
    }
  }
  return est;
}

inline SimEstimate estimate_densities(const Pmf& p, std::size_t m, std::size_t replicas, std::uint64_t seed,
                                      unsigned threads = 1) {
  return estimate(p, {m, replicas, seed, threads});
}

inline SimEstimate estimate_edge_densities(const Pmf& p, std::size_t m, std::size_t replicas, std::uint64_t seed,
                                           unsigned threads = 1) {
  return estimate(p, {m, replicas, seed, threads});
}

inline constexpr std::size_t kMaxSurvivalAttempts = 1000;

/// Index of the first replica stream whose tree reaches generation m+2.
inline std::optional<std::uint64_t> first_surviving_replica(const Pmf& p, std::size_t m, std::uint64_t seed,
                                                            std::size_t attempts = kMaxSurvivalAttempts,
                                                            std::size_t vertex_cap = kDefaultVertexCap) {
  for (std::uint64_t r = 0; r < attempts; ++r) {
    if (!sample_tree(p, m, seed, r, vertex_cap).extinct) return r;
  }
  return std::nullopt;
}

struct TraceRow {
  std::size_t m = 0;
  std::uint64_t n_m = 0;
  TypeMap<double> vertex{};
  EdgeMap<double> edge{};
};

struct ConvergenceTrace {
  std::uint64_t seed = 0;
  std::uint64_t replica = 0;
  std::string pmf_label;
  std::vector<TraceRow> rows;
};

/// Type fractions within the depth-m ball of one surviving tree, m = 1..m_max.
inline ConvergenceTrace convergence_trace(const Pmf& p, std::size_t m_max, std::uint64_t seed,
                                          std::size_t vertex_cap = kDefaultVertexCap) {
  if (m_max < 2) throw Error(Errc::InvalidInput, "convergence trace needs m_max >= 2");
  auto r = first_surviving_replica(p, m_max, seed, kMaxSurvivalAttempts, vertex_cap);
  if (!r) throw Error(Errc::AllExtinct, "no surviving tree in " + std::to_string(kMaxSurvivalAttempts) + " attempts");
  const SampledTree st = sample_tree(p, m_max, seed, *r, vertex_cap);
  const auto types = classify_to_depth(st);
  ConvergenceTrace out{seed, *r, p.label(), {}};
  for (std::size_t m = 1; m <= m_max; ++m) {
    const ReplicaRatios rr = replica_ratios(st, types, m);
    out.rows.push_back({m, st.ball_size(m), rr.vertex, rr.edge});
  }
  return out;
}

// ---------------------------------------------------------------------------
// DOT export: positive = red, neutral = plain circle, negative = blue.

namespace detail {

inline void dot_node(std::ostringstream& os, Vertex v, std::optional<VertexType> t) {
  os << "  " << v;
  if (t == VertexType::Positive) os << " [style=filled, fillcolor=red]";
  if (t == VertexType::Negative) os << " [style=filled, fillcolor=blue]";
  os << ";\n";
}

inline void dot_header(std::ostringstream& os, const std::string& comment) {
  os << "graph fpt {\n";
  if (!comment.empty()) os << "  // " << comment << "\n";
  os << "  node [shape=circle, label=\"\", width=0.2];\n";
}

}  // namespace detail

/// Colours the vertices of generation <= m; an extinct tree yields the root only.
inline std::string export_colored_dot(const SampledTree& st, const std::vector<VertexType>& types) {
  std::ostringstream os;
  detail::dot_header(os, "seed " + std::to_string(st.seed) + " replica " + std::to_string(st.replica) + " depth " +
                             std::to_string(st.m));
  if (st.extinct || types.empty()) {
    detail::dot_node(os, st.tree.root(), std::nullopt);
  } else {
    for (Vertex v = 0; v < types.size(); ++v) detail::dot_node(os, v, types[v]);
    for (Vertex v = 1; v < types.size(); ++v) os << "  " << st.tree.parent(v) << " -- " << v << ";\n";
  }
  os << "}\n";
  return os.str();
}

inline std::string export_colored_dot(const SampledTree& st) {
  if (st.extinct) return export_colored_dot(st, {});
  return export_colored_dot(st, classify_to_depth(st));
}

/// Any finite tree with one type per vertex.
inline std::string export_colored_dot(const Tree& t, const std::vector<VertexType>& types, const std::string& comment = {}) {
  if (types.size() != t.size()) throw Error(Errc::InvalidInput, "need one type per vertex");
  std::ostringstream os;
  detail::dot_header(os, comment);
  for (Vertex v = 0; v < t.size(); ++v) detail::dot_node(os, v, types[v]);
  for (const Edge& e : t.edges()) os << "  " << e.u << " -- " << e.v << ";\n";
  os << "}\n";
  return os.str();
}

}  // namespace fpt
