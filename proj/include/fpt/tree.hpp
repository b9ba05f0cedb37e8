#pragma once

// Finite rooted trees and integer-exact friendship-bias typing.
//
// A vertex v is Positive / Neutral / Negative according to the sign of
//   (1/d_v) * sum_{w ~ v} d_w - d_v,
// which has the same sign as the integer  sum_{w ~ v} d_w - d_v^2.
// All typing goes through that integer, so neutrality is decided exactly.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <queue>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fpt/error.hpp"
#include "fpt/numeric.hpp"

namespace fpt {

using Vertex = std::uint32_t;
inline constexpr Vertex kNoVertex = std::numeric_limits<Vertex>::max();

struct Edge {
  Vertex u;
  Vertex v;
  friend bool operator==(const Edge&, const Edge&) = default;
};

enum class VertexType : std::int8_t { Negative = -1, Neutral = 0, Positive = 1 };

inline constexpr VertexType kAllTypes[] = {VertexType::Negative, VertexType::Neutral,
                                           VertexType::Positive};

constexpr bool operator<(VertexType a, VertexType b) noexcept {
  return static_cast<int>(a) < static_cast<int>(b);
}

constexpr std::size_t index_of(VertexType t) noexcept { return static_cast<std::size_t>(static_cast<int>(t) + 1); }

constexpr char symbol(VertexType t) noexcept {
  switch (t) {
    case VertexType::Negative: return '-';
    case VertexType::Neutral: return '0';
    case VertexType::Positive: return '+';
  }
  return '?';
}

constexpr std::string_view name(VertexType t) noexcept {
  switch (t) {
    case VertexType::Negative: return "negative";
    case VertexType::Neutral: return "neutral";
    case VertexType::Positive: return "positive";
  }
  return "?";
}

template <class Int>
constexpr VertexType type_from_sign(Int x) noexcept {
  return x > 0 ? VertexType::Positive : (x < 0 ? VertexType::Negative : VertexType::Neutral);
}

/// Integer with the sign of the friendship-bias of a vertex of `degree` whose
/// neighbours have total degree `neighbor_degree_sum`.
constexpr std::int64_t bias_numerator(std::int64_t degree, std::int64_t neighbor_degree_sum) noexcept {
  return neighbor_degree_sum - degree * degree;
}

struct TypeCounts {
  std::size_t n_plus = 0;
  std::size_t n_zero = 0;
  std::size_t n_minus = 0;

  void add(VertexType t) noexcept {
    switch (t) {
      case VertexType::Positive: ++n_plus; break;
      case VertexType::Neutral: ++n_zero; break;
      case VertexType::Negative: ++n_minus; break;
    }
  }
  [[nodiscard]] std::size_t total() const noexcept { return n_plus + n_zero + n_minus; }
  /// N+ - N-.
  [[nodiscard]] std::int64_t gap() const noexcept {
    return static_cast<std::int64_t>(n_plus) - static_cast<std::int64_t>(n_minus);
  }
  friend bool operator==(const TypeCounts&, const TypeCounts&) = default;
};

/// Immutable rooted tree on dense vertex ids 0..n-1. Children are stored in
/// ascending id order.
class Tree {
 public:
  /// The single-vertex tree.
  Tree() : parent_{kNoVertex}, offsets_{0, 0}, degree_{0} {}

  /// Builds a tree from a parent array (parent[root] == kNoVertex).
  /// Validates that every vertex reaches the root without cycles.
  static Tree from_parents(std::vector<Vertex> parent, Vertex root) {
    const std::size_t n = parent.size();
    if (n == 0 || root >= n) throw Error(Errc::UnknownRoot, "root not in vertex set");
    if (parent[root] != kNoVertex) throw Error(Errc::InvalidInput, "root must not have a parent");
    Tree t;
    t.root_ = root;
    t.parent_ = std::move(parent);
    t.offsets_.assign(n + 1, 0);
    for (Vertex v = 0; v < n; ++v) {
      if (v == root) continue;
      Vertex p = t.parent_[v];
      if (p >= n) throw Error(Errc::Disconnected, "vertex " + std::to_string(v) + " has no valid parent");
      if (p == v) throw Error(Errc::CycleDetected, "self-loop at " + std::to_string(v));
      ++t.offsets_[p + 1];
    }
    std::partial_sum(t.offsets_.begin(), t.offsets_.end(), t.offsets_.begin());
    t.children_.resize(n - 1);
    std::vector<std::size_t> cursor(t.offsets_.begin(), t.offsets_.end() - 1);
    for (Vertex v = 0; v < n; ++v) {
      if (v != root) t.children_[cursor[t.parent_[v]]++] = v;
    }
    // Reachability from the root rules out cycles among non-root vertices.
    std::vector<Vertex> stack{root};
    std::size_t seen = 0;
    while (!stack.empty()) {
      Vertex v = stack.back();
      stack.pop_back();
      ++seen;
      for (Vertex c : t.children(v)) stack.push_back(c);
    }
    if (seen != n) throw Error(Errc::CycleDetected, "parent array contains a cycle");
    t.degree_.resize(n);
    for (Vertex v = 0; v < n; ++v) {
      t.degree_[v] = static_cast<std::uint32_t>(t.offsets_[v + 1] - t.offsets_[v]) + (v != root ? 1u : 0u);
    }
    return t;
  }

  [[nodiscard]] std::size_t size() const noexcept { return parent_.size(); }
  [[nodiscard]] Vertex root() const noexcept { return root_; }
  [[nodiscard]] bool contains(Vertex v) const noexcept { return v < size(); }
  [[nodiscard]] Vertex parent(Vertex v) const { return parent_.at(v); }
  [[nodiscard]] std::span<const Vertex> children(Vertex v) const {
    return {children_.data() + offsets_[v], children_.data() + offsets_[v + 1]};
  }
  [[nodiscard]] std::uint32_t degree(Vertex v) const { return degree_.at(v); }
  [[nodiscard]] std::span<const std::uint32_t> degrees() const noexcept { return degree_; }

  template <class F>
  void for_each_neighbor(Vertex v, F&& f) const {
    if (parent_[v] != kNoVertex) f(parent_[v]);
    for (Vertex c : children(v)) f(c);
  }

  [[nodiscard]] std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(size() - 1);
    for (Vertex v = 0; v < size(); ++v) {
      if (v != root_) out.push_back({parent_[v], v});
    }
    return out;
  }

  /// Same undirected tree, rooted at `r`.
  [[nodiscard]] Tree rerooted(Vertex r) const;

 private:
  Vertex root_ = 0;
  std::vector<Vertex> parent_;
  std::vector<std::size_t> offsets_;
  std::vector<Vertex> children_;
  std::vector<std::uint32_t> degree_;
};

/// Builds a rooted tree from an undirected edge list over ids 0..n-1.
/// n is one more than the largest id mentioned (or 1 for an empty list).
inline Tree build_tree(std::span<const Edge> edges, Vertex root) {
  Vertex max_id = 0;
  for (const Edge& e : edges) max_id = std::max({max_id, e.u, e.v});
  const std::size_t n = edges.empty() ? 1 : static_cast<std::size_t>(max_id) + 1;
  if (root >= n) throw Error(Errc::UnknownRoot, "root " + std::to_string(root) + " is not a vertex");

  std::vector<std::vector<Vertex>> adj(n);
  std::set<std::pair<Vertex, Vertex>> seen;
  for (const Edge& e : edges) {
    if (e.u == e.v) throw Error(Errc::CycleDetected, "self-loop at " + std::to_string(e.u));
    auto key = std::minmax(e.u, e.v);
    if (!seen.insert(key).second) {
      throw Error(Errc::DuplicateEdge,
                  "edge (" + std::to_string(key.first) + "," + std::to_string(key.second) + ") repeated");
    }
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  for (auto& a : adj) std::sort(a.begin(), a.end());

  std::vector<Vertex> parent(n, kNoVertex);
  std::vector<bool> visited(n, false);
  std::queue<Vertex> frontier;
  frontier.push(root);
  visited[root] = true;
  std::size_t reached = 0;
  while (!frontier.empty()) {
    Vertex v = frontier.front();
    frontier.pop();
    ++reached;
    for (Vertex w : adj[v]) {
      if (w == parent[v]) continue;
      if (visited[w]) throw Error(Errc::CycleDetected, "cycle through vertex " + std::to_string(w));
      visited[w] = true;
      parent[w] = v;
      frontier.push(w);
    }
  }
  if (reached != n) {
    throw Error(Errc::Disconnected,
                std::to_string(n - reached) + " vertices unreachable from root " + std::to_string(root));
  }
  return Tree::from_parents(std::move(parent), root);
}

inline Tree build_tree(std::initializer_list<Edge> edges, Vertex root) {
  return build_tree(std::span<const Edge>(edges.begin(), edges.size()), root);
}

inline Tree Tree::rerooted(Vertex r) const {
  if (!contains(r)) throw Error(Errc::UnknownRoot, "root " + std::to_string(r) + " is not a vertex");
  auto e = edges();
  return build_tree(std::span<const Edge>(e), r);
}

inline std::int64_t bias_numerator(const Tree& t, Vertex v) {
  if (!t.contains(v)) throw Error(Errc::UnknownVertex, "vertex " + std::to_string(v));
  std::int64_t sum = 0;
  t.for_each_neighbor(v, [&](Vertex w) { sum += t.degree(w); });
  return bias_numerator(t.degree(v), sum);
}

inline VertexType vertex_type(const Tree& t, Vertex v) { return type_from_sign(bias_numerator(t, v)); }

inline std::vector<VertexType> vertex_types(const Tree& t) {
  std::vector<VertexType> out(t.size());
  for (Vertex v = 0; v < t.size(); ++v) out[v] = vertex_type(t, v);
  return out;
}

inline TypeCounts type_counts(const Tree& t) {
  TypeCounts c;
  for (Vertex v = 0; v < t.size(); ++v) c.add(vertex_type(t, v));
  return c;
}

/// Exact friendship-bias of v as a rational (0 for the trivial tree).
inline Rational friendship_bias(const Tree& t, Vertex v) {
  if (!t.contains(v)) throw Error(Errc::UnknownVertex, "vertex " + std::to_string(v));
  const std::int64_t d = t.degree(v);
  if (d == 0) return Rational(0);
  std::int64_t sum = 0;
  t.for_each_neighbor(v, [&](Vertex w) { sum += t.degree(w); });
  return Rational(sum, d) - d;
}

/// (1/n) * sum_u bias(u), exactly.
inline Rational average_bias(const Tree& t) {
  Rational total = 0;
  for (Vertex v = 0; v < t.size(); ++v) total += friendship_bias(t, v);
  return total / static_cast<long long>(t.size());
}

}  // namespace fpt
