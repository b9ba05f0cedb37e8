#pragma once

// Significance of finite trees: the branching-point lower bound on N+ - N-,
// a replay of the exploration construction with per-step accounting, and an
// exhaustive Pruefer-sequence oracle over all labelled trees of a given size.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <thread>
#include <vector>

#include "fpt/tree.hpp"

namespace fpt {

[[nodiscard]] inline bool has_branching_point(const Tree& t) {
  return std::any_of(t.degrees().begin(), t.degrees().end(), [](std::uint32_t d) { return d >= 3; });
}

/// 1 + sum over branching points (d_u >= 3) of (d_u - 2).
inline std::int64_t branching_lower_bound(const Tree& t) {
  if (!has_branching_point(t)) throw Error(Errc::NoBranchingPoint, "tree has maximum degree <= 2");
  std::int64_t bound = 1;
  for (std::uint32_t d : t.degrees()) {
    if (d >= 3) bound += static_cast<std::int64_t>(d) - 2;
  }
  return bound;
}

struct TheoremReport {
  std::int64_t n_plus_minus_gap = 0;
  /// Branching trees: 1 + sum (d_u - 2); paths: the exact value 1{n = 3}.
  std::int64_t bound = 0;
  bool is_path = false;
  /// Paths: gap == 1{n=3}. Branching trees: gap >= bound.
  bool holds = false;
  /// N+ >= N-, and N+ > N- when a branching point exists.
  bool significant = false;
  bool strictly_significant = false;
  TypeCounts counts;
};

inline TheoremReport verify_theorem(const Tree& t) {
  TheoremReport r;
  r.counts = type_counts(t);
  r.n_plus_minus_gap = r.counts.gap();
  r.is_path = !has_branching_point(t);
  if (r.is_path) {
    r.bound = t.size() == 3 ? 1 : 0;
    r.holds = r.n_plus_minus_gap == r.bound;
  } else {
    r.bound = branching_lower_bound(t);
    r.holds = r.n_plus_minus_gap >= r.bound;
  }
  r.strictly_significant = r.n_plus_minus_gap > 0;
  r.significant = r.is_path ? r.n_plus_minus_gap >= 0 : r.strictly_significant;
  return r;
}

// ---------------------------------------------------------------------------
// Exploration construction

enum class StepCase { Root, BranchFanout, PathExtension };

constexpr std::string_view to_string(StepCase c) noexcept {
  switch (c) {
    case StepCase::Root: return "Root";
    case StepCase::BranchFanout: return "BranchFanout";
    case StepCase::PathExtension: return "PathExtension";
  }
  return "?";
}

struct StepRecord {
  std::size_t step_index = 0;  // 1-based
  StepCase case_tag = StepCase::Root;
  /// Subtree leaf whose neighbourhood was expanded (kNoVertex for step 1).
  Vertex expanded = kNoVertex;
  std::uint32_t expanded_degree = 0;
  std::vector<Vertex> added_vertices;
  /// attach[i] is the subtree vertex that added_vertices[i] hangs from.
  std::vector<Vertex> attach;
  TypeCounts counts_after;
  /// Change of N+ - N- caused by this step.
  std::int64_t delta = 0;
  /// Increment claimed by the construction: d_phi - 1 (step 2), d_u - 2 (fan-out), 0 (path).
  std::int64_t claimed_min_delta = 0;
  /// Increment that always holds: d_phi - 1 (step 2), d_u - 3 (fan-out), 0 (path).
  std::int64_t guaranteed_min_delta = 0;
  // PathExtension introspection.
  std::uint32_t parent_degree = 0;
  bool neutral_condition = false;  // k == 1 and parent of u has degree 3
  bool expanded_neutral_after = false;

  [[nodiscard]] bool meets_claim() const noexcept {
    return step_index == 2 ? delta == claimed_min_delta : delta >= claimed_min_delta;
  }
  [[nodiscard]] bool meets_guarantee() const noexcept {
    return step_index == 2 ? delta == guaranteed_min_delta : delta >= guaranteed_min_delta;
  }
};

struct ExplorationTrace {
  Vertex root = kNoVertex;  // lowest-id branching point
  std::vector<StepRecord> steps;
  TypeCounts final_counts;
  std::int64_t lower_bound = 0;
};

namespace detail {

class InducedSubtree {
 public:
  explicit InducedSubtree(const Tree& t) : t_(t), in_(t.size(), false), deg_(t.size(), 0) {}

  void add(Vertex v) {
    in_[v] = true;
    t_.for_each_neighbor(v, [&](Vertex w) {
      if (in_[w]) {
        ++deg_[w];
        ++deg_[v];
      }
    });
  }
  [[nodiscard]] bool contains(Vertex v) const { return in_[v]; }
  [[nodiscard]] std::uint32_t degree(Vertex v) const { return deg_[v]; }

  [[nodiscard]] VertexType type(Vertex v) const {
    std::int64_t sum = 0;
    t_.for_each_neighbor(v, [&](Vertex w) {
      if (in_[w]) sum += deg_[w];
    });
    return type_from_sign(bias_numerator(deg_[v], sum));
  }
  [[nodiscard]] TypeCounts counts() const {
    TypeCounts c;
    for (Vertex v = 0; v < t_.size(); ++v) {
      if (in_[v]) c.add(type(v));
    }
    return c;
  }

 private:
  const Tree& t_;
  std::vector<bool> in_;
  std::vector<std::uint32_t> deg_;
};

}  // namespace detail

/// Replays the exploration: start at the lowest-id branching point, add all of
/// its neighbours, then repeatedly expand the lowest-id subtree leaf that is
/// not a leaf of the full tree (fan-out at branching points, path walk at
/// degree-2 vertices).
inline ExplorationTrace exploration_construction(const Tree& t) {
  if (!has_branching_point(t)) throw Error(Errc::NoBranchingPoint, "construction needs a vertex of degree >= 3");
  ExplorationTrace trace;
  trace.lower_bound = branching_lower_bound(t);
  Vertex phi = 0;
  while (t.degree(phi) < 3) ++phi;
  trace.root = phi;

  detail::InducedSubtree sub(t);
  std::size_t added_total = 0;
  TypeCounts prev;

  auto finish_step = [&](StepRecord& rec) {
    rec.counts_after = sub.counts();
    rec.delta = rec.counts_after.gap() - prev.gap();
    prev = rec.counts_after;
    rec.step_index = trace.steps.size() + 1;
    trace.steps.push_back(std::move(rec));
  };

  {
    StepRecord rec;
    rec.case_tag = StepCase::Root;
    rec.added_vertices = {phi};
    rec.attach = {kNoVertex};
    sub.add(phi);
    ++added_total;
    finish_step(rec);
  }
  {
    StepRecord rec;
    rec.case_tag = StepCase::BranchFanout;
    rec.expanded = phi;
    rec.expanded_degree = t.degree(phi);
    t.for_each_neighbor(phi, [&](Vertex w) {
      rec.added_vertices.push_back(w);
      rec.attach.push_back(phi);
    });
    std::sort(rec.added_vertices.begin(), rec.added_vertices.end());
    for (Vertex w : rec.added_vertices) sub.add(w);
    added_total += rec.added_vertices.size();
    rec.claimed_min_delta = static_cast<std::int64_t>(t.degree(phi)) - 1;
    rec.guaranteed_min_delta = rec.claimed_min_delta;
    finish_step(rec);
  }

  while (added_total < t.size()) {
    Vertex u = kNoVertex;
    for (Vertex v = 0; v < t.size(); ++v) {
      if (v != phi && sub.contains(v) && sub.degree(v) == 1 && t.degree(v) > 1) {
        u = v;
        break;
      }
    }
    if (u == kNoVertex) throw Error(Errc::InvalidInput, "exploration stalled; input is not a tree");

    StepRecord rec;
    rec.expanded = u;
    rec.expanded_degree = t.degree(u);
    Vertex anchor = kNoVertex;
    t.for_each_neighbor(u, [&](Vertex w) {
      if (sub.contains(w)) anchor = w;
    });

    if (t.degree(u) >= 3) {
      rec.case_tag = StepCase::BranchFanout;
      t.for_each_neighbor(u, [&](Vertex w) {
        if (!sub.contains(w)) {
          rec.added_vertices.push_back(w);
          rec.attach.push_back(u);
        }
      });
      for (Vertex w : rec.added_vertices) sub.add(w);
      rec.claimed_min_delta = static_cast<std::int64_t>(t.degree(u)) - 2;
      rec.guaranteed_min_delta = static_cast<std::int64_t>(t.degree(u)) - 3;
    } else {
      rec.case_tag = StepCase::PathExtension;
      rec.parent_degree = t.degree(anchor);
      Vertex prev_v = anchor, cur = u;
      while (true) {
        Vertex next = kNoVertex;
        t.for_each_neighbor(cur, [&](Vertex w) {
          if (w != prev_v) next = w;
        });
        rec.added_vertices.push_back(next);
        rec.attach.push_back(cur);
        sub.add(next);
        if (t.degree(next) != 2) break;
        prev_v = cur;
        cur = next;
      }
      rec.neutral_condition = rec.added_vertices.size() == 1 && rec.parent_degree == 3;
      rec.expanded_neutral_after = sub.type(u) == VertexType::Neutral;
      rec.claimed_min_delta = 0;
      rec.guaranteed_min_delta = 0;
    }
    added_total += rec.added_vertices.size();
    finish_step(rec);
  }
  trace.final_counts = prev;
  return trace;
}

// ---------------------------------------------------------------------------
// Labelled-tree enumeration

/// Decodes a Pruefer sequence over {0..n-1} (length n-2) into n-1 edges.
inline std::vector<Edge> prufer_to_edges(std::span<const Vertex> seq, std::size_t n) {
  if (n < 2 || seq.size() != n - 2) throw Error(Errc::SizeOutOfRange, "Pruefer sequence length must be n-2");
  std::vector<std::uint32_t> degree(n, 1);
  for (Vertex x : seq) {
    if (x >= n) throw Error(Errc::InvalidInput, "Pruefer symbol out of range");
    ++degree[x];
  }
  std::priority_queue<Vertex, std::vector<Vertex>, std::greater<>> leaves;
  for (Vertex v = 0; v < n; ++v) {
    if (degree[v] == 1) leaves.push(v);
  }
  std::vector<Edge> edges;
  edges.reserve(n - 1);
  for (Vertex x : seq) {
    Vertex leaf = leaves.top();
    leaves.pop();
    edges.push_back({leaf, x});
    if (--degree[x] == 1) leaves.push(x);
  }
  Vertex a = leaves.top();
  leaves.pop();
  Vertex b = leaves.top();
  edges.push_back({a, b});
  return edges;
}

inline std::uint64_t cayley_count(std::size_t n) {
  if (n <= 2) return 1;
  std::uint64_t c = 1;
  for (std::size_t i = 0; i + 2 < n; ++i) c *= n;
  return c;
}

inline constexpr std::size_t kMaxEnumerationSize = 10;

/// Calls f(tree) for every labelled tree on n vertices (rooted at 0) whose
/// Pruefer sequence starts with `prefix`; the full set when prefix is empty.
template <class F>
void for_each_labeled_tree(std::size_t n, F&& f, std::span<const Vertex> prefix = {}) {
  if (n < 2 || n > kMaxEnumerationSize) {
    throw Error(Errc::SizeOutOfRange, "enumeration supports 2 <= n <= " + std::to_string(kMaxEnumerationSize));
  }
  const std::size_t len = n - 2;
  if (prefix.size() > len) throw Error(Errc::InvalidInput, "prefix longer than Pruefer sequence");
  std::vector<Vertex> seq(len, 0);
  std::copy(prefix.begin(), prefix.end(), seq.begin());
  const std::size_t free_from = prefix.size();
  while (true) {
    auto edges = prufer_to_edges(seq, n);
    f(build_tree(std::span<const Edge>(edges), 0));
    std::size_t i = len;
    while (i > free_from) {
      --i;
      if (++seq[i] < n) break;
      seq[i] = 0;
      if (i == free_from) return;
    }
    if (len == free_from) return;
  }
}

/// All n^(n-2) labelled trees on n vertices.
inline std::vector<Tree> enumerate_labeled_trees(std::size_t n) {
  std::vector<Tree> out;
  for_each_labeled_tree(n, [&](Tree t) { out.push_back(std::move(t)); });
  return out;
}

struct SizeSummary {
  std::size_t n = 0;
  std::uint64_t trees = 0;
  std::uint64_t violations = 0;    // verify_theorem().holds == false
  std::uint64_t tight = 0;         // gap == bound
  std::uint64_t paths = 0;
  std::uint64_t significance_violations = 0;
  /// min over branching trees of gap - bound (max() when there are none).
  std::int64_t min_slack = std::numeric_limits<std::int64_t>::max();
  std::optional<std::vector<Edge>> first_violation;
};

struct ExhaustiveSummary {
  std::vector<SizeSummary> sizes;
  [[nodiscard]] std::uint64_t trees() const {
    std::uint64_t s = 0;
    for (auto& z : sizes) s += z.trees;
    return s;
  }
  [[nodiscard]] std::uint64_t violations() const {
    std::uint64_t s = 0;
    for (auto& z : sizes) s += z.violations;
    return s;
  }
  [[nodiscard]] std::uint64_t significance_violations() const {
    std::uint64_t s = 0;
    for (auto& z : sizes) s += z.significance_violations;
    return s;
  }
};

inline constexpr std::size_t kMaxExhaustiveSize = 9;

namespace detail {

inline void accumulate(SizeSummary& s, const Tree& t) {
  TheoremReport r = verify_theorem(t);
  ++s.trees;
  if (r.is_path) ++s.paths;
  if (r.n_plus_minus_gap == r.bound) ++s.tight;
  if (!r.significant) ++s.significance_violations;
  if (!r.is_path) s.min_slack = std::min(s.min_slack, r.n_plus_minus_gap - r.bound);
  if (!r.holds) {
    if (!s.first_violation) s.first_violation = t.edges();
    ++s.violations;
  }
}

inline void merge(SizeSummary& into, const SizeSummary& part) {
  into.trees += part.trees;
  into.violations += part.violations;
  into.tight += part.tight;
  into.paths += part.paths;
  into.significance_violations += part.significance_violations;
  into.min_slack = std::min(into.min_slack, part.min_slack);
  if (!into.first_violation && part.first_violation) into.first_violation = part.first_violation;
}

}  // namespace detail

/// Checks every labelled tree with 2 <= n <= n_max. Work for each n is split by
/// the first Pruefer symbol across `threads` workers and merged in symbol order,
/// so the result does not depend on the thread count.
inline ExhaustiveSummary exhaustive_check(std::size_t n_max, unsigned threads = 1) {
  if (n_max < 2 || n_max > kMaxExhaustiveSize) {
    throw Error(Errc::SizeOutOfRange, "exhaustive check supports 2 <= n_max <= " + std::to_string(kMaxExhaustiveSize));
  }
  threads = std::max(1u, threads);
  ExhaustiveSummary out;
  for (std::size_t n = 2; n <= n_max; ++n) {
    SizeSummary total;
    total.n = n;
    if (n <= 3) {
      for_each_labeled_tree(n, [&](const Tree& t) { detail::accumulate(total, t); });
    } else {
      std::vector<SizeSummary> parts(n);
      std::atomic<std::size_t> next{0};
      auto worker = [&] {
        for (std::size_t sym; (sym = next.fetch_add(1)) < n;) {
          Vertex prefix[1] = {static_cast<Vertex>(sym)};
          for_each_labeled_tree(n, [&](const Tree& t) { detail::accumulate(parts[sym], t); }, prefix);
        }
      };
      std::vector<std::jthread> pool;
      for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
      worker();
      pool.clear();
      for (const auto& p : parts) detail::merge(total, p);
    }
    out.sizes.push_back(std::move(total));
  }
  return out;
}

}  // namespace fpt
