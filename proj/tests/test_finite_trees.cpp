#include <catch_amalgamated.hpp>

#include <random>
#include <set>

#include "fpt/finite_trees.hpp"

using namespace fpt;

namespace {

Tree path(std::size_t n) {
  std::vector<Edge> e;
  for (Vertex i = 0; i + 1 < n; ++i) e.push_back({i, i + 1});
  return build_tree(std::span<const Edge>(e), 0);
}

Tree star(std::size_t leaves) {
  std::vector<Edge> e;
  for (Vertex i = 1; i <= leaves; ++i) e.push_back({0, i});
  return build_tree(std::span<const Edge>(e), 0);
}

Errc code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::InvalidInput;
}

}  // namespace

TEST_CASE("branching lower bound") {
  CHECK(branching_lower_bound(star(3)) == 2);
  CHECK(branching_lower_bound(star(4)) == 3);
  CHECK(code_of([] { branching_lower_bound(path(5)); }) == Errc::NoBranchingPoint);
}

TEST_CASE("verify_theorem on paths") {
  auto r3 = verify_theorem(path(3));
  CHECK(r3.is_path);
  CHECK(r3.n_plus_minus_gap == 1);
  CHECK(r3.holds);
  auto r7 = verify_theorem(path(7));
  CHECK(r7.n_plus_minus_gap == 0);
  CHECK(r7.holds);
  CHECK(r7.counts.n_minus == 2);
  CHECK(verify_theorem(path(2)).holds);
  CHECK(verify_theorem(build_tree(std::span<const Edge>{}, 0)).holds);
}

TEST_CASE("verify_theorem on a caterpillar") {
  // Path 0-1-2-3 with two extra leaves 4, 5 on vertex 1.
  Tree t = build_tree({{0, 1}, {1, 2}, {2, 3}, {1, 4}, {1, 5}}, 0);
  auto r = verify_theorem(t);
  CHECK_FALSE(r.is_path);
  CHECK(r.counts == TypeCounts{5, 0, 1});
  CHECK(r.n_plus_minus_gap == 4);
  CHECK(r.bound == 3);
  CHECK(r.holds);
}

TEST_CASE("double star falls below the branching bound but stays strictly significant") {
  // Two adjacent degree-3 vertices, each carrying two leaves.
  Tree t = build_tree({{0, 1}, {0, 2}, {0, 3}, {1, 4}, {1, 5}}, 0);
  auto r = verify_theorem(t);
  CHECK(r.counts == TypeCounts{4, 0, 2});
  CHECK(r.n_plus_minus_gap == 2);
  CHECK(r.bound == 3);
  CHECK_FALSE(r.holds);
  CHECK(r.strictly_significant);

  auto tr = exploration_construction(t);
  REQUIRE(tr.steps.size() == 3);
  CHECK(tr.steps[2].case_tag == StepCase::BranchFanout);
  CHECK(tr.steps[2].delta == 0);  // d_u - 3, one short of d_u - 2
  CHECK_FALSE(tr.steps[2].meets_claim());
  CHECK(tr.steps[2].meets_guarantee());
}

TEST_CASE("exploration construction on a star") {
  auto tr = exploration_construction(star(3));
  REQUIRE(tr.steps.size() == 2);
  CHECK(tr.steps[0].case_tag == StepCase::Root);
  CHECK(tr.steps[0].added_vertices == std::vector<Vertex>{0});
  CHECK(tr.steps[1].case_tag == StepCase::BranchFanout);
  CHECK(tr.steps[1].delta == 2);
  CHECK(tr.steps[1].meets_claim());
  CHECK(tr.final_counts == type_counts(star(3)));
}

TEST_CASE("exploration construction on a spider with legs of length two") {
  Tree t = build_tree({{0, 1}, {1, 2}, {0, 3}, {3, 4}, {0, 5}, {5, 6}}, 0);
  auto tr = exploration_construction(t);
  CHECK(tr.root == 0);
  CHECK(tr.steps.size() == 5);
  for (std::size_t i = 2; i < tr.steps.size(); ++i) {
    CHECK(tr.steps[i].case_tag == StepCase::PathExtension);
    CHECK(tr.steps[i].delta >= 0);
    CHECK(tr.steps[i].neutral_condition);
  }
  CHECK(tr.final_counts == type_counts(t));
}

TEST_CASE("exploration root is the lowest-id branching point") {
  // Vertex 0 is a leaf; branching points are 2 and 3.
  Tree t = build_tree({{0, 1}, {1, 2}, {2, 5}, {2, 6}, {2, 3}, {3, 4}, {3, 7}}, 0);
  auto tr = exploration_construction(t);
  CHECK(tr.root == 2);
  CHECK(code_of([] { exploration_construction(path(6)); }) == Errc::NoBranchingPoint);
}

TEST_CASE("exploration construction on random trees") {
  std::mt19937_64 rng(7);
  int checked = 0;
  while (checked < 400) {
    const std::size_t n = 4 + rng() % 40;
    std::vector<Vertex> seq(n - 2);
    for (auto& x : seq) x = static_cast<Vertex>(rng() % n);
    auto edges = prufer_to_edges(seq, n);
    Tree t = build_tree(std::span<const Edge>(edges), 0);
    if (!has_branching_point(t)) continue;
    ++checked;
    auto tr = exploration_construction(t);
    REQUIRE(tr.final_counts == type_counts(t));
    REQUIRE(tr.steps.front().added_vertices.size() == 1);
    std::set<Vertex> seen;
    std::set<std::pair<Vertex, Vertex>> rebuilt;
    std::int64_t gap = 0;
    for (const auto& s : tr.steps) {
      REQUIRE(!s.added_vertices.empty());
      REQUIRE(s.meets_guarantee());
      REQUIRE(s.counts_after.gap() >= gap);
      gap = s.counts_after.gap();
      for (std::size_t i = 0; i < s.added_vertices.size(); ++i) {
        REQUIRE(seen.insert(s.added_vertices[i]).second);
        if (s.attach[i] != kNoVertex) rebuilt.insert(std::minmax(s.attach[i], s.added_vertices[i]));
      }
    }
    REQUIRE(seen.size() == n);
    std::set<std::pair<Vertex, Vertex>> original;
    for (const Edge& e : t.edges()) original.insert(std::minmax(e.u, e.v));
    REQUIRE(rebuilt == original);
  }
}

TEST_CASE("Pruefer enumeration counts") {
  CHECK(enumerate_labeled_trees(3).size() == 3);
  CHECK(enumerate_labeled_trees(4).size() == 16);
  auto five = enumerate_labeled_trees(5);
  CHECK(five.size() == 125);
  std::size_t stars = 0;
  for (const Tree& t : five) {
    if (*std::max_element(t.degrees().begin(), t.degrees().end()) == 4) {
      ++stars;
      CHECK(type_counts(t).gap() == 3);
    }
  }
  CHECK(stars == 5);
  std::set<std::set<std::pair<Vertex, Vertex>>> distinct;
  for (const Tree& t : five) {
    std::set<std::pair<Vertex, Vertex>> es;
    for (const Edge& e : t.edges()) es.insert(std::minmax(e.u, e.v));
    distinct.insert(es);
  }
  CHECK(distinct.size() == 125);
  CHECK(cayley_count(8) == 262144);
  CHECK(code_of([] { enumerate_labeled_trees(11); }) == Errc::SizeOutOfRange);
  CHECK(code_of([] { enumerate_labeled_trees(1); }) == Errc::SizeOutOfRange);
}

TEST_CASE("exhaustive check") {
  auto s4 = exhaustive_check(4);
  CHECK(s4.violations() == 0);
  CHECK(s4.trees() == 1 + 3 + 16);
  CHECK(code_of([] { exhaustive_check(12); }) == Errc::SizeOutOfRange);

  auto s7 = exhaustive_check(7, 1);
  CHECK(s7.sizes[4].n == 6);
  CHECK(s7.sizes[4].violations == 90);
  CHECK(s7.significance_violations() == 0);
  REQUIRE(s7.sizes[4].first_violation.has_value());
  CHECK_FALSE(verify_theorem(build_tree(std::span<const Edge>(*s7.sizes[4].first_violation), 0)).holds);

  auto s7t = exhaustive_check(7, 3);
  for (std::size_t i = 0; i < s7.sizes.size(); ++i) {
    CHECK(s7t.sizes[i].trees == s7.sizes[i].trees);
    CHECK(s7t.sizes[i].violations == s7.sizes[i].violations);
    CHECK(s7t.sizes[i].tight == s7.sizes[i].tight);
    CHECK(s7t.sizes[i].first_violation == s7.sizes[i].first_violation);
  }
}
