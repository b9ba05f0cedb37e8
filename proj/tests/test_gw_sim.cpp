#include <catch_amalgamated.hpp>

#include <cmath>

#include "fpt/gw_exact.hpp"
#include "fpt/gw_sim.hpp"

using namespace fpt;
using Catch::Matchers::WithinAbs;

namespace {

constexpr std::size_t kNeg = 0, kZero = 1, kPos = 2;

Errc code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::InvalidInput;
}

Pmf regular(std::size_t k) { return make_pmf<double>({{k, 1.0}}); }

std::size_t count_of(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("counter RNG is a pure function of its key") {
  CounterRng a(1, 2), b(1, 2), c(1, 3);
  CHECK(a.bits(0) == b.bits(0));
  CHECK(a.bits(5) != a.bits(6));
  CHECK(a.bits(0) != c.bits(0));
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const double u = a.uniform(i);
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("deterministic offspring gives complete trees") {
  auto st = sample_tree(regular(2), 3, 123);
  CHECK_FALSE(st.extinct);
  REQUIRE(st.gen_sizes.size() == 6);
  for (std::size_t j = 0; j < st.gen_sizes.size(); ++j) CHECK(st.gen_sizes[j] == (std::uint64_t{1} << j));
  for (std::size_t j = 1; j <= 4; ++j) CHECK(st.gen_sizes[j] == st.ball_size(j) - st.ball_size(j - 1));
  CHECK(st.tree.size() == st.ball_size(4));
  for (Vertex v = 1; v < st.tree.size(); ++v) REQUIRE(st.generation[v] == st.generation[st.tree.parent(v)] + 1);
}

TEST_CASE("root boundary typing") {
  auto st = sample_tree(regular(2), 2, 1);
  auto types = classify_to_depth(st);
  REQUIRE(types.size() == 7);
  CHECK(types[0] == VertexType::Positive);
  // Generation 1 sees the degree-2 root, so it is negative; deeper vertices are neutral.
  CHECK(types[1] == VertexType::Negative);
  CHECK(types[2] == VertexType::Negative);
  for (Vertex v = 3; v < 7; ++v) CHECK(types[v] == VertexType::Neutral);

  auto star = sample_tree(regular(5), 0, 1);
  auto t5 = classify_to_depth(star);
  REQUIRE(t5.size() == 1);
  CHECK(t5[0] == VertexType::Positive);
}

TEST_CASE("typing agrees with a direct degree computation") {
  for (double lambda : {1.5, 3.0}) {
    auto p = poisson_truncated(lambda);
    auto r = first_surviving_replica(p, 5, 11);
    REQUIRE(r);
    auto st = sample_tree(p, 5, 11, *r);
    auto types = classify_to_depth(st);
    for (Vertex v = 0; v < types.size(); ++v) {
      std::int64_t sum = 0;
      st.tree.for_each_neighbor(v, [&](Vertex u) { sum += st.full_degree(u); });
      const std::int64_t d = st.full_degree(v);
      REQUIRE(types[v] == type_from_sign(bias_numerator(d, sum)));
    }
    // Vertices strictly inside the sample have their full degree materialized.
    for (Vertex v = 1; v < st.ball_size(4); ++v) REQUIRE(static_cast<std::int64_t>(st.tree.degree(v)) == st.full_degree(v));
  }
}

TEST_CASE("extinction handling") {
  auto p = poisson_truncated(0.5);
  std::size_t extinct = 0;
  std::optional<SampledTree> dead;
  for (std::uint64_t r = 0; r < 100; ++r) {
    auto st = sample_tree(p, 6, 5, r);
    if (st.extinct) {
      ++extinct;
      if (!dead) dead = st;
    }
  }
  CHECK(extinct > 90);
  REQUIRE(dead);
  CHECK(code_of([&] { classify_to_depth(*dead); }) == Errc::InsufficientDepth);
  const std::string dot = export_colored_dot(*dead);
  CHECK(count_of(dot, " -- ") == 0);
  CHECK(dot.find("  0;") != std::string::npos);

  auto st = sample_tree(regular(2), 3, 1);
  CHECK(code_of([&] { classify_to_depth(st, 4); }) == Errc::InsufficientDepth);
}

TEST_CASE("vertex cap") {
  CHECK(code_of([] { sample_tree(regular(10), 8, 1, 0, 1000); }) == Errc::VertexCapExceeded);
}

TEST_CASE("estimates are reproducible across thread counts") {
  auto p = poisson_truncated(2.0);
  auto a = estimate(p, {6, 40, 77, 1});
  auto b = estimate(p, {6, 40, 77, 4});
  auto c = estimate(p, {6, 40, 77, 3});
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(a.vertex[i].mean == b.vertex[i].mean);
    CHECK(a.vertex[i].se == c.vertex[i].se);
    for (std::size_t j = 0; j < 3; ++j) CHECK(a.edge[i][j].mean == b.edge[i][j].mean);
  }
  CHECK(a.surviving == b.surviving);
  CHECK(a.survival_rate < 1.0);
  CHECK(a.survival_rate > 0.5);
}

TEST_CASE("regular tree estimate") {
  auto est = estimate(regular(2), {6, 3, 1, 1});
  const double n_m = 127.0;
  // Only generation 1 is non-neutral, because of the degree-2 root.
  CHECK_THAT(est.vertex[kZero].mean, WithinAbs(1.0 - 2.0 / (n_m - 1.0), 1e-15));
  CHECK_THAT(est.vertex[kNeg].mean, WithinAbs(2.0 / (n_m - 1.0), 1e-15));
  CHECK(est.vertex[kZero].se == 0.0);
  CHECK_THAT(est.edge[kNeg][kZero].mean, WithinAbs(4.0 / (n_m - 1.0), 1e-15));
  CHECK_THAT(est.edge[kZero][kZero].mean, WithinAbs((n_m - 1.0 - 2.0 - 4.0) / (n_m - 1.0), 1e-15));
  CHECK(code_of([] { estimate(regular(2), {0, 3, 1, 1}); }) == Errc::InvalidInput);
  CHECK(code_of([] { estimate(regular(1), {4, 3, 1, 1}); }) == Errc::InvalidInput);
}

TEST_CASE("all-extinct runs raise") {
  CHECK(code_of([] { estimate(poisson_truncated(0.1), {6, 5, 1, 1}); }) == Errc::AllExtinct);
}

TEST_CASE("edge ratios sum to the proportion of non-root-parent edges") {
  auto p = make_pmf<double>({{1, 0.5}, {2, 0.5}});
  auto r = first_surviving_replica(p, 8, 3);
  REQUIRE(r);
  auto st = sample_tree(p, 8, 3, *r);
  auto types = classify_to_depth(st);
  auto rr = replica_ratios(st, types, 8);
  double total = 0, vsum = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    vsum += rr.vertex[i];
    for (std::size_t j = 0; j < 3; ++j) total += rr.edge[i][j];
  }
  const double n = static_cast<double>(st.ball_size(8));
  CHECK_THAT(vsum, WithinAbs(1.0, 1e-12));
  CHECK_THAT(total, WithinAbs((n - 1.0 - static_cast<double>(st.gen_sizes[1])) / (n - 1.0), 1e-12));
}

TEST_CASE("Monte Carlo agrees with the exact densities") {
  const std::vector<Pmf> pmfs = {make_pmf<double>({{1, 0.01}, {2, 0.05}, {3, 0.94}}),
                                 make_pmf<double>({{1, 0.5}, {2, 0.5}}), make_pmf<double>({{1, 0.3}, {4, 0.7}})};
  for (const Pmf& p : pmfs) {
    auto est = estimate(p, {10, 200, kDefaultSeed, 4});
    GwModel<double> model(p);
    auto f = model.vertex_densities();
    auto fe = model.edge_densities();
    for (std::size_t i = 0; i < 3; ++i) {
      const Stat& s = est.vertex[i];
      CHECK(std::abs(s.mean - f[i]) <= 4 * s.se + 1e-12);
      for (std::size_t j = 0; j < 3; ++j) {
        const Stat& e = est.edge[i][j];
        CHECK(std::abs(e.mean - fe[i][j]) <= 4 * e.se + 1e-3);
      }
    }
  }
}

TEST_CASE("convergence trace") {
  auto p = make_pmf<double>({{1, 0.5}, {2, 0.5}});
  auto tr = convergence_trace(p, 14, kDefaultSeed);
  REQUIRE(tr.rows.size() == 14);
  CHECK_THAT(tr.rows.back().vertex[kPos], WithinAbs(5.0 / 12.0, 0.05));
  CHECK_THAT(tr.rows.back().vertex[kNeg], WithinAbs(5.0 / 12.0, 0.05));
  for (std::size_t i = 1; i < tr.rows.size(); ++i) CHECK(tr.rows[i].n_m > tr.rows[i - 1].n_m);

  auto reg = convergence_trace(regular(3), 4, 1);
  CHECK(reg.rows[0].vertex[kNeg] == 1.0);
  CHECK(code_of([] { convergence_trace(regular(2), 1, 1); }) == Errc::InvalidInput);
}

TEST_CASE("colored DOT export") {
  Tree path = build_tree({{0, 1}, {1, 2}}, 0);
  const std::string dot = export_colored_dot(path, vertex_types(path));
  CHECK(dot.rfind("graph fpt {", 0) == 0);
  CHECK(count_of(dot, "fillcolor=red") == 2);
  CHECK(count_of(dot, "fillcolor=blue") == 1);
  CHECK(count_of(dot, " -- ") == 2);

  auto st = sample_tree(regular(2), 3, 1);
  const std::string reg = export_colored_dot(st);
  CHECK(count_of(reg, "fillcolor=red") == 1);
  CHECK(count_of(reg, "fillcolor=blue") == 2);
  CHECK(count_of(reg, " -- ") == 14);
  CHECK(export_colored_dot(st) == reg);
}
