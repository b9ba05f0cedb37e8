#include <catch_amalgamated.hpp>

#include <cmath>

#include "fpt/pmf.hpp"

using namespace fpt;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Errc code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::InvalidInput;
}

ExactPmf three_atom() {
  return make_pmf<Rational>({{1, Rational(1, 100)}, {2, Rational(5, 100)}, {3, Rational(94, 100)}});
}

bool has_warning(const GwConditionReport& r, std::string_view needle) {
  for (const auto& w : r.warnings) {
    if (w.find(needle) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("make_pmf validation") {
  auto p = make_pmf<double>({{1, 0.01}, {2, 0.05}, {3, 0.94}});
  CHECK(p.max_value() == 3);
  CHECK(p.weight(0) == 0);
  CHECK_THAT(p.total_mass(), WithinAbs(1.0, 1e-15));

  CHECK(code_of([] { make_pmf<double>({{1, 0.5}, {3, 0.6}}); }) == Errc::NotNormalized);
  CHECK(code_of([] { make_pmf<double>({{1, -0.5}, {3, 1.5}}); }) == Errc::NegativeWeight);
  CHECK(code_of([] { make_pmf<double>({{1, 0.5}, {1, 0.5}}); }) == Errc::DuplicateKey);
  CHECK(code_of([] { make_pmf<double>({}); }) == Errc::NotNormalized);
  CHECK(code_of([] { make_pmf<Rational>({{1, Rational(1, 3)}, {2, Rational(1, 3)}}); }) == Errc::NotNormalized);

  auto det = make_pmf<double>({{2, 1.0}});
  CHECK(det.support() == std::vector<std::size_t>{2});
  CHECK(det.min_value() == 2);

  auto with_zero = make_pmf<double>({{1, 0.5}, {2, 0.0}, {4, 0.5}});
  CHECK(with_zero.support() == std::vector<std::size_t>{1, 4});
}

TEST_CASE("GW hypothesis report") {
  auto ok = validate_gw_conditions(make_pmf<double>({{1, 0.5}, {4, 0.5}}));
  CHECK(ok.ok());
  CHECK(ok.hypotheses_hold());
  CHECK(ok.warnings.empty());

  auto pois = validate_gw_conditions(poisson_truncated(2.0));
  CHECK(pois.ok());
  CHECK_FALSE(pois.p0_zero);
  CHECK(has_warning(pois, "p_0 > 0"));
  CHECK(pois.klogk_finite);

  auto line = validate_gw_conditions(make_pmf<double>({{1, 1.0}}));
  CHECK_FALSE(line.ok());
  CHECK_FALSE(line.p1_below_one);
}

TEST_CASE("mean") {
  CHECK(mean(make_pmf<double>({{2, 1.0}})) == 2.0);
  CHECK(mean(three_atom()) == Rational(293, 100));
  CHECK_THAT(mean(make_pmf<double>({{1, 0.01}, {2, 0.05}, {3, 0.94}})), WithinRel(2.93, 1e-14));
  for (double q : {0.1, 0.5, 0.9}) {
    for (std::size_t a : {2u, 5u, 10u}) {
      auto p = make_pmf<double>({{1, q}, {a, 1 - q}});
      CHECK_THAT(mean(p), WithinRel(q + static_cast<double>(a) * (1 - q), 1e-14));
    }
  }
}

TEST_CASE("size biasing") {
  auto pt = size_biased(three_atom());
  CHECK(pt.weight(1) == Rational(1, 293));
  CHECK(pt.weight(2) == Rational(10, 293));
  CHECK(pt.weight(3) == Rational(282, 293));
  CHECK(pt.total_mass() == 1);
  const Rational mu = mean(three_atom());
  for (std::size_t k = 0; k <= 3; ++k) CHECK(pt.weight(k) * mu == Rational(k) * three_atom().weight(k));

  CHECK(size_biased(make_pmf<Rational>({{2, Rational(1)}})).weights() == make_pmf<Rational>({{2, Rational(1)}}).weights());
  auto half = size_biased(make_pmf<Rational>({{1, Rational(1, 2)}, {2, Rational(1, 2)}}));
  CHECK(half.weight(1) == Rational(1, 3));
  CHECK(half.weight(2) == Rational(2, 3));

  CHECK(code_of([] { size_biased(make_pmf<double>({{0, 1.0}})); }) == Errc::ZeroMean);

  // Truncated laws: the discarded tail shows up as truncation error.
  auto pp = size_biased(poisson_truncated(3.0));
  CHECK_THAT(pp.total_mass() + pp.truncation_error(), WithinAbs(1.0, 1e-12));
}

TEST_CASE("convolution powers") {
  auto p = make_pmf<double>({{1, 0.5}, {2, 0.5}});
  auto s2 = convolve_power(p, 2);
  CHECK(s2.max_value() == 4);
  CHECK_THAT(s2.weight(2), WithinAbs(0.25, 1e-15));
  CHECK_THAT(s2.weight(3), WithinAbs(0.5, 1e-15));
  CHECK_THAT(s2.weight(4), WithinAbs(0.25, 1e-15));

  auto s0 = convolve_power(three_atom(), 0);
  CHECK(s0.weights() == std::vector<Rational>{1});

  SECTION("semigroup and mean") {
    auto q = make_pmf<double>({{1, 0.2}, {2, 0.3}, {5, 0.5}});
    for (std::size_t j = 0; j <= 4; ++j) {
      for (std::size_t k = 0; k <= 4; ++k) {
        auto lhs = convolve_power(q, j + k);
        auto rhs = convolve(convolve_power(q, j), convolve_power(q, k));
        REQUIRE(lhs.max_value() == rhs.max_value());
        for (std::size_t i = 0; i <= lhs.max_value(); ++i) REQUIRE_THAT(lhs.weight(i), WithinAbs(rhs.weight(i), 1e-12));
      }
      const double m = mean(convolve_power(q, j));
      REQUIRE_THAT(m, WithinRel(static_cast<double>(j) * mean(q), 1e-10) || WithinAbs(0.0, 1e-300));
      if (j > 0) {
        auto s = convolve_power(q, j);
        REQUIRE(s.min_value() >= j);
        REQUIRE(s.max_value() <= 5 * j);
      }
    }
  }

  SECTION("exact semigroup") {
    auto e = three_atom();
    auto lhs = convolve_power(e, 5);
    auto rhs = convolve(convolve_power(e, 2), convolve_power(e, 3));
    CHECK(lhs.weights() == rhs.weights());
    CHECK(mean(lhs) == 5 * mean(e));
  }
}

TEST_CASE("truncated Poisson") {
  auto p1 = poisson_truncated(1.0);
  CHECK(p1.max_value() >= 12);
  CHECK(p1.max_value() <= 25);
  CHECK(p1.truncation_error() < 1e-12);
  double fact = 1;
  for (std::size_t k = 0; k <= p1.max_value(); ++k) {
    if (k > 0) fact *= static_cast<double>(k);
    CHECK_THAT(p1.weight(k), WithinRel(std::exp(-1.0) / fact, 1e-12));
  }
  CHECK_THAT(p1.total_mass() + p1.truncation_error(), WithinAbs(1.0, 1e-14));
  CHECK(p1.label() == "Poisson(1)");

  CHECK_THAT(full_mean(poisson_truncated(7.0)), WithinAbs(7.0, 1e-9));
  CHECK_THAT(mean(poisson_truncated(7.0)), WithinAbs(7.0, 1e-9));

  CHECK(code_of([] { poisson_truncated(0.0); }) == Errc::InvalidRate);
  CHECK(code_of([] { poisson_truncated(-1.0); }) == Errc::InvalidRate);
  CHECK(code_of([] { poisson_truncated(1.0, 0.1); }) == Errc::InvalidInput);
  CHECK(code_of([] { poisson_truncated(1.0, 0.0); }) == Errc::InvalidInput);
}

TEST_CASE("Poisson additivity under convolution") {
  for (double lambda : {0.5, 2.0, 7.0}) {
    auto p = poisson_truncated(lambda);
    for (std::size_t k : {2u, 3u, 6u}) {
      auto s = convolve_power(p, k);
      auto direct = poisson_truncated(static_cast<double>(k) * lambda);
      const double tol = s.truncation_error() + direct.truncation_error() + 1e-14;
      CHECK(s.truncation_error() <= static_cast<double>(k) * p.truncation_error() + 1e-18);
      const std::size_t top = std::max(s.max_value(), direct.max_value());
      for (std::size_t i = 0; i <= top; ++i) REQUIRE_THAT(s.weight(i), WithinAbs(direct.weight(i), tol));
    }
  }
}

TEST_CASE("exact to float conversion") {
  auto f = to_float(three_atom());
  CHECK(f.weight(3) == 0.94);
  CHECK_THAT(mean(f), WithinRel(2.93, 1e-15));
}
