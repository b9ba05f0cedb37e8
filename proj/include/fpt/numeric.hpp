#pragma once

// Scalar plumbing shared by the exact (rational) and floating-point code paths.

#include <boost/multiprecision/cpp_int.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <type_traits>

#include "fpt/error.hpp"

namespace fpt {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

template <class T>
inline constexpr bool is_exact_v = std::is_same_v<T, Rational>;

template <class T>
concept Scalar = std::is_same_v<T, double> || std::is_same_v<T, Rational>;

inline double to_double(double x) noexcept { return x; }
inline double to_double(const Rational& x) { return x.convert_to<double>(); }

inline std::string to_string(const Rational& x) {
  return boost::multiprecision::numerator(x).str() + "/" +
         boost::multiprecision::denominator(x).str();
}

/// Parses "0.01", "1/100", "3", "2.5e-3" into an exact rational.
inline Rational parse_rational(std::string_view text) {
  auto fail = [&] { throw Error(Errc::InvalidInput, "not a rational number: '" + std::string(text) + "'"); };
  if (text.empty()) fail();
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Rational num = parse_rational(text.substr(0, slash));
    Rational den = parse_rational(text.substr(slash + 1));
    if (den == 0) fail();
    return num / den;
  }
  bool negative = false;
  std::size_t i = 0;
  if (text[i] == '+' || text[i] == '-') {
    negative = text[i] == '-';
    ++i;
  }
  BigInt digits = 0;
  long long scale = 0;
  bool seen_digit = false, seen_point = false;
  for (; i < text.size(); ++i) {
    char c = text[i];
    if (c >= '0' && c <= '9') {
      digits = digits * 10 + (c - '0');
      if (seen_point) --scale;
      seen_digit = true;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else if (c == 'e' || c == 'E') {
      long long exp = 0;
      auto rest = text.substr(i + 1);
      if (!rest.empty() && rest.front() == '+') rest.remove_prefix(1);
      auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), exp);
      if (ec != std::errc{} || ptr != rest.data() + rest.size()) fail();
      scale += exp;
      break;
    } else {
      fail();
    }
  }
  if (!seen_digit) fail();
  Rational value(digits);
  if (scale > 0) value *= Rational(boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(scale)));
  if (scale < 0) value /= Rational(boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(-scale)));
  return negative ? -value : value;
}

/// Neumaier-compensated sum for doubles; plain exact sum for rationals.
template <class T>
class Accumulator {
 public:
  void add(const T& x) {
    if constexpr (is_exact_v<T>) {
      sum_ += x;
    } else {
      double t = sum_ + x;
      if (std::abs(sum_) >= std::abs(x)) {
        comp_ += (sum_ - t) + x;
      } else {
        comp_ += (x - t) + sum_;
      }
      sum_ = t;
    }
  }
  Accumulator& operator+=(const T& x) {
    add(x);
    return *this;
  }
  [[nodiscard]] T value() const {
    if constexpr (is_exact_v<T>) {
      return sum_;
    } else {
      return sum_ + comp_;
    }
  }

 private:
  T sum_{0};
  T comp_{0};
};

/// x^e for rationals, computed on numerator and denominator separately.
inline Rational pow(const Rational& x, unsigned e) {
  return Rational(boost::multiprecision::pow(numerator(x), e), boost::multiprecision::pow(denominator(x), e));
}

}  // namespace fpt
