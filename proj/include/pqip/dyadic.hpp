#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pqip {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline BigInt pow2(std::uint64_t e) {
  BigInt r = 1;
  r <<= static_cast<unsigned>(e);
  return r;
}

/// Exact number of the form numerator / 2^exponent.
///
/// Always held in canonical form: the numerator is odd, or it is zero and the
/// exponent is zero. Two values are equal iff their fields are equal.
class DyadicRational {
 public:
  DyadicRational() = default;
  DyadicRational(BigInt numerator, std::uint64_t exponent)
      : num_(std::move(numerator)), exp_(exponent) {
    normalize();
  }

  static DyadicRational from_int(const BigInt& v) { return {v, 0}; }

  /// Parses the canonical text form `<numerator>/2^<exponent>`. Non-canonical
  /// input (even numerator with a positive exponent) is rejected.
  static DyadicRational parse(std::string_view text) {
    const auto slash = text.find("/2^");
    if (slash == std::string_view::npos || slash == 0)
      throw std::invalid_argument("dyadic: expected <num>/2^<exp>");
    const std::string num_text(text.substr(0, slash));
    const std::string exp_text(text.substr(slash + 3));
    if (exp_text.empty() || exp_text.find_first_not_of("0123456789") != std::string::npos)
      throw std::invalid_argument("dyadic: bad exponent");
    const auto digits_at = (num_text[0] == '-') ? 1u : 0u;
    if (num_text.size() == digits_at ||
        num_text.find_first_not_of("0123456789", digits_at) != std::string::npos)
      throw std::invalid_argument("dyadic: bad numerator");
    DyadicRational d;
    d.num_ = BigInt(num_text);
    d.exp_ = std::stoull(exp_text);
    DyadicRational canon(d.num_, d.exp_);
    if (canon.num_ != d.num_ || canon.exp_ != d.exp_)
      throw std::invalid_argument("dyadic: not in canonical form");
    return canon;
  }

  const BigInt& numerator() const { return num_; }
  std::uint64_t exponent() const { return exp_; }

  /// Numerator after rescaling to denominator 2^e; requires e >= exponent().
  BigInt numerator_at(std::uint64_t e) const {
    if (e < exp_) throw std::invalid_argument("dyadic: exponent too small for exact rescale");
    return num_ << static_cast<unsigned>(e - exp_);
  }

  Rational to_rational() const { return Rational(num_, pow2(exp_)); }
  double to_double() const { return to_rational().convert_to<double>(); }

  std::string str() const { return num_.str() + "/2^" + std::to_string(exp_); }

  friend DyadicRational operator+(const DyadicRational& a, const DyadicRational& b) {
    const auto e = std::max(a.exp_, b.exp_);
    return {a.numerator_at(e) + b.numerator_at(e), e};
  }
  friend DyadicRational operator-(const DyadicRational& a, const DyadicRational& b) {
    const auto e = std::max(a.exp_, b.exp_);
    return {a.numerator_at(e) - b.numerator_at(e), e};
  }
  friend bool operator==(const DyadicRational&, const DyadicRational&) = default;
  friend std::strong_ordering operator<=>(const DyadicRational& a, const DyadicRational& b) {
    const auto e = std::max(a.exp_, b.exp_);
    const BigInt l = a.numerator_at(e);
    const BigInt r = b.numerator_at(e);
    if (l < r) return std::strong_ordering::less;
    if (l > r) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }
  friend std::ostream& operator<<(std::ostream& os, const DyadicRational& d) { return os << d.str(); }

 private:
  void normalize() {
    if (num_ == 0) {
      exp_ = 0;
      return;
    }
    while (exp_ > 0 && !bit_test(num_ < 0 ? BigInt(-num_) : num_, 0)) {
      num_ >>= 1;  // exact: numerator is even here
      --exp_;
    }
  }

  BigInt num_ = 0;
  std::uint64_t exp_ = 0;
};

/// Parses `<num>/<den>` (or a bare integer) into an exact rational.
inline Rational parse_rational(std::string_view text) {
  const auto slash = text.find('/');
  auto parse_int = [](std::string_view s) {
    const auto start = (!s.empty() && s[0] == '-') ? 1u : 0u;
    if (s.size() == start || s.find_first_not_of("0123456789", start) != std::string_view::npos)
      throw std::invalid_argument("rational: bad integer '" + std::string(s) + "'");
    return BigInt(std::string(s));
  };
  if (slash == std::string_view::npos) return Rational(parse_int(text));
  const BigInt den = parse_int(text.substr(slash + 1));
  if (den == 0) throw std::invalid_argument("rational: zero denominator");
  return Rational(parse_int(text.substr(0, slash)), den);
}

inline std::string rational_str(const Rational& r) {
  return numerator(r).str() + "/" + denominator(r).str();
}

}  // namespace pqip
