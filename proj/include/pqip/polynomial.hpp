#pragma once

#include "pqip/field.hpp"

#include <span>
#include <vector>

namespace pqip {

/// Coefficients low-to-high with trailing zeros trimmed (zero polynomial is
/// the empty list).
template <PrimeField F>
class UnivariatePolynomial {
 public:
  using Elem = typename F::Elem;

  UnivariatePolynomial() = default;
  UnivariatePolynomial(const F& f, std::vector<Elem> coeffs) : c_(std::move(coeffs)) {
    while (!c_.empty() && f.eq(c_.back(), f.zero())) c_.pop_back();
  }

  const std::vector<Elem>& coefficients() const { return c_; }
  /// Degree, with the zero polynomial reported as 0.
  std::size_t degree() const { return c_.empty() ? 0 : c_.size() - 1; }

  Elem evaluate(const F& f, const Elem& x) const {
    Elem acc = f.zero();
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = f.add(f.mul(acc, x), *it);
    return acc;
  }

  /// p(0) + p(1).
  Elem sum_over_boolean(const F& f) const {
    if (c_.empty()) return f.zero();
    Elem s = c_[0];
    for (const auto& c : c_) s = f.add(s, c);
    return s;
  }

  friend bool operator==(const UnivariatePolynomial&, const UnivariatePolynomial&) = default;

 private:
  std::vector<Elem> c_;
};

/// Unique polynomial of degree < values.size() through (i, values[i]) for
/// i = 0, 1, ...; requires values.size() < p.
template <PrimeField F>
UnivariatePolynomial<F> interpolate_consecutive(const F& f, std::span<const typename F::Elem> values) {
  using Elem = typename F::Elem;
  const std::size_t n = values.size();
  // Newton forward differences: p(X) = sum_k d_k * C(X, k).
  std::vector<Elem> diff(values.begin(), values.end());
  std::vector<Elem> newton(n);
  for (std::size_t k = 0; k < n; ++k) {
    newton[k] = diff[0];
    for (std::size_t i = 0; i + 1 < n - k; ++i) diff[i] = f.sub(diff[i + 1], diff[i]);
  }
  // Expand falling factorials X(X-1)...(X-k+1)/k! into monomials.
  std::vector<Elem> coeffs(n, f.zero());
  std::vector<Elem> falling{f.one()};
  Elem factorial = f.one();
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0) {
      std::vector<Elem> next(falling.size() + 1, f.zero());
      const Elem shift = f.neg(f.from_u64(k - 1));
      for (std::size_t i = 0; i < falling.size(); ++i) {
        next[i + 1] = f.add(next[i + 1], falling[i]);
        next[i] = f.add(next[i], f.mul(falling[i], shift));
      }
      falling = std::move(next);
      factorial = f.mul(factorial, f.from_u64(k));
    }
    const Elem scale = f.mul(newton[k], f.inv(factorial));
    for (std::size_t i = 0; i < falling.size(); ++i) coeffs[i] = f.add(coeffs[i], f.mul(falling[i], scale));
  }
  return UnivariatePolynomial<F>(f, std::move(coeffs));
}

}  // namespace pqip
