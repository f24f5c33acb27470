#pragma once

#include "pqip/circuit.hpp"
#include "pqip/dyadic.hpp"

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace pqip {

/// State sum_y alpha_y / 2^(h/2) |y> with integer alpha_y, where h is the
/// number of Hadamards applied so far. Norm conservation is exact:
/// sum_y alpha_y^2 == 2^h.
class IntegerAmplitudeState {
 public:
  IntegerAmplitudeState(std::uint32_t width, std::uint64_t basis) : width_(width), amps_(std::size_t{1} << width) {
    if (width == 0 || width > 30) throw std::invalid_argument("simulator supports 1..30 qubits");
    if (basis >= amps_.size()) throw std::invalid_argument("basis index out of range");
    amps_[basis] = 1;
  }

  std::uint32_t width() const { return width_; }
  std::uint64_t hadamards_applied() const { return h_; }
  const std::vector<BigInt>& amplitudes() const { return amps_; }
  const BigInt& operator[](std::uint64_t y) const { return amps_[y]; }

  BigInt squared_norm() const {
    BigInt s = 0;
    for (const auto& a : amps_) s += a * a;
    return s;
  }

  /// Hadamard on qubit k: (a0, a1) -> (a0 + a1, a0 - a1) on every pair
  /// differing only in bit k.
  void apply(const Gate& g) {
    for (auto q : g.qubits())
      if (q >= width_) throw std::invalid_argument("gate qubit out of range");
    const std::uint64_t size = amps_.size();
    if (g.kind() == GateKind::H) {
      const std::uint64_t bit = std::uint64_t{1} << g.target();
      for (std::uint64_t y = 0; y < size; ++y) {
        if (y & bit) continue;
        BigInt a0 = std::move(amps_[y]);
        BigInt& a1 = amps_[y | bit];
        amps_[y] = a0 + a1;
        a1 = a0 - a1;
      }
      ++h_;
      return;
    }
    // Permutation gates are involutions: swap each non-fixed pair once.
    for (std::uint64_t y = 0; y < size; ++y) {
      const auto img = g.permute(y);
      if (img > y) std::swap(amps_[y], amps_[img]);
    }
  }

 private:
  std::uint32_t width_;
  std::uint64_t h_ = 0;
  std::vector<BigInt> amps_;
};

inline IntegerAmplitudeState apply_gate(IntegerAmplitudeState state, const Gate& gate) {
  state.apply(gate);
  return state;
}

inline IntegerAmplitudeState simulate(const Circuit& c, std::string_view input_bits, std::string_view witness_bits) {
  IntegerAmplitudeState s(c.width(), c.initial_basis(input_bits, witness_bits));
  for (const auto& g : c.gates()) s.apply(g);
  return s;
}

/// Sum of alpha_y^2 over basis states whose output qubit is 1, divided by 2^h.
inline DyadicRational accepting_weight(const IntegerAmplitudeState& s, std::uint32_t output) {
  BigInt acc = 0;
  const std::uint64_t bit = std::uint64_t{1} << output;
  const auto& a = s.amplitudes();
  for (std::uint64_t y = 0; y < a.size(); ++y)
    if (y & bit) acc += a[y] * a[y];
  return {acc, s.hadamards_applied()};
}

inline DyadicRational acceptance_probability(const Circuit& c, std::string_view input_bits, std::string_view witness_bits) {
  return accepting_weight(simulate(c, input_bits, witness_bits), c.layout().output);
}

/// All witnesses of length m in lexicographic order ("00", "01", "10", "11").
inline std::vector<Bits> all_bitstrings(std::uint32_t m) {
  if (m > 24) throw std::invalid_argument("refusing to enumerate more than 2^24 bit strings");
  std::vector<Bits> out;
  out.reserve(std::size_t{1} << m);
  for (std::uint64_t v = 0; v < (std::uint64_t{1} << m); ++v) {
    Bits b(m, '0');
    for (std::uint32_t i = 0; i < m; ++i)
      if ((v >> (m - 1 - i)) & 1) b[i] = '1';
    out.push_back(std::move(b));
  }
  return out;
}

/// Best acceptance probability over every completion of a witness prefix,
/// together with the first completion (lexicographically) that attains it.
struct BestCompletion {
  DyadicRational probability;
  Bits witness;
};

inline BestCompletion best_completion(const Circuit& c, std::string_view input_bits, std::string_view prefix) {
  const auto m = c.witness_size();
  if (prefix.size() > m) throw std::invalid_argument("witness prefix longer than the witness register");
  if (prefix.find_first_not_of("01") != std::string_view::npos) throw std::invalid_argument("witness prefix must be binary");
  std::optional<BestCompletion> best;
  for (const auto& tail : all_bitstrings(static_cast<std::uint32_t>(m - prefix.size()))) {
    Bits w = std::string(prefix) + tail;
    auto p = acceptance_probability(c, input_bits, w);
    if (!best || p > best->probability) best = BestCompletion{std::move(p), std::move(w)};
  }
  return *best;
}

inline DyadicRational max_acceptance_over_completions(const Circuit& c, std::string_view input_bits, std::string_view prefix) {
  return best_completion(c, input_bits, prefix).probability;
}

/// c* is the smallest multiple of 2^-h that is >= c; s* = c* - 2^-h.
struct Thresholds {
  DyadicRational c_star;
  DyadicRational s_star;
  std::uint64_t h = 0;

  /// c* * 2^h as an integer: the least passing value of 2^h * Pr[accept].
  BigInt c_star_scaled() const { return c_star.numerator_at(h); }
};

inline Thresholds compute_exact_thresholds(const Rational& c, std::uint64_t h) {
  if (c <= 0 || c > 1) throw std::invalid_argument("completeness must satisfy 0 < c <= 1");
  const BigInt scale = pow2(h);
  const Rational scaled = c * scale;
  BigInt ceil = numerator(scaled) / denominator(scaled);
  if (ceil * denominator(scaled) != numerator(scaled)) ceil += 1;
  return {DyadicRational(ceil, h), DyadicRational(ceil - 1, h), h};
}

}  // namespace pqip
