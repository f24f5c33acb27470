#pragma once

// Independent reference computations used only by the test suites.

#include "pqip/circuit.hpp"
#include "pqip/path_sum.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace pqip::oracle {

/// Double-precision state-vector simulation; returns Pr[output = 1].
inline std::vector<double> float_state(const Circuit& c, std::string_view x, std::string_view w) {
  std::vector<double> a(std::size_t{1} << c.width(), 0.0);
  a[c.initial_basis(x, w)] = 1.0;
  const double s = 1.0 / std::sqrt(2.0);
  for (const auto& g : c.gates()) {
    std::vector<double> next(a.size(), 0.0);
    for (std::uint64_t y = 0; y < a.size(); ++y) {
      if (a[y] == 0.0) continue;
      if (g.kind() == GateKind::H) {
        const std::uint64_t bit = std::uint64_t{1} << g.target();
        next[y & ~bit] += s * a[y];
        next[y | bit] += ((y & bit) ? -s : s) * a[y];
      } else {
        next[g.permute(y)] += a[y];
      }
    }
    a = std::move(next);
  }
  return a;
}

inline double float_acceptance(const Circuit& c, std::string_view x, std::string_view w) {
  const auto a = float_state(c, x, w);
  double p = 0;
  for (std::uint64_t y = 0; y < a.size(); ++y)
    if ((y >> c.layout().output) & 1) p += a[y] * a[y];
  return p;
}

/// Random circuit over {H, X, CNOT, CCNOT}. Qubit 0.. input, then witness,
/// remaining qubits ancilla; output is the last qubit.
inline Circuit random_circuit(std::mt19937_64& rng, std::uint32_t width, std::size_t gates, std::uint32_t inputs,
                              std::uint32_t witness) {
  std::vector<Gate> gs;
  std::uniform_int_distribution<std::uint32_t> qd(0, width - 1);
  while (gs.size() < gates) {
    const auto kind = static_cast<GateKind>(rng() % 4);
    if (arity(kind) > width) continue;
    std::array<std::uint32_t, 3> q{};
    for (std::size_t i = 0; i < arity(kind); ++i) {
      do q[i] = qd(rng);
      while (std::find(q.begin(), q.begin() + static_cast<std::ptrdiff_t>(i), q[i]) != q.begin() + static_cast<std::ptrdiff_t>(i));
    }
    gs.emplace_back(kind, std::span<const std::uint32_t>(q.data(), arity(kind)));
  }
  RegisterLayout l{{0, inputs}, {inputs, witness}, width - 1};
  return Circuit(width, l, std::move(gs));
}

inline Bits random_bits(std::mt19937_64& rng, std::size_t n) {
  Bits b(n, '0');
  for (auto& c : b) c = (rng() & 1) ? '1' : '0';
  return b;
}

/// Multilinear extension by definition: sum over the full 2^N x 2^N boolean
/// table weighted by equality polynomials.
template <PrimeField F>
typename F::Elem brute_force_mle(const F& f, const Gate& g, std::uint32_t width, std::span<const typename F::Elem> left,
                                 std::span<const typename F::Elem> right) {
  auto eq = [&](std::span<const typename F::Elem> pt, std::uint64_t bits) {
    auto w = f.one();
    for (std::uint32_t q = 0; q < width; ++q) w = f.mul(w, ((bits >> q) & 1) ? pt[q] : f.sub(f.one(), pt[q]));
    return w;
  };
  auto acc = f.zero();
  for (std::uint64_t a = 0; a < (std::uint64_t{1} << width); ++a)
    for (std::uint64_t b = 0; b < (std::uint64_t{1} << width); ++b) {
      const int e = scaled_gate_entry(g, a, b);
      if (e == 0) continue;
      const auto term = f.mul(eq(left, a), eq(right, b));
      acc = e > 0 ? f.add(acc, term) : f.sub(acc, term);
    }
  return acc;
}

/// AND of `controls` into `target` using fresh ancillas starting at
/// `scratch`; returns the next unused qubit.
inline std::uint32_t append_and(std::vector<Gate>& gs, const std::vector<std::uint32_t>& controls, std::uint32_t target,
                                std::uint32_t scratch) {
  if (controls.size() == 1) {
    gs.push_back(Gate(GateKind::CNOT, {controls[0], target}));
    return scratch;
  }
  std::uint32_t acc = controls[0];
  for (std::size_t i = 1; i < controls.size(); ++i) {
    const bool last = i + 1 == controls.size();
    const std::uint32_t dst = last ? target : scratch++;
    gs.push_back(Gate(GateKind::CCNOT, {acc, controls[i], dst}));
    acc = dst;
  }
  return scratch;
}

/// Planted-witness verifier with one input bit x and an m-bit witness.
/// Accepts with probability 3/4 when x = 1 and w = planted, and 1/4
/// otherwise (h = 2). Qubits: x, witness, flag, and-chain scratch, two
/// coins, output.
inline Circuit planted_circuit(const Bits& planted) {
  const auto m = static_cast<std::uint32_t>(planted.size());
  const std::uint32_t x = 0;
  const std::uint32_t w0 = 1;
  const std::uint32_t flag = w0 + m;
  std::uint32_t next = flag + 1;
  std::vector<Gate> gs;
  for (std::uint32_t i = 0; i < m; ++i)
    if (planted[i] == '0') gs.push_back(Gate(GateKind::X, {w0 + i}));
  std::vector<std::uint32_t> controls{x};
  for (std::uint32_t i = 0; i < m; ++i) controls.push_back(w0 + i);
  next = append_and(gs, controls, flag, next);
  const std::uint32_t c1 = next++, c2 = next++, out = next++;
  gs.push_back(Gate(GateKind::H, {c1}));
  gs.push_back(Gate(GateKind::H, {c2}));
  gs.push_back(Gate(GateKind::CCNOT, {c1, c2, out}));
  gs.push_back(Gate(GateKind::CNOT, {flag, out}));
  return Circuit(next, RegisterLayout{{x, 1}, {w0, m}, out}, std::move(gs));
}

}  // namespace pqip::oracle
