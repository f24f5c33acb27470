#pragma once

#include "pqip/circuit.hpp"
#include "pqip/field.hpp"
#include "pqip/hash.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pqip {

/// Identifier binding a transcript to (circuit, input, witness).
inline Digest instance_id(const Circuit& c, std::string_view input_bits, std::string_view witness_bits) {
  return Sha256()
      .update(print_circuit(c))
      .update("input ")
      .update(input_bits)
      .update("\nwitness ")
      .update(witness_bits)
      .update("\n")
      .finish();
}

/// Scaled matrix entry <to|G|from> of a gate acting on basis states: H
/// contributes [[1,1],[1,-1]] on its qubit (the 1/sqrt(2) is folded into the
/// global 2^h), permutation gates contribute 0/1.
inline int scaled_gate_entry(const Gate& g, std::uint64_t from, std::uint64_t to) {
  if (g.kind() == GateKind::H) {
    const std::uint64_t bit = std::uint64_t{1} << g.target();
    if ((from & ~bit) != (to & ~bit)) return 0;
    return ((from & bit) && (to & bit)) ? -1 : 1;
  }
  return g.permute(from) == to ? 1 : 0;
}

/// v <- G v with scaled entries.
template <PrimeField F>
void apply_scaled_gate(const F& f, const Gate& g, std::vector<typename F::Elem>& v) {
  if (g.kind() == GateKind::H) {
    const std::uint64_t bit = std::uint64_t{1} << g.target();
    for (std::uint64_t y = 0; y < v.size(); ++y) {
      if (y & bit) continue;
      const auto a0 = v[y];
      const auto a1 = v[y | bit];
      v[y] = f.add(a0, a1);
      v[y | bit] = f.sub(a0, a1);
    }
    return;
  }
  for (std::uint64_t y = 0; y < v.size(); ++y) {
    const auto img = g.permute(y);
    if (img > y) std::swap(v[y], v[img]);
  }
}

/// Equality kernel x*y + (1-x)(1-y).
template <PrimeField F>
typename F::Elem eq_kernel(const F& f, const typename F::Elem& x, const typename F::Elem& y) {
  const auto one = f.one();
  return f.add(f.mul(x, y), f.mul(f.sub(one, x), f.sub(one, y)));
}

/// Multilinear extension of a gate's scaled transition table
/// M(from, to) = <to|G|from>, evaluated at field points (left = from,
/// right = to). Untouched qubits contribute the equality kernel; the touched
/// qubits sum their 2^k x 2^k local table against eq weights.
template <PrimeField F>
typename F::Elem transition_mle_eval(const F& f, const Gate& g, std::span<const typename F::Elem> left,
                                     std::span<const typename F::Elem> right) {
  using Elem = typename F::Elem;
  if (left.size() != right.size()) throw std::invalid_argument("transition_mle_eval: point size mismatch");
  const auto qs = g.qubits();
  Elem acc = f.one();
  for (std::uint32_t q = 0; q < left.size(); ++q) {
    if (std::ranges::find(qs, q) != qs.end()) continue;
    acc = f.mul(acc, eq_kernel(f, left[q], right[q]));
  }
  // Local copy of the gate on qubits 0..k-1 in gate order.
  const std::size_t k = qs.size();
  std::array<std::uint32_t, 3> local_q{0, 1, 2};
  const Gate local(g.kind(), std::span<const std::uint32_t>(local_q.data(), k));
  auto weight = [&](std::span<const Elem> pt, std::uint64_t bits) {
    Elem w = f.one();
    for (std::size_t i = 0; i < k; ++i) {
      const auto& x = pt[qs[i]];
      w = f.mul(w, ((bits >> i) & 1) ? x : f.sub(f.one(), x));
    }
    return w;
  };
  Elem local_sum = f.zero();
  for (std::uint64_t a = 0; a < (std::uint64_t{1} << k); ++a) {
    for (std::uint64_t b = 0; b < (std::uint64_t{1} << k); ++b) {
      const int entry = scaled_gate_entry(local, a, b);
      if (entry == 0) continue;
      Elem term = f.mul(weight(left, a), weight(right, b));
      local_sum = entry > 0 ? f.add(local_sum, term) : f.sub(local_sum, term);
    }
  }
  return f.mul(acc, local_sum);
}

/// Arithmetization of 2^h * <phi|C^dagger Pi C|phi> for phi = |x, w, 0...0>.
///
/// Layers z^0 .. z^{2t} each hold N boolean variables; z^0 = z^{2t} = phi
/// are fixed. Step i in 1..t applies gate i, step i in t+1..2t applies gate
/// 2t+1-i (the inverse circuit; every gate is its own inverse). The projector
/// factor z^t[output] sits on layer t. Free variables are ordered
/// layer-major: variable (l-1)*N + q is qubit q of layer l.
template <PrimeField F>
class PathSumInstance {
 public:
  using Elem = typename F::Elem;

  PathSumInstance(F field, Circuit circuit, std::uint64_t start, Digest id)
      : field_(std::move(field)), circuit_(std::move(circuit)), start_(start), id_(id) {}

  const F& field() const { return field_; }
  const Circuit& circuit() const { return circuit_; }
  std::uint64_t start_basis() const { return start_; }
  const Digest& id() const { return id_; }
  std::uint32_t width() const { return circuit_.width(); }
  std::size_t gate_count() const { return circuit_.gates().size(); }
  std::size_t layer_count() const { return 2 * gate_count() + 1; }
  std::size_t free_variable_count() const { return (2 * gate_count() - 1) * width(); }
  std::size_t projector_layer() const { return gate_count(); }
  std::uint32_t output_qubit() const { return circuit_.layout().output; }

  /// Gate applied by step i (1-based, 1..2t).
  const Gate& step_gate(std::size_t i) const {
    const auto t = gate_count();
    if (i == 0 || i > 2 * t) throw std::out_of_range("step index");
    return i <= t ? circuit_.gates()[i - 1] : circuit_.gates()[2 * t - i];
  }

  /// Layer l of a point (all free variables), with the fixed endpoints
  /// materialized as 0/1 field elements.
  std::vector<Elem> layer_point(std::span<const Elem> point, std::size_t l) const {
    const auto n = width();
    if (l == 0 || l == layer_count() - 1) return basis_point(start_);
    return {point.begin() + static_cast<std::ptrdiff_t>((l - 1) * n), point.begin() + static_cast<std::ptrdiff_t>(l * n)};
  }

  std::vector<Elem> basis_point(std::uint64_t basis) const {
    std::vector<Elem> p(width());
    for (std::uint32_t q = 0; q < width(); ++q) p[q] = ((basis >> q) & 1) ? field_.one() : field_.zero();
    return p;
  }

  /// The summand polynomial at a full assignment of free variables: the
  /// product of every transition MLE and the projector. O(t * N) field ops.
  Elem evaluate(std::span<const Elem> point) const {
    if (point.size() != free_variable_count()) throw std::invalid_argument("evaluate: wrong point size");
    Elem acc = field_.one();
    auto prev = layer_point(point, 0);
    for (std::size_t i = 1; i <= 2 * gate_count(); ++i) {
      auto cur = layer_point(point, i);
      acc = field_.mul(acc, transition_mle_eval(field_, step_gate(i), std::span<const Elem>(prev), std::span<const Elem>(cur)));
      if (i == projector_layer()) acc = field_.mul(acc, cur[output_qubit()]);
      prev = std::move(cur);
    }
    return acc;
  }

 private:
  F field_;
  Circuit circuit_;
  std::uint64_t start_;
  Digest id_;
};

template <PrimeField F>
PathSumInstance<F> build_path_sum_instance(const Circuit& circuit, std::string_view input_bits, std::string_view witness_bits,
                                           const F& field) {
  if (circuit.gates().empty()) throw std::invalid_argument("path sum needs at least one gate");
  if (field.modulus() <= pow2(circuit.hadamard_count()))
    throw std::invalid_argument("field too small: modulus must exceed 2^" + std::to_string(circuit.hadamard_count()));
  return PathSumInstance<F>(field, circuit, circuit.initial_basis(input_bits, witness_bits),
                            instance_id(circuit, input_bits, witness_bits));
}

/// Full boolean sum by propagating a 2^N vector through the 2t steps.
template <PrimeField F>
typename F::Elem exact_claim_value(const PathSumInstance<F>& inst) {
  const auto& f = inst.field();
  std::vector<typename F::Elem> v(std::size_t{1} << inst.width(), f.zero());
  v[inst.start_basis()] = f.one();
  const std::uint64_t out_bit = std::uint64_t{1} << inst.output_qubit();
  for (std::size_t i = 1; i <= 2 * inst.gate_count(); ++i) {
    apply_scaled_gate(f, inst.step_gate(i), v);
    if (i == inst.projector_layer())
      for (std::uint64_t y = 0; y < v.size(); ++y)
        if (!(y & out_bit)) v[y] = f.zero();
  }
  return v[inst.start_basis()];
}

}  // namespace pqip
