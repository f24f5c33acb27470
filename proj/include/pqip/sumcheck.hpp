#pragma once

#include "pqip/hash.hpp"
#include "pqip/messages.hpp"
#include "pqip/path_sum.hpp"

#include <cstdint>
#include <exception>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace pqip {

/// Every honest round polynomial has degree at most 3 per variable: two
/// transition factors plus the projector on layer t.
inline constexpr std::size_t kMaxRoundDegree = 3;

// ---------------------------------------------------------------------------
// Verifier
// ---------------------------------------------------------------------------

template <PrimeField F>
struct VerifierState {
  using Elem = typename F::Elem;

  const PathSumInstance<F>* instance = nullptr;
  Elem claim{};
  std::vector<Elem> challenges;
  std::uint32_t round = 0;
  Seed seed{};
  Digest running{};  // hash chain over absorbed prover messages
  std::optional<FinalVerdict> verdict;

  std::size_t rounds_total() const { return instance->free_variable_count(); }
  bool finished() const { return verdict.has_value(); }
};

namespace detail {

template <PrimeField F>
std::string absorb_text(const F& f, const InitialClaim<F>& m) {
  return "claim:" + elem_to_hex(f, m.value);
}

template <PrimeField F>
std::string absorb_text(const F& f, const RoundPolynomial<F>& m) {
  std::string s = "round_poly:" + std::to_string(m.round) + ":";
  const auto& c = m.poly.coefficients();
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) s += ',';
    s += elem_to_hex(f, c[i]);
  }
  return s;
}

inline Digest chain(const Digest& running, std::string_view text) {
  return Sha256().update(running).update(text).finish();
}

}  // namespace detail

/// r_j = SHA-256(seed || j as 4-byte big-endian || running hash) mod p.
template <PrimeField F>
typename F::Elem derive_challenge(const F& f, const Seed& seed, std::uint32_t round, const Digest& running) {
  const std::array<std::uint8_t, 4> be{static_cast<std::uint8_t>(round >> 24), static_cast<std::uint8_t>(round >> 16),
                                       static_cast<std::uint8_t>(round >> 8), static_cast<std::uint8_t>(round)};
  const Digest d = Sha256().update(seed).update(be).update(running).finish();
  return f.from_bytes(d);
}

template <PrimeField F>
VerifierState<F> verifier_init(const PathSumInstance<F>& inst, const typename F::Elem& claimed, const Seed& seed) {
  VerifierState<F> st;
  st.instance = &inst;
  st.claim = claimed;
  st.seed = seed;
  st.running = detail::chain(inst.id(), detail::absorb_text(inst.field(), InitialClaim<F>{claimed}));
  return st;
}

/// Evaluates the summand at the bound point without prover help and compares
/// against the running claim.
template <PrimeField F>
FinalVerdict final_check(const VerifierState<F>& st) {
  if (st.challenges.size() != st.rounds_total()) throw std::logic_error("final_check before all variables are bound");
  const auto& f = st.instance->field();
  const auto value = st.instance->evaluate(st.challenges);
  return f.eq(value, st.claim) ? FinalVerdict{true, Reason::Ok} : FinalVerdict{false, Reason::FinalEval};
}

template <PrimeField F>
struct StepOutcome {
  std::optional<Challenge<F>> challenge;
  std::optional<FinalVerdict> verdict;
};

/// One verifier round. Rejections are immediate; after the last variable is
/// bound the outcome carries both the final challenge and the verdict.
template <PrimeField F>
StepOutcome<F> verifier_step(VerifierState<F>& st, const RoundPolynomial<F>& msg) {
  const auto& f = st.instance->field();
  auto reject = [&](Reason r) {
    st.verdict = FinalVerdict{false, r};
    return StepOutcome<F>{std::nullopt, st.verdict};
  };
  if (st.finished() || msg.round != st.round || st.round >= st.rounds_total()) return reject(Reason::ProtocolOrder);
  if (msg.poly.coefficients().size() > kMaxRoundDegree + 1) return reject(Reason::Degree);
  if (!f.eq(msg.poly.sum_over_boolean(f), st.claim)) return reject(Reason::Consistency);

  st.running = detail::chain(st.running, detail::absorb_text(f, msg));
  const auto r = derive_challenge(f, st.seed, st.round, st.running);
  st.claim = msg.poly.evaluate(f, r);
  st.challenges.push_back(r);
  StepOutcome<F> out{Challenge<F>{st.round, r}, std::nullopt};
  ++st.round;
  if (st.round == st.rounds_total()) {
    st.verdict = final_check(st);
    out.verdict = st.verdict;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Honest prover
// ---------------------------------------------------------------------------

/// Suffix sums B_l(z) = sum over boolean layers l+1..2t-1 of every factor to
/// the right of layer l, for l = 0..2t. They do not depend on challenges.
template <PrimeField F>
std::vector<std::vector<typename F::Elem>> suffix_tables(const PathSumInstance<F>& inst) {
  const auto& f = inst.field();
  const auto t = inst.gate_count();
  const std::uint64_t out_bit = std::uint64_t{1} << inst.output_qubit();
  std::vector<std::vector<typename F::Elem>> b(2 * t + 1);
  b[2 * t].assign(std::size_t{1} << inst.width(), f.zero());
  b[2 * t][inst.start_basis()] = f.one();
  for (std::size_t l = 2 * t; l-- > 0;) {
    b[l] = b[l + 1];
    if (l + 1 == inst.projector_layer())
      for (std::uint64_t y = 0; y < b[l].size(); ++y)
        if (!(y & out_bit)) b[l][y] = f.zero();
    apply_scaled_gate(f, inst.step_gate(l + 1), b[l]);
  }
  return b;
}

namespace detail {

template <PrimeField F>
void fold_low(const F& f, std::vector<typename F::Elem>& table, const typename F::Elem& r) {
  const std::size_t half = table.size() / 2;
  for (std::size_t j = 0; j < half; ++j) {
    const auto lo = table[2 * j];
    table[j] = f.add(lo, f.mul(r, f.sub(table[2 * j + 1], lo)));
  }
  table.resize(half);
}

template <PrimeField F>
std::vector<typename F::Elem> eq_table(const F& f, std::span<const typename F::Elem> point) {
  std::vector<typename F::Elem> e(std::size_t{1} << point.size(), f.one());
  for (std::size_t y = 0; y < e.size(); ++y)
    for (std::size_t q = 0; q < point.size(); ++q) e[y] = f.mul(e[y], ((y >> q) & 1) ? point[q] : f.sub(f.one(), point[q]));
  return e;
}

}  // namespace detail

/// Round polynomial for variable challenges.size() with earlier variables
/// bound to the challenges and later ones summed over booleans. Works layer
/// by layer: a scalar prefix over fully bound layers, then three multilinear
/// tables over the current layer (incoming transition, projector, suffix sum)
/// folded over the layer's bound coordinates. O(t*N + N*2^N) per round.
template <PrimeField F>
UnivariatePolynomial<F> honest_prover_round(const PathSumInstance<F>& inst, std::span<const typename F::Elem> challenges,
                                            const std::vector<std::vector<typename F::Elem>>& suffix) {
  using Elem = typename F::Elem;
  const auto& f = inst.field();
  const std::size_t v = challenges.size();
  if (v >= inst.free_variable_count()) throw std::invalid_argument("honest_prover_round: every variable is already bound");
  const std::size_t n = inst.width();
  const std::size_t layer = v / n + 1;
  const std::size_t qubit = v % n;
  const std::size_t t = inst.gate_count();

  // Pad the bound prefix into a full-length point so layer_point() works.
  std::vector<Elem> point(challenges.begin(), challenges.end());
  point.resize(inst.free_variable_count(), f.zero());

  Elem prefix = f.one();
  for (std::size_t i = 1; i < layer; ++i) {
    const auto prev = inst.layer_point(point, i - 1);
    const auto cur = inst.layer_point(point, i);
    prefix = f.mul(prefix, transition_mle_eval(f, inst.step_gate(i), std::span<const Elem>(prev), std::span<const Elem>(cur)));
    if (i == t) prefix = f.mul(prefix, cur[inst.output_qubit()]);
  }

  const auto prev = inst.layer_point(point, layer - 1);
  std::vector<Elem> incoming = detail::eq_table(f, std::span<const Elem>(prev));
  apply_scaled_gate(f, inst.step_gate(layer), incoming);
  std::vector<Elem> proj(incoming.size(), f.one());
  if (layer == t)
    for (std::uint64_t y = 0; y < proj.size(); ++y)
      if (!((y >> inst.output_qubit()) & 1)) proj[y] = f.zero();
  std::vector<Elem> tail = suffix[layer];

  for (std::size_t q = 0; q < qubit; ++q) {
    const auto& r = challenges[(layer - 1) * n + q];
    detail::fold_low(f, incoming, r);
    detail::fold_low(f, proj, r);
    detail::fold_low(f, tail, r);
  }

  std::array<Elem, kMaxRoundDegree + 1> evals{};
  for (std::size_t x = 0; x <= kMaxRoundDegree; ++x) {
    const Elem xe = f.from_u64(x);
    Elem sum = f.zero();
    for (std::size_t j = 0; j < incoming.size() / 2; ++j) {
      auto lerp = [&](const std::vector<Elem>& tb) { return f.add(tb[2 * j], f.mul(xe, f.sub(tb[2 * j + 1], tb[2 * j]))); };
      sum = f.add(sum, f.mul(f.mul(lerp(incoming), lerp(proj)), lerp(tail)));
    }
    evals[x] = f.mul(prefix, sum);
  }
  return interpolate_consecutive(f, std::span<const Elem>(evals));
}

template <PrimeField F>
UnivariatePolynomial<F> honest_prover_round(const PathSumInstance<F>& inst, std::span<const typename F::Elem> challenges) {
  return honest_prover_round(inst, challenges, suffix_tables(inst));
}

/// Reference prover: enumerates every boolean assignment of the remaining
/// variables and evaluates the summand directly. Exponential; test use only.
template <PrimeField F>
UnivariatePolynomial<F> naive_prover_round(const PathSumInstance<F>& inst, std::span<const typename F::Elem> challenges) {
  using Elem = typename F::Elem;
  const auto& f = inst.field();
  const std::size_t v = challenges.size();
  const std::size_t total = inst.free_variable_count();
  if (v >= total) throw std::invalid_argument("naive_prover_round: every variable is already bound");
  const std::size_t rest = total - v - 1;
  if (rest > 24) throw std::invalid_argument("naive_prover_round: too many free variables to enumerate");
  std::vector<Elem> point(total, f.zero());
  std::copy(challenges.begin(), challenges.end(), point.begin());
  std::array<Elem, kMaxRoundDegree + 1> evals{};
  for (std::size_t x = 0; x <= kMaxRoundDegree; ++x) {
    point[v] = f.from_u64(x);
    Elem sum = f.zero();
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << rest); ++bits) {
      for (std::size_t i = 0; i < rest; ++i) point[v + 1 + i] = ((bits >> i) & 1) ? f.one() : f.zero();
      sum = f.add(sum, inst.evaluate(point));
    }
    evals[x] = sum;
  }
  return interpolate_consecutive(f, std::span<const Elem>(evals));
}

// ---------------------------------------------------------------------------
// Orchestration
// ---------------------------------------------------------------------------

/// A prover strategy: told the claim it must defend, then asked for one
/// round polynomial per variable given every challenge so far.
template <PrimeField F>
class SumcheckProver {
 public:
  using Elem = typename F::Elem;
  virtual ~SumcheckProver() = default;
  virtual void begin(const PathSumInstance<F>& inst, const Elem& claimed) = 0;
  virtual UnivariatePolynomial<F> round(std::span<const Elem> challenges) = 0;
};

template <PrimeField F>
struct Transcript {
  std::vector<Message<F>> messages;
  Seed seed{};
  BigInt modulus;
  Digest instance{};
};

template <PrimeField F>
struct SumcheckResult {
  FinalVerdict verdict;
  Transcript<F> transcript;
};

/// Runs verifier and prover to a verdict. Deterministic in (instance, claim,
/// prover, seed); a throwing prover is treated as a broken channel.
template <PrimeField F>
SumcheckResult<F> run_sumcheck(const PathSumInstance<F>& inst, const typename F::Elem& claimed, SumcheckProver<F>& prover,
                               const Seed& seed) {
  SumcheckResult<F> res;
  res.transcript.seed = seed;
  res.transcript.modulus = inst.field().modulus();
  res.transcript.instance = inst.id();
  auto& log = res.transcript.messages;
  log.emplace_back(InitialClaim<F>{claimed});

  auto st = verifier_init(inst, claimed, seed);
  try {
    prover.begin(inst, claimed);
    while (!st.finished()) {
      RoundPolynomial<F> msg{st.round, prover.round(std::span<const typename F::Elem>(st.challenges))};
      log.emplace_back(msg);
      const auto out = verifier_step(st, msg);
      if (out.challenge) log.emplace_back(*out.challenge);
    }
  } catch (const std::exception&) {
    st.verdict = FinalVerdict{false, Reason::Channel};
  }
  log.emplace_back(*st.verdict);
  res.verdict = *st.verdict;
  return res;
}

/// Re-runs the verifier over the recorded claim and round polynomials and
/// checks that it reproduces every recorded challenge and the verdict.
template <PrimeField F>
bool replay_sumcheck(const PathSumInstance<F>& inst, const Transcript<F>& tr) {
  if (tr.messages.empty() || tr.instance != inst.id()) return false;
  const auto* claim = std::get_if<InitialClaim<F>>(&tr.messages.front());
  if (!claim) return false;
  auto st = verifier_init(inst, claim->value, tr.seed);
  std::vector<Message<F>> rebuilt{*claim};
  for (std::size_t i = 1; i < tr.messages.size() && !st.finished(); ++i) {
    if (const auto* rp = std::get_if<RoundPolynomial<F>>(&tr.messages[i])) {
      rebuilt.emplace_back(*rp);
      const auto out = verifier_step(st, *rp);
      if (out.challenge) rebuilt.emplace_back(*out.challenge);
    }
  }
  if (!st.verdict) st.verdict = FinalVerdict{false, Reason::Channel};
  rebuilt.emplace_back(*st.verdict);
  return rebuilt == tr.messages;
}

}  // namespace pqip
