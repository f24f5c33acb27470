#pragma once

#include "pqip/provers.hpp"
#include "pqip/simulator.hpp"

#include <deque>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace pqip {

inline std::string circuit_hash(const Circuit& c) { return to_hex(sha256(print_circuit(c))); }

/// A verifier circuit, its input, and the completeness parameter c. The
/// thresholds c* and s* are derived from c and the circuit's Hadamard count.
class QcmaInstance {
 public:
  QcmaInstance(Circuit circuit, Bits input, Rational completeness)
      : circuit_(std::move(circuit)), input_(std::move(input)), c_(std::move(completeness)) {
    check_bits(input_, circuit_.input_size(), "input bits");
    thresholds_ = compute_exact_thresholds(c_, circuit_.hadamard_count());
  }

  const Circuit& circuit() const { return circuit_; }
  const Bits& input() const { return input_; }
  const Rational& completeness() const { return c_; }
  const Thresholds& thresholds() const { return thresholds_; }
  std::uint32_t witness_size() const { return circuit_.witness_size(); }

 private:
  Circuit circuit_;
  Bits input_;
  Rational c_;
  Thresholds thresholds_;
};

/// Instance files carry `input <bits>` and `completeness <num>/<den>` header
/// lines ahead of the circuit text (which starts at `qubits`).
inline QcmaInstance parse_instance(std::string_view text) {
  std::optional<Bits> input;
  std::optional<Rational> c;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const auto line = text.substr(pos, nl - pos);
    const auto toks = detail::tokenize_line(line);
    ++line_no;
    if (!toks.empty() && toks[0].text == "qubits") break;
    pos = nl + 1;
    if (toks.empty()) continue;
    if (toks[0].text == "input") {
      if (input) throw ParseError(line_no, 1, "duplicate 'input' header");
      if (toks.size() > 2) throw ParseError(line_no, toks[2].column, "expected 'input <bits>'");
      input = toks.size() == 2 ? Bits(toks[1].text) : Bits();
      if (input->find_first_not_of("01") != std::string::npos) throw ParseError(line_no, toks[1].column, "input bits must be binary");
    } else if (toks[0].text == "completeness") {
      if (c) throw ParseError(line_no, 1, "duplicate 'completeness' header");
      if (toks.size() != 2) throw ParseError(line_no, toks[0].column, "expected 'completeness <num>/<den>'");
      try {
        c = parse_rational(toks[1].text);
      } catch (const std::invalid_argument& e) {
        throw ParseError(line_no, toks[1].column, e.what());
      }
    } else {
      throw ParseError(line_no, toks[0].column, "unknown instance header '" + std::string(toks[0].text) + "'");
    }
  }
  if (!c) throw ParseError(line_no, 1, "missing 'completeness' header");
  const std::size_t header_lines = line_no == 0 ? 0 : line_no - 1;
  std::optional<Circuit> parsed;
  try {
    parsed = parse_circuit(text.substr(std::min(pos, text.size())));
  } catch (const ParseError& e) {
    throw ParseError(e.line() + header_lines, e.column(), e.message());
  }
  auto circuit = std::move(*parsed);
  try {
    return QcmaInstance(std::move(circuit), input.value_or(Bits()), *c);
  } catch (const std::invalid_argument& e) {
    throw ParseError(1, 1, e.what());
  }
}

inline std::string print_instance(const QcmaInstance& inst) {
  std::ostringstream os;
  os << "input " << inst.input() << '\n' << "completeness " << rational_str(inst.completeness()) << '\n';
  os << print_circuit(inst.circuit());
  return os.str();
}

// ---------------------------------------------------------------------------
// Witness search
// ---------------------------------------------------------------------------

/// Membership in the prefix language: does some completion of the prefix
/// reach c*? Every acceptance probability is a multiple of 2^-h, so a "no"
/// answer means every completion is at most s*; the promise gap holds for
/// every query.
class WitnessOracle {
 public:
  explicit WitnessOracle(const QcmaInstance& inst) : inst_(&inst) {}

  bool operator()(std::string_view prefix) {
    ++queries_;
    return max_acceptance_over_completions(inst_->circuit(), inst_->input(), prefix) >= inst_->thresholds().c_star;
  }
  std::size_t queries() const { return queries_; }

 private:
  const QcmaInstance* inst_;
  std::size_t queries_ = 0;
};

inline bool witness_oracle(const QcmaInstance& inst, std::string_view prefix) { return WitnessOracle(inst)(prefix); }

struct SearchResult {
  std::optional<Bits> witness;
  std::size_t queries = 0;
};

/// Bit-by-bit search: one query for the empty prefix, then one query per bit
/// (try 0; if the oracle says no, the bit must be 1).
inline SearchResult adaptive_witness_search(const QcmaInstance& inst) {
  WitnessOracle oracle(inst);
  if (!oracle("")) return {std::nullopt, oracle.queries()};
  Bits w;
  for (std::uint32_t i = 0; i < inst.witness_size(); ++i) w += oracle(w + "0") ? '0' : '1';
  return {w, oracle.queries()};
}

/// 2^h * Pr[accept] as an integer.
inline BigInt scaled_acceptance(const Circuit& c, std::string_view x, std::string_view w) {
  return acceptance_probability(c, x, w).numerator_at(c.hadamard_count());
}

// ---------------------------------------------------------------------------
// PreciseQCMA protocol
// ---------------------------------------------------------------------------

/// What the prover does. Honest provers search for a witness and claim the
/// true value. Cheaters: Inflate sends the best witness with claim
/// max(true, c* 2^h); WrongClaim sends true value + 1; Perturb and Garbage
/// corrupt the sum-check rounds; BadShape sends a witness of the wrong length.
enum class QcmaStrategy { Honest, Inflate, WrongClaim, Perturb, Garbage, BadShape };

inline std::optional<QcmaStrategy> qcma_strategy_from_name(std::string_view s) {
  if (s == "honest") return QcmaStrategy::Honest;
  if (s == "inflate") return QcmaStrategy::Inflate;
  if (s == "wrong-claim") return QcmaStrategy::WrongClaim;
  if (s == "perturb") return QcmaStrategy::Perturb;
  if (s == "garbage") return QcmaStrategy::Garbage;
  if (s == "bad-shape") return QcmaStrategy::BadShape;
  return std::nullopt;
}

template <PrimeField F>
struct Decision {
  bool accept = false;
  Reason reason = Reason::Channel;
  std::optional<Bits> witness;
  std::vector<Message<F>> transcript;
};

/// Prover side of the witness protocol as a message-driven state machine.
template <PrimeField F>
class QcmaProver {
 public:
  using Elem = typename F::Elem;

  QcmaProver(const QcmaInstance& inst, F field, QcmaStrategy strategy, std::uint64_t rng_seed = 0)
      : inst_(&inst), field_(std::move(field)), strategy_(strategy), rng_seed_(rng_seed) {}

  bool done() const { return done_; }

  std::vector<Message<F>> handle(const Message<F>& in) {
    if (const auto* req = std::get_if<WitnessRequest>(&in)) return on_request(*req);
    if (const auto* ch = std::get_if<Challenge<F>>(&in)) return on_challenge(*ch);
    if (std::holds_alternative<FinalVerdict>(in)) {
      done_ = true;
      return {};
    }
    return {ErrorMessage{"protocol-order", "unexpected message"}};
  }

 private:
  std::vector<Message<F>> on_request(const WitnessRequest& req) {
    if (req.circuit_hash != circuit_hash(inst_->circuit()) || req.modulus != field_.modulus().str()) {
      done_ = true;
      return {ErrorMessage{"mismatch", "circuit hash or field modulus differs"}};
    }
    const auto& c = inst_->circuit();
    std::optional<Bits> w;
    if (strategy_ == QcmaStrategy::BadShape) {
      w = Bits(inst_->witness_size() + 1, '0');
      return {WitnessMessage{w}};
    }
    if (strategy_ == QcmaStrategy::Inflate) {
      w = best_completion(c, inst_->input(), "").witness;
    } else {
      w = adaptive_witness_search(*inst_).witness;
      if (!w && strategy_ != QcmaStrategy::Honest) w = best_completion(c, inst_->input(), "").witness;
    }
    if (!w) {
      done_ = true;
      return {WitnessMessage{std::nullopt}};
    }

    BigInt claim = scaled_acceptance(c, inst_->input(), *w);
    if (strategy_ == QcmaStrategy::Inflate) claim = std::max(claim, inst_->thresholds().c_star_scaled());
    if (strategy_ == QcmaStrategy::WrongClaim) claim += 1;
    const Elem claimed = field_.from_int(claim);
    std::vector<Message<F>> out{WitnessMessage{w}, InitialClaim<F>{claimed}};
    if (c.gates().empty()) return out;

    path_ = std::make_unique<PathSumInstance<F>>(build_path_sum_instance(c, inst_->input(), *w, field_));
    switch (strategy_) {
      case QcmaStrategy::Honest: rounds_ = std::make_unique<HonestProver<F>>(); break;
      case QcmaStrategy::Inflate:
      case QcmaStrategy::WrongClaim: rounds_ = std::make_unique<DefendingProver<F>>(rng_seed_); break;
      case QcmaStrategy::Perturb:
        rounds_ = std::make_unique<DefendingProver<F>>(rng_seed_,
                                                       static_cast<std::uint32_t>(rng_seed_ % path_->free_variable_count()));
        break;
      case QcmaStrategy::Garbage: rounds_ = std::make_unique<GarbageProver<F>>(rng_seed_); break;
      case QcmaStrategy::BadShape: break;
    }
    rounds_->begin(*path_, claimed);
    out.emplace_back(RoundPolynomial<F>{0, rounds_->round(std::span<const Elem>(challenges_))});
    return out;
  }

  std::vector<Message<F>> on_challenge(const Challenge<F>& ch) {
    if (!path_ || ch.round != challenges_.size()) return {ErrorMessage{"protocol-order", "unexpected challenge"}};
    challenges_.push_back(ch.r);
    if (challenges_.size() == path_->free_variable_count()) return {};
    const auto round = static_cast<std::uint32_t>(challenges_.size());
    return {RoundPolynomial<F>{round, rounds_->round(std::span<const Elem>(challenges_))}};
  }

  const QcmaInstance* inst_;
  F field_;
  QcmaStrategy strategy_;
  std::uint64_t rng_seed_;
  std::unique_ptr<PathSumInstance<F>> path_;
  std::unique_ptr<SumcheckProver<F>> rounds_;
  std::vector<Elem> challenges_;
  bool done_ = false;
};

/// Verifier side: ask for a witness, take the claimed S = 2^h Pr[accept],
/// require c* 2^h <= S <= 2^h, then check S by sum-check. The verifier never
/// searches for witnesses itself.
template <PrimeField F>
class QcmaVerifier {
 public:
  using Elem = typename F::Elem;

  QcmaVerifier(const QcmaInstance& inst, F field, const Seed& seed) : inst_(&inst), field_(std::move(field)), seed_(seed) {
    if (!(field_.modulus() > pow2(inst.circuit().hadamard_count())))
      throw std::invalid_argument("field too small: modulus must exceed 2^" + std::to_string(inst.circuit().hadamard_count()));
  }

  WitnessRequest opening() const { return {circuit_hash(inst_->circuit()), field_.modulus().str()}; }

  bool done() const { return verdict_.has_value(); }
  const std::optional<FinalVerdict>& verdict() const { return verdict_; }
  const std::optional<Bits>& witness() const { return witness_; }

  /// Ends the session with a rejection (used for transport failures).
  FinalVerdict abort(Reason r) {
    verdict_ = FinalVerdict{false, r};
    return *verdict_;
  }

  std::vector<Message<F>> handle(const Message<F>& in) {
    if (done()) return {};
    if (const auto* err = std::get_if<ErrorMessage>(&in))
      return {abort(err->code == "mismatch" ? Reason::Mismatch : Reason::Channel)};
    switch (phase_) {
      case Phase::Witness: {
        const auto* wm = std::get_if<WitnessMessage>(&in);
        if (!wm) return {abort(Reason::ProtocolOrder)};
        if (!wm->bits) return {abort(Reason::NoWitness)};
        const auto& bits = *wm->bits;
        if (bits.size() != inst_->witness_size() || bits.find_first_not_of("01") != std::string::npos)
          return {abort(Reason::WitnessShape)};
        witness_ = bits;
        if (!inst_->circuit().gates().empty())
          path_ = std::make_unique<PathSumInstance<F>>(build_path_sum_instance(inst_->circuit(), inst_->input(), bits, field_));
        phase_ = Phase::Claim;
        return {};
      }
      case Phase::Claim: {
        const auto* claim = std::get_if<InitialClaim<F>>(&in);
        if (!claim) return {abort(Reason::ProtocolOrder)};
        const BigInt s = field_.to_int(claim->value);
        const auto h = inst_->circuit().hadamard_count();
        if (s < inst_->thresholds().c_star_scaled() || s > pow2(h)) return {abort(Reason::Threshold)};
        if (!path_) {
          // No gates: the output bit is read directly from |x, w, 0>.
          const BigInt direct = scaled_acceptance(inst_->circuit(), inst_->input(), *witness_);
          verdict_ = s == direct ? FinalVerdict{true, Reason::Ok} : FinalVerdict{false, Reason::FinalEval};
          return {*verdict_};
        }
        state_ = verifier_init(*path_, claim->value, seed_);
        phase_ = Phase::Rounds;
        return {};
      }
      case Phase::Rounds: {
        const auto* rp = std::get_if<RoundPolynomial<F>>(&in);
        if (!rp) return {abort(Reason::ProtocolOrder)};
        const auto step = verifier_step(state_, *rp);
        std::vector<Message<F>> out;
        if (step.challenge) out.emplace_back(*step.challenge);
        if (step.verdict) {
          verdict_ = step.verdict;
          out.emplace_back(*step.verdict);
        }
        return out;
      }
    }
    return {abort(Reason::ProtocolOrder)};
  }

 private:
  enum class Phase { Witness, Claim, Rounds };

  const QcmaInstance* inst_;
  F field_;
  Seed seed_;
  Phase phase_ = Phase::Witness;
  std::unique_ptr<PathSumInstance<F>> path_;
  VerifierState<F> state_;
  std::optional<Bits> witness_;
  std::optional<FinalVerdict> verdict_;
};

class ChannelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Message pipe from the verifier's point of view.
template <PrimeField F>
class ProverLink {
 public:
  virtual ~ProverLink() = default;
  virtual void send(const Message<F>& m) = 0;
  virtual Message<F> receive() = 0;  // throws ChannelError
};

/// Prover in the same process; replies are queued and handed back in order.
template <PrimeField F>
class InProcessLink : public ProverLink<F> {
 public:
  explicit InProcessLink(QcmaProver<F>& prover) : prover_(&prover) {}
  void send(const Message<F>& m) override {
    for (auto& r : prover_->handle(m)) queue_.push_back(std::move(r));
  }
  Message<F> receive() override {
    if (queue_.empty()) throw ChannelError("prover sent nothing");
    auto m = std::move(queue_.front());
    queue_.pop_front();
    return m;
  }

 private:
  QcmaProver<F>* prover_;
  std::deque<Message<F>> queue_;
};

/// Drives a verifier against any link until it reaches a verdict. The
/// transcript lists every message in the order the verifier sent or
/// consumed it.
template <PrimeField F>
Decision<F> drive_verifier(QcmaVerifier<F>& verifier, ProverLink<F>& link) {
  Decision<F> d;
  auto send = [&](const Message<F>& m) {
    d.transcript.push_back(m);
    try {
      link.send(m);
    } catch (const ChannelError&) {
      if (!verifier.done()) d.transcript.emplace_back(verifier.abort(Reason::Channel));
    }
  };
  send(verifier.opening());
  while (!verifier.done()) {
    Message<F> in;
    try {
      in = link.receive();
    } catch (const ChannelError&) {
      d.transcript.emplace_back(verifier.abort(Reason::Channel));
      break;
    }
    d.transcript.push_back(in);
    for (const auto& out : verifier.handle(in)) send(out);
  }
  d.accept = verifier.verdict()->accept;
  d.reason = verifier.verdict()->reason;
  if (d.accept) d.witness = verifier.witness();
  return d;
}

/// Plays back the prover's side of a recorded transcript.
template <PrimeField F>
class ScriptedLink : public ProverLink<F> {
 public:
  explicit ScriptedLink(const std::vector<Message<F>>& recorded) {
    for (const auto& m : recorded)
      if (std::holds_alternative<WitnessMessage>(m) || std::holds_alternative<InitialClaim<F>>(m) ||
          std::holds_alternative<RoundPolynomial<F>>(m) || std::holds_alternative<ErrorMessage>(m))
        queue_.push_back(m);
  }
  void send(const Message<F>&) override {}
  Message<F> receive() override {
    if (queue_.empty()) throw ChannelError("transcript ended");
    auto m = std::move(queue_.front());
    queue_.pop_front();
    return m;
  }

 private:
  std::deque<Message<F>> queue_;
};

/// Re-runs a fresh verifier against the recorded prover messages. The
/// transcript is authentic iff the rebuilt one is identical.
template <PrimeField F>
struct ReplayResult {
  Decision<F> decision;
  bool matches = false;
};

template <PrimeField F>
ReplayResult<F> replay_qcma(const QcmaInstance& inst, const F& field, const Seed& seed, const std::vector<Message<F>>& recorded) {
  QcmaVerifier<F> verifier(inst, field, seed);
  ScriptedLink<F> link(recorded);
  ReplayResult<F> r{drive_verifier(verifier, link), false};
  r.matches = r.decision.transcript == recorded;
  return r;
}

template <PrimeField F>
Decision<F> run_precise_qcma_protocol(const QcmaInstance& inst, QcmaProver<F>& prover, const Seed& seed, const F& field) {
  QcmaVerifier<F> verifier(inst, field, seed);
  InProcessLink<F> link(prover);
  return drive_verifier(verifier, link);
}

template <PrimeField F>
Decision<F> run_precise_qcma_protocol(const QcmaInstance& inst, QcmaStrategy strategy, const Seed& seed, const F& field,
                                      std::uint64_t prover_seed = 0) {
  QcmaProver<F> prover(inst, field, strategy, prover_seed);
  return run_precise_qcma_protocol(inst, prover, seed, field);
}

// ---------------------------------------------------------------------------
// QMA with a maximally mixed witness
// ---------------------------------------------------------------------------

/// Replaces the m witness qubits by halves of m Bell pairs: fresh qubits
/// N..N+m-1 get H then CNOT onto witness qubit i, ahead of the original
/// gates. The old witness register becomes ancilla. The result accepts with
/// the average of the original acceptance over all basis witnesses.
inline Circuit purify_mixed_witness(const Circuit& c) {
  const auto m = c.witness_size();
  if (m == 0) throw std::invalid_argument("purify_mixed_witness: circuit has no witness qubits");
  const auto n = c.width();
  std::vector<Gate> gates;
  for (std::uint32_t i = 0; i < m; ++i) {
    gates.push_back(Gate(GateKind::H, {n + i}));
    gates.push_back(Gate(GateKind::CNOT, {n + i, c.layout().witness.lo + i}));
  }
  gates.insert(gates.end(), c.gates().begin(), c.gates().end());
  RegisterLayout layout{c.layout().input, {}, c.layout().output};
  return Circuit(n + m, layout, std::move(gates));
}

/// Decides an amplified QMA instance (yes: >= 1 - 2^-(m+2) for some witness
/// state, no: <= 2^-(m+2) for all) via the purified circuit. Accepts iff the
/// sum-check confirms S' and S' >= 2^(h' - (m+1)), compared as integers.
template <PrimeField F>
struct QmaOutcome {
  Decision<F> decision;
  DyadicRational purified_acceptance;  // the claim the verifier ended up checking
};

template <PrimeField F>
QmaOutcome<F> qma_decision(const Circuit& circuit, std::string_view input_bits, const Seed& seed, const F& field,
                           Strategy strategy = Strategy::Honest, std::uint64_t prover_seed = 0) {
  const auto m = circuit.witness_size();
  const Circuit purified = purify_mixed_witness(circuit);
  const auto h = purified.hadamard_count();
  const auto inst = build_path_sum_instance(purified, input_bits, "", field);
  BigInt claim = field.to_int(exact_claim_value(inst));
  if (strategy != Strategy::Honest) {
    // A cheater claims at least the smallest value that clears the threshold.
    const BigInt least = h >= m + 1 ? pow2(h - (m + 1)) : BigInt(1);
    claim = std::max(claim, least);
  }
  const auto claimed = field.from_int(claim);

  QmaOutcome<F> out{{}, DyadicRational(claim, h)};
  auto& d = out.decision;
  // S' / 2^h' >= 2^-(m+1)  <=>  S' * 2^(m+1) >= 2^h'.
  if ((claim << static_cast<unsigned>(m + 1)) < pow2(h)) {
    d.transcript.emplace_back(InitialClaim<F>{claimed});
    d.transcript.emplace_back(FinalVerdict{false, Reason::Threshold});
    d.reason = Reason::Threshold;
    return out;
  }
  auto prover = make_prover<F>(strategy, prover_seed, static_cast<std::uint32_t>(prover_seed % inst.free_variable_count()));
  auto res = run_sumcheck(inst, claimed, *prover, seed);
  d.accept = res.verdict.accept;
  d.reason = res.verdict.reason;
  d.transcript = std::move(res.transcript.messages);
  return out;
}

/// Checks a recorded qma_decision transcript against a fresh verifier.
template <PrimeField F>
ReplayResult<F> replay_qma(const Circuit& circuit, std::string_view input_bits, const F& field, const Seed& seed,
                           const std::vector<Message<F>>& recorded) {
  ReplayResult<F> r;
  r.decision.transcript = recorded;
  const auto* claim = recorded.empty() ? nullptr : std::get_if<InitialClaim<F>>(&recorded.front());
  const auto* verdict = recorded.empty() ? nullptr : std::get_if<FinalVerdict>(&recorded.back());
  if (!claim || !verdict) return r;
  const Circuit purified = purify_mixed_witness(circuit);
  const auto h = purified.hadamard_count();
  const auto inst = build_path_sum_instance(purified, input_bits, "", field);
  if ((field.to_int(claim->value) << static_cast<unsigned>(circuit.witness_size() + 1)) < pow2(h)) {
    r.matches = recorded == std::vector<Message<F>>{*claim, FinalVerdict{false, Reason::Threshold}};
  } else {
    r.matches = replay_sumcheck(inst, Transcript<F>{recorded, seed, field.modulus(), inst.id()});
  }
  r.decision.accept = verdict->accept;
  r.decision.reason = verdict->reason;
  return r;
}

}  // namespace pqip
