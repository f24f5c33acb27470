#pragma once

#include "pqip/circuit.hpp"
#include "pqip/polynomial.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace pqip {

/// Machine-readable verdict reasons.
enum class Reason : std::uint8_t {
  Ok,
  Consistency,
  Degree,
  FinalEval,
  ProtocolOrder,
  Channel,
  WitnessShape,
  NoWitness,
  Threshold,
  Mismatch,
};

inline constexpr std::string_view reason_code(Reason r) {
  switch (r) {
    case Reason::Ok: return "ok";
    case Reason::Consistency: return "consistency";
    case Reason::Degree: return "degree";
    case Reason::FinalEval: return "final-eval";
    case Reason::ProtocolOrder: return "protocol-order";
    case Reason::Channel: return "channel";
    case Reason::WitnessShape: return "witness-shape";
    case Reason::NoWitness: return "no-witness";
    case Reason::Threshold: return "threshold";
    case Reason::Mismatch: return "mismatch";
  }
  return "?";
}

inline std::optional<Reason> reason_from_code(std::string_view s) {
  for (auto r : {Reason::Ok, Reason::Consistency, Reason::Degree, Reason::FinalEval, Reason::ProtocolOrder, Reason::Channel,
                 Reason::WitnessShape, Reason::NoWitness, Reason::Threshold, Reason::Mismatch})
    if (reason_code(r) == s) return r;
  return std::nullopt;
}

template <PrimeField F>
struct InitialClaim {
  typename F::Elem value;
  friend bool operator==(const InitialClaim&, const InitialClaim&) = default;
};

template <PrimeField F>
struct RoundPolynomial {
  std::uint32_t round = 0;
  UnivariatePolynomial<F> poly;
  friend bool operator==(const RoundPolynomial&, const RoundPolynomial&) = default;
};

template <PrimeField F>
struct Challenge {
  std::uint32_t round = 0;
  typename F::Elem r;
  friend bool operator==(const Challenge&, const Challenge&) = default;
};

struct FinalVerdict {
  bool accept = false;
  Reason reason = Reason::Channel;
  friend bool operator==(const FinalVerdict&, const FinalVerdict&) = default;
};

/// Verifier's opening move in the witness protocol; binds the session to a
/// circuit (SHA-256 of its canonical text, hex) and a field modulus (decimal).
struct WitnessRequest {
  std::string circuit_hash;
  std::string modulus;
  friend bool operator==(const WitnessRequest&, const WitnessRequest&) = default;
};

/// Prover's witness, or nullopt when it has none.
struct WitnessMessage {
  std::optional<Bits> bits;
  friend bool operator==(const WitnessMessage&, const WitnessMessage&) = default;
};

struct ErrorMessage {
  std::string code;
  std::string detail;
  friend bool operator==(const ErrorMessage&, const ErrorMessage&) = default;
};

template <PrimeField F>
using Message = std::variant<InitialClaim<F>, RoundPolynomial<F>, Challenge<F>, FinalVerdict, WitnessRequest, WitnessMessage,
                             ErrorMessage>;

}  // namespace pqip
