#pragma once

#include "pqip/qcma.hpp"

#include "json.hpp"

#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pqip {

inline constexpr int kWireVersion = 1;

class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Session id: first 8 bytes of SHA-256(seed || circuit hash), hex.
inline std::string session_id(const Seed& seed, std::string_view circuit_hash_hex) {
  Sha256 h;
  h.update(std::span<const std::uint8_t>(seed));
  h.update(circuit_hash_hex);
  const auto d = h.finish();
  return to_hex(std::span<const std::uint8_t>(d.data(), 8));
}

/// Canonical NDJSON frames: sorted keys, no whitespace. Decoding accepts
/// exactly the canonical encoding, so decode(encode(m)) == m and
/// encode(decode(s)) == s.
template <PrimeField F>
class WireCodec {
 public:
  using Elem = typename F::Elem;
  using json = nlohmann::json;

  /// An empty sid is adopted from the first decoded frame.
  WireCodec(F field, std::string sid = {}) : field_(std::move(field)), sid_(std::move(sid)) {}

  const std::string& sid() const { return sid_; }

  std::string encode(const Message<F>& m) const {
    json j = std::visit([&](const auto& msg) { return payload(msg); }, m);
    j["v"] = kWireVersion;
    j["sid"] = sid_;
    return j.dump();
  }

  Message<F> decode(std::string_view line) {
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DecodeError(std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) throw DecodeError("frame is not a JSON object");
    if (!j.contains("v") || j["v"] != kWireVersion) throw DecodeError("unsupported frame version");
    if (!j.contains("sid") || !j["sid"].is_string()) throw DecodeError("missing sid");
    if (sid_.empty()) sid_ = j["sid"].get<std::string>();
    if (j["sid"] != sid_) throw DecodeError("session id mismatch");
    if (!j.contains("type") || !j["type"].is_string()) throw DecodeError("missing type");
    Message<F> m = parse_payload(j["type"].get<std::string>(), j);
    if (encode(m) != line) throw DecodeError("non-canonical frame");
    return m;
  }

 private:
  std::string hex(const Elem& e) const { return elem_to_hex(field_, e); }

  Elem elem(const json& j, const char* key) const {
    const auto& v = field(j, key);
    if (!v.is_string()) throw DecodeError(std::string("field '") + key + "' must be a hex string");
    auto e = elem_from_hex(field_, v.get<std::string>());
    if (!e) throw DecodeError(std::string("non-canonical field element in '") + key + "'");
    return *e;
  }

  static const json& field(const json& j, const char* key) {
    if (!j.contains(key)) throw DecodeError(std::string("missing '") + key + "'");
    return j[key];
  }

  static std::uint32_t round_of(const json& j) {
    const auto& v = field(j, "round");
    if (!v.is_number_unsigned() || v.get<std::uint64_t>() > 0xffffffffu) throw DecodeError("bad round index");
    return v.get<std::uint32_t>();
  }

  static std::string str(const json& j, const char* key) {
    const auto& v = field(j, key);
    if (!v.is_string()) throw DecodeError(std::string("'") + key + "' must be a string");
    return v.get<std::string>();
  }

  static bool boolean(const json& j, const char* key) {
    const auto& v = field(j, key);
    if (!v.is_boolean()) throw DecodeError(std::string("'") + key + "' must be a boolean");
    return v.get<bool>();
  }

  json payload(const InitialClaim<F>& m) const { return {{"type", "claim"}, {"S", hex(m.value)}}; }
  json payload(const RoundPolynomial<F>& m) const {
    json coeffs = json::array();
    for (const auto& c : m.poly.coefficients()) coeffs.push_back(hex(c));
    return {{"type", "round_poly"}, {"round", m.round}, {"coeffs", coeffs}};
  }
  json payload(const Challenge<F>& m) const { return {{"type", "challenge"}, {"round", m.round}, {"r", hex(m.r)}}; }
  json payload(const FinalVerdict& m) const {
    return {{"type", "verdict"}, {"accept", m.accept}, {"reason", std::string(reason_code(m.reason))}};
  }
  json payload(const WitnessRequest& m) const {
    return {{"type", "witness_request"}, {"circuit", m.circuit_hash}, {"field", m.modulus}};
  }
  json payload(const WitnessMessage& m) const {
    json j{{"type", "witness"}, {"found", m.bits.has_value()}};
    if (m.bits) j["bits"] = *m.bits;
    return j;
  }
  json payload(const ErrorMessage& m) const { return {{"type", "error"}, {"code", m.code}, {"detail", m.detail}}; }

  Message<F> parse_payload(const std::string& type, const json& j) const {
    if (type == "claim") return InitialClaim<F>{elem(j, "S")};
    if (type == "round_poly") {
      const auto& cs = field(j, "coeffs");
      if (!cs.is_array()) throw DecodeError("'coeffs' must be an array");
      std::vector<Elem> coeffs;
      for (const auto& c : cs) {
        if (!c.is_string()) throw DecodeError("coefficient must be a hex string");
        auto e = elem_from_hex(field_, c.get<std::string>());
        if (!e) throw DecodeError("non-canonical coefficient");
        coeffs.push_back(*e);
      }
      return RoundPolynomial<F>{round_of(j), UnivariatePolynomial<F>(field_, std::move(coeffs))};
    }
    if (type == "challenge") return Challenge<F>{round_of(j), elem(j, "r")};
    if (type == "verdict") {
      auto r = reason_from_code(str(j, "reason"));
      if (!r) throw DecodeError("unknown reason code");
      return FinalVerdict{boolean(j, "accept"), *r};
    }
    if (type == "witness_request") return WitnessRequest{str(j, "circuit"), str(j, "field")};
    if (type == "witness") {
      if (!boolean(j, "found")) return WitnessMessage{std::nullopt};
      return WitnessMessage{str(j, "bits")};
    }
    if (type == "error") return ErrorMessage{str(j, "code"), str(j, "detail")};
    throw DecodeError("unknown frame type '" + type + "'");
  }

  F field_;
  std::string sid_;
};

// ---------------------------------------------------------------------------
// Transcript files
// ---------------------------------------------------------------------------

/// First line of every transcript file. It carries everything needed to
/// rebuild the verifier: the instance, the field and the seed.
struct SessionHeader {
  std::string mode = "qcma";  // "qcma" or "qma"
  std::string circuit;        // canonical circuit text
  std::string circuit_hash;
  Bits input;
  std::string completeness;  // "num/den"; empty in qma mode
  std::string field;         // decimal modulus
  std::string seed;          // 64 hex chars
  std::string sid;
  friend bool operator==(const SessionHeader&, const SessionHeader&) = default;
};

inline SessionHeader make_session_header(const QcmaInstance& inst, const FieldSpec& field, const Seed& seed) {
  SessionHeader h;
  h.circuit = print_circuit(inst.circuit());
  h.circuit_hash = circuit_hash(inst.circuit());
  h.input = inst.input();
  h.completeness = rational_str(inst.completeness());
  h.field = field.modulus.str();
  h.seed = to_hex(std::span<const std::uint8_t>(seed));
  h.sid = session_id(seed, h.circuit_hash);
  return h;
}

inline std::string encode_session_header(const SessionHeader& h) {
  nlohmann::json j{{"v", kWireVersion},      {"sid", h.sid},         {"type", "session"}, {"mode", h.mode},
                   {"circuit", h.circuit},   {"circuit_hash", h.circuit_hash},             {"input", h.input},
                   {"completeness", h.completeness}, {"field", h.field}, {"seed", h.seed}};
  return j.dump();
}

inline SessionHeader decode_session_header(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw DecodeError(std::string("malformed session header: ") + e.what());
  }
  if (!j.is_object() || j.value("type", "") != "session") throw DecodeError("first line is not a session header");
  if (!j.contains("v") || j["v"] != kWireVersion) throw DecodeError("unsupported transcript version");
  SessionHeader h;
  try {
    h.sid = j.at("sid").get<std::string>();
    h.mode = j.at("mode").get<std::string>();
    h.circuit = j.at("circuit").get<std::string>();
    h.circuit_hash = j.at("circuit_hash").get<std::string>();
    h.input = j.at("input").get<std::string>();
    h.completeness = j.at("completeness").get<std::string>();
    h.field = j.at("field").get<std::string>();
    h.seed = j.at("seed").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw DecodeError(std::string("bad session header: ") + e.what());
  }
  if (encode_session_header(h) != line) throw DecodeError("non-canonical session header");
  if (to_hex(sha256(h.circuit)) != h.circuit_hash) throw DecodeError("circuit hash does not match circuit text");
  return h;
}

template <PrimeField F>
std::string transcript_text(const SessionHeader& h, const F& field, const std::vector<Message<F>>& messages) {
  const WireCodec<F> codec(field, h.sid);
  std::string out = encode_session_header(h) + '\n';
  for (const auto& m : messages) out += codec.encode(m) + '\n';
  return out;
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
  if (!f.flush()) throw std::runtime_error("write failed for " + path);
}

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

inline std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    lines.emplace_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return lines;
}

}  // namespace pqip
