#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pqip {

enum class GateKind : std::uint8_t { H, X, CNOT, CCNOT };

inline constexpr std::size_t arity(GateKind k) {
  switch (k) {
    case GateKind::H:
    case GateKind::X: return 1;
    case GateKind::CNOT: return 2;
    case GateKind::CCNOT: return 3;
  }
  return 0;
}

inline constexpr std::string_view gate_name(GateKind k) {
  switch (k) {
    case GateKind::H: return "H";
    case GateKind::X: return "X";
    case GateKind::CNOT: return "CNOT";
    case GateKind::CCNOT: return "CCNOT";
  }
  return "?";
}

inline std::optional<GateKind> gate_kind_from_name(std::string_view s) {
  if (s == "H") return GateKind::H;
  if (s == "X") return GateKind::X;
  if (s == "CNOT") return GateKind::CNOT;
  if (s == "CCNOT") return GateKind::CCNOT;
  return std::nullopt;
}

/// A gate from {H, X, CNOT, CCNOT}. The last qubit is the target; the others
/// are controls.
class Gate {
 public:
  Gate(GateKind kind, std::initializer_list<std::uint32_t> qubits) : Gate(kind, std::span(qubits.begin(), qubits.size())) {}
  Gate(GateKind kind, std::span<const std::uint32_t> qubits) : kind_(kind) {
    if (qubits.size() != arity(kind))
      throw std::invalid_argument(std::string(gate_name(kind)) + " takes " + std::to_string(arity(kind)) + " qubit(s)");
    std::copy(qubits.begin(), qubits.end(), q_.begin());
    for (std::size_t i = 0; i < qubits.size(); ++i)
      for (std::size_t j = i + 1; j < qubits.size(); ++j)
        if (q_[i] == q_[j]) throw std::invalid_argument("duplicate qubit index " + std::to_string(q_[i]));
  }

  GateKind kind() const { return kind_; }
  std::span<const std::uint32_t> qubits() const { return {q_.data(), arity(kind_)}; }
  std::uint32_t target() const { return q_[arity(kind_) - 1]; }
  bool is_permutation() const { return kind_ != GateKind::H; }

  /// Basis-state image of a permutation gate.
  std::uint64_t permute(std::uint64_t basis) const {
    switch (kind_) {
      case GateKind::X: return basis ^ (std::uint64_t{1} << q_[0]);
      case GateKind::CNOT: return ((basis >> q_[0]) & 1) ? basis ^ (std::uint64_t{1} << q_[1]) : basis;
      case GateKind::CCNOT:
        return (((basis >> q_[0]) & 1) && ((basis >> q_[1]) & 1)) ? basis ^ (std::uint64_t{1} << q_[2]) : basis;
      case GateKind::H: break;
    }
    throw std::logic_error("permute called on a Hadamard");
  }

  friend bool operator==(const Gate& a, const Gate& b) {
    return a.kind_ == b.kind_ && std::ranges::equal(a.qubits(), b.qubits());
  }

 private:
  GateKind kind_;
  std::array<std::uint32_t, 3> q_{};
};

/// Half-open run of consecutive qubits [lo, lo + count).
struct QubitRange {
  std::uint32_t lo = 0;
  std::uint32_t count = 0;

  std::uint32_t end() const { return lo + count; }
  bool empty() const { return count == 0; }
  bool contains(std::uint32_t q) const { return q >= lo && q < end(); }
  bool overlaps(const QubitRange& o) const { return !empty() && !o.empty() && lo < o.end() && o.lo < end(); }
  friend bool operator==(const QubitRange&, const QubitRange&) = default;
};

/// Input, witness and output placement. Every qubit outside the input and
/// witness ranges is an ancilla and starts in |0>.
struct RegisterLayout {
  QubitRange input;
  QubitRange witness;
  std::uint32_t output = 0;

  friend bool operator==(const RegisterLayout&, const RegisterLayout&) = default;
};

/// Bit strings are carried as text over {'0','1'}; character i addresses the
/// i-th qubit of its register.
using Bits = std::string;

inline void check_bits(std::string_view bits, std::size_t expected, std::string_view what) {
  if (bits.size() != expected)
    throw std::invalid_argument(std::string(what) + " has length " + std::to_string(bits.size()) + ", expected " +
                                std::to_string(expected));
  if (bits.find_first_not_of("01") != std::string_view::npos)
    throw std::invalid_argument(std::string(what) + " must contain only '0' and '1'");
}

class Circuit {
 public:
  Circuit(std::uint32_t width, RegisterLayout layout, std::vector<Gate> gates)
      : width_(width), layout_(layout), gates_(std::move(gates)) {
    if (layout_.input.empty()) layout_.input = {};
    if (layout_.witness.empty()) layout_.witness = {};
    if (width_ == 0) throw std::invalid_argument("circuit needs at least one qubit");
    if (width_ > 62) throw std::invalid_argument("circuit width exceeds 62 qubits");
    if (layout_.input.end() > width_ || layout_.witness.end() > width_)
      throw std::invalid_argument("register range exceeds circuit width");
    if (layout_.input.overlaps(layout_.witness)) throw std::invalid_argument("input and witness registers overlap");
    if (layout_.output >= width_) throw std::invalid_argument("output qubit out of range");
    if (layout_.witness.contains(layout_.output)) throw std::invalid_argument("output qubit lies in the witness register");
    for (const auto& g : gates_) {
      for (auto q : g.qubits())
        if (q >= width_) throw std::invalid_argument("qubit index " + std::to_string(q) + " out of range");
      if (g.kind() == GateKind::H) ++hadamards_;
    }
  }

  std::uint32_t width() const { return width_; }
  const RegisterLayout& layout() const { return layout_; }
  const std::vector<Gate>& gates() const { return gates_; }
  std::uint64_t hadamard_count() const { return hadamards_; }
  std::uint32_t witness_size() const { return layout_.witness.count; }
  std::uint32_t input_size() const { return layout_.input.count; }

  /// Ancilla qubits in increasing order.
  std::vector<std::uint32_t> ancillas() const {
    std::vector<std::uint32_t> out;
    for (std::uint32_t q = 0; q < width_; ++q)
      if (!layout_.input.contains(q) && !layout_.witness.contains(q)) out.push_back(q);
    return out;
  }

  /// Basis index of |x, w, 0...0> (bit q of the index is qubit q).
  std::uint64_t initial_basis(std::string_view input_bits, std::string_view witness_bits) const {
    check_bits(input_bits, layout_.input.count, "input bits");
    check_bits(witness_bits, layout_.witness.count, "witness bits");
    std::uint64_t b = 0;
    for (std::uint32_t i = 0; i < layout_.input.count; ++i)
      if (input_bits[i] == '1') b |= std::uint64_t{1} << (layout_.input.lo + i);
    for (std::uint32_t i = 0; i < layout_.witness.count; ++i)
      if (witness_bits[i] == '1') b |= std::uint64_t{1} << (layout_.witness.lo + i);
    return b;
  }

  friend bool operator==(const Circuit& a, const Circuit& b) {
    return a.width_ == b.width_ && a.layout_ == b.layout_ && a.gates_ == b.gates_;
  }

 private:
  std::uint32_t width_;
  RegisterLayout layout_;
  std::vector<Gate> gates_;
  std::uint64_t hadamards_ = 0;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg),
        line_(line),
        column_(column),
        msg_(msg) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& message() const { return msg_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string msg_;
};

namespace detail {

struct Token {
  std::string_view text;
  std::size_t column;  // 1-based
};

inline std::vector<Token> tokenize_line(std::string_view line) {
  if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    if (i >= line.size()) break;
    const auto start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    out.push_back({line.substr(start, i - start), start + 1});
  }
  return out;
}

inline std::uint32_t parse_index(const Token& tok, std::size_t line) {
  std::uint32_t v = 0;
  const auto* first = tok.text.data();
  const auto* last = first + tok.text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) throw ParseError(line, tok.column, "expected a non-negative integer, got '" + std::string(tok.text) + "'");
  return v;
}

inline QubitRange parse_range(const Token& tok, std::size_t line, std::uint32_t width) {
  const auto dots = tok.text.find("..");
  if (dots == std::string_view::npos) throw ParseError(line, tok.column, "expected <lo>..<hi>");
  const Token lo_tok{tok.text.substr(0, dots), tok.column};
  const Token hi_tok{tok.text.substr(dots + 2), tok.column + dots + 2};
  const auto lo = parse_index(lo_tok, line);
  const auto hi = parse_index(hi_tok, line);
  if (hi < lo) throw ParseError(line, tok.column, "empty range " + std::string(tok.text));
  if (hi >= width) throw ParseError(line, hi_tok.column, "qubit index " + std::to_string(hi) + " out of range");
  return {lo, hi - lo + 1};
}

}  // namespace detail

/// Parses the line-oriented circuit format:
///
///     qubits <N>
///     input <lo>..<hi>      (optional)
///     witness <lo>..<hi>    (optional)
///     ancilla <lo>..<hi>    (optional, informational)
///     output <q>
///     H <q> | X <q> | CNOT <c> <t> | CCNOT <c1> <c2> <t>
///
/// Register lines precede gate lines. '#' starts a comment.
inline Circuit parse_circuit(std::string_view text) {
  std::optional<std::uint32_t> width;
  std::optional<QubitRange> input, witness, ancilla;
  std::optional<std::uint32_t> output;
  std::vector<Gate> gates;
  std::size_t last_line = 0;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const auto line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    const auto toks = detail::tokenize_line(line);
    if (toks.empty()) continue;
    last_line = line_no;
    const auto& head = toks[0];

    if (!width) {
      if (head.text != "qubits" || toks.size() != 2) throw ParseError(line_no, head.column, "expected 'qubits <N>' first");
      const auto n = detail::parse_index(toks[1], line_no);
      if (n == 0 || n > 62) throw ParseError(line_no, toks[1].column, "qubit count must be in 1..62");
      width = n;
      continue;
    }

    auto set_range = [&](std::optional<QubitRange>& slot) {
      if (!gates.empty()) throw ParseError(line_no, head.column, "register line after gate lines");
      if (slot) throw ParseError(line_no, head.column, "duplicate register '" + std::string(head.text) + "'");
      if (toks.size() != 2) throw ParseError(line_no, head.column, "expected '" + std::string(head.text) + " <lo>..<hi>'");
      slot = detail::parse_range(toks[1], line_no, *width);
      const std::array<const std::optional<QubitRange>*, 3> regs{&input, &witness, &ancilla};
      for (const auto* other : regs)
        if (other != &slot && *other && (*other)->overlaps(*slot))
          throw ParseError(line_no, toks[1].column, "register '" + std::string(head.text) + "' overlaps another register");
    };

    if (head.text == "qubits") throw ParseError(line_no, head.column, "duplicate register 'qubits'");
    if (head.text == "input") { set_range(input); continue; }
    if (head.text == "witness") { set_range(witness); continue; }
    if (head.text == "ancilla") { set_range(ancilla); continue; }
    if (head.text == "output") {
      if (!gates.empty()) throw ParseError(line_no, head.column, "register line after gate lines");
      if (output) throw ParseError(line_no, head.column, "duplicate register 'output'");
      if (toks.size() != 2) throw ParseError(line_no, head.column, "expected 'output <q>'");
      const auto q = detail::parse_index(toks[1], line_no);
      if (q >= *width) throw ParseError(line_no, toks[1].column, "qubit index " + std::to_string(q) + " out of range");
      output = q;
      continue;
    }

    const auto kind = gate_kind_from_name(head.text);
    if (!kind) throw ParseError(line_no, head.column, "unknown statement '" + std::string(head.text) + "'");
    if (toks.size() - 1 != arity(*kind))
      throw ParseError(line_no, head.column, std::string(head.text) + " takes " + std::to_string(arity(*kind)) + " qubit(s)");
    std::array<std::uint32_t, 3> qs{};
    for (std::size_t i = 1; i < toks.size(); ++i) {
      qs[i - 1] = detail::parse_index(toks[i], line_no);
      if (qs[i - 1] >= *width)
        throw ParseError(line_no, toks[i].column, "qubit index " + std::to_string(qs[i - 1]) + " out of range");
      for (std::size_t j = 0; j + 1 < i; ++j)
        if (qs[j] == qs[i - 1]) throw ParseError(line_no, toks[i].column, "duplicate qubit index " + std::to_string(qs[j]));
    }
    gates.emplace_back(*kind, std::span<const std::uint32_t>(qs.data(), arity(*kind)));
  }

  if (!width) throw ParseError(1, 1, "empty circuit source");
  if (!output) throw ParseError(last_line, 1, "missing 'output <q>' line");
  RegisterLayout layout{input.value_or(QubitRange{}), witness.value_or(QubitRange{}), *output};
  if (layout.witness.contains(layout.output)) throw ParseError(last_line, 1, "output qubit lies in the witness register");
  return Circuit(*width, layout, std::move(gates));
}

/// Canonical text form. parse_circuit(print_circuit(c)) == c, and printing is
/// a fixed point after one parse.
inline std::string print_circuit(const Circuit& c) {
  std::ostringstream os;
  os << "qubits " << c.width() << '\n';
  const auto& l = c.layout();
  if (!l.input.empty()) os << "input " << l.input.lo << ".." << l.input.end() - 1 << '\n';
  if (!l.witness.empty()) os << "witness " << l.witness.lo << ".." << l.witness.end() - 1 << '\n';
  os << "output " << l.output << '\n';
  for (const auto& g : c.gates()) {
    os << gate_name(g.kind());
    for (auto q : g.qubits()) os << ' ' << q;
    os << '\n';
  }
  return os.str();
}

}  // namespace pqip
