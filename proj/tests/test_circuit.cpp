#include "pqip/circuit.hpp"
#include "pqip/dyadic.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace pqip;

TEST(ParseCircuit, SingleHadamard) {
  const auto c = parse_circuit("qubits 1\ninput 0..0\noutput 0\nH 0");
  EXPECT_EQ(c.width(), 1u);
  ASSERT_EQ(c.gates().size(), 1u);
  EXPECT_EQ(c.gates()[0], Gate(GateKind::H, {0}));
  EXPECT_EQ(c.hadamard_count(), 1u);
  EXPECT_EQ(c.layout().input, (QubitRange{0, 1}));
  EXPECT_TRUE(c.layout().witness.empty());
}

TEST(ParseCircuit, CommentsBlankLinesAndRegisters) {
  const auto c = parse_circuit(
      "# planted\n"
      "qubits 5   # width\n"
      "\n"
      "input 0..0\n"
      "witness 1..2\n"
      "ancilla 3..4\n"
      "output 4\n"
      "X 2\n"
      "CCNOT 1 2 4\n");
  EXPECT_EQ(c.layout().witness, (QubitRange{1, 2}));
  EXPECT_EQ(c.layout().output, 4u);
  EXPECT_EQ(c.ancillas(), (std::vector<std::uint32_t>{3, 4}));
  EXPECT_EQ(c.hadamard_count(), 0u);
}

TEST(ParseCircuit, UnlistedQubitsAreAncillas) {
  const auto c = parse_circuit("qubits 4\ninput 0..0\nwitness 2..2\noutput 3\n");
  EXPECT_EQ(c.ancillas(), (std::vector<std::uint32_t>{1, 3}));
  EXPECT_TRUE(c.gates().empty());
}

TEST(ParseCircuit, DuplicateQubitIndex) {
  try {
    parse_circuit("qubits 2\noutput 1\nCCNOT 0 0 1");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(e.column(), 9u);
    EXPECT_NE(std::string(e.what()).find("duplicate qubit"), std::string::npos);
  }
}

TEST(ParseCircuit, IndexOutOfRange) {
  try {
    parse_circuit("qubits 3\noutput 0\nH 5");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(e.column(), 3u);
    EXPECT_NE(std::string(e.what()).find("out of range"), std::string::npos);
  }
}

TEST(ParseCircuit, Errors) {
  auto fails = [](std::string_view src, std::string_view needle) {
    try {
      parse_circuit(src);
    } catch (const ParseError& e) {
      return std::string(e.what()).find(needle) != std::string::npos;
    }
    return false;
  };
  EXPECT_TRUE(fails("", "empty"));
  EXPECT_TRUE(fails("H 0\n", "qubits"));
  EXPECT_TRUE(fails("qubits 2\ninput 0..0\ninput 1..1\noutput 1\n", "duplicate register"));
  EXPECT_TRUE(fails("qubits 2\noutput 0\noutput 1\n", "duplicate register"));
  EXPECT_TRUE(fails("qubits 3\ninput 0..1\nwitness 1..2\noutput 0\n", "overlaps"));
  EXPECT_TRUE(fails("qubits 2\nwitness 0..1\noutput 1\n", "witness register"));
  EXPECT_TRUE(fails("qubits 2\nH 0\n", "missing 'output"));
  EXPECT_TRUE(fails("qubits 2\noutput 0\nH 0\ninput 1..1\n", "after gate"));
  EXPECT_TRUE(fails("qubits 2\noutput 0\nT 0\n", "unknown statement"));
  EXPECT_TRUE(fails("qubits 2\noutput 0\nCNOT 0\n", "takes 2"));
  EXPECT_TRUE(fails("qubits 2\noutput 0\nH x\n", "non-negative integer"));
  EXPECT_TRUE(fails("qubits 2\ninput 1..0\noutput 0\n", "empty range"));
  EXPECT_TRUE(fails("qubits 0\n", "1..62"));
}

TEST(PrintCircuit, RoundTripIsFixedPoint) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 100; ++i) {
    const auto width = static_cast<std::uint32_t>(3 + rng() % 4);
    const auto c = oracle::random_circuit(rng, width, rng() % 12, 1, static_cast<std::uint32_t>(rng() % 2));
    const auto text = print_circuit(c);
    const auto back = parse_circuit(text);
    EXPECT_EQ(back, c);
    EXPECT_EQ(print_circuit(back), text);
  }
  const auto messy = parse_circuit("qubits 3  \n# c\ninput   0..0\nancilla 1..2\noutput 2\n  CNOT 0   2 # x\n");
  EXPECT_EQ(print_circuit(messy), "qubits 3\ninput 0..0\noutput 2\nCNOT 0 2\n");
}

TEST(DyadicRational, CanonicalForm) {
  const DyadicRational half(4, 3);
  EXPECT_EQ(half.numerator(), 1);
  EXPECT_EQ(half.exponent(), 1u);
  EXPECT_EQ(half.str(), "1/2^1");
  const DyadicRational zero(0, 9);
  EXPECT_EQ(zero.exponent(), 0u);
  EXPECT_EQ(zero.str(), "0/2^0");
  EXPECT_EQ(DyadicRational(-6, 2).str(), "-3/2^1");
  EXPECT_EQ(DyadicRational(8, 0).str(), "8/2^0");
}

TEST(DyadicRational, ParseAndCompare) {
  EXPECT_EQ(DyadicRational::parse("3/2^2"), DyadicRational(3, 2));
  EXPECT_THROW(DyadicRational::parse("2/2^2"), std::invalid_argument);
  EXPECT_THROW(DyadicRational::parse("3/4"), std::invalid_argument);
  EXPECT_THROW(DyadicRational::parse("x/2^1"), std::invalid_argument);
  EXPECT_LT(DyadicRational(1, 1), DyadicRational(3, 2));
  EXPECT_EQ(DyadicRational(3, 2) - DyadicRational(1, 2), DyadicRational(1, 1));
  EXPECT_EQ(DyadicRational(3, 2) + DyadicRational(1, 2), DyadicRational(1, 0));
  EXPECT_EQ(DyadicRational(3, 2).numerator_at(5), 24);
  EXPECT_EQ(DyadicRational(3, 2).to_rational(), Rational(3, 4));
}

TEST(Rational, Parse) {
  EXPECT_EQ(parse_rational("2/3"), Rational(2, 3));
  EXPECT_EQ(parse_rational("1"), Rational(1));
  EXPECT_THROW(parse_rational("1/0"), std::invalid_argument);
  EXPECT_THROW(parse_rational("a/3"), std::invalid_argument);
}
