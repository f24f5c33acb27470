#include "pqip/path_sum.hpp"
#include "pqip/polynomial.hpp"
#include "pqip/simulator.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace pqip;

namespace {

const PrimeField64 kField(kMersenne61);

std::uint64_t lifted(const DyadicRational& p, std::uint64_t h) { return p.numerator_at(h).convert_to<std::uint64_t>(); }

}  // namespace

TEST(Field, Arithmetic) {
  const PrimeField64 f(97);
  EXPECT_EQ(f.add(90, 10), 3u);
  EXPECT_EQ(f.sub(3, 10), 90u);
  EXPECT_EQ(f.neg(0), 0u);
  EXPECT_EQ(f.mul(f.inv(5), 5), 1u);
  EXPECT_EQ(f.from_int(BigInt(-1)), 96u);
  const std::array<std::uint8_t, 2> bytes{0x01, 0x00};
  EXPECT_EQ(f.from_bytes(bytes), 256u % 97);
  const BigPrimeField g(BigInt(97));
  EXPECT_EQ(g.from_bytes(bytes), BigInt(256 % 97));
  EXPECT_EQ(g.mul(g.inv(BigInt(5)), BigInt(5)), BigInt(1));
}

TEST(Field, SpecValidation) {
  EXPECT_NO_THROW(FieldSpec::parse("97"));
  EXPECT_EQ(FieldSpec::mersenne61().bits, 61u);
  EXPECT_THROW(FieldSpec::parse("91"), std::invalid_argument);
  EXPECT_THROW(FieldSpec::parse("3"), std::invalid_argument);
  EXPECT_THROW(FieldSpec::parse("0x61"), std::invalid_argument);
  EXPECT_TRUE(FieldSpec::parse("97").embeds(6));
  EXPECT_FALSE(FieldSpec::parse("97").embeds(7));
  // 2^127 - 1 needs the arbitrary-precision field.
  const auto big = FieldSpec::from_modulus(pow2(127) - 1);
  EXPECT_TRUE(with_field(big, [](const auto& f) { return std::is_same_v<std::decay_t<decltype(f)>, BigPrimeField>; }));
}

TEST(FieldHex, CanonicalEncoding) {
  EXPECT_EQ(int_to_hex(BigInt(5)), "05");
  EXPECT_EQ(int_to_hex(BigInt(0)), "00");
  EXPECT_EQ(int_to_hex(BigInt(0x1ff)), "01ff");
  EXPECT_EQ(hex_to_int("01ff"), BigInt(0x1ff));
  EXPECT_FALSE(hex_to_int("1ff"));
  EXPECT_FALSE(hex_to_int("0005"));
  EXPECT_FALSE(hex_to_int("0A"));
  EXPECT_FALSE(hex_to_int(""));
  const PrimeField64 f(97);
  EXPECT_FALSE(elem_from_hex(f, "61"));  // 97 is not a field element
  EXPECT_EQ(elem_from_hex(f, "60"), 96u);
}

TEST(Polynomial, InterpolateAndEvaluate) {
  const PrimeField64 f(97);
  // p(X) = 3 + 2X + 5X^2 + 7X^3
  const UnivariatePolynomial<PrimeField64> p(f, {3, 2, 5, 7});
  std::array<std::uint64_t, 4> ys{};
  for (std::uint64_t x = 0; x < 4; ++x) ys[x] = p.evaluate(f, x);
  EXPECT_EQ(interpolate_consecutive(f, std::span<const std::uint64_t>(ys)), p);
  EXPECT_EQ(p.sum_over_boolean(f), (3 + 3 + 2 + 5 + 7) % 97u);
  const UnivariatePolynomial<PrimeField64> trimmed(f, {1, 0, 0});
  EXPECT_EQ(trimmed.coefficients().size(), 1u);
  EXPECT_EQ(UnivariatePolynomial<PrimeField64>(f, {0, 0}).coefficients().size(), 0u);
}

TEST(TransitionMle, ScaledHadamardEntries) {
  const Gate h(GateKind::H, {0});
  const std::vector<std::uint64_t> zero{0}, one{1};
  EXPECT_EQ(transition_mle_eval(kField, h, std::span<const std::uint64_t>(zero), std::span<const std::uint64_t>(zero)), 1u);
  EXPECT_EQ(transition_mle_eval(kField, h, std::span<const std::uint64_t>(one), std::span<const std::uint64_t>(one)), kMersenne61 - 1);
  EXPECT_EQ(transition_mle_eval(kField, h, std::span<const std::uint64_t>(zero), std::span<const std::uint64_t>(one)), 1u);
}

TEST(TransitionMle, BooleanPointsReproduceTable) {
  const std::uint32_t n = 3;
  for (const auto& g : {Gate(GateKind::H, {1}), Gate(GateKind::X, {2}), Gate(GateKind::CNOT, {2, 0}), Gate(GateKind::CCNOT, {0, 2, 1})}) {
    for (std::uint64_t a = 0; a < 8; ++a)
      for (std::uint64_t b = 0; b < 8; ++b) {
        std::vector<std::uint64_t> l(n), r(n);
        for (std::uint32_t q = 0; q < n; ++q) {
          l[q] = (a >> q) & 1;
          r[q] = (b >> q) & 1;
        }
        const auto v = transition_mle_eval(kField, g, std::span<const std::uint64_t>(l), std::span<const std::uint64_t>(r));
        EXPECT_EQ(v, kField.from_int(BigInt(scaled_gate_entry(g, a, b))));
        if (g.kind() == GateKind::CCNOT) {
          EXPECT_EQ(v, g.permute(a) == b ? 1u : 0u);
        }
      }
  }
}

TEST(TransitionMle, MatchesBruteForceAtFieldPoints) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    const std::uint32_t n = 1 + rng() % 4;
    const auto c = oracle::random_circuit(rng, std::max<std::uint32_t>(n, 3), 1, 0, 0);
    if (c.width() != n) continue;
    std::vector<std::uint64_t> l(n), r(n);
    for (auto& x : l) x = rng() % kMersenne61;
    for (auto& x : r) x = rng() % kMersenne61;
    const auto& g = c.gates()[0];
    EXPECT_EQ(transition_mle_eval(kField, g, std::span<const std::uint64_t>(l), std::span<const std::uint64_t>(r)),
              oracle::brute_force_mle(kField, g, n, std::span<const std::uint64_t>(l), std::span<const std::uint64_t>(r)));
  }
}

TEST(TransitionMle, MultilinearPerCoordinate) {
  // Three collinear points along any coordinate agree with linear interpolation.
  std::mt19937_64 rng(22);
  const PrimeField64 f(kMersenne61);
  for (const auto& g : {Gate(GateKind::H, {0}), Gate(GateKind::CNOT, {1, 2}), Gate(GateKind::CCNOT, {2, 1, 0})}) {
    std::vector<std::uint64_t> l(3), r(3);
    for (auto& x : l) x = rng() % kMersenne61;
    for (auto& x : r) x = rng() % kMersenne61;
    for (std::size_t coord = 0; coord < 6; ++coord) {
      auto at = [&](std::uint64_t v) {
        auto ll = l, rr = r;
        (coord < 3 ? ll[coord] : rr[coord - 3]) = v;
        return transition_mle_eval(f, g, std::span<const std::uint64_t>(ll), std::span<const std::uint64_t>(rr));
      };
      // f(2) = 2 f(1) - f(0) iff degree <= 1 in this coordinate.
      EXPECT_EQ(at(2), f.sub(f.mul(2, at(1)), at(0)));
    }
  }
}

TEST(PathSum, VariableCount) {
  const Circuit c(2, RegisterLayout{{0, 2}, {}, 1}, {Gate(GateKind::H, {0}), Gate(GateKind::CNOT, {0, 1})});
  const auto inst = build_path_sum_instance(c, "00", "", kField);
  EXPECT_EQ(inst.free_variable_count(), 6u);
  EXPECT_EQ(inst.layer_count(), 5u);
}

TEST(PathSum, SingleHadamardSumIsOne) {
  const Circuit c(1, RegisterLayout{{0, 1}, {}, 0}, {Gate(GateKind::H, {0})});
  EXPECT_EQ(exact_claim_value(build_path_sum_instance(c, "0", "", kField)), 1u);
}

TEST(PathSum, ExactClaimExamples) {
  const Circuit x(1, RegisterLayout{{0, 1}, {}, 0}, {Gate(GateKind::X, {0})});
  EXPECT_EQ(exact_claim_value(build_path_sum_instance(x, "0", "", kField)), 1u);
  const Circuit hh(1, RegisterLayout{{0, 1}, {}, 0}, {Gate(GateKind::H, {0}), Gate(GateKind::H, {0})});
  EXPECT_EQ(exact_claim_value(build_path_sum_instance(hh, "0", "", kField)), 0u);
}

TEST(PathSum, BuildErrors) {
  const Circuit empty(1, RegisterLayout{{0, 1}, {}, 0}, {});
  EXPECT_THROW(build_path_sum_instance(empty, "0", "", kField), std::invalid_argument);
  std::vector<Gate> hs(7, Gate(GateKind::H, {0}));
  const Circuit deep(1, RegisterLayout{{0, 1}, {}, 0}, hs);
  EXPECT_THROW(build_path_sum_instance(deep, "0", "", PrimeField64(97)), std::invalid_argument);
  hs.pop_back();
  EXPECT_NO_THROW(build_path_sum_instance(Circuit(1, RegisterLayout{{0, 1}, {}, 0}, hs), "0", "", PrimeField64(97)));
}

TEST(PathSum, OracleEquivalenceWithSimulator) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const std::uint32_t n = 3 + rng() % 2;
    const auto c = oracle::random_circuit(rng, n, 1 + rng() % 10, 1, 1);
    for (const auto& w : all_bitstrings(1)) {
      const auto x = oracle::random_bits(rng, 1);
      const auto inst = build_path_sum_instance(c, x, w, kField);
      EXPECT_EQ(exact_claim_value(inst), lifted(acceptance_probability(c, x, w), c.hadamard_count()));
    }
  }
}

TEST(PathSum, BooleanSumOfSummandEqualsClaim) {
  // Independent of the DP: enumerate every boolean assignment.
  std::mt19937_64 rng(24);
  for (int trial = 0; trial < 20; ++trial) {
    const auto c = oracle::random_circuit(rng, 2, 1 + rng() % 3, 2, 0);
    const auto inst = build_path_sum_instance(c, "10", "", kField);
    const auto vars = inst.free_variable_count();
    std::uint64_t sum = 0;
    std::vector<std::uint64_t> pt(vars);
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << vars); ++bits) {
      for (std::size_t i = 0; i < vars; ++i) pt[i] = (bits >> i) & 1;
      sum = kField.add(sum, inst.evaluate(pt));
    }
    EXPECT_EQ(sum, exact_claim_value(inst));
  }
}

TEST(PathSum, BigFieldForDeepCircuits) {
  // 64 Hadamards on one qubit: identity, acceptance 0, S = 0; with X first, S = 2^64.
  std::vector<Gate> gs{Gate(GateKind::X, {0})};
  for (int i = 0; i < 64; ++i) gs.push_back(Gate(GateKind::H, {0}));
  const Circuit c(1, RegisterLayout{{0, 1}, {}, 0}, gs);
  EXPECT_THROW(build_path_sum_instance(c, "0", "", kField), std::invalid_argument);
  const BigPrimeField big(pow2(89) - 1);
  const auto inst = build_path_sum_instance(c, "0", "", big);
  EXPECT_EQ(exact_claim_value(inst), pow2(64));
  EXPECT_EQ(acceptance_probability(c, "0", ""), DyadicRational(1, 0));
}
