#include "pqip/wire.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace pqip;

namespace {

using F = PrimeField64;
const F kField(kMersenne61);

WireCodec<F> codec() { return WireCodec<F>(kField, "00112233aabbccdd"); }

}  // namespace

TEST(WireCodec, ChallengeExample) {
  auto c = codec();
  const Message<F> m = Challenge<F>{3, 5};
  const auto s = c.encode(m);
  EXPECT_EQ(s, R"({"r":"05","round":3,"sid":"00112233aabbccdd","type":"challenge","v":1})");
  EXPECT_EQ(c.decode(s), m);
}

TEST(WireCodec, RoundTripEveryType) {
  auto c = codec();
  const std::vector<Message<F>> msgs{
      InitialClaim<F>{0},
      InitialClaim<F>{kMersenne61 - 1},
      RoundPolynomial<F>{7, UnivariatePolynomial<F>(kField, {1, 0, 2, 3})},
      RoundPolynomial<F>{0, UnivariatePolynomial<F>(kField, {})},
      Challenge<F>{12, 0x1234},
      FinalVerdict{true, Reason::Ok},
      FinalVerdict{false, Reason::FinalEval},
      WitnessRequest{std::string(64, 'a'), "2305843009213693951"},
      WitnessMessage{Bits("0110")},
      WitnessMessage{Bits("")},
      WitnessMessage{std::nullopt},
      ErrorMessage{"mismatch", "field differs"},
  };
  for (const auto& m : msgs) {
    const auto s = c.encode(m);
    EXPECT_EQ(s.find('\n'), std::string::npos);
    const auto back = c.decode(s);
    EXPECT_EQ(back, m) << s;
    EXPECT_EQ(c.encode(back), s);
  }
}

TEST(WireCodec, BigFieldElements) {
  const BigPrimeField big(pow2(127) - 1);
  WireCodec<BigPrimeField> c(big, "aa");
  const Message<BigPrimeField> m = Challenge<BigPrimeField>{1, pow2(126) + 5};
  EXPECT_EQ(c.decode(c.encode(m)), m);
}

TEST(WireCodec, DecodeErrors) {
  auto c = codec();
  const std::string sid = R"("sid":"00112233aabbccdd")";
  const std::vector<std::string> bad{
      "not json",
      "[1,2]",
      R"({"r":"05","round":3,)" + sid + R"(,"type":"bogus","v":1})",
      R"({"r":"05","round":3,)" + sid + R"(,"type":"challenge","v":2})",
      R"({"r":"5","round":3,)" + sid + R"(,"type":"challenge","v":1})",
      R"({"r":"0005","round":3,)" + sid + R"(,"type":"challenge","v":1})",
      R"({"r":"0A","round":3,)" + sid + R"(,"type":"challenge","v":1})",
      R"({"r":"ffffffffffffffff","round":3,)" + sid + R"(,"type":"challenge","v":1})",
      R"({"round":3,)" + sid + R"(,"type":"challenge","v":1})",
      R"({"r":"05","round":-1,)" + sid + R"(,"type":"challenge","v":1})",
      R"({"r":"05","round":3,"sid":"ffff","type":"challenge","v":1})",
      R"({"round":3,"r":"05",)" + sid + R"(,"type":"challenge","v":1})",
      R"({"r":"05", "round":3,)" + sid + R"(,"type":"challenge","v":1})",
      R"({"extra":1,"r":"05","round":3,)" + sid + R"(,"type":"challenge","v":1})",
      R"({"accept":true,"reason":"nope",)" + sid + R"(,"type":"verdict","v":1})",
      R"({"coeffs":["01","00"],"round":0,)" + sid + R"(,"type":"round_poly","v":1})",
  };
  for (const auto& s : bad) EXPECT_THROW(c.decode(s), DecodeError) << s;
}

TEST(WireCodec, AdoptsSessionId) {
  WireCodec<F> sender(kField, "beef");
  WireCodec<F> receiver(kField);
  EXPECT_EQ(receiver.decode(sender.encode(Challenge<F>{0, 1})), (Message<F>{Challenge<F>{0, 1}}));
  EXPECT_EQ(receiver.sid(), "beef");
  WireCodec<F> other(kField, "cafe");
  EXPECT_THROW(receiver.decode(other.encode(Challenge<F>{0, 1})), DecodeError);
}

TEST(SessionHeader, RoundTripAndTamperDetection) {
  const QcmaInstance inst(oracle::planted_circuit("10"), "1", Rational(3, 4));
  const auto seed = derive_seed("wire", 1);
  const auto h = make_session_header(inst, FieldSpec::mersenne61(), seed);
  const auto line = encode_session_header(h);
  EXPECT_EQ(decode_session_header(line), h);
  auto tampered = h;
  tampered.circuit += "X 0\n";
  EXPECT_THROW(decode_session_header(encode_session_header(tampered)), DecodeError);
  EXPECT_THROW(decode_session_header(R"({"type":"claim"})"), DecodeError);
}

TEST(Transcript, HonestSessionsReplayToSameVerdict) {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = 1 + static_cast<std::uint32_t>(rng() % 2);
    const QcmaInstance inst(oracle::random_circuit(rng, 4, 1 + rng() % 6, 1, m), oracle::random_bits(rng, 1),
                            Rational(1 + rng() % 4, 4));
    const auto seed = derive_seed("replay", trial);
    const auto d = run_precise_qcma_protocol(inst, QcmaStrategy::Honest, seed, kField);
    const auto header = make_session_header(inst, FieldSpec::mersenne61(), seed);
    const auto text = transcript_text(header, kField, d.transcript);

    // Parse back from text alone.
    const auto lines = split_lines(text);
    const auto h2 = decode_session_header(lines.at(0));
    const auto inst2 = parse_instance("input " + h2.input + "\ncompleteness " + h2.completeness + "\n" + h2.circuit);
    WireCodec<F> c(kField, h2.sid);
    std::vector<Message<F>> msgs;
    for (std::size_t i = 1; i < lines.size(); ++i) msgs.push_back(c.decode(lines[i]));
    const auto r = replay_qcma(inst2, kField, parse_seed(h2.seed), msgs);
    EXPECT_TRUE(r.matches);
    EXPECT_EQ(r.decision.accept, d.accept);
    EXPECT_EQ(r.decision.reason, d.reason);
  }
}

TEST(Transcript, TamperedChallengeDoesNotReplay) {
  const QcmaInstance inst(oracle::planted_circuit("1"), "1", Rational(3, 4));
  const auto seed = derive_seed("replay-tamper", 0);
  const auto d = run_precise_qcma_protocol(inst, QcmaStrategy::Honest, seed, kField);
  ASSERT_TRUE(d.accept);
  auto msgs = d.transcript;
  for (auto& m : msgs)
    if (auto* ch = std::get_if<Challenge<F>>(&m)) {
      ch->r = kField.add(ch->r, 1);
      break;
    }
  EXPECT_FALSE(replay_qcma(inst, kField, seed, msgs).matches);
  // A different seed also fails to reproduce the challenges.
  EXPECT_FALSE(replay_qcma(inst, kField, derive_seed("replay-tamper", 1), d.transcript).matches);
  EXPECT_TRUE(replay_qcma(inst, kField, seed, d.transcript).matches);
}
