#pragma once

#include "pqip/sumcheck.hpp"

#include <memory>
#include <random>
#include <string>
#include <string_view>

namespace pqip {

template <PrimeField F>
typename F::Elem random_elem(const F& f, std::mt19937_64& rng) {
  std::array<std::uint8_t, 32> bytes{};
  for (auto& b : bytes) b = static_cast<std::uint8_t>(rng());
  return f.from_bytes(bytes);
}

/// Answers with the true partial sums. Rejected at round 0 if the claim it is
/// handed is false.
template <PrimeField F>
class HonestProver : public SumcheckProver<F> {
 public:
  using Elem = typename F::Elem;

  void begin(const PathSumInstance<F>& inst, const Elem&) override {
    inst_ = &inst;
    suffix_ = suffix_tables(inst);
  }
  UnivariatePolynomial<F> round(std::span<const Elem> challenges) override {
    return honest_prover_round(*inst_, challenges, suffix_);
  }

 private:
  const PathSumInstance<F>* inst_ = nullptr;
  std::vector<std::vector<Elem>> suffix_;
};

/// Defends whatever claim it is given. Each round it computes the honest
/// polynomial h and, if h(0)+h(1) misses the running claim by delta, sends
/// h + delta * D where D is a cubic with D(0)+D(1) = 1 and three random
/// roots. The running claim becomes true again only if the challenge lands on
/// a root, so per-round success is 3/p: the Schwartz-Zippel bound is tight.
///
/// With perturb_round set, the prover also adds a random nonzero correction
/// E with E(0)+E(1) = 0 at that round, falsifying an otherwise true claim.
template <PrimeField F>
class DefendingProver : public SumcheckProver<F> {
 public:
  using Elem = typename F::Elem;

  explicit DefendingProver(std::uint64_t rng_seed, std::optional<std::uint32_t> perturb_round = std::nullopt)
      : rng_(rng_seed), perturb_round_(perturb_round) {}

  void begin(const PathSumInstance<F>& inst, const Elem& claimed) override {
    inst_ = &inst;
    suffix_ = suffix_tables(inst);
    target_ = claimed;
    last_.reset();
  }

  UnivariatePolynomial<F> round(std::span<const Elem> challenges) override {
    const auto& f = inst_->field();
    if (last_ && !challenges.empty()) target_ = last_->evaluate(f, challenges.back());
    auto coeffs = padded(honest_prover_round(*inst_, challenges, suffix_));
    const Elem delta = f.sub(target_, UnivariatePolynomial<F>(f, coeffs).sum_over_boolean(f));
    if (!f.eq(delta, f.zero())) {
      const auto d = unit_sum_cubic();
      for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] = f.add(coeffs[i], f.mul(delta, d[i]));
    }
    if (perturb_round_ && *perturb_round_ == challenges.size()) {
      const auto e = zero_sum_correction();
      for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] = f.add(coeffs[i], e[i]);
    }
    last_ = UnivariatePolynomial<F>(f, coeffs);
    return *last_;
  }

 private:
  using Coeffs = std::array<Elem, kMaxRoundDegree + 1>;

  std::vector<Elem> padded(const UnivariatePolynomial<F>& p) const {
    std::vector<Elem> c = p.coefficients();
    c.resize(kMaxRoundDegree + 1, inst_->field().zero());
    return c;
  }

  // (X-a)(X-b)(X-c) scaled so that D(0) + D(1) = 1.
  Coeffs unit_sum_cubic() {
    const auto& f = inst_->field();
    for (;;) {
      const Elem a = random_elem(f, rng_), b = random_elem(f, rng_), c = random_elem(f, rng_);
      const Elem s1 = f.add(f.add(a, b), c);
      const Elem s2 = f.add(f.add(f.mul(a, b), f.mul(a, c)), f.mul(b, c));
      const Elem s3 = f.mul(f.mul(a, b), c);
      Coeffs d{f.neg(s3), s2, f.neg(s1), f.one()};
      const Elem sum = UnivariatePolynomial<F>(f, {d.begin(), d.end()}).sum_over_boolean(f);
      if (f.eq(sum, f.zero())) continue;
      const Elem scale = f.inv(sum);
      for (auto& x : d) x = f.mul(x, scale);
      return d;
    }
  }

  // Random nonzero cubic E with E(0) + E(1) = 2 e0 + e1 + e2 + e3 = 0.
  Coeffs zero_sum_correction() {
    const auto& f = inst_->field();
    const Elem half = f.inv(f.from_u64(2));
    for (;;) {
      Coeffs e{f.zero(), random_elem(f, rng_), random_elem(f, rng_), random_elem(f, rng_)};
      e[0] = f.neg(f.mul(half, f.add(f.add(e[1], e[2]), e[3])));
      if (!UnivariatePolynomial<F>(f, {e.begin(), e.end()}).coefficients().empty()) return e;
    }
  }

  std::mt19937_64 rng_;
  std::optional<std::uint32_t> perturb_round_;
  const PathSumInstance<F>* inst_ = nullptr;
  std::vector<std::vector<Elem>> suffix_;
  Elem target_{};
  std::optional<UnivariatePolynomial<F>> last_;
};

/// Uniformly random cubics.
template <PrimeField F>
class GarbageProver : public SumcheckProver<F> {
 public:
  using Elem = typename F::Elem;
  explicit GarbageProver(std::uint64_t rng_seed) : rng_(rng_seed) {}
  void begin(const PathSumInstance<F>& inst, const Elem&) override { inst_ = &inst; }
  UnivariatePolynomial<F> round(std::span<const Elem>) override {
    const auto& f = inst_->field();
    std::vector<Elem> c;
    for (std::size_t i = 0; i <= kMaxRoundDegree; ++i) c.push_back(random_elem(f, rng_));
    return UnivariatePolynomial<F>(f, std::move(c));
  }

 private:
  std::mt19937_64 rng_;
  const PathSumInstance<F>* inst_ = nullptr;
};

/// Sends a fixed polynomial of the given degree every round (wire-level
/// misbehaviour tests).
template <PrimeField F>
class OverDegreeProver : public SumcheckProver<F> {
 public:
  using Elem = typename F::Elem;
  void begin(const PathSumInstance<F>& inst, const Elem&) override { inst_ = &inst; }
  UnivariatePolynomial<F> round(std::span<const Elem>) override {
    const auto& f = inst_->field();
    return UnivariatePolynomial<F>(f, std::vector<Elem>(kMaxRoundDegree + 2, f.one()));
  }

 private:
  const PathSumInstance<F>* inst_ = nullptr;
};

enum class Strategy { Honest, WrongClaim, Perturb, Garbage };

inline std::optional<Strategy> strategy_from_name(std::string_view s) {
  if (s == "honest") return Strategy::Honest;
  if (s == "wrong-claim" || s == "inflate") return Strategy::WrongClaim;
  if (s == "perturb") return Strategy::Perturb;
  if (s == "garbage") return Strategy::Garbage;
  return std::nullopt;
}

template <PrimeField F>
std::unique_ptr<SumcheckProver<F>> make_prover(Strategy s, std::uint64_t rng_seed, std::uint32_t perturb_round = 0) {
  switch (s) {
    case Strategy::Honest: return std::make_unique<HonestProver<F>>();
    case Strategy::WrongClaim: return std::make_unique<DefendingProver<F>>(rng_seed);
    case Strategy::Perturb: return std::make_unique<DefendingProver<F>>(rng_seed, perturb_round);
    case Strategy::Garbage: return std::make_unique<GarbageProver<F>>(rng_seed);
  }
  return nullptr;
}

}  // namespace pqip
