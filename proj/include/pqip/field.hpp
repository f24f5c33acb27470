#pragma once

#include "pqip/dyadic.hpp"

#include <boost/multiprecision/miller_rabin.hpp>

#include <concepts>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pqip {

/// 2^61 - 1, the default protocol field.
inline constexpr std::uint64_t kMersenne61 = (std::uint64_t{1} << 61) - 1;

inline bool is_probable_prime(const BigInt& p) {
  if (p < 2) return false;
  std::mt19937_64 gen(0x5eed);
  return boost::multiprecision::miller_rabin_test(p, 32, gen);
}

/// Prime field with a runtime modulus below 2^63; products go through
/// 128-bit intermediates.
class PrimeField64 {
 public:
  using Elem = std::uint64_t;

  explicit PrimeField64(std::uint64_t p) : p_(p) {
    if (p < 5 || p >= (std::uint64_t{1} << 63)) throw std::invalid_argument("PrimeField64 modulus must be in [5, 2^63)");
  }

  BigInt modulus() const { return BigInt(p_); }
  std::uint64_t raw_modulus() const { return p_; }

  Elem zero() const { return 0; }
  Elem one() const { return 1; }
  Elem add(Elem a, Elem b) const {
    const Elem s = a + b;
    return s >= p_ ? s - p_ : s;
  }
  Elem sub(Elem a, Elem b) const { return a >= b ? a - b : a + (p_ - b); }
  Elem neg(Elem a) const { return a == 0 ? 0 : p_ - a; }
  Elem mul(Elem a, Elem b) const {
    return static_cast<Elem>((static_cast<unsigned __int128>(a) * b) % p_);
  }
  Elem pow(Elem a, std::uint64_t e) const {
    Elem r = 1;
    while (e) {
      if (e & 1) r = mul(r, a);
      a = mul(a, a);
      e >>= 1;
    }
    return r;
  }
  Elem inv(Elem a) const {
    if (a == 0) throw std::domain_error("inverse of zero");
    return pow(a, p_ - 2);
  }

  Elem from_u64(std::uint64_t v) const { return v % p_; }
  Elem from_int(const BigInt& v) const {
    BigInt r = v % p_;
    if (r < 0) r += p_;
    return r.convert_to<std::uint64_t>();
  }
  /// Big-endian byte string reduced mod p.
  Elem from_bytes(std::span<const std::uint8_t> bytes) const {
    unsigned __int128 acc = 0;
    for (auto b : bytes) acc = ((acc << 8) | b) % p_;
    return static_cast<Elem>(acc);
  }
  BigInt to_int(Elem a) const { return BigInt(a); }
  bool is_canonical(const BigInt& v) const { return v >= 0 && v < p_; }
  bool eq(Elem a, Elem b) const { return a == b; }

 private:
  std::uint64_t p_;
};

/// Arbitrary-precision prime field for moduli too large for PrimeField64.
class BigPrimeField {
 public:
  using Elem = BigInt;

  explicit BigPrimeField(BigInt p) : p_(std::move(p)) {
    if (p_ < 5) throw std::invalid_argument("BigPrimeField modulus must be >= 5");
  }

  BigInt modulus() const { return p_; }

  Elem zero() const { return 0; }
  Elem one() const { return 1; }
  Elem add(const Elem& a, const Elem& b) const {
    Elem s = a + b;
    if (s >= p_) s -= p_;
    return s;
  }
  Elem sub(const Elem& a, const Elem& b) const {
    Elem s = a - b;
    if (s < 0) s += p_;
    return s;
  }
  Elem neg(const Elem& a) const { return a == 0 ? Elem(0) : Elem(p_ - a); }
  Elem mul(const Elem& a, const Elem& b) const { return (a * b) % p_; }
  Elem inv(const Elem& a) const {
    if (a == 0) throw std::domain_error("inverse of zero");
    return boost::multiprecision::powm(a, p_ - 2, p_);
  }

  Elem from_u64(std::uint64_t v) const { return BigInt(v) % p_; }
  Elem from_int(const BigInt& v) const {
    BigInt r = v % p_;
    if (r < 0) r += p_;
    return r;
  }
  Elem from_bytes(std::span<const std::uint8_t> bytes) const {
    BigInt acc = 0;
    for (auto b : bytes) acc = (acc << 8) | b;
    return acc % p_;
  }
  BigInt to_int(const Elem& a) const { return a; }
  bool is_canonical(const BigInt& v) const { return v >= 0 && v < p_; }
  bool eq(const Elem& a, const Elem& b) const { return a == b; }

 private:
  BigInt p_;
};

template <class F>
concept PrimeField = requires(const F& f, typename F::Elem a, std::span<const std::uint8_t> bytes, BigInt v) {
  { f.zero() } -> std::convertible_to<typename F::Elem>;
  { f.add(a, a) } -> std::convertible_to<typename F::Elem>;
  { f.sub(a, a) } -> std::convertible_to<typename F::Elem>;
  { f.mul(a, a) } -> std::convertible_to<typename F::Elem>;
  { f.inv(a) } -> std::convertible_to<typename F::Elem>;
  { f.from_int(v) } -> std::convertible_to<typename F::Elem>;
  { f.from_bytes(bytes) } -> std::convertible_to<typename F::Elem>;
  { f.to_int(a) } -> std::convertible_to<BigInt>;
  { f.modulus() } -> std::convertible_to<BigInt>;
};

/// Modulus plus its bit width. Validation checks primality and that the
/// modulus leaves room for degree-3 interpolation (p > 3).
struct FieldSpec {
  BigInt modulus;
  std::size_t bits = 0;

  static FieldSpec from_modulus(const BigInt& p) {
    if (p <= 3) throw std::invalid_argument("field modulus must exceed 3");
    if (!is_probable_prime(p)) throw std::invalid_argument("field modulus " + p.str() + " is not prime");
    return {p, msb(p) + 1};
  }
  static FieldSpec parse(std::string_view decimal) {
    if (decimal.empty() || decimal.find_first_not_of("0123456789") != std::string_view::npos)
      throw std::invalid_argument("field modulus must be a decimal integer");
    return from_modulus(BigInt(std::string(decimal)));
  }
  static FieldSpec mersenne61() { return from_modulus(BigInt(kMersenne61)); }

  /// An instance with h Hadamards embeds without wraparound iff p > 2^h.
  bool embeds(std::uint64_t h) const { return modulus > pow2(h); }
};

/// Calls fn with the natural field implementation for spec.
template <class Fn>
decltype(auto) with_field(const FieldSpec& spec, Fn&& fn) {
  if (spec.modulus < pow2(63)) return fn(PrimeField64(spec.modulus.convert_to<std::uint64_t>()));
  return fn(BigPrimeField(spec.modulus));
}

namespace detail {
inline constexpr char kHexDigits[] = "0123456789abcdef";
}

/// Lowercase big-endian hex of the minimal byte string (zero is "00").
inline std::string int_to_hex(const BigInt& v) {
  if (v < 0) throw std::invalid_argument("negative value has no hex form");
  std::string out;
  BigInt x = v;
  do {
    const auto byte = static_cast<unsigned>(static_cast<std::uint32_t>(x & 0xff));
    out.push_back(detail::kHexDigits[byte & 0xf]);
    out.push_back(detail::kHexDigits[byte >> 4]);
    x >>= 8;
  } while (x != 0);
  return {out.rbegin(), out.rend()};
}

/// Inverse of int_to_hex; rejects anything int_to_hex would not produce.
inline std::optional<BigInt> hex_to_int(std::string_view hex) {
  if (hex.empty() || hex.size() % 2 != 0) return std::nullopt;
  if (hex.size() > 2 && hex[0] == '0' && hex[1] == '0') return std::nullopt;
  BigInt v = 0;
  for (char ch : hex) {
    int d;
    if (ch >= '0' && ch <= '9') d = ch - '0';
    else if (ch >= 'a' && ch <= 'f') d = ch - 'a' + 10;
    else return std::nullopt;
    v = (v << 4) | d;
  }
  return v;
}

template <PrimeField F>
std::string elem_to_hex(const F& f, const typename F::Elem& e) {
  return int_to_hex(f.to_int(e));
}

template <PrimeField F>
std::optional<typename F::Elem> elem_from_hex(const F& f, std::string_view hex) {
  auto v = hex_to_int(hex);
  if (!v || !f.is_canonical(*v)) return std::nullopt;
  return f.from_int(*v);
}

}  // namespace pqip
