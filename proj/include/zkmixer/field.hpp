#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <array>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <string_view>

namespace zkmixer {

using U256 = boost::multiprecision::uint256_t;
using U512 = boost::multiprecision::uint512_t;

class PrimeField;

/// An element of a prime field. Only a PrimeField can mint one, so every
/// instance is reduced modulo the field it came from.
class FieldElement {
 public:
  FieldElement() = default;

  const U256& value() const noexcept { return value_; }
  std::string to_hex() const;  // lowercase, no prefix, no padding
  bool is_zero() const noexcept { return value_.is_zero(); }

  friend bool operator==(const FieldElement& a, const FieldElement& b) { return a.value_ == b.value_; }
  friend bool operator<(const FieldElement& a, const FieldElement& b) { return a.value_ < b.value_; }

 private:
  friend class PrimeField;
  explicit FieldElement(U256 v) : value_(std::move(v)) {}

  U256 value_{0};
};

class PrimeField {
 public:
  static constexpr std::size_t kEncodedSize = 32;
  static constexpr unsigned kMinBits = 250;

  /// Throws Error(InvalidParameters) unless the modulus is a probable prime of
  /// 250..256 bits.
  explicit PrimeField(U256 modulus);

  const U256& modulus() const noexcept { return modulus_; }
  unsigned bits() const noexcept { return bits_; }

  FieldElement zero() const { return FieldElement{0}; }
  FieldElement one() const { return FieldElement{1}; }
  FieldElement element(std::uint64_t v) const;
  FieldElement reduce(const U512& v) const;
  /// Parses decimal or 0x-prefixed hex and reduces.
  FieldElement parse(std::string_view text) const;
  /// Strict hex parse (with or without 0x); rejects values >= p.
  FieldElement from_hex(std::string_view hex) const;

  FieldElement add(const FieldElement& a, const FieldElement& b) const;
  FieldElement sub(const FieldElement& a, const FieldElement& b) const;
  FieldElement mul(const FieldElement& a, const FieldElement& b) const;
  FieldElement pow(const FieldElement& base, std::uint64_t exponent) const;

  bool contains(const U256& v) const noexcept { return v < modulus_; }

  /// Fixed-width little-endian encoding.
  std::array<std::uint8_t, kEncodedSize> encode(const FieldElement& x) const;
  /// Rejects wrong length and non-canonical values with Error(InvalidEncoding).
  FieldElement decode(std::span<const std::uint8_t> bytes) const;

  /// Uniform sample by rejection over the modulus bit length.
  FieldElement sample(std::mt19937_64& rng) const;

  bool operator==(const PrimeField& other) const { return modulus_ == other.modulus_; }

 private:
  U256 modulus_;
  unsigned bits_;
};

U256 parse_u256(std::string_view text);

}  // namespace zkmixer

template <>
struct std::hash<zkmixer::FieldElement> {
  std::size_t operator()(const zkmixer::FieldElement& x) const noexcept {
    return static_cast<std::size_t>(static_cast<std::uint64_t>(x.value() & 0xffffffffffffffffULL));
  }
};
