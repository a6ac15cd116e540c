#include "zkmixer/field.hpp"

#include "zkmixer/error.hpp"

#include <boost/multiprecision/miller_rabin.hpp>

#include <algorithm>
#include <cctype>
#include <iterator>

namespace zkmixer {

namespace mp = boost::multiprecision;

std::string FieldElement::to_hex() const {
  std::string out;
  U256 v = value_;
  if (v.is_zero()) return "0";
  static constexpr char kDigits[] = "0123456789abcdef";
  while (!v.is_zero()) {
    out.push_back(kDigits[static_cast<unsigned>(v & 0xf)]);
    v >>= 4;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

U256 parse_u256(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) throw Error(Errc::InvalidEncoding, "empty integer literal");
  bool hex = text.starts_with("0x") || text.starts_with("0X");
  if (hex) text.remove_prefix(2);
  if (text.empty()) throw Error(Errc::InvalidEncoding, "empty integer literal");
  mp::cpp_int acc = 0;
  for (char c : text) {
    int d;
    if (c >= '0' && c <= '9') {
      d = c - '0';
    } else if (hex && c >= 'a' && c <= 'f') {
      d = c - 'a' + 10;
    } else if (hex && c >= 'A' && c <= 'F') {
      d = c - 'A' + 10;
    } else {
      throw Error(Errc::InvalidEncoding, "bad digit in integer literal '" + std::string(text) + "'");
    }
    acc = acc * (hex ? 16 : 10) + d;
  }
  if (acc >= (mp::cpp_int(1) << 256)) {
    throw Error(Errc::InvalidEncoding, "integer literal exceeds 256 bits");
  }
  return static_cast<U256>(acc);
}

PrimeField::PrimeField(U256 modulus) : modulus_(std::move(modulus)), bits_(0) {
  if (modulus_ < 3) throw Error(Errc::InvalidParameters, "modulus too small");
  bits_ = static_cast<unsigned>(mp::msb(modulus_)) + 1;
  if (bits_ < kMinBits) {
    throw Error(Errc::InvalidParameters, "modulus must have at least 250 bits, got " + std::to_string(bits_));
  }
  std::mt19937 gen(0x5eed);
  if (!mp::miller_rabin_test(mp::cpp_int(modulus_), 25, gen)) {
    throw Error(Errc::InvalidParameters, "modulus is not prime");
  }
}

FieldElement PrimeField::element(std::uint64_t v) const { return FieldElement{U256(v) % modulus_}; }

FieldElement PrimeField::reduce(const U512& v) const {
  return FieldElement{static_cast<U256>(v % U512(modulus_))};
}

FieldElement PrimeField::parse(std::string_view text) const { return FieldElement{parse_u256(text) % modulus_}; }

FieldElement PrimeField::from_hex(std::string_view hex) const {
  if (!(hex.starts_with("0x") || hex.starts_with("0X"))) {
    std::string prefixed = "0x" + std::string(hex);
    return from_hex(prefixed);
  }
  U256 v = parse_u256(hex);
  if (v >= modulus_) throw Error(Errc::InvalidEncoding, "value not below the field modulus");
  return FieldElement{v};
}

FieldElement PrimeField::add(const FieldElement& a, const FieldElement& b) const {
  U512 s = U512(a.value_) + U512(b.value_);
  if (s >= U512(modulus_)) s -= U512(modulus_);
  return FieldElement{static_cast<U256>(s)};
}

FieldElement PrimeField::sub(const FieldElement& a, const FieldElement& b) const {
  if (a.value_ >= b.value_) return FieldElement{a.value_ - b.value_};
  return FieldElement{modulus_ - (b.value_ - a.value_)};
}

FieldElement PrimeField::mul(const FieldElement& a, const FieldElement& b) const {
  return reduce(U512(a.value_) * U512(b.value_));
}

FieldElement PrimeField::pow(const FieldElement& base, std::uint64_t exponent) const {
  FieldElement result = one();
  FieldElement b = base;
  while (exponent != 0) {
    if (exponent & 1) result = mul(result, b);
    b = mul(b, b);
    exponent >>= 1;
  }
  return result;
}

std::array<std::uint8_t, PrimeField::kEncodedSize> PrimeField::encode(const FieldElement& x) const {
  std::array<std::uint8_t, kEncodedSize> out{};
  U256 v = x.value_;
  for (std::size_t i = 0; i < kEncodedSize; ++i) {
    out[i] = static_cast<std::uint8_t>(v & 0xff);
    v >>= 8;
  }
  return out;
}

FieldElement PrimeField::decode(std::span<const std::uint8_t> bytes) const {
  if (bytes.size() != kEncodedSize) {
    throw Error(Errc::InvalidEncoding, "field encoding must be 32 bytes, got " + std::to_string(bytes.size()));
  }
  U256 v = 0;
  for (std::size_t i = kEncodedSize; i-- > 0;) {
    v <<= 8;
    v |= bytes[i];
  }
  if (v >= modulus_) throw Error(Errc::InvalidEncoding, "non-canonical field encoding");
  return FieldElement{v};
}

FieldElement PrimeField::sample(std::mt19937_64& rng) const {
  const U256 mask = (bits_ == 256) ? ~U256(0) : ((U256(1) << bits_) - 1);
  for (;;) {
    U256 v = 0;
    for (int i = 0; i < 4; ++i) {
      v <<= 64;
      v |= U256(rng());
    }
    v &= mask;
    if (v < modulus_) return FieldElement{v};
  }
}

}  // namespace zkmixer
