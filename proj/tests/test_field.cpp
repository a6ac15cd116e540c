#include "zkmixer/error.hpp"
#include "zkmixer/field.hpp"

#include <gtest/gtest.h>

#include <functional>
#include <random>
#include <set>

using namespace zkmixer;

namespace {

const U256 kBn254("0x30644e72e131a029b85045b68181585d2833e84879b9709143e1f593f0000001");

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return Errc::ValidationError;
}

}  // namespace

TEST(PrimeField, AcceptsBn254Scalar) {
  PrimeField f(kBn254);
  EXPECT_EQ(f.bits(), 254u);
  EXPECT_EQ(f.modulus(), kBn254);
}

TEST(PrimeField, RejectsCompositeAndSmallModuli) {
  EXPECT_EQ(code_of([] { PrimeField f(kBn254 + 2); }), Errc::InvalidParameters);
  EXPECT_EQ(code_of([] { PrimeField f(U256(101)); }), Errc::InvalidParameters);
  // 2^127 - 1 is prime but too short
  EXPECT_EQ(code_of([] { PrimeField f((U256(1) << 127) - 1); }), Errc::InvalidParameters);
}

TEST(PrimeField, ArithmeticMatchesReference) {
  PrimeField f(kBn254);
  auto m1 = f.from_hex("30644e72e131a029b85045b68181585d2833e84879b9709143e1f593f0000000");
  EXPECT_EQ(f.add(m1, f.one()), f.zero());
  EXPECT_EQ(f.mul(m1, m1), f.one());
  EXPECT_EQ(f.sub(f.zero(), f.one()), m1);
  // values from an independent big-integer computation
  EXPECT_EQ(f.pow(f.element(2), 254).to_hex(), "f9bb18d1ece5fd647afba497e7ea7a2d7cc17b786468f6ebc1e0a6c0fffffff");
  EXPECT_EQ(f.mul(f.parse("12345678901234567890"), f.parse("98765432109876543210")).to_hex(),
            "39551b49bf4f8a3a2127989c1a6df3ff4");
  auto inv7 = f.from_hex("6e9c21069503b73ac9dc0d0edede80d4ee2d80a5a8834a709b290cbfdb6db6e");
  EXPECT_EQ(f.mul(inv7, f.element(7)), f.one());
}

TEST(PrimeField, ReduceWrapsWideValues) {
  PrimeField f(kBn254);
  U512 wide = U512(kBn254) * 3 + 5;
  EXPECT_EQ(f.reduce(wide), f.element(5));
}

TEST(PrimeField, FromHexIsStrict) {
  PrimeField f(kBn254);
  EXPECT_EQ(code_of([&] { f.from_hex("30644e72e131a029b85045b68181585d2833e84879b9709143e1f593f0000001"); }),
            Errc::InvalidEncoding);
  EXPECT_EQ(code_of([&] { f.from_hex("xyz"); }), Errc::InvalidEncoding);
  EXPECT_EQ(code_of([&] { f.from_hex(""); }), Errc::InvalidEncoding);
  EXPECT_EQ(f.from_hex("0x0a"), f.element(10));
}

TEST(PrimeField, ParseU256Bounds) {
  EXPECT_EQ(parse_u256("0xff"), U256(255));
  EXPECT_EQ(parse_u256("1000"), U256(1000));
  EXPECT_EQ(code_of([] { parse_u256("0x1" + std::string(64, '0')); }), Errc::InvalidEncoding);
  EXPECT_EQ(parse_u256("0x" + std::string(64, 'f')), ~U256(0));
}

TEST(PrimeField, EncodeDecodeRoundTrip) {
  PrimeField f(kBn254);
  std::mt19937_64 rng(42);
  for (int i = 0; i < 200; ++i) {
    auto x = f.sample(rng);
    auto bytes = f.encode(x);
    EXPECT_EQ(f.decode(bytes), x);
  }
  auto one = f.encode(f.one());
  EXPECT_EQ(one[0], 1);  // little-endian
}

TEST(PrimeField, DecodeRejectsNonCanonical) {
  PrimeField f(kBn254);
  std::array<std::uint8_t, 32> all_ff;
  all_ff.fill(0xff);
  EXPECT_EQ(code_of([&] { f.decode(all_ff); }), Errc::InvalidEncoding);
  std::array<std::uint8_t, 31> short_buf{};
  EXPECT_EQ(code_of([&] { f.decode(short_buf); }), Errc::InvalidEncoding);
  auto p = f.encode(f.zero());
  // the modulus itself, little-endian
  U256 m = kBn254;
  for (auto& b : p) {
    b = static_cast<std::uint8_t>(m & 0xff);
    m >>= 8;
  }
  EXPECT_EQ(code_of([&] { f.decode(p); }), Errc::InvalidEncoding);
}

TEST(PrimeField, SamplingIsSeededAndInRange) {
  PrimeField f(kBn254);
  std::mt19937_64 a(7), b(7);
  std::set<FieldElement> seen;
  for (int i = 0; i < 500; ++i) {
    auto x = f.sample(a);
    EXPECT_EQ(x, f.sample(b));
    EXPECT_TRUE(f.contains(x.value()));
    seen.insert(x);
  }
  EXPECT_EQ(seen.size(), 500u);
}
