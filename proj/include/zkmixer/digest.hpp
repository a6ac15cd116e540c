#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace zkmixer {

using Digest32 = std::array<std::uint8_t, 32>;
using Bytes = std::vector<std::uint8_t>;

// BLAKE2b via libsodium. Keyed variant is used as a MAC.
Digest32 blake2b_256(std::span<const std::uint8_t> data);
Digest32 blake2b_256_keyed(std::span<const std::uint8_t> data, std::span<const std::uint8_t> key);
std::array<std::uint8_t, 64> blake2b_512(std::span<const std::uint8_t> data);

bool constant_time_equal(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);

std::string to_hex(std::span<const std::uint8_t> bytes);
Bytes from_hex(std::string_view hex);

inline std::span<const std::uint8_t> as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

/// Append-only byte builder for digest and MAC inputs.
class ByteWriter {
 public:
  ByteWriter& u8(std::uint8_t v);
  ByteWriter& u32(std::uint32_t v);
  ByteWriter& u64(std::uint64_t v);
  ByteWriter& raw(std::span<const std::uint8_t> v);
  ByteWriter& str(std::string_view s);  // length-prefixed

  const Bytes& bytes() const noexcept { return buf_; }

 private:
  Bytes buf_;
};

}  // namespace zkmixer
