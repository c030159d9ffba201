#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>

namespace lwcnn {

namespace detail {

// Reflected table for polynomial 0x04C11DB7 (0xEDB88320 bit-reversed).
constexpr std::array<std::uint32_t, 256> make_crc32_table() {
  std::array<std::uint32_t, 256> table{};
  for (std::uint32_t i = 0; i < 256; ++i) {
    std::uint32_t c = i;
    for (int k = 0; k < 8; ++k) c = (c & 1u) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
    table[i] = c;
  }
  return table;
}

inline constexpr auto kCrc32Table = make_crc32_table();

}  // namespace detail

/// CRC-32 (IEEE 802.3): reflected, init 0xFFFFFFFF, final xor 0xFFFFFFFF.
inline std::uint32_t crc32(std::span<const std::byte> bytes, std::uint32_t crc = 0) noexcept {
  crc = ~crc;
  for (auto b : bytes) {
    crc = detail::kCrc32Table[(crc ^ static_cast<std::uint8_t>(b)) & 0xFFu] ^ (crc >> 8);
  }
  return ~crc;
}

}  // namespace lwcnn
