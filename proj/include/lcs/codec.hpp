// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "lcs/sampling.hpp"

namespace lcs {

// LCS1 stream layout, all integers little-endian:
//
//   offset size field
//        0    4 magic "LCS1"
//        4    2 version
//        6    4 rows
//       10    4 cols
//       14    4 line_len
//       18    4 m_per_line
//       22    8 seed
//       30    2 prng_id
//       32      payload: num_lines * m_per_line IEEE-754 binary64, line-major
inline constexpr std::array<char, 4> kLcsMagic{'L', 'C', 'S', '1'};
inline constexpr std::uint16_t kLcsVersion = 1;
inline constexpr std::size_t kLcsHeaderSize = 32;

struct LcsHeader {
  std::uint16_t version = kLcsVersion;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::uint32_t line_len = 0;
  std::uint32_t m_per_line = 0;
  std::uint64_t seed = 0;
  std::uint16_t prng_id = kPrngMt19937BoxMuller;

  /// Payload size implied by the header; throws on invariant violations.
  std::uint64_t payload_bytes() const;
};

LcsHeader parse_header(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> serialize(const EncodedSample& sample);
EncodedSample deserialize(std::span<const std::uint8_t> bytes);

void write_sample(const EncodedSample& sample, const std::filesystem::path& path);
EncodedSample read_sample(const std::filesystem::path& path);

}  // namespace lcs
