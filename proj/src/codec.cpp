// SPDX-License-Identifier: Apache-2.0

#include "lcs/codec.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>

#include "lcs/error.hpp"

namespace lcs {

namespace {

template <class T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i)
    out.push_back(static_cast<std::uint8_t>((value >> (8 * i)) & 0xffu));
}

template <class T>
T get_le(std::span<const std::uint8_t> bytes, std::size_t offset) {
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(bytes[offset + i]) << (8 * i);
  return value;
}

}  // namespace

std::uint64_t LcsHeader::payload_bytes() const {
  if (version != kLcsVersion)
    throw Error(Errc::unsupported, "unsupported LCS version " + std::to_string(version));
  if (prng_id != kPrngMt19937BoxMuller)
    throw Error(Errc::unsupported, "unknown generator id " + std::to_string(prng_id));
  if (rows == 0 || cols == 0) throw Error(Errc::malformed, "LCS header: zero image dimension");
  const std::uint64_t total = std::uint64_t{rows} * cols;
  if (line_len < 2 || total % line_len != 0)
    throw Error(Errc::malformed, "LCS header: line length " + std::to_string(line_len) +
                                     " does not partition " + std::to_string(total) + " pixels");
  if (m_per_line < 1 || m_per_line > line_len)
    throw Error(Errc::malformed, "LCS header: measurements per line " +
                                     std::to_string(m_per_line) + " outside [1, " +
                                     std::to_string(line_len) + "]");
  // num_lines * m <= rows * cols < 2^64, so no overflow before the factor 8.
  const std::uint64_t values = total / line_len * m_per_line;
  if (values > std::numeric_limits<std::uint64_t>::max() / 8)
    throw Error(Errc::malformed, "LCS header: payload size overflows");
  return 8 * values;
}

LcsHeader parse_header(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kLcsHeaderSize)
    throw Error(Errc::truncated, "LCS stream shorter than its " + std::to_string(kLcsHeaderSize) +
                                     "-byte header");
  if (!std::equal(kLcsMagic.begin(), kLcsMagic.end(), bytes.begin(),
                  [](char a, std::uint8_t b) { return static_cast<std::uint8_t>(a) == b; }))
    throw Error(Errc::malformed, "bad magic: not an LCS1 stream");
  LcsHeader h;
  h.version = get_le<std::uint16_t>(bytes, 4);
  h.rows = get_le<std::uint32_t>(bytes, 6);
  h.cols = get_le<std::uint32_t>(bytes, 10);
  h.line_len = get_le<std::uint32_t>(bytes, 14);
  h.m_per_line = get_le<std::uint32_t>(bytes, 18);
  h.seed = get_le<std::uint64_t>(bytes, 22);
  h.prng_id = get_le<std::uint16_t>(bytes, 30);
  h.payload_bytes();
  return h;
}

std::vector<std::uint8_t> serialize(const EncodedSample& sample) {
  sample.validate();
  std::vector<std::uint8_t> out;
  out.reserve(kLcsHeaderSize + sample.payload_bytes());
  for (char c : kLcsMagic) out.push_back(static_cast<std::uint8_t>(c));
  put_le(out, kLcsVersion);
  put_le(out, sample.source_rows);
  put_le(out, sample.source_cols);
  put_le(out, sample.line_len);
  put_le(out, sample.m_per_line);
  put_le(out, sample.seed);
  put_le(out, sample.prng_id);
  for (double v : sample.measurements) put_le(out, std::bit_cast<std::uint64_t>(v));
  return out;
}

EncodedSample deserialize(std::span<const std::uint8_t> bytes) {
  const LcsHeader h = parse_header(bytes);
  const std::uint64_t expected = h.payload_bytes();
  const std::uint64_t actual = bytes.size() - kLcsHeaderSize;
  if (actual != expected)
    throw Error(Errc::truncated, "LCS payload is " + std::to_string(actual) +
                                     " bytes, header implies " + std::to_string(expected));
  EncodedSample sample;
  sample.source_rows = h.rows;
  sample.source_cols = h.cols;
  sample.line_len = h.line_len;
  sample.m_per_line = h.m_per_line;
  sample.seed = h.seed;
  sample.prng_id = h.prng_id;
  sample.measurements.resize(expected / 8);
  for (std::size_t i = 0; i < sample.measurements.size(); ++i) {
    const double v = std::bit_cast<double>(get_le<std::uint64_t>(bytes, kLcsHeaderSize + 8 * i));
    if (!std::isfinite(v))
      throw Error(Errc::malformed, "non-finite measurement at index " + std::to_string(i));
    sample.measurements[i] = v;
  }
  return sample;
}

void write_sample(const EncodedSample& sample, const std::filesystem::path& path) {
  const auto bytes = serialize(sample);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io, "cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(Errc::io, "error writing '" + path.string() + "'");
}

EncodedSample read_sample(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::not_found, "cannot open sample '" + path.string() + "'");
  const std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in),
                                        std::istreambuf_iterator<char>()};
  if (in.bad()) throw Error(Errc::io, "error reading '" + path.string() + "'");
  return deserialize(bytes);
}

}  // namespace lcs
