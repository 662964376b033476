// SPDX-License-Identifier: Apache-2.0

#include "lcs/imaging.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>

#include "lcs/error.hpp"

namespace lcs {

namespace {

void check_dims(std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0)
    throw Error(Errc::dimension, "image dimensions must be at least 1x1, got " +
                                     std::to_string(rows) + "x" + std::to_string(cols));
  if (rows > std::numeric_limits<std::size_t>::max() / cols)
    throw Error(Errc::dimension, "image dimensions overflow");
}

// Cursor over a PGM header. Comments run from '#' to end of line and count as
// whitespace.
class HeaderReader {
 public:
  explicit HeaderReader(std::span<const unsigned char> bytes) : bytes_(bytes) {}

  void skip_space() {
    while (pos_ < bytes_.size()) {
      const unsigned char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') ++pos_;
      } else if (std::isspace(c)) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::size_t read_uint(const char* field) {
    skip_space();
    if (pos_ >= bytes_.size())
      throw Error(Errc::truncated, std::string("PGM header ends before ") + field);
    if (!std::isdigit(bytes_[pos_]))
      throw Error(Errc::malformed, std::string("PGM header: expected ") + field);
    std::size_t value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      const std::size_t digit = bytes_[pos_] - '0';
      if (value > (std::numeric_limits<std::size_t>::max() - digit) / 10)
        throw Error(Errc::malformed, std::string("PGM header: ") + field + " out of range");
      value = value * 10 + digit;
      ++pos_;
    }
    return value;
  }

  std::size_t pos() const noexcept { return pos_; }
  void advance(std::size_t n) noexcept { pos_ += n; }

 private:
  std::span<const unsigned char> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

Image::Image(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {
  check_dims(rows, cols);
  pixels_.assign(rows * cols, 0.0);
}

Image::Image(std::size_t rows, std::size_t cols, std::vector<double> pixels)
    : rows_(rows), cols_(cols), pixels_(std::move(pixels)) {
  check_dims(rows, cols);
  if (pixels_.size() != rows * cols)
    throw Error(Errc::dimension, "pixel count " + std::to_string(pixels_.size()) +
                                     " does not match " + std::to_string(rows) + "x" +
                                     std::to_string(cols));
}

void Image::clamp() {
  for (double& p : pixels_) p = std::clamp(p, 0.0, 255.0);
}

LineSet::LineSet(std::size_t source_rows, std::size_t source_cols, std::size_t line_len,
                 std::vector<double> samples)
    : source_rows_(source_rows),
      source_cols_(source_cols),
      line_len_(line_len),
      num_lines_(0),
      samples_(std::move(samples)) {
  check_dims(source_rows, source_cols);
  if (line_len < 2) throw Error(Errc::invalid_argument, "line length must be at least 2");
  const std::size_t total = source_rows * source_cols;
  if (total % line_len != 0)
    throw Error(Errc::invalid_argument, "line length " + std::to_string(line_len) +
                                            " does not divide pixel count " +
                                            std::to_string(total));
  if (samples_.size() != total)
    throw Error(Errc::dimension, "line data holds " + std::to_string(samples_.size()) +
                                     " samples, source image has " + std::to_string(total));
  num_lines_ = total / line_len;
}

std::span<const double> LineSet::line(std::size_t i) const {
  if (i >= num_lines_) throw Error(Errc::dimension, "line index out of range");
  return std::span<const double>(samples_).subspan(i * line_len_, line_len_);
}

unsigned char quantize_pixel(double value) noexcept {
  if (!(value >= 0.0)) return 0;  // also maps NaN to 0
  const double rounded = std::floor(value + 0.5);
  return rounded >= 255.0 ? 255 : static_cast<unsigned char>(rounded);
}

Image decode_pgm(std::span<const unsigned char> bytes) {
  if (bytes.size() < 2) throw Error(Errc::truncated, "PGM data too short for a magic number");
  if (bytes[0] != 'P' || bytes[1] != '5')
    throw Error(Errc::malformed, "not a binary PGM (expected magic P5)");
  HeaderReader reader(bytes);
  reader.advance(2);
  const std::size_t cols = reader.read_uint("width");
  const std::size_t rows = reader.read_uint("height");
  const std::size_t maxval = reader.read_uint("maxval");
  if (rows == 0 || cols == 0) throw Error(Errc::malformed, "PGM header: zero dimension");
  if (maxval != 255)
    throw Error(Errc::unsupported, "PGM maxval " + std::to_string(maxval) +
                                       " not supported (only 255)");
  // Exactly one whitespace byte separates the header from the raster.
  if (reader.pos() >= bytes.size()) throw Error(Errc::truncated, "PGM has no pixel data");
  if (!std::isspace(bytes[reader.pos()]))
    throw Error(Errc::malformed, "PGM header: missing separator after maxval");
  reader.advance(1);

  check_dims(rows, cols);
  const std::size_t count = rows * cols;
  const std::size_t available = bytes.size() - reader.pos();
  if (available < count)
    throw Error(Errc::truncated, "PGM pixel data truncated: expected " + std::to_string(count) +
                                     " bytes, found " + std::to_string(available));
  std::vector<double> pixels(count);
  const auto raster = bytes.subspan(reader.pos(), count);
  std::transform(raster.begin(), raster.end(), pixels.begin(),
                 [](unsigned char b) { return static_cast<double>(b); });
  return Image(rows, cols, std::move(pixels));
}

std::vector<unsigned char> encode_pgm(const Image& image) {
  const std::string header =
      "P5\n" + std::to_string(image.cols()) + " " + std::to_string(image.rows()) + "\n255\n";
  std::vector<unsigned char> out(header.begin(), header.end());
  out.reserve(header.size() + image.size());
  for (double p : image.pixels()) out.push_back(quantize_pixel(p));
  return out;
}

Image load_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::not_found, "cannot open image '" + path.string() + "'");
  const std::vector<unsigned char> bytes{std::istreambuf_iterator<char>(in),
                                         std::istreambuf_iterator<char>()};
  if (in.bad()) throw Error(Errc::io, "error reading '" + path.string() + "'");
  return decode_pgm(bytes);
}

void save_image(const Image& image, const std::filesystem::path& path) {
  const auto bytes = encode_pgm(image);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io, "cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(Errc::io, "error writing '" + path.string() + "'");
}

LineSet to_lines(const Image& image, std::size_t line_len) {
  const auto px = image.pixels();
  return LineSet(image.rows(), image.cols(), line_len, std::vector<double>(px.begin(), px.end()));
}

Image from_lines(const LineSet& lines) {
  const auto data = lines.data();
  return Image(lines.source_rows(), lines.source_cols(), std::vector<double>(data.begin(), data.end()));
}

}  // namespace lcs
