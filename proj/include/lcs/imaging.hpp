// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace lcs {

/// Grayscale image with real-valued, row-major intensities.
///
/// Pixels live in [0, 255] nominally; intermediate results (e.g. a
/// back-projection) may leave that range and are only clamped on request or
/// when written to disk.
class Image {
 public:
  Image(std::size_t rows, std::size_t cols);
  Image(std::size_t rows, std::size_t cols, std::vector<double> pixels);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return pixels_.size(); }

  std::span<const double> pixels() const noexcept { return pixels_; }
  std::span<double> pixels() noexcept { return pixels_; }

  double at(std::size_t r, std::size_t c) const { return pixels_[r * cols_ + c]; }
  double& at(std::size_t r, std::size_t c) { return pixels_[r * cols_ + c]; }

  /// Clamp every intensity into [0, 255].
  void clamp();

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> pixels_;
};

/// An image cut into consecutive 1xL segments of its row-major pixel stream.
class LineSet {
 public:
  LineSet(std::size_t source_rows, std::size_t source_cols,
          std::size_t line_len, std::vector<double> samples);

  std::size_t line_len() const noexcept { return line_len_; }
  std::size_t num_lines() const noexcept { return num_lines_; }
  std::size_t source_rows() const noexcept { return source_rows_; }
  std::size_t source_cols() const noexcept { return source_cols_; }

  std::span<const double> line(std::size_t i) const;

  /// All lines back to back, line 0 first.
  std::span<const double> data() const noexcept { return samples_; }

 private:
  std::size_t source_rows_;
  std::size_t source_cols_;
  std::size_t line_len_;
  std::size_t num_lines_;
  std::vector<double> samples_;
};

Image load_image(const std::filesystem::path& path);
void save_image(const Image& image, const std::filesystem::path& path);

/// Binary PGM (P5, maxval 255) codec on in-memory buffers.
Image decode_pgm(std::span<const unsigned char> bytes);
std::vector<unsigned char> encode_pgm(const Image& image);

/// Quantize one intensity the way save_image does: round half up, clamp.
unsigned char quantize_pixel(double value) noexcept;

LineSet to_lines(const Image& image, std::size_t line_len);
Image from_lines(const LineSet& lines);

}  // namespace lcs
