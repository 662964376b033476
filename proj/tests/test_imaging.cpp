// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "lcs/error.hpp"
#include "lcs/imaging.hpp"
#include "oracles.hpp"

using lcs::Errc;
using lcs::Image;

namespace {

std::vector<unsigned char> bytes_of(const std::string& s) { return {s.begin(), s.end()}; }

Errc decode_error(const std::string& data) {
  try {
    lcs::decode_pgm(bytes_of(data));
  } catch (const lcs::Error& e) {
    return e.code();
  }
  FAIL("decode_pgm accepted invalid input");
  return Errc::invalid_argument;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("lcs_test_imaging_" + name);
}

}  // namespace

TEST_CASE("decode_pgm maps bytes to intensities") {
  std::string data = "P5\n2 2\n255\n";
  data += std::string{'\x00', '\xff', '\x80', '\x40'};
  const Image img = lcs::decode_pgm(bytes_of(data));
  CHECK(img.rows() == 2);
  CHECK(img.cols() == 2);
  CHECK(std::vector<double>(img.pixels().begin(), img.pixels().end()) ==
        std::vector<double>{0, 255, 128, 64});
}

TEST_CASE("decode_pgm accepts header comments and reads width before height") {
  std::string data = "P5 # comment\n# another\n3 # cols\n1\n255\n";
  data += std::string{'\x01', '\x02', '\x03'};
  const Image img = lcs::decode_pgm(bytes_of(data));
  CHECK(img.rows() == 1);
  CHECK(img.cols() == 3);
  CHECK(img.at(0, 2) == 3.0);
}

TEST_CASE("decode_pgm reports each failure class distinctly") {
  CHECK(decode_error("P5\n2 2\n255\n") == Errc::truncated);
  CHECK(decode_error("P5\n2 2\n255\n\x01\x02") == Errc::truncated);
  CHECK(decode_error("P2\n2 2\n255\n\x01\x02\x03\x04") == Errc::malformed);
  CHECK(decode_error("P5\nx 2\n255\n\x01\x02\x03\x04") == Errc::malformed);
  CHECK(decode_error("P5\n2 2\n65535\n\x01\x02\x03\x04") == Errc::unsupported);
  CHECK(decode_error("P5\n2 2\n15\n\x01\x02\x03\x04") == Errc::unsupported);
  CHECK(decode_error("P5\n0 2\n255\n") == Errc::malformed);
}

TEST_CASE("load_image on a missing file is not_found") {
  try {
    lcs::load_image(temp_path("does_not_exist.pgm"));
    FAIL("expected an error");
  } catch (const lcs::Error& e) {
    CHECK(e.code() == Errc::not_found);
  }
}

TEST_CASE("save_image rounds half up and clamps") {
  Image img(1, 6, {255.4, -3.0, 12.5, 12.49, 300.0, 0.5});
  const auto bytes = lcs::encode_pgm(img);
  const std::string header = "P5\n6 1\n255\n";
  REQUIRE(bytes.size() == header.size() + 6);
  CHECK(std::string(bytes.begin(), bytes.begin() + header.size()) == header);
  const std::vector<unsigned char> raster(bytes.begin() + header.size(), bytes.end());
  CHECK(raster == std::vector<unsigned char>{255, 0, 13, 12, 255, 1});
}

TEST_CASE("save then load is the identity on integer images") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> px(0, 255);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t rows = 1 + rng() % 17, cols = 1 + rng() % 23;
    Image img(rows, cols);
    for (double& p : img.pixels()) p = px(rng);
    const auto path = temp_path("roundtrip.pgm");
    lcs::save_image(img, path);
    CHECK(lcs::load_image(path) == img);
    std::filesystem::remove(path);
  }
}

TEST_CASE("save_image to an unwritable path is an io error") {
  try {
    lcs::save_image(Image(1, 1), "/nonexistent-dir/x.pgm");
    FAIL("expected an error");
  } catch (const lcs::Error& e) {
    CHECK(e.code() == Errc::io);
  }
}

TEST_CASE("load_image reads the 512x512 test image") {
  const Image img = lcs::load_image(LCS_TEST_DATA_DIR "/camera512.pgm");
  CHECK(img.rows() == 512);
  CHECK(img.cols() == 512);
}

TEST_CASE("to_lines cuts the row-major stream into consecutive segments") {
  const Image img(2, 2, {1, 2, 3, 4});
  const auto lines = lcs::to_lines(img, 2);
  REQUIRE(lines.num_lines() == 2);
  CHECK(std::vector<double>(lines.line(0).begin(), lines.line(0).end()) == std::vector<double>{1, 2});
  CHECK(std::vector<double>(lines.line(1).begin(), lines.line(1).end()) == std::vector<double>{3, 4});

  const Image big(512, 512);
  const auto rows = lcs::to_lines(big, 512);
  CHECK(rows.num_lines() == 512);
  CHECK(rows.line_len() == 512);

  const Image wide(3, 4, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11});
  const auto across = lcs::to_lines(wide, 6);
  CHECK(across.line(1)[0] == 6.0);
}

TEST_CASE("to_lines rejects invalid line lengths") {
  const Image img(2, 2, {1, 2, 3, 4});
  CHECK_THROWS_AS(lcs::to_lines(img, 3), lcs::Error);
  CHECK_THROWS_AS(lcs::to_lines(img, 1), lcs::Error);
  CHECK_THROWS_AS(lcs::to_lines(img, 0), lcs::Error);
}

TEST_CASE("from_lines inverts to_lines") {
  const lcs::LineSet lines(2, 2, 2, {1, 2, 3, 4});
  CHECK(lcs::from_lines(lines) == Image(2, 2, {1, 2, 3, 4}));
  CHECK_THROWS_AS(lcs::LineSet(2, 2, 2, {1, 2, 3}), lcs::Error);
}

TEST_CASE("property: partition round trip over random images and every divisor") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t rows = 1 + rng() % 12, cols = 1 + rng() % 12;
    const Image img = oracle::random_image(rng, rows, cols);
    for (std::size_t l = 2; l <= img.size(); ++l) {
      if (img.size() % l != 0) continue;
      const auto lines = lcs::to_lines(img, l);
      CHECK(lines.num_lines() * lines.line_len() == img.size());
      CHECK(lcs::from_lines(lines) == img);
      std::vector<double> a(img.pixels().begin(), img.pixels().end());
      std::vector<double> b(lines.data().begin(), lines.data().end());
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      CHECK(a == b);
    }
  }
}
