// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "lcs/lcs.h"

namespace fs = std::filesystem;

namespace {

std::vector<double> ramp(std::size_t rows, std::size_t cols) {
  std::vector<double> p(rows * cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) p[r * cols + c] = static_cast<double>((r * 13 + c * 7) % 256);
  return p;
}

}  // namespace

TEST_CASE("capi: version and status names") {
  CHECK(std::strcmp(lcs_version(), "1.0.0") == 0);
  CHECK(std::strcmp(lcs_status_name(LCS_OK), "ok") == 0);
  CHECK(std::strcmp(lcs_status_name(LCS_ERR_MALFORMED), "malformed data") == 0);
  CHECK(lcs_default_max_entries() == (1ull << 26));
  CHECK(lcs_measurement_count(0.1, 512) == 51);
}

TEST_CASE("capi: null arguments are rejected") {
  lcs_image* img = nullptr;
  CHECK(lcs_image_create(2, 2, nullptr, nullptr) == LCS_ERR_INVALID_ARGUMENT);
  CHECK(lcs_image_load(nullptr, &img) == LCS_ERR_INVALID_ARGUMENT);
  CHECK(std::strlen(lcs_last_error()) > 0);
  lcs_sample* s = nullptr;
  CHECK(lcs_encode_lines(nullptr, 0.5, 1, 0, &s) == LCS_ERR_INVALID_ARGUMENT);
  CHECK(s == nullptr);
  lcs_image_free(nullptr);
  lcs_sample_free(nullptr);
  lcs_result_free(nullptr);
  lcs_report_free(nullptr);
  lcs_gains_free(nullptr);
}

TEST_CASE("capi: encode, serialize, reconstruct") {
  const auto pixels = ramp(16, 16);
  lcs_image* img = nullptr;
  REQUIRE(lcs_image_create(16, 16, pixels.data(), &img) == LCS_OK);
  CHECK(lcs_image_rows(img) == 16);
  CHECK(lcs_image_cols(img) == 16);
  CHECK(lcs_image_pixels(img)[17] == pixels[17]);

  lcs_sample* sample = nullptr;
  CHECK(lcs_encode_lines(img, 1.5, 1, 0, &sample) == LCS_ERR_INVALID_ARGUMENT);
  CHECK(lcs_encode_lines(img, 0.5, 1, 5, &sample) == LCS_ERR_INVALID_ARGUMENT);
  REQUIRE(lcs_encode_lines(img, 1.0, 9, 0, &sample) == LCS_OK);
  CHECK(lcs_sample_m_per_line(sample) == 16);
  CHECK(lcs_sample_num_lines(sample) == 16);
  CHECK(lcs_sample_seed(sample) == 9);
  CHECK(lcs_sample_payload_bytes(sample) == 16 * 16 * 8);
  CHECK(lcs_sample_achieved_rate(sample) == 1.0);

  uint8_t* bytes = nullptr;
  size_t len = 0;
  REQUIRE(lcs_sample_serialize(sample, &bytes, &len) == LCS_OK);
  CHECK(len == 32 + 16 * 16 * 8);
  CHECK(std::memcmp(bytes, "LCS1", 4) == 0);
  lcs_sample* back = nullptr;
  REQUIRE(lcs_sample_deserialize(bytes, len, &back) == LCS_OK);
  CHECK(std::memcmp(lcs_sample_measurements(back), lcs_sample_measurements(sample), 16 * 16 * 8) == 0);
  CHECK(lcs_sample_deserialize(bytes, len - 1, &back) == LCS_ERR_TRUNCATED);
  bytes[0] = 'X';
  CHECK(lcs_sample_deserialize(bytes, len, &back) == LCS_ERR_MALFORMED);
  lcs_buffer_free(bytes);
  lcs_sample_free(back);

  lcs_solver_config cfg;
  lcs_solver_config_default(&cfg);
  CHECK(cfg.lambda == 1e4);
  CHECK(cfg.beta == 32.0);
  CHECK(cfg.max_outer == 300);
  lcs_result* result = nullptr;
  REQUIRE(lcs_reconstruct(sample, &cfg, &result) == LCS_OK);
  CHECK(lcs_result_iterations(result) >= 1);
  CHECK(lcs_result_trace_len(result) == static_cast<size_t>(lcs_result_iterations(result)));
  double db = 0.0;
  REQUIRE(lcs_psnr(img, lcs_result_image(result), &db) == LCS_OK);
  CHECK(db > 60.0);

  cfg.beta = -1.0;
  lcs_result* bad = nullptr;
  CHECK(lcs_reconstruct(sample, &cfg, &bad) == LCS_ERR_INVALID_ARGUMENT);
  CHECK(bad == nullptr);

  lcs_sample* whole = nullptr;
  CHECK(lcs_encode_whole(img, 0.5, 1, 1000, &whole) == LCS_ERR_CAPACITY);
  REQUIRE(lcs_encode_whole(img, 0.5, 1, 0, &whole) == LCS_OK);
  CHECK(lcs_sample_line_len(whole) == 256);
  CHECK(lcs_sample_m_per_line(whole) == 128);

  lcs_sample_free(whole);
  lcs_result_free(result);
  lcs_sample_free(sample);
  lcs_image_free(img);
}

TEST_CASE("capi: files") {
  const fs::path dir = fs::temp_directory_path() / "lcs_test_capi";
  fs::create_directories(dir);
  const auto pixels = ramp(8, 8);
  lcs_image* img = nullptr;
  REQUIRE(lcs_image_create(8, 8, pixels.data(), &img) == LCS_OK);
  const std::string pgm = (dir / "ramp.pgm").string();
  REQUIRE(lcs_image_save(img, pgm.c_str()) == LCS_OK);
  lcs_image* loaded = nullptr;
  REQUIRE(lcs_image_load(pgm.c_str(), &loaded) == LCS_OK);
  double db = 0.0;
  REQUIRE(lcs_psnr(img, loaded, &db) == LCS_OK);
  CHECK(db == 99.0);
  CHECK(lcs_image_load((dir / "missing.pgm").string().c_str(), &loaded) == LCS_ERR_NOT_FOUND);

  lcs_sample* sample = nullptr;
  REQUIRE(lcs_encode_lines(img, 0.5, 3, 8, &sample) == LCS_OK);
  const std::string lcs_path = (dir / "ramp.lcs").string();
  REQUIRE(lcs_sample_write(sample, lcs_path.c_str()) == LCS_OK);
  CHECK(fs::file_size(lcs_path) == 32 + 256);
  lcs_sample* read = nullptr;
  REQUIRE(lcs_sample_read(lcs_path.c_str(), &read) == LCS_OK);
  CHECK(lcs_sample_seed(read) == 3);
  CHECK(lcs_sample_read((dir / "none.lcs").string().c_str(), &read) == LCS_ERR_NOT_FOUND);

  lcs_sample_free(read);
  lcs_sample_free(sample);
  lcs_image_free(loaded);
  lcs_image_free(img);
  fs::remove_all(dir);
}

TEST_CASE("capi: evaluate, reports, compare") {
  const fs::path dir = fs::temp_directory_path() / "lcs_test_capi_eval";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto pixels = ramp(16, 16);
  lcs_image* img = nullptr;
  REQUIRE(lcs_image_create(16, 16, pixels.data(), &img) == LCS_OK);

  lcs_eval_options opt;
  lcs_eval_options_default(&opt);
  CHECK(opt.num_rates == 6);
  CHECK(opt.trials == 5);
  CHECK(opt.schemes == (LCS_SCHEME_PROPOSED | LCS_SCHEME_CONVENTIONAL));
  const double rates[] = {0.25, 0.5};
  opt.rates = rates;
  opt.num_rates = 2;
  opt.trials = 2;

  lcs_report* report = nullptr;
  const std::string recon = (dir / "recon").string();
  REQUIRE(lcs_evaluate(img, "ramp", &opt, recon.c_str(), &report) == LCS_OK);
  CHECK(lcs_report_row_count(report) == 8);
  CHECK(lcs_report_ok_count(report) == 8);
  CHECK(lcs_report_mean_count(report) == 4);
  CHECK(lcs_report_schemes(report) == (LCS_SCHEME_PROPOSED | LCS_SCHEME_CONVENTIONAL));
  unsigned scheme = 0;
  double rate = 0.0, mean = 0.0;
  REQUIRE(lcs_report_mean(report, 0, &scheme, &rate, &mean) == LCS_OK);
  CHECK(scheme == LCS_SCHEME_PROPOSED);
  CHECK(rate == 0.25);
  CHECK(std::isfinite(mean));
  CHECK(lcs_report_mean(report, 4, &scheme, &rate, &mean) == LCS_ERR_DIMENSION);
  CHECK(fs::exists(fs::path(recon) / "proposed_0.25.pgm"));
  CHECK(fs::exists(fs::path(recon) / "conventional_0.5.pgm"));

  const std::string csv = (dir / "r.csv").string();
  REQUIRE(lcs_report_write_csv(report, csv.c_str()) == LCS_OK);
  REQUIRE(lcs_report_write_json(report, (dir / "r.json").string().c_str()) == LCS_OK);
  REQUIRE(lcs_report_write_gnuplot(report, (dir / "r.dat").string().c_str()) == LCS_OK);
  lcs_report* back = nullptr;
  REQUIRE(lcs_report_read_csv(csv.c_str(), &back) == LCS_OK);
  CHECK(lcs_report_row_count(back) == 8);

  lcs_gains* gains = nullptr;
  REQUIRE(lcs_compare(report, LCS_SCHEME_PROPOSED, back, LCS_SCHEME_CONVENTIONAL, &gains) == LCS_OK);
  REQUIRE(lcs_gains_count(gains) == 2);
  CHECK(lcs_gains_rate(gains, 1) == 0.5);
  CHECK(std::isfinite(lcs_gains_db(gains, 0)));
  REQUIRE(lcs_gains_write_csv(gains, (dir / "g.csv").string().c_str()) == LCS_OK);
  lcs_gains_free(gains);

  REQUIRE(lcs_compare(report, LCS_SCHEME_PROPOSED, back, LCS_SCHEME_PROPOSED, &gains) == LCS_OK);
  CHECK(lcs_gains_db(gains, 0) == 0.0);
  lcs_gains_free(gains);

  opt.schemes = 0;
  lcs_report* none = nullptr;
  CHECK(lcs_evaluate(img, "ramp", &opt, nullptr, &none) == LCS_ERR_INVALID_ARGUMENT);

  lcs_report_free(back);
  lcs_report_free(report);
  lcs_image_free(img);
  fs::remove_all(dir);
}
