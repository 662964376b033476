// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lcs/codec.hpp"
#include "lcs/imaging.hpp"
#include "lcs/metrics.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
};

const fs::path& workdir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "lcs_test_cli";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

Run run(const std::string& args) {
  const fs::path log = workdir() / "last.log";
  const std::string cmd = std::string("'") + LCS_CLI_PATH + "' " + args + " > '" + log.string() + "' 2>&1";
  const int raw = std::system(cmd.c_str());
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, ss.str()};
}

std::string path(const std::string& name) { return (workdir() / name).string(); }

std::vector<std::string> lines(const std::string& file) {
  std::ifstream in(file);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

void write_report(const std::string& file, lcs::Scheme scheme, const std::vector<double>& rates,
                  const std::vector<double>& psnrs) {
  lcs::RdReport r;
  r.image_id = "table";
  for (std::size_t i = 0; i < rates.size(); ++i) {
    lcs::RdRow row;
    row.scheme = scheme;
    row.rate = rates[i];
    row.psnr_db = psnrs[i];
    r.rows.push_back(row);
  }
  r.means = lcs::aggregate(r.rows);
  lcs::write_csv(r, fs::path(file));
}

}  // namespace

TEST_CASE("cli: help, version, usage errors") {
  CHECK(run("--help").code == 0);
  const auto v = run("--version");
  CHECK(v.code == 0);
  CHECK(v.out.find("1.0.0") != std::string::npos);
  CHECK(run("").code == 2);
  CHECK(run("frobnicate").code == 2);
  lcs::save_image(oracle::quadrants(16), path("q16.pgm"));
  CHECK(run("encode " + path("q16.pgm") + " --rate 1.5").code == 2);
  CHECK(run("encode " + path("q16.pgm") + " --rate 0").code == 2);
  CHECK(run("encode " + path("q16.pgm")).code == 2);
  CHECK(run("decode " + path("nothing.lcs") + " --out " + path("x.pgm")).code == 5);
}

TEST_CASE("cli: encode the 512x512 test image at rate 0.1") {
  const auto r = run("encode " + std::string(LCS_TEST_DATA_DIR) + "/camera512.pgm " + path("cam.lcs") +
                     " --rate 0.1 --seed 42");
  REQUIRE(r.code == 0);
  CHECK(r.out.find("M per line     51") != std::string::npos);
  CHECK(fs::file_size(path("cam.lcs")) == 32 + 8ull * 51 * 512);
  const auto s = lcs::read_sample(fs::path(path("cam.lcs")));
  CHECK(s.m_per_line == 51);
  CHECK(s.line_len == 512);
  CHECK(s.seed == 42);
}

TEST_CASE("cli: encode defaults the output name and honours LCS_SEED") {
  lcs::save_image(oracle::quadrants(16), path("auto.pgm"));
  REQUIRE(run("encode " + path("auto.pgm") + " --rate 0.5").code == 0);
  CHECK(lcs::read_sample(fs::path(path("auto.lcs"))).seed == 0);
  REQUIRE(::setenv("LCS_SEED", "77", 1) == 0);
  REQUIRE(run("encode " + path("auto.pgm") + " --rate 0.5").code == 0);
  ::unsetenv("LCS_SEED");
  CHECK(lcs::read_sample(fs::path(path("auto.lcs"))).seed == 77);
}

TEST_CASE("cli: decode at rate 1 and trace") {
  std::mt19937_64 rng(5);
  const auto img = oracle::random_image(rng, 16, 16);
  lcs::save_image(img, path("rnd.pgm"));
  REQUIRE(run("encode " + path("rnd.pgm") + " " + path("rnd.lcs") + " --rate 1").code == 0);
  REQUIRE(run("decode " + path("rnd.lcs") + " --out " + path("rnd_out.pgm") + " --trace " + path("t.csv")).code == 0);
  const auto ref = lcs::load_image(path("rnd.pgm"));
  CHECK(lcs::psnr(ref, lcs::load_image(path("rnd_out.pgm"))) > 60.0);
  const auto t = lines(path("t.csv"));
  REQUIRE(t.size() >= 2);
  CHECK(t[0] == "iteration,objective");

  REQUIRE(run("decode " + path("rnd.lcs") + " --out " + path("one.pgm") + " --max-outer 1 --trace " +
              path("t1.csv")).code == 0);
  CHECK(lines(path("t1.csv")).size() == 2);
  CHECK(run("decode " + path("rnd.lcs") + " --out " + path("one.pgm") + " --beta -2").code == 2);
}

TEST_CASE("cli: corrupt magic exits 7 and writes nothing") {
  lcs::save_image(oracle::quadrants(16), path("c.pgm"));
  REQUIRE(run("encode " + path("c.pgm") + " " + path("c.lcs") + " --rate 0.5").code == 0);
  {
    std::fstream f(path("c.lcs"), std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(0);
    f.put('X');
  }
  fs::remove(path("c_out.pgm"));
  const auto r = run("decode " + path("c.lcs") + " --out " + path("c_out.pgm"));
  CHECK(r.code == 7);
  CHECK_FALSE(fs::exists(path("c_out.pgm")));

  std::ofstream(path("short.lcs"), std::ios::binary) << "LCS1";
  CHECK(run("decode " + path("short.lcs") + " --out " + path("c_out.pgm")).code == 9);
}

TEST_CASE("cli: evaluate writes csv, json, dat and reconstructions") {
  lcs::save_image(oracle::quadrants(16), path("ev.pgm"));
  const auto r = run("evaluate " + path("ev.pgm") + " --rates 0.2,0.4 --trials 2 --seed 10 --out " +
                     path("ev.csv"));
  REQUIRE(r.code == 0);
  const auto csv = lines(path("ev.csv"));
  REQUIRE(csv.size() == 1 + 2 * 2 * 2);
  CHECK(csv[0] == "image_id,scheme,rate,trial,seed,psnr_db,mse,iterations,wall_ms,status");
  CHECK(csv[1].rfind("ev,proposed,0.2,0,10,", 0) == 0);
  std::ifstream js(path("ev.json"));
  const auto doc = nlohmann::json::parse(js);
  CHECK(doc["means"].size() == 4);
  CHECK(lines(path("ev.dat")).size() == 3);
  CHECK(fs::exists(path("ev_recon/proposed_0.4.pgm")));
  CHECK(fs::exists(path("ev_recon/conventional_0.2.pgm")));

  CHECK(run("evaluate " + path("ev.pgm") + " --rates 0.2 --schemes bogus --out " + path("x.csv")).code == 2);
  CHECK(run("evaluate " + path("ev.pgm") + " --rates 0.2,0.2 --out " + path("x.csv")).code == 3);

  const auto all_skipped = run("evaluate " + path("ev.pgm") +
                               " --rates 0.5 --trials 1 --schemes conventional --max-entries 10 --out " +
                               path("skip.csv"));
  CHECK(all_skipped.code == 13);
  CHECK(lines(path("skip.csv"))[1].find("skipped-capacity") != std::string::npos);

  const auto self = run("compare " + path("ev.csv") + " " + path("ev.csv") + " --scheme-a proposed --scheme-b proposed --out " + path("self.csv"));
  REQUIRE(self.code == 0);
  const auto g = lines(path("self.csv"));
  REQUIRE(g.size() == 3);
  CHECK(g[1] == "0.2,0.000000");
  CHECK(g[2] == "0.4,0.000000");
}

TEST_CASE("cli: compare gains on fixed six-rate reports") {
  const std::vector<double> rates{0.05, 0.1, 0.15, 0.2, 0.25, 0.3};
  write_report(path("doll_prop.csv"), lcs::Scheme::proposed, rates, {25.75, 31.38, 34.18, 36.09, 37.92, 39.39});
  write_report(path("doll_conv.csv"), lcs::Scheme::conventional, rates, {24.29, 29.31, 31.83, 33.47, 35.2, 36.6});
  const auto r = run("compare " + path("doll_prop.csv") + " " + path("doll_conv.csv") + " --out " + path("doll.csv"));
  REQUIRE(r.code == 0);
  const auto g = lines(path("doll.csv"));
  REQUIRE(g.size() == 7);
  const std::vector<std::string> expected{"0.05,1.460000", "0.1,2.070000", "0.15,2.350000",
                                          "0.2,2.620000",  "0.25,2.720000", "0.3,2.790000"};
  for (std::size_t i = 0; i < 6; ++i) CHECK(g[i + 1] == expected[i]);

  write_report(path("other.csv"), lcs::Scheme::conventional, {0.05, 0.5}, {20, 21});
  CHECK(run("compare " + path("doll_prop.csv") + " " + path("other.csv")).code == 12);
}
