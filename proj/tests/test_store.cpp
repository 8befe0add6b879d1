#include "doctest.h"
#include "oracles.hpp"

#include "sic/known_fiducials.hpp"
#include "sic/store.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <unistd.h>

using namespace sic;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("sic_store_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

StoreErrorKind parse_error_kind(const std::string& text, std::string* message = nullptr) {
  try {
    parse_solution(text);
  } catch (const StoreError& e) {
    if (message) *message = e.what();
    return e.kind;
  }
  FAIL("expected a StoreError");
  return StoreErrorKind::io;
}

double ulp_distance(double a, double b) {
  return std::abs(a - b) / std::max(std::nextafter(std::abs(a), INFINITY) - std::abs(a), 1e-320);
}

}  // namespace

TEST_CASE("SICFID v1 layout") {
  const auto s = solution_from_vector(qubit_fiducial(), "none", 15);
  const std::string text = serialize_solution(s);
  CHECK(text.rfind("SICFID 1\nd 2\n", 0) == 0);
  std::istringstream lines(text);
  std::string line;
  std::vector<std::string> all;
  while (std::getline(lines, line)) all.push_back(line);
  REQUIRE(all.size() == 9);
  CHECK(all[2] == "symmetry none");
  CHECK(all[3] == "digits 15");
  CHECK(all[4].rfind("frame_error ", 0) == 0);
  CHECK(all[5] == "+0.888073833977115");
  CHECK(all[6] == "+0.000000000000000");
  for (int i = 5; i < 9; ++i) CHECK(all[i].size() == 2 + 1 + 15);
  CHECK(text.back() == '\n');
  CHECK(text.find('\r') == std::string::npos);
}

TEST_CASE("write, read, write is byte-identical; round trip is lossless") {
  const fs::path dir = scratch_dir("roundtrip");
  std::mt19937 rng(8);
  for (int digits : {17, 30}) {
    auto s = solution_from_vector(oracle::haar(5, rng), "zauner:1", digits, "unit test");
    s.stabilizer_order = 6;
    const fs::path p1 = dir / "a.sicfid", p2 = dir / "b.sicfid";
    const std::size_t bytes = write_solution(s, p1);
    CHECK(bytes == fs::file_size(p1));
    const auto back = read_solution(p1);
    CHECK(back == s);
    write_solution(back, p2);
    std::ifstream f1(p1, std::ios::binary), f2(p2, std::ios::binary);
    const std::string t1((std::istreambuf_iterator<char>(f1)), {}), t2((std::istreambuf_iterator<char>(f2)), {});
    CHECK(t1 == t2);
    CHECK(t1 == serialize_solution(s));
  }
  // No temporary files left behind.
  int count = 0;
  for (const auto& e : fs::directory_iterator(dir)) count += e.path().extension() == ".sicfid" ? 0 : 1;
  CHECK(count == 0);
  fs::remove_all(dir);
}

TEST_CASE("stored frame_error matches re-verification to 2 ulps") {
  std::mt19937 rng(1);
  for (int d : {2, 3, 7}) {
    FiducialVector a = d == 2 ? FiducialVector(qubit_fiducial()) : FiducialVector(oracle::haar(d, rng));
    const auto s = parse_solution(serialize_solution(solution_from_vector(a, "none")));
    const double stored = std::stod(s.frame_error);
    const double recomputed = verify_sic(solution_vector(s)).frame_error;
    CHECK(ulp_distance(stored, recomputed) <= 2);
  }
}

TEST_CASE("50-digit solutions keep 50 fractional digits") {
  const auto big = make_big_fiducial(hesse_fiducial(), 60);
  const auto s = solution_from_big(big, "zauner:0", 50);
  for (const auto& amp : s.amplitudes) {
    REQUIRE(amp.find('.') != std::string::npos);
    CHECK(amp.size() - amp.find('.') - 1 == 50);
  }
  const auto back = parse_solution(serialize_solution(s));
  CHECK(back == s);
  const auto bv = solution_big_vector(back);
  CHECK(format_fixed(bv.amplitudes(1).real(), 50) == s.amplitudes[2]);
}

TEST_CASE("parse errors are distinct") {
  const std::string good = serialize_solution(solution_from_vector(qubit_fiducial(), "none", 5));
  std::string msg;

  CHECK(parse_error_kind(good.substr(0, good.size() - 4), &msg) == StoreErrorKind::unexpected_end);
  CHECK(msg.find("unexpected end of input") != std::string::npos);
  CHECK(parse_error_kind("SICFID 1\nd 2\n", &msg) == StoreErrorKind::unexpected_end);
  CHECK(parse_error_kind("") == StoreErrorKind::unexpected_end);

  std::string wrong_d = good;
  wrong_d.replace(wrong_d.find("d 2"), 3, "d 3");
  CHECK(parse_error_kind(wrong_d, &msg) == StoreErrorKind::amplitude_count);
  CHECK(msg.find("d = 3") != std::string::npos);
  CHECK(msg.find("6") != std::string::npos);
  CHECK(msg.find("4") != std::string::npos);

  CHECK(parse_error_kind("SICFID 2" + good.substr(8)) == StoreErrorKind::malformed_header);
  std::string bad_sym = good;
  bad_sym.replace(bad_sym.find("none"), 4, "zauner");
  CHECK(parse_error_kind(bad_sym) == StoreErrorKind::malformed_header);
  std::string bad_dim = good;
  bad_dim.replace(bad_dim.find("d 2"), 3, "d x");
  CHECK(parse_error_kind(bad_dim) == StoreErrorKind::malformed_header);

  std::string bad_decimal = good;
  bad_decimal.replace(bad_decimal.find("+0.88807"), 8, "+0.8x807");
  CHECK(parse_error_kind(bad_decimal) == StoreErrorKind::invalid_decimal);
  std::string short_digits = good;
  short_digits.replace(short_digits.find("+0.88807"), 8, "+0.8881");
  CHECK(parse_error_kind(short_digits) == StoreErrorKind::invalid_decimal);
  std::string unsigned_amp = good;
  unsigned_amp.replace(unsigned_amp.find("+0.88807"), 8, "0.88807");
  CHECK(parse_error_kind(unsigned_amp) == StoreErrorKind::invalid_decimal);
  std::string crlf = good;
  crlf.replace(crlf.find('\n'), 1, "\r\n");
  CHECK(parse_error_kind(crlf) == StoreErrorKind::malformed_header);

  CHECK_THROWS_AS(read_solution(fs::path("/nonexistent/dir/x.sicfid")), StoreError);
  try {
    read_solution(fs::path("/nonexistent/dir/x.sicfid"));
  } catch (const StoreError& e) {
    CHECK(e.kind == StoreErrorKind::io);
  }
  SICSolution broken = solution_from_vector(qubit_fiducial(), "none", 5);
  broken.amplitudes.pop_back();
  CHECK_THROWS_AS(serialize_solution(broken), StoreError);
}

TEST_CASE("catalogue layout") {
  CHECK(symmetry_directory("zauner:1") == "zauner-1");
  CHECK(symmetry_directory("none") == "none");
  const fs::path root = scratch_dir("catalogue");
  std::vector<SICSolution> solutions = {solution_from_vector(hesse_fiducial(), "zauner:0"),
                                        solution_from_vector(norrell_fiducial(), "zauner:0")};
  const auto classes = catalogue(solutions);
  REQUIRE(classes.size() == 2);
  const auto written = write_catalogue(root, solutions, classes);
  REQUIRE(written.size() == 2);
  CHECK(written[0] == root / "d3" / "zauner-0" / "class-0.sicfid");
  CHECK(fs::exists(root / "d3" / "manifest"));
  const auto rep = read_solution(written[0]);
  REQUIRE(rep.stabilizer_order);
  CHECK(*rep.stabilizer_order == oracle::kHesseStabilizerOrder);
  std::ifstream in(root / "d3" / "manifest");
  const auto manifest = nlohmann::json::parse(in);
  CHECK(manifest["dim"] == 3);
  CHECK(manifest["classes"].size() == 2);
  CHECK(manifest["classes"][1]["stabilizer_order"] == oracle::kNorrellStabilizerOrder);
  fs::remove_all(root);
}

TEST_CASE("JSON run summaries") {
  const auto report = verify_sic(hesse_fiducial());
  const auto j = to_json(report);
  CHECK(j["verdict"] == "pass");
  CHECK(j["dim"] == 3);
  CHECK(j["symmetry_checks"].contains("eq23_f_self_inverse"));
  SearchConfig c;
  c.dim = 3;
  c.restarts = 2;
  const auto out = search_sic(c);
  const auto sj = to_json(out.report);
  CHECK(sj["restarts_attempted"] == 2);
  CHECK(sj["records"].size() == 2);
}
