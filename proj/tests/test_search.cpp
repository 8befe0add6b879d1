#include "doctest.h"
#include "oracles.hpp"

#include "sic/known_fiducials.hpp"
#include "sic/objective.hpp"
#include "sic/search.hpp"
#include "sic/verify.hpp"

#include <atomic>

using namespace sic;
using Eigen::VectorXcd;

TEST_CASE("haar_random_fiducial: determinism, norm, and unbiased |a_0|^2") {
  for (int d : {2, 5, 13}) {
    const VectorXcd a = haar_random_fiducial(d, 42), b = haar_random_fiducial(d, 42);
    CHECK((a - b).norm() == 0.0);
    CHECK(std::abs(a.norm() - 1) < 1e-15);
    CHECK((a - haar_random_fiducial(d, 43)).norm() > 0.1);
  }
  const int d = 4, n = 100000;
  double sum = 0, sum2 = 0;
  for (int s = 0; s < n; ++s) {
    const double p = std::norm(haar_random_fiducial(d, static_cast<std::uint64_t>(s))(0));
    sum += p;
    sum2 += p * p;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sum2 / n - mean * mean) / n);
  CHECK(std::abs(mean - 1.0 / d) < 3 * se);
}

TEST_CASE("zauner_subspace_order drops empty spaces") {
  const auto order3 = zauner_subspace_order(zauner_unitary(3));
  CHECK(order3 == std::vector<int>{0, 1});
  const auto order6 = zauner_subspace_order(zauner_unitary(6));
  CHECK(order6 == std::vector<int>{2, 0, 1});
}

TEST_CASE("minimize from an exact fiducial stops immediately") {
  SearchConfig c;
  c.dim = 2;
  const auto r = minimize(c, qubit_fiducial());
  CHECK(r.iterations <= 2);
  CHECK(r.frame_error < 1e-14);
  CHECK(r.converged);
}

TEST_CASE("minimize is monotone and d = 4 Zauner search succeeds within 50 restarts") {
  SearchConfig c;
  c.dim = 4;
  c.symmetry = SymmetrySpec::zauner_auto();
  const auto z = zauner_unitary(4);
  const auto order = zauner_subspace_order(z);
  int successes = 0;
  for (int i = 0; i < 50; ++i) {
    const auto r = minimize(c, haar_random_fiducial(4, 1000 + i), &z.projectors[order[i % order.size()]], {}, true);
    for (std::size_t k = 1; k < r.history.size(); ++k) CHECK(r.history[k] <= r.history[k - 1] + 1e-15);
    if (r.frame_error < 1e-13) ++successes;
  }
  CHECK(successes >= 1);
}

TEST_CASE("search_sic finds fiducials for d = 2..12 within 200 restarts") {
  for (int d = 2; d <= 12; ++d) {
    CAPTURE(d);
    SearchConfig c;
    c.dim = d;
    c.symmetry = d == 2 ? SymmetrySpec::none() : SymmetrySpec::zauner_auto();
    c.restarts = 200;
    c.master_seed = 17;
    c.mode = SearchMode::first_hit;
    const auto out = search_sic(c);
    REQUIRE(out.solution);
    CHECK(out.solution->frame_error < 1e-13);
    CHECK(verify_sic(out.solution->vector, 1e-6 * std::sqrt(d)).passed);
    CHECK_FALSE(out.report.deterministic);
    if (d > 2) CHECK(out.solution->symmetry_label.rfind("zauner:", 0) == 0);
  }
}

TEST_CASE("d = 3 without symmetry lands on the continuous family") {
  SearchConfig c;
  c.dim = 3;
  c.restarts = 6;
  c.master_seed = 5;
  const auto out = search_sic(c);
  REQUIRE(out.solution);
  CHECK(out.report.records.size() == 6);
  CHECK(out.report.hits >= 1);
  CHECK(verify_sic(out.solution->vector).passed);
  CHECK(out.solution->symmetry_label == "none");
}

TEST_CASE("exhaustive mode is independent of worker_count") {
  for (int d : {5, 7}) {
    SearchConfig c;
    c.dim = d;
    c.symmetry = SymmetrySpec::zauner_auto();
    c.restarts = 12;
    c.master_seed = 99;
    c.mode = SearchMode::exhaustive;
    c.worker_count = 1;
    const auto one = search_sic(c);
    c.worker_count = 8;
    const auto eight = search_sic(c);
    REQUIRE(one.solution);
    REQUIRE(eight.solution);
    CHECK(one.solution->restart_index == eight.solution->restart_index);
    CHECK((one.solution->vector - eight.solution->vector).norm() == 0.0);
    CHECK(one.solution->frame_error == eight.solution->frame_error);
    REQUIRE(one.report.records.size() == eight.report.records.size());
    for (std::size_t i = 0; i < one.report.records.size(); ++i) {
      CHECK(one.report.records[i].seed == eight.report.records[i].seed);
      CHECK(one.report.records[i].frame_error == eight.report.records[i].frame_error);
      CHECK(one.report.records[i].iterations == eight.report.records[i].iterations);
    }
    CHECK(one.report.deterministic);
  }
}

TEST_CASE("progress events and report bookkeeping") {
  SearchConfig c;
  c.dim = 4;
  c.symmetry = SymmetrySpec::zauner(0);
  c.restarts = 5;
  c.mode = SearchMode::exhaustive;
  c.worker_count = 3;
  std::atomic<int> started{0}, finished{0};
  const auto out = search_sic(c, [&](const ProgressEvent& e) {
    if (e.kind == ProgressEvent::Kind::restart_started) ++started;
    if (e.kind == ProgressEvent::Kind::restart_finished) ++finished;
  });
  CHECK(started == 5);
  CHECK(finished == 5);
  REQUIRE(out.report.records.size() == 5);
  for (int i = 0; i < 5; ++i) {
    CHECK(out.report.records[i].index == i);
    CHECK(out.report.records[i].seed == c.master_seed + static_cast<std::uint64_t>(i));
    CHECK(out.report.records[i].subspace == 0);
  }
}

TEST_CASE("configuration validation") {
  SearchConfig c;
  c.dim = 3;
  c.restarts = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  CHECK_THROWS_AS(search_sic(c), std::invalid_argument);
  c.restarts = 1;
  c.dim = 1;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.dim = 3;
  c.worker_count = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.worker_count = 1;
  c.symmetry = SymmetrySpec::zauner(3);
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  // d = 3 has an empty eigenspace (see the whgroup tests).
  c.symmetry = SymmetrySpec::zauner(2);
  CHECK_THROWS_AS(search_sic(c), std::invalid_argument);
}

TEST_CASE("search_3d: rows 0,1,2 force the full conditions") {
  SearchConfig c;
  c.dim = 5;
  c.symmetry = SymmetrySpec::zauner_auto();
  c.restarts = 5;
  c.master_seed = 3;
  c.success_threshold = 1e-20;
  const auto r = search_3d(c);
  CHECK(r.equation_count == 15);
  CHECK(r.records.size() == 5);
  for (const auto& rec : r.records)
    if (rec.rows_residual < 1e-20) CHECK(rec.frame_error < 1e-10);
  CHECK(r.rows_residual < 1e-20);
  CHECK(r.frame_error < 1e-10);

  CHECK(rows012_residual(to_real(hesse_fiducial())).value < 1e-25);
  CHECK(frame_error(to_real(hesse_fiducial())).frame_error < 1e-25);
}
