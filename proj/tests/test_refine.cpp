#include "doctest.h"
#include "oracles.hpp"

#include "sic/known_fiducials.hpp"
#include "sic/refine.hpp"
#include "sic/search.hpp"

using namespace sic;
using Eigen::VectorXcd;

namespace {

/// max_j |a_j - e^{i phi} c_j| with phi = arg <c|a>: exact up-to-phase match.
BigReal phase_aligned_gap(const BigVector& a, const BigVector& c) {
  BigComplex inner(0);
  for (Eigen::Index j = 0; j < a.size(); ++j) inner += std::conj(c(j)) * a(j);
  const BigComplex phase = inner / BigReal(abs(inner));
  BigReal worst = 0;
  for (Eigen::Index j = 0; j < a.size(); ++j) {
    const BigReal gap = abs(a(j) - phase * c(j));
    if (gap > worst) worst = gap;
  }
  return worst;
}

FiducialVector hit(int d, std::uint64_t seed) {
  SearchConfig c;
  c.dim = d;
  c.symmetry = d == 2 ? SymmetrySpec::none() : SymmetrySpec::zauner_auto();
  c.restarts = 100;
  c.master_seed = seed;
  c.mode = SearchMode::first_hit;
  const auto out = search_sic(c);
  REQUIRE(out.solution);
  return out.solution->vector;
}

}  // namespace

TEST_CASE("Eq. (14) perturbed by 1e-13 refines onto the closed form to 1e-48") {
  VectorXcd a = qubit_fiducial();
  a(0) += std::complex<double>(1e-13, -2e-13);
  a(1) += std::complex<double>(-3e-13, 1e-13);
  const auto r = refine(a, 50);
  REQUIRE(r.converged);
  CHECK(r.log10_residual() < -50);
  BigReal::default_precision(90);
  const auto closed = oracle::qubit_family<BigReal>().front();
  const BigReal gap = phase_aligned_gap(r.solution.amplitudes, closed);
  CHECK(gap < BigReal("1e-48"));
  for (double ratio : r.convergence_ratios()) CHECK(ratio > 1.8);
}

TEST_CASE("Hesse fiducial is exact after one step") {
  const auto r = refine(hesse_fiducial(), 60);
  CHECK(r.converged);
  CHECK(r.steps <= 1);
  CHECK(r.log10_residual() < -60);
  BigReal::default_precision(100);
  CHECK(phase_aligned_gap(r.solution.amplitudes, hesse_fiducial<BigReal>()) < BigReal("1e-60"));
}

TEST_CASE("search outputs refine to 50 digits with quadratic convergence, d <= 10") {
  for (int d = 2; d <= 10; ++d) {
    CAPTURE(d);
    const auto r = refine(hit(d, 31), 50);
    REQUIRE(r.converged);
    CHECK_FALSE(r.diverged);
    CHECK(r.log10_residual() < -50);
    CHECK(r.log10_residual() == doctest::Approx(static_cast<double>(log10(residual_max_norm(r.solution.amplitudes)))));
    const auto ratios = r.convergence_ratios();
    for (double ratio : ratios) CHECK(ratio > 1.8);
    for (std::size_t k = 1; k < r.precision_history.size(); ++k)
      CHECK(r.precision_history[k] >= r.precision_history[k - 1]);
    CHECK(static_cast<double>(log10(frame_error_big(r.solution.amplitudes))) < -99);
  }
}

TEST_CASE("refinement is idempotent") {
  const auto first = refine(hit(5, 2), 40);
  REQUIRE(first.converged);
  const auto second = refine(first.solution, 40);
  CHECK(second.converged);
  CHECK(second.steps <= 1);
  BigReal::default_precision(80);
  CHECK(phase_aligned_gap(second.solution.amplitudes, first.solution.amplitudes) < BigReal("1e-39"));
}

TEST_CASE("refine to 150 digits is possible") {
  const auto r = refine(hit(4, 3), 150);
  CHECK(r.converged);
  CHECK(r.log10_residual() < -150);
  CHECK(r.solution.working_precision >= 150);
}

TEST_CASE("refine preconditions and divergence reporting") {
  CHECK_THROWS_AS(refine(qubit_fiducial(), 0), std::invalid_argument);
  CHECK_THROWS_AS(refine(oracle::flat_vector(3), 30), std::invalid_argument);
  VectorXcd rough = qubit_fiducial();
  rough(1) += 1e-6;
  CHECK_THROWS_AS(refine(rough, 30), std::invalid_argument);

  // Far from any solution: Gauss-Newton must report, not throw.
  RefineOptions opts;
  opts.check_precondition = false;
  opts.max_steps = 15;
  const auto r = refine(oracle::flat_vector(4), 30, opts);
  CHECK_FALSE(r.converged);
  CHECK_FALSE(r.message.empty());
  CHECK(r.solution.amplitudes.size() == 4);
}

TEST_CASE("decimal helpers") {
  CHECK(format_fixed(0.5, 3) == "+0.500");
  CHECK(format_fixed(-1.25, 2) == "-1.25");
  CHECK(format_fixed(-1e-20, 5) == "+0.00000");
  const BigReal x = parse_big_real("-0.12345678901234567890123456789", 29);
  CHECK(format_fixed(x, 29) == "-0.12345678901234567890123456789");
  CHECK(format_fixed(x, 5) == "-0.12346");
  const auto big = make_big_fiducial(qubit_fiducial(), 40);
  CHECK(big.dim == 2);
  CHECK((big.to_double() - qubit_fiducial()).norm() < 1e-16);
  CHECK(format_scientific(BigReal("1.5e-120"), 3).rfind("1.5", 0) == 0);
}
