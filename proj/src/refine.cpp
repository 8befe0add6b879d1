#include "sic/refine.hpp"

#include "sic/verify.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>

namespace sic {

namespace {

using BigMatrix = Eigen::Matrix<BigReal, Eigen::Dynamic, Eigen::Dynamic>;
using BigRealVector = Eigen::Matrix<BigReal, Eigen::Dynamic, 1>;

// Boost's MPFR backend keeps its default precision in process-wide state, so
// every section that sets it and then creates values is serialized.
std::recursive_mutex& precision_mutex() {
  static std::recursive_mutex m;
  return m;
}

using PrecisionLock = std::lock_guard<std::recursive_mutex>;

int precision_of(const BigVector& a) {
  return a.size() == 0 ? 30 : static_cast<int>(a(0).real().precision());
}

void set_precision(int digits) { BigReal::default_precision(static_cast<unsigned>(digits)); }

BigReal upgraded(BigReal x, int digits) {
  x.precision(static_cast<unsigned>(digits));
  return x;
}

BigVector upgraded(const BigVector& a, int digits) {
  BigVector out(a.size());
  for (Eigen::Index i = 0; i < a.size(); ++i)
    out(i) = BigComplex(upgraded(a(i).real(), digits), upgraded(a(i).imag(), digits));
  return out;
}

BigReal norm_squared(const BigVector& a) {
  BigReal s = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) s += std::norm(a(i));
  return s;
}

BigVector normalized(const BigVector& a) {
  const BigReal n = sqrt(norm_squared(a));
  BigVector out = a;
  for (Eigen::Index i = 0; i < a.size(); ++i) out(i) /= n;
  return out;
}

double log10_of(const BigReal& x) {
  if (x <= 0) return -std::numeric_limits<double>::infinity();
  return static_cast<double>(log10(x));
}

// Real 2d x 2d form of a complex matrix acting on interleaved (re, im).
BigMatrix real_form(const CMatrix<BigReal>& p) {
  const Eigen::Index d = p.rows();
  BigMatrix r(2 * d, 2 * d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      r(2 * i, 2 * j) = p(i, j).real();
      r(2 * i, 2 * j + 1) = -p(i, j).imag();
      r(2 * i + 1, 2 * j) = p(i, j).imag();
      r(2 * i + 1, 2 * j + 1) = p(i, j).real();
    }
  }
  return r;
}

// Residuals Re/Im(G_kl - G*_kl) for all k, l, then |a|^2 - 1, with the
// Jacobian over the interleaved real coordinates of a.
void residual_system(const BigVector& a, BigRealVector& r, BigMatrix& jac) {
  const int d = static_cast<int>(a.size());
  auto at = [&](int i) -> const BigComplex& { return a(((i % d) + d) % d); };
  const CMatrix<BigReal> target = fiducial_target<BigReal>(d);
  const int rows = 2 * d * d + 1;
  r.resize(rows);
  jac.resize(rows, 2 * d);
  const BigComplex i_unit(BigReal(0), BigReal(1));

  for (int k = 0; k < d; ++k) {
    for (int l = 0; l < d; ++l) {
      BigComplex g(0);
      for (int j = 0; j < d; ++j) g += at(j) * std::conj(at(j + k)) * std::conj(at(j + l)) * at(j + k + l);
      g -= target(k, l);
      const int row = 2 * (k * d + l);
      r(row) = g.real();
      r(row + 1) = g.imag();
      for (int m = 0; m < d; ++m) {
        const BigComplex holo = std::conj(at(m + k)) * std::conj(at(m + l)) * at(m + k + l) +
                                at(m - k - l) * std::conj(at(m - l)) * std::conj(at(m - k));
        const BigComplex anti = at(m - k) * std::conj(at(m - k + l)) * at(m + l) +
                                at(m - l) * std::conj(at(m - l + k)) * at(m + k);
        const BigComplex dx = holo + anti;
        const BigComplex dy = i_unit * (holo - anti);
        jac(row, 2 * m) = dx.real();
        jac(row + 1, 2 * m) = dx.imag();
        jac(row, 2 * m + 1) = dy.real();
        jac(row + 1, 2 * m + 1) = dy.imag();
      }
    }
  }
  r(rows - 1) = norm_squared(a) - 1;
  for (int m = 0; m < d; ++m) {
    jac(rows - 1, 2 * m) = 2 * a(m).real();
    jac(rows - 1, 2 * m + 1) = 2 * a(m).imag();
  }
}

// Orthonormal basis (columns) of the range of a real symmetric projector of
// known rank, by Gram-Schmidt with largest-residual column pivoting.
BigMatrix range_basis(const BigMatrix& projector, int rank) {
  const Eigen::Index n = projector.rows();
  BigMatrix basis(n, rank);
  BigMatrix residual = projector;
  for (int c = 0; c < rank; ++c) {
    Eigen::Index pivot = 0;
    BigReal best = -1;
    for (Eigen::Index j = 0; j < n; ++j) {
      const BigReal norm = residual.col(j).squaredNorm();
      if (norm > best) {
        best = norm;
        pivot = j;
      }
    }
    const BigRealVector q = residual.col(pivot) / sqrt(best);
    basis.col(c) = q;
    residual -= q * (q.transpose() * residual);
  }
  return basis;
}

BigVector shifted(const BigVector& a, const BigRealVector& delta, const BigReal& scale) {
  BigVector out(a.size());
  for (Eigen::Index m = 0; m < a.size(); ++m)
    out(m) = a(m) + BigComplex(scale * delta(2 * m), scale * delta(2 * m + 1));
  return normalized(out);
}

// One damped Gauss-Newton step (Levenberg-Marquardt with mu = |r|^2, which
// keeps quadratic convergence on non-isolated solution sets), restricted to
// the column span of `basis` when given, with the global-phase direction
// removed. Where the residual is quadratic in the distance to the solution
// (double roots, as for the d = 3 families) the Gauss-Newton step only goes
// halfway, so the doubled step is tried as well and the better one kept.
BigVector gauss_newton_step(const BigVector& a, const BigMatrix* basis) {
  const int d = static_cast<int>(a.size());
  BigRealVector r;
  BigMatrix jac;
  residual_system(a, r, jac);
  if (basis) jac = (jac * *basis).eval();

  BigMatrix normal = jac.transpose() * jac;
  const BigReal mu = r.squaredNorm();
  for (Eigen::Index i = 0; i < normal.rows(); ++i) normal(i, i) += mu;
  BigRealVector delta = normal.ldlt().solve(BigRealVector(-(jac.transpose() * r)));
  if (basis) delta = (*basis * delta).eval();

  BigRealVector phase(2 * d);  // i * a
  for (int m = 0; m < d; ++m) {
    phase(2 * m) = -a(m).imag();
    phase(2 * m + 1) = a(m).real();
  }
  delta -= (delta.dot(phase) / phase.squaredNorm()) * phase;

  BigVector single = shifted(a, delta, BigReal(1));
  BigVector twice = shifted(a, delta, BigReal(2));
  return residual_max_norm(twice) < residual_max_norm(single) ? twice : single;
}

std::string fixed_from_digits(bool negative, std::string body) {
  // body is an unsigned fixed-point string; zero prints with "+".
  const bool zero = body.find_first_not_of("0.") == std::string::npos;
  return (negative && !zero ? "-" : "+") + body;
}

RefineResult refine_locked(const BigVector& start, int start_digits, int target_digits, const RefineOptions& options) {
  const int d = static_cast<int>(start.size());
  RefineResult out;
  out.solution.dim = d;

  // Zauner eigenspace detection happens in double precision.
  if (options.zauner == RefineOptions::Zauner::automatic && d >= 3) {
    FiducialVector approx(d);
    for (int i = 0; i < d; ++i)
      approx(i) = {static_cast<double>(start(i).real()), static_cast<double>(start(i).imag())};
    approx.normalize();
    const ZaunerData<double> z = zauner_unitary<double>(d);
    double best = std::numeric_limits<double>::infinity();
    for (int m = 0; m < 3; ++m) {
      if (z.subspace_dims[m] == 0) continue;
      const double dist = (z.projectors[m] * approx - approx).norm();
      if (dist < best) {
        best = dist;
        out.zauner_subspace = m;
      }
    }
    if (best >= 1e-8) out.zauner_subspace = -1;
  }

  int digits = std::max(start_digits, 30);
  set_precision(digits);
  BigVector a = upgraded(start, digits);
  BigReal residual = residual_max_norm(a);
  out.log10_residual_history.push_back(log10_of(residual));

  BigVector best = a;
  double best_log = out.log10_residual_history.back();
  int failures = 0;
  const double goal = -static_cast<double>(target_digits);

  while (best_log >= goal && out.steps < options.max_steps) {
    // The full target precision from the first step: the residual can be
    // quadratic in the amplitude error (near vanishing amplitudes), so a
    // precision sized from the residual alone would under-resolve the vector.
    digits = std::max(target_digits + options.guard_digits, static_cast<int>(a(0).real().precision()));
    set_precision(digits);
    a = upgraded(best, digits);

    BigMatrix basis;
    const BigMatrix* basis_ptr = nullptr;
    if (out.zauner_subspace >= 0) {
      const ZaunerData<BigReal> z = zauner_unitary<BigReal>(d);
      const CMatrix<BigReal>& p = z.projectors[out.zauner_subspace];
      a = normalized(BigVector(p * a));
      basis = range_basis(real_form(p), 2 * z.subspace_dims[out.zauner_subspace]);
      basis_ptr = &basis;
    }

    a = gauss_newton_step(a, basis_ptr);
    ++out.steps;
    residual = residual_max_norm(a);
    const double now = log10_of(residual);
    out.log10_residual_history.push_back(now);
    out.precision_history.push_back(digits);

    // Inside the basin each step should roughly double the exponent; demand
    // at least a factor-two improvement and give up after repeated misses.
    if (now < best_log - std::log10(2.0)) {
      best = a;
      best_log = now;
      failures = 0;
    } else if (++failures >= 3) {
      out.diverged = true;
      out.message = "residual stopped shrinking at 1e" + std::to_string(static_cast<int>(std::floor(best_log))) +
                    "; input is probably not in a solution basin";
      break;
    }
  }

  out.solution.amplitudes = best;
  out.solution.working_precision = std::max(digits, target_digits);
  out.solution.amplitudes = upgraded(best, out.solution.working_precision);
  out.converged = best_log < goal;
  if (!out.converged && !out.diverged) out.message = "step budget exhausted";
  if (out.converged) out.message = "converged";
  return out;
}

void check_target(int target_digits) {
  if (target_digits < 1) throw std::invalid_argument("refine: target digits must be positive");
}

void check_accept(const FiducialVector& a) {
  const VerificationReport v = verify_sic(a, kAcceptTolerance);
  if (!v.passed)
    throw std::invalid_argument("refine: input fails verification at the accept tier (max deviation " +
                                std::to_string(v.max_sic_deviation) + ")");
}

}  // namespace

FiducialVector BigFiducial::to_double() const {
  FiducialVector a(amplitudes.size());
  for (Eigen::Index i = 0; i < amplitudes.size(); ++i)
    a(i) = {static_cast<double>(amplitudes(i).real()), static_cast<double>(amplitudes(i).imag())};
  return a;
}

std::vector<double> RefineResult::convergence_ratios() const {
  std::vector<double> ratios;
  for (std::size_t k = 0; k < precision_history.size() && k + 1 < log10_residual_history.size(); ++k) {
    const double before = log10_residual_history[k];
    const double after = log10_residual_history[k + 1];
    if (before >= -6.0 || !std::isfinite(after)) continue;
    // Results within a few digits of the step's working precision are clipped
    // by arithmetic, not by the method.
    if (after < 5.0 - precision_history[k]) continue;
    ratios.push_back(after / before);
  }
  return ratios;
}

BigReal residual_max_norm(const BigVector& a) {
  PrecisionLock lock(precision_mutex());
  set_precision(precision_of(a));
  const int d = static_cast<int>(a.size());
  const CMatrix<BigReal> diff = autocorrelation_matrix<BigReal>(a) - fiducial_target<BigReal>(d);
  BigReal worst = abs(norm_squared(a) - 1);
  for (Eigen::Index i = 0; i < diff.size(); ++i) {
    const BigReal mag = abs(diff(i));
    if (mag > worst) worst = mag;
  }
  return worst;
}

BigReal frame_error_big(const BigVector& input) {
  PrecisionLock lock(precision_mutex());
  set_precision(precision_of(input));
  const BigVector a = normalized(input);
  const CMatrix<BigReal> diff = autocorrelation_matrix<BigReal>(a) - fiducial_target<BigReal>(static_cast<int>(a.size()));
  BigReal sum = 0;
  for (Eigen::Index i = 0; i < diff.size(); ++i) sum += std::norm(diff(i));
  return sum;
}

std::string format_scientific(const BigReal& value, int significant) {
  PrecisionLock lock(precision_mutex());
  return value.str(significant, std::ios_base::scientific);
}

RefineResult refine(const FiducialVector& a, int target_digits, const RefineOptions& options) {
  check_target(target_digits);
  require_dimension(static_cast<int>(a.size()));
  if (options.check_precondition) check_accept(a);
  PrecisionLock lock(precision_mutex());
  set_precision(30);
  BigVector start(a.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) start(i) = BigComplex(BigReal(a(i).real()), BigReal(a(i).imag()));
  return refine_locked(start, 30, target_digits, options);
}

RefineResult refine(const BigFiducial& a, int target_digits, const RefineOptions& options) {
  check_target(target_digits);
  require_dimension(static_cast<int>(a.amplitudes.size()));
  if (options.check_precondition) check_accept(a.to_double());
  PrecisionLock lock(precision_mutex());
  return refine_locked(a.amplitudes, std::max(a.working_precision, 30), target_digits, options);
}

BigReal parse_big_real(const std::string& decimal, int digits) {
  PrecisionLock lock(precision_mutex());
  set_precision(std::max(digits + 10, 30));
  return BigReal(decimal);
}

BigFiducial make_big_fiducial(const FiducialVector& a, int digits) {
  PrecisionLock lock(precision_mutex());
  set_precision(digits);
  BigFiducial out;
  out.dim = static_cast<int>(a.size());
  out.working_precision = digits;
  out.amplitudes.resize(a.size());
  for (Eigen::Index i = 0; i < a.size(); ++i)
    out.amplitudes(i) = BigComplex(BigReal(a(i).real()), BigReal(a(i).imag()));
  return out;
}

std::string format_fixed(const BigReal& value, int digits) {
  PrecisionLock lock(precision_mutex());
  const BigReal magnitude = abs(value);
  return fixed_from_digits(value < 0, magnitude.str(digits, std::ios_base::fixed));
}

std::string format_fixed(double value, int digits) {
  char buffer[512];
  const auto res = std::to_chars(buffer, buffer + sizeof buffer, std::abs(value), std::chars_format::fixed, digits);
  if (res.ec != std::errc()) throw std::invalid_argument("format_fixed: value out of range");
  return fixed_from_digits(value < 0, std::string(buffer, res.ptr));
}

}  // namespace sic
