#pragma once

// Arbitrary-precision polishing of a double-precision fiducial by damped
// Gauss-Newton on the full G-matrix residual system, escalating precision as
// the residual shrinks.

#include "sic/overlaps.hpp"
#include "sic/whgroup.hpp"

#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <string>
#include <vector>

namespace sic {

/// MPFR float whose precision is set per value; expression templates are
/// off so Eigen sees an ordinary scalar.
using BigReal = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                              boost::multiprecision::et_off>;
using BigComplex = std::complex<BigReal>;
using BigVector = CVector<BigReal>;

struct BigFiducial {
  int dim = 0;
  BigVector amplitudes;
  int working_precision = 0;  // decimal digits

  FiducialVector to_double() const;
};

struct RefineOptions {
  enum class Zauner { automatic, off };
  /// automatic: if the input lies within 1e-8 of some Zauner eigenspace,
  /// re-project onto it at every stage.
  Zauner zauner = Zauner::automatic;
  int max_steps = 60;
  /// Extra decimal digits carried beyond what a stage needs.
  int guard_digits = 20;
  /// Skip the accept-tier verification precondition (expert use).
  bool check_precondition = true;
};

struct RefineResult {
  BigFiducial solution;  // last good iterate when not converged
  bool converged = false;
  bool diverged = false;
  std::string message;
  int steps = 0;
  int zauner_subspace = -1;
  /// log10 of the residual max-norm: the starting value, then one entry per
  /// Gauss-Newton step.
  std::vector<double> log10_residual_history;
  std::vector<int> precision_history;  // working digits of each step

  double log10_residual() const { return log10_residual_history.empty() ? 0.0 : log10_residual_history.back(); }
  /// log r_{k+1} / log r_k for consecutive steps that started inside the
  /// basin (r_k < 1e-6) and whose result was not clipped by the target.
  std::vector<double> convergence_ratios() const;
};

/// Polishes `a` until max(|G - G*|, | |a|^2 - 1 |) < 10^{-target_digits}.
/// Throws std::invalid_argument when target_digits < 1 or when the input
/// fails verify_sic at the accept tier (1e-9). Divergence is reported in the
/// result, never thrown.
RefineResult refine(const FiducialVector& a, int target_digits = 50, const RefineOptions& options = {});
RefineResult refine(const BigFiducial& a, int target_digits = 50, const RefineOptions& options = {});

/// max(|G - G*|_max, | |a|^2 - 1 |) in the precision of the amplitudes.
BigReal residual_max_norm(const BigVector& a);
/// sum |G - G*|^2 of a / |a| in the precision of the amplitudes.
BigReal frame_error_big(const BigVector& a);
std::string format_scientific(const BigReal& value, int significant);

/// Conversions that touch the process-wide MPFR default precision; they take
/// the same lock as refine.
BigReal parse_big_real(const std::string& decimal, int digits);
BigFiducial make_big_fiducial(const FiducialVector& a, int digits);
/// Signed fixed-point decimal ("+0.123", "-1.500") with exactly `digits`
/// fractional digits. Values that round to zero print with "+".
std::string format_fixed(const BigReal& value, int digits);
std::string format_fixed(double value, int digits);

}  // namespace sic
