#pragma once

// Scalar objectives over real optimizer coordinates.
//
// Coordinates are 2d reals, interleaved (Re a_0, Im a_0, Re a_1, ...). They
// need not be normalized: every objective is evaluated on P x / |P x| where
// P is an optional projector (identity when absent), and gradients include
// the chain rule through both maps.

#include <Eigen/Dense>

namespace sic {

using RealParameterVector = Eigen::VectorXd;

Eigen::VectorXcd to_complex(const RealParameterVector& x);
RealParameterVector to_real(const Eigen::VectorXcd& a);

struct ObjectiveValue {
  /// sum_{kl} |[G]_{kl}|^2 - 2/(d+1) on the normalized vector.
  double frame_error = 0.0;
  /// d frame_error / dx; empty unless requested.
  Eigen::VectorXd gradient;
};

/// Frame error, optionally with its gradient. `projector` may be null.
///
/// For a unit vector sum_{kl} [G*]_{kl} [G]_{kl} = 2 (sum_j |a_j|^2)^2/(d+1),
/// so the gap to the lower bound equals sum_{kl} |[G] - [G*]|^2 with G* the
/// fiducial target. The value is computed in that form, which stays accurate
/// far below the double precision floor of the raw difference.
ObjectiveValue evaluate_frame_error(const RealParameterVector& x, const Eigen::MatrixXcd* projector,
                                    bool with_gradient);

ObjectiveValue frame_error(const RealParameterVector& x);
ObjectiveValue frame_error(const RealParameterVector& x, const Eigen::MatrixXcd& projector);
Eigen::VectorXd frame_error_gradient(const RealParameterVector& x);
Eigen::VectorXd frame_error_gradient(const RealParameterVector& x, const Eigen::MatrixXcd& projector);

/// Deviation of rows 0, 1, 2 of G from their fiducial values. Rows are taken
/// modulo d and deduplicated, so d = 2 uses rows {0, 1}.
struct RowsResidual {
  double value = 0.0;              // sum of |residuals|^2
  Eigen::VectorXcd residuals;      // [G]_{rc} - target, row-major over (row, column)
  Eigen::VectorXd gradient;        // empty unless requested
  int equation_count = 0;          // rows * d
};

RowsResidual rows012_residual(const RealParameterVector& x, const Eigen::MatrixXcd* projector = nullptr,
                              bool with_gradient = false);

}  // namespace sic
