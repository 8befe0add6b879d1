#pragma once

// Independent checks of candidate fiducials. Everything here uses explicit
// operator matrices and literal sums (g_matrix_direct, f_matrix_direct), never
// the FFT pipeline that drives the search.

#include "sic/overlaps.hpp"
#include "sic/whgroup.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace sic {

/// "accept" tier for raw search output; "certify" tier after refinement.
inline constexpr double kAcceptTolerance = 1e-9;
inline constexpr double kCertifyTolerance = 1e-12;

struct NamedCheck {
  std::string name;       // e.g. "eq23_f_self_inverse"
  double magnitude = 0;   // largest violation found
  double tolerance = 0;
  bool passed = false;
  bool informational = false;  // not expected to hold for every SIC
};

struct VerificationReport {
  int dim = 0;
  double max_sic_deviation = 0;  // max over (beta,l) != (0,0) of |F - 1/(d+1)|
  double frame_error = 0;        // sum |G - G*|^2 from the direct G
  double g_deviation = 0;        // max |G - G*|
  double norm_deviation = 0;     // | |a| - 1 | of the input
  bool renormalized = false;
  std::vector<NamedCheck> symmetry_checks;
  double tolerance = 0;
  bool passed = false;  // max_sic_deviation <= tolerance

  const NamedCheck* find(const std::string& name) const;
};

/// Direct-method verification. Named checks: eq28_redundancies,
/// eq29_edge_bound, eq30_conjugate_columns, eq23_f_self_inverse (1e-11),
/// eq43_zauner_g_relation and zauner_eigenvector (informational).
VerificationReport verify_sic(const FiducialVector& a, double tolerance = kCertifyTolerance);

struct ZaunerCheck {
  std::array<double, 3> eigenvector_distance{};  // |P_m a - a| for m = 0, 1, 2
  int closest_subspace = 0;
  double g_relation_residual = 0;  // max_{kl} |Eq. (43) LHS - RHS|
  bool is_eigenvector(double tol = 1e-10) const { return eigenvector_distance[closest_subspace] < tol; }
};

ZaunerCheck verify_zauner(const FiducialVector& a, const ZaunerData<double>& z);

/// Max_{kl} |G_kl - (1/d) sum_{alpha,beta} w^{k alpha + l beta} G_{beta, alpha - l}|.
double zauner_g_relation_residual(const Eigen::MatrixXcd& g);

/// Max_{l m} |F_lm - (1/d) sum_{alpha,beta} w^{-alpha l + beta m} F_{beta alpha}|.
double f_self_inverse_residual(const Eigen::MatrixXd& f);

struct ColumnSums {
  std::vector<std::complex<double>> sums;  // sum_l G_lk for each column k
  std::vector<double> residuals;           // |sum_l G_lk - G_0k|; entry 0 is unused (0)
  double max_residual = 0;                 // over k != 0
  double max_imaginary = 0;                // over all k
};

ColumnSums column_sum_check(const GMatrix& g);

struct EquiangularityResult {
  bool is_equiangular = false;
  double common_value = 0;  // mean |<psi_j|psi_k>|^2 over pairs
  double max_spread = 0;    // max - min over pairs
};

/// Pairwise squared overlaps of unit vectors. Throws std::invalid_argument on
/// fewer than two vectors or mismatched dimensions.
EquiangularityResult equiangularity_direct(const std::vector<Eigen::VectorXcd>& vectors, double tolerance = 1e-9);

/// The d^2 vectors D_{l alpha} a, ordered l*d + alpha.
std::vector<Eigen::VectorXcd> weyl_heisenberg_orbit(const FiducialVector& a);

}  // namespace sic
