#pragma once

// Overlap structure of a candidate fiducial: the sequences f^(l), the
// autocorrelation matrix G, the squared-overlap matrix F, and the projector
// bases generated by a fiducial's Weyl-Heisenberg orbit.
//
// Indexing follows [G]_{kl} (row k = correlation lag, column l = shift) and
// [F]_{beta l} (row beta = phase, column l = shift).

#include "sic/whgroup.hpp"

#include <Eigen/Dense>

#include <vector>

namespace sic {

using FiducialVector = Eigen::VectorXcd;

struct GMatrix {
  Eigen::MatrixXcd values;
  bool renormalized = false;  // input norm was off by more than 1e-12

  int dim() const { return static_cast<int>(values.rows()); }
};

struct FMatrix {
  Eigen::MatrixXd values;
  bool renormalized = false;

  int dim() const { return static_cast<int>(values.rows()); }
};

/// a / |a|. Throws on a zero vector. Sets *renormalized when |a| differs
/// from one by more than 1e-12.
FiducialVector normalize_fiducial(const FiducialVector& a, bool* renormalized = nullptr);

/// f^(l)_j = conj(a_j) a_{j+l}
Eigen::VectorXcd f_sequence(const FiducialVector& a, int l);

/// G by circular autocorrelation of each f^(l) through the FFT.
GMatrix g_matrix(const FiducialVector& a);

/// G by the literal O(d^3) sum; reference path.
GMatrix g_matrix_direct(const FiducialVector& a);

/// [F]_{beta l} = sum_k w^{-k beta} [G]_{kl}. Throws std::domain_error if the
/// transform leaves an imaginary part above 1e-9.
FMatrix f_from_g(const GMatrix& g);

/// [F]_{beta l} = |<a| X^l Z^beta |a>|^2 from explicit operator matrices.
FMatrix f_matrix_direct(const FiducialVector& a);

/// G of an exact fiducial: (delta_{k0} + delta_{l0}) / (d+1).
GMatrix sic_target_g(int d);

/// Pi_(l,alpha) = D_{l alpha} |a><a| D_{l alpha}^dagger, ordered by l*d + alpha.
std::vector<Eigen::MatrixXcd> projectors_from_fiducial(const FiducialVector& a);

/// Q^{+-}_j = +-sqrt(d+1) Pi_j + (1 -+ sqrt(d+1))/d I; `sign` is +1 or -1.
std::vector<Eigen::MatrixXcd> q_basis(const FiducialVector& a, int sign);

/// Literal triple sum for any scalar:
/// [G]_{kl} = sum_j a_j conj(a_{j+k}) conj(a_{j+l}) a_{j+k+l}.
/// Only k <= l is evaluated; the lower triangle is mirrored.
template <typename Scalar>
CMatrix<Scalar> autocorrelation_matrix(const CVector<Scalar>& a) {
  using std::conj;
  const int d = static_cast<int>(a.size());
  CMatrix<Scalar> g(d, d);
  for (int k = 0; k < d; ++k) {
    for (int l = k; l < d; ++l) {
      Complex<Scalar> sum(0);
      for (int j = 0; j < d; ++j)
        sum += a(j) * conj(a((j + k) % d)) * conj(a((j + l) % d)) * a((j + k + l) % d);
      g(k, l) = sum;
      g(l, k) = sum;
    }
  }
  return g;
}

template <typename Scalar>
CMatrix<Scalar> fiducial_target(int d) {
  require_dimension(d);
  CMatrix<Scalar> t = CMatrix<Scalar>::Zero(d, d);
  const Scalar inv = Scalar(1) / Scalar(d + 1);
  for (int i = 0; i < d; ++i) {
    t(0, i) += inv;
    t(i, 0) += inv;
  }
  return t;
}

}  // namespace sic
