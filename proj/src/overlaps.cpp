#include "sic/overlaps.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <stdexcept>
#include <string>

namespace sic {

namespace {

constexpr double kNormSlack = 1e-12;
constexpr double kImaginaryLimit = 1e-9;

FiducialVector prepared(const FiducialVector& a, bool& renormalized) {
  require_dimension(static_cast<int>(a.size()));
  return normalize_fiducial(a, &renormalized);
}

}  // namespace

FiducialVector normalize_fiducial(const FiducialVector& a, bool* renormalized) {
  const double norm = a.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) throw std::invalid_argument("fiducial vector has zero or non-finite norm");
  const bool off = std::abs(norm - 1.0) > kNormSlack;
  if (renormalized) *renormalized = off;
  return off ? FiducialVector(a / norm) : a;
}

Eigen::VectorXcd f_sequence(const FiducialVector& a, int l) {
  const int d = static_cast<int>(a.size());
  if (l < 0 || l >= d) throw std::out_of_range("f_sequence: shift " + std::to_string(l) + " outside [0, d)");
  Eigen::VectorXcd f(d);
  for (int j = 0; j < d; ++j) f(j) = std::conj(a(j)) * a((j + l) % d);
  return f;
}

GMatrix g_matrix(const FiducialVector& input) {
  GMatrix g;
  const FiducialVector a = prepared(input, g.renormalized);
  const int d = static_cast<int>(a.size());

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> seq(d), spectrum, corr;
  g.values.resize(d, d);
  for (int l = 0; l < d; ++l) {
    for (int j = 0; j < d; ++j) seq[j] = std::conj(a(j)) * a((j + l) % d);
    fft.fwd(spectrum, seq);
    // Wiener-Khinchin: the autocorrelation is the inverse transform of the power spectrum.
    for (auto& c : spectrum) c = std::norm(c);
    fft.inv(corr, spectrum);
    // corr_k = sum_j conj(f_j) f_{j+k}, which is [G]_{kl}.
    for (int k = 0; k < d; ++k) g.values(k, l) = corr[k];
  }
  g.values = (0.5 * (g.values + g.values.transpose())).eval();
  return g;
}

GMatrix g_matrix_direct(const FiducialVector& input) {
  GMatrix g;
  const FiducialVector a = prepared(input, g.renormalized);
  g.values = autocorrelation_matrix<double>(a);
  return g;
}

FMatrix f_from_g(const GMatrix& g) {
  const int d = g.dim();
  require_dimension(d);
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> column(d), transformed;
  FMatrix f;
  f.renormalized = g.renormalized;
  f.values.resize(d, d);
  for (int l = 0; l < d; ++l) {
    for (int k = 0; k < d; ++k) column[k] = g.values(k, l);
    fft.fwd(transformed, column);
    for (int beta = 0; beta < d; ++beta) {
      if (std::abs(transformed[beta].imag()) > kImaginaryLimit)
        throw std::domain_error("f_from_g: imaginary residue " + std::to_string(transformed[beta].imag()) +
                                " at (" + std::to_string(beta) + ", " + std::to_string(l) + ")");
      f.values(beta, l) = transformed[beta].real();
    }
  }
  return f;
}

FMatrix f_matrix_direct(const FiducialVector& input) {
  FMatrix f;
  const FiducialVector a = prepared(input, f.renormalized);
  const int d = static_cast<int>(a.size());
  const Eigen::MatrixXcd x = shift_operator<double>(d);
  const Eigen::MatrixXcd z = phase_operator<double>(d);
  f.values.resize(d, d);
  Eigen::MatrixXcd xl = Eigen::MatrixXcd::Identity(d, d);
  for (int l = 0; l < d; ++l) {
    Eigen::MatrixXcd op = xl;
    for (int beta = 0; beta < d; ++beta) {
      f.values(beta, l) = std::norm(a.dot(op * a));
      op = (op * z).eval();
    }
    xl = (xl * x).eval();
  }
  return f;
}

GMatrix sic_target_g(int d) { return {fiducial_target<double>(d), false}; }

std::vector<Eigen::MatrixXcd> projectors_from_fiducial(const FiducialVector& input) {
  const FiducialVector a = normalize_fiducial(input);
  const int d = static_cast<int>(a.size());
  std::vector<Eigen::MatrixXcd> out;
  out.reserve(static_cast<std::size_t>(d) * d);
  for (int l = 0; l < d; ++l) {
    for (int alpha = 0; alpha < d; ++alpha) {
      const Eigen::VectorXcd v = MonomialOperator::displacement(d, l, alpha).apply<double>(a);
      out.emplace_back(v * v.adjoint());
    }
  }
  return out;
}

std::vector<Eigen::MatrixXcd> q_basis(const FiducialVector& a, int sign) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("q_basis: sign must be +1 or -1");
  const int d = static_cast<int>(a.size());
  const double root = std::sqrt(d + 1.0);
  const Eigen::MatrixXcd shift = Eigen::MatrixXcd::Identity(d, d) * ((1.0 - sign * root) / d);
  std::vector<Eigen::MatrixXcd> out = projectors_from_fiducial(a);
  for (auto& p : out) p = (sign * root) * p + shift;
  return out;
}

}  // namespace sic
