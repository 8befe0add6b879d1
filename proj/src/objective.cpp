#include "sic/objective.hpp"

#include "sic/overlaps.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace sic {

namespace {

using cd = std::complex<double>;

struct Prepared {
  Eigen::VectorXcd a;  // unit vector the objective is evaluated on
  double norm = 0.0;   // |P y|
};

void check_coordinates(const RealParameterVector& x) {
  if (x.size() < 4 || x.size() % 2 != 0)
    throw std::invalid_argument("parameter vector must hold 2d reals with d >= 2");
  if (!x.allFinite()) throw std::invalid_argument("parameter vector has non-finite entries");
}

Prepared prepare(const RealParameterVector& x, const Eigen::MatrixXcd* projector) {
  check_coordinates(x);
  const Eigen::VectorXcd y = to_complex(x);
  const double input_norm = y.norm();
  if (input_norm == 0.0) throw std::invalid_argument("zero parameter vector");
  Eigen::VectorXcd z = projector ? Eigen::VectorXcd(*projector * y) : y;
  const double n = z.norm();
  if (n <= 1e-14 * input_norm)
    throw std::invalid_argument("vector vanishes under the projector; eigenspace mismatch");
  return {z / n, n};
}

// Real gradient with respect to the raw coordinates, given the real gradient
// (packed as complex) with respect to the unit vector a.
RealParameterVector pull_back(const Prepared& p, const Eigen::VectorXcd& grad_a, const Eigen::MatrixXcd* projector) {
  const double radial = p.a.dot(grad_a).real();
  Eigen::VectorXcd grad_z = (grad_a - radial * p.a) / p.norm;
  if (projector) grad_z = projector->adjoint() * grad_z;
  return to_real(grad_z);
}

}  // namespace

Eigen::VectorXcd to_complex(const RealParameterVector& x) {
  const Eigen::Index d = x.size() / 2;
  Eigen::VectorXcd a(d);
  for (Eigen::Index j = 0; j < d; ++j) a(j) = cd(x(2 * j), x(2 * j + 1));
  return a;
}

RealParameterVector to_real(const Eigen::VectorXcd& a) {
  RealParameterVector x(2 * a.size());
  for (Eigen::Index j = 0; j < a.size(); ++j) {
    x(2 * j) = a(j).real();
    x(2 * j + 1) = a(j).imag();
  }
  return x;
}

ObjectiveValue evaluate_frame_error(const RealParameterVector& x, const Eigen::MatrixXcd* projector,
                                    bool with_gradient) {
  const Prepared p = prepare(x, projector);
  const Eigen::VectorXcd& a = p.a;
  const int d = static_cast<int>(a.size());
  const double inv = 1.0 / (d + 1);

  thread_local Eigen::FFT<double> fft;
  std::vector<cd> f(d), spectrum, buffer, weighted(d);
  Eigen::VectorXcd wirtinger = Eigen::VectorXcd::Zero(d);  // d S / d conj(a)

  ObjectiveValue out;
  double error = 0.0;
  for (int l = 0; l < d; ++l) {
    for (int j = 0; j < d; ++j) f[j] = std::conj(a(j)) * a((j + l) % d);
    fft.fwd(spectrum, f);
    std::vector<double> power(d);
    for (int b = 0; b < d; ++b) power[b] = std::norm(spectrum[b]);

    std::vector<cd> power_c(power.begin(), power.end());
    fft.inv(buffer, power_c);
    for (int k = 0; k < d; ++k) {
      const double target = (k == 0 ? inv : 0.0) + (l == 0 ? inv : 0.0);
      error += std::norm(buffer[k] - target);
    }

    if (!with_gradient) continue;
    // S = (1/d) sum F^2 with F = |c|^2, c_b = sum_j conj(a_j) a_{j+l} w^{-jb}.
    for (int b = 0; b < d; ++b) weighted[b] = power[b] * std::conj(spectrum[b]);
    fft.fwd(buffer, weighted);
    for (int m = 0; m < d; ++m) wirtinger(m) += a((m + l) % d) * buffer[m];
    for (int b = 0; b < d; ++b) weighted[b] = power[b] * spectrum[b];
    fft.inv(buffer, weighted);
    for (int m = 0; m < d; ++m) {
      const int shifted = (m - l + d) % d;
      wirtinger(m) += a(shifted) * (static_cast<double>(d) * buffer[shifted]);
    }
  }
  out.frame_error = error;

  if (with_gradient) {
    // Real gradient is twice the Wirtinger derivative; S carries a 2/d prefactor.
    const Eigen::VectorXcd grad_a = wirtinger * (4.0 / d);
    out.gradient = pull_back(p, grad_a, projector);
  }
  return out;
}

ObjectiveValue frame_error(const RealParameterVector& x) { return evaluate_frame_error(x, nullptr, false); }

ObjectiveValue frame_error(const RealParameterVector& x, const Eigen::MatrixXcd& projector) {
  return evaluate_frame_error(x, &projector, false);
}

Eigen::VectorXd frame_error_gradient(const RealParameterVector& x) {
  return evaluate_frame_error(x, nullptr, true).gradient;
}

Eigen::VectorXd frame_error_gradient(const RealParameterVector& x, const Eigen::MatrixXcd& projector) {
  return evaluate_frame_error(x, &projector, true).gradient;
}

RowsResidual rows012_residual(const RealParameterVector& x, const Eigen::MatrixXcd* projector, bool with_gradient) {
  const Prepared p = prepare(x, projector);
  const Eigen::VectorXcd& a = p.a;
  const int d = static_cast<int>(a.size());
  const double inv = 1.0 / (d + 1);
  auto at = [&](int i) { return a(((i % d) + d) % d); };

  std::vector<int> rows;
  for (int r : {0, 1, 2})
    if (std::find(rows.begin(), rows.end(), r % d) == rows.end()) rows.push_back(r % d);

  RowsResidual out;
  out.equation_count = static_cast<int>(rows.size()) * d;
  out.residuals.resize(out.equation_count);
  Eigen::VectorXcd wirtinger = Eigen::VectorXcd::Zero(d);

  for (std::size_t ri = 0; ri < rows.size(); ++ri) {
    const int r = rows[ri];
    for (int c = 0; c < d; ++c) {
      cd g = 0.0;
      for (int j = 0; j < d; ++j) g += at(j) * std::conj(at(j + r)) * std::conj(at(j + c)) * at(j + r + c);
      const double target = (r == 0 ? inv : 0.0) + (c == 0 ? inv : 0.0);
      const cd e = g - target;
      out.residuals(static_cast<Eigen::Index>(ri) * d + c) = e;
      out.value += std::norm(e);

      if (!with_gradient) continue;
      for (int m = 0; m < d; ++m) {
        const cd dg_dconj = at(m - r) * std::conj(at(m - r + c)) * at(m + c) +
                            at(m - c) * std::conj(at(m - c + r)) * at(m + r);
        const cd dg_d = std::conj(at(m + r)) * std::conj(at(m + c)) * at(m + r + c) +
                        at(m - r - c) * std::conj(at(m - c)) * std::conj(at(m - r));
        wirtinger(m) += std::conj(e) * dg_dconj + e * std::conj(dg_d);
      }
    }
  }

  if (with_gradient) out.gradient = pull_back(p, 2.0 * wirtinger, projector);
  return out;
}

}  // namespace sic
