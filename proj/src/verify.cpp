#include "sic/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sic {

namespace {

using cd = std::complex<double>;

constexpr double kIdentityTolerance = 1e-12;  // relations that hold for every vector
constexpr double kSelfInverseTolerance = 1e-11;
constexpr double kZaunerTolerance = 1e-10;

int wrap(int i, int d) { return ((i % d) + d) % d; }

double redundancy_residual(const Eigen::MatrixXcd& g) {
  const int d = static_cast<int>(g.rows());
  double worst = 0;
  for (int k = 0; k < d; ++k) {
    for (int l = 0; l < d; ++l) {
      const double ref = std::abs(g(k, l));
      const std::array<std::pair<int, int>, 7> variants{{{-k, l}, {k, -l}, {-k, -l}, {l, k}, {-l, k}, {l, -k}, {-l, -k}}};
      for (auto [r, c] : variants) worst = std::max(worst, std::abs(std::abs(g(wrap(r, d), wrap(c, d))) - ref));
    }
  }
  return worst;
}

double edge_bound_violation(const Eigen::MatrixXcd& g) {
  const int d = static_cast<int>(g.rows());
  double worst = 0;
  for (int l = 0; l < d; ++l)
    for (int k = 0; k < d; ++k) worst = std::max(worst, std::abs(g(k, l)) - g(0, l).real());
  return worst;
}

double conjugate_column_residual(const Eigen::MatrixXcd& g) {
  const int d = static_cast<int>(g.rows());
  double worst = 0;
  for (int l = 0; l < d; ++l)
    for (int k = 0; k < d; ++k) worst = std::max(worst, std::abs(g(wrap(-k, d), l) - std::conj(g(k, l))));
  return worst;
}

NamedCheck make_check(std::string name, double magnitude, double tolerance, bool informational = false) {
  return {std::move(name), magnitude, tolerance, magnitude <= tolerance, informational};
}

}  // namespace

const NamedCheck* VerificationReport::find(const std::string& name) const {
  for (const auto& c : symmetry_checks)
    if (c.name == name) return &c;
  return nullptr;
}

double f_self_inverse_residual(const Eigen::MatrixXd& f) {
  const int d = static_cast<int>(f.rows());
  double worst = 0;
  for (int l = 0; l < d; ++l) {
    for (int m = 0; m < d; ++m) {
      cd sum = 0;
      for (int alpha = 0; alpha < d; ++alpha)
        for (int beta = 0; beta < d; ++beta)
          sum += root_of_unity<double>(-alpha * l + beta * m, d) * f(beta, alpha);
      worst = std::max(worst, std::abs(f(l, m) - sum / static_cast<double>(d)));
    }
  }
  return worst;
}

double zauner_g_relation_residual(const Eigen::MatrixXcd& g) {
  const int d = static_cast<int>(g.rows());
  double worst = 0;
  for (int k = 0; k < d; ++k) {
    for (int l = 0; l < d; ++l) {
      cd sum = 0;
      for (int alpha = 0; alpha < d; ++alpha)
        for (int beta = 0; beta < d; ++beta)
          sum += root_of_unity<double>(k * alpha + l * beta, d) * g(beta, wrap(alpha - l, d));
      worst = std::max(worst, std::abs(g(k, l) - sum / static_cast<double>(d)));
    }
  }
  return worst;
}

ZaunerCheck verify_zauner(const FiducialVector& input, const ZaunerData<double>& z) {
  const FiducialVector a = normalize_fiducial(input);
  if (a.size() != z.dim) throw std::invalid_argument("verify_zauner: dimension mismatch");
  ZaunerCheck out;
  for (int m = 0; m < 3; ++m) {
    out.eigenvector_distance[m] = (z.projectors[m] * a - a).norm();
    if (out.eigenvector_distance[m] < out.eigenvector_distance[out.closest_subspace]) out.closest_subspace = m;
  }
  out.g_relation_residual = zauner_g_relation_residual(g_matrix_direct(a).values);
  return out;
}

VerificationReport verify_sic(const FiducialVector& input, double tolerance) {
  require_dimension(static_cast<int>(input.size()));
  VerificationReport r;
  r.dim = static_cast<int>(input.size());
  r.tolerance = tolerance;
  r.norm_deviation = std::abs(input.norm() - 1.0);
  const FiducialVector a = normalize_fiducial(input, &r.renormalized);
  const int d = r.dim;
  const double inv = 1.0 / (d + 1);

  const FMatrix f = f_matrix_direct(a);
  for (int l = 0; l < d; ++l)
    for (int beta = 0; beta < d; ++beta)
      if (l != 0 || beta != 0) r.max_sic_deviation = std::max(r.max_sic_deviation, std::abs(f.values(beta, l) - inv));

  const Eigen::MatrixXcd g = g_matrix_direct(a).values;
  const Eigen::MatrixXcd diff = g - fiducial_target<double>(d);
  r.frame_error = diff.squaredNorm();
  r.g_deviation = diff.cwiseAbs().maxCoeff();

  r.symmetry_checks.push_back(make_check("eq28_redundancies", redundancy_residual(g), kIdentityTolerance));
  r.symmetry_checks.push_back(make_check("eq29_edge_bound", std::max(0.0, edge_bound_violation(g)), kIdentityTolerance));
  r.symmetry_checks.push_back(make_check("eq30_conjugate_columns", conjugate_column_residual(g), kIdentityTolerance));
  r.symmetry_checks.push_back(make_check("eq23_f_self_inverse", f_self_inverse_residual(f.values), kSelfInverseTolerance));

  // Zauner structure is a property of some fiducials only, so these checks
  // are reported but never decide the verdict.
  try {
    const ZaunerCheck zc = verify_zauner(a, zauner_unitary<double>(d));
    r.symmetry_checks.push_back(
        make_check("zauner_eigenvector", zc.eigenvector_distance[zc.closest_subspace], kZaunerTolerance, true));
    r.symmetry_checks.push_back(make_check("eq43_zauner_g_relation", zc.g_relation_residual, kZaunerTolerance, true));
  } catch (const std::exception&) {
    r.symmetry_checks.push_back({"zauner_eigenvector", std::numeric_limits<double>::quiet_NaN(), kZaunerTolerance,
                                 false, true});
  }

  r.passed = r.max_sic_deviation <= tolerance;
  return r;
}

ColumnSums column_sum_check(const GMatrix& gm) {
  const Eigen::MatrixXcd& g = gm.values;
  const int d = static_cast<int>(g.rows());
  ColumnSums out;
  out.sums.resize(d);
  out.residuals.assign(d, 0.0);
  for (int k = 0; k < d; ++k) {
    out.sums[k] = g.col(k).sum();
    out.max_imaginary = std::max(out.max_imaginary, std::abs(out.sums[k].imag()));
    if (k == 0) continue;
    out.residuals[k] = std::abs(out.sums[k] - g(0, k));
    out.max_residual = std::max(out.max_residual, out.residuals[k]);
  }
  return out;
}

EquiangularityResult equiangularity_direct(const std::vector<Eigen::VectorXcd>& vectors, double tolerance) {
  if (vectors.size() < 2) throw std::invalid_argument("equiangularity_direct: need at least two vectors");
  const Eigen::Index d = vectors.front().size();
  for (const auto& v : vectors)
    if (v.size() != d) throw std::invalid_argument("equiangularity_direct: dimension mismatch");
  double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    for (std::size_t j = i + 1; j < vectors.size(); ++j) {
      const double overlap = std::norm(vectors[i].dot(vectors[j]));
      lo = std::min(lo, overlap);
      hi = std::max(hi, overlap);
      sum += overlap;
      ++pairs;
    }
  }
  EquiangularityResult r;
  r.common_value = sum / static_cast<double>(pairs);
  r.max_spread = hi - lo;
  r.is_equiangular = r.max_spread <= tolerance;
  return r;
}

std::vector<Eigen::VectorXcd> weyl_heisenberg_orbit(const FiducialVector& a) {
  const int d = static_cast<int>(a.size());
  std::vector<Eigen::VectorXcd> out;
  out.reserve(static_cast<std::size_t>(d) * d);
  for (int l = 0; l < d; ++l)
    for (int alpha = 0; alpha < d; ++alpha) out.push_back(MonomialOperator::displacement(d, l, alpha).apply<double>(a));
  return out;
}

}  // namespace sic
