#pragma once

// Weyl-Heisenberg displacement operators, Clifford unitaries realized from
// symplectic data, and the order-3 Zauner unitary with its eigenprojectors.
//
// Everything here is templated on the real scalar so the same construction
// serves double precision search and multi-precision refinement.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <compare>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace sic {

template <typename Scalar>
using Complex = std::complex<Scalar>;
template <typename Scalar>
using CMatrix = Eigen::Matrix<Complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using CVector = Eigen::Matrix<Complex<Scalar>, Eigen::Dynamic, 1>;

/// Non-negative residue of `value` modulo `n`.
constexpr long long mod(long long value, long long n) {
  const long long r = value % n;
  return r < 0 ? r + n : r;
}

inline void require_dimension(int d) {
  if (d < 2) throw std::invalid_argument("dimension must be at least 2, got " + std::to_string(d));
}

/// e^{2 pi i k / n}. Quarter turns are returned exactly.
template <typename Scalar>
Complex<Scalar> root_of_unity(long long k, long long n) {
  using std::acos;
  using std::cos;
  using std::sin;
  const long long r = mod(k, n);
  if (r == 0) return {Scalar(1), Scalar(0)};
  if (2 * r == n) return {Scalar(-1), Scalar(0)};
  if (4 * r == n) return {Scalar(0), Scalar(1)};
  if (4 * r == 3 * n) return {Scalar(0), Scalar(-1)};
  const Scalar angle = Scalar(2) * acos(Scalar(-1)) * Scalar(r) / Scalar(n);
  return {cos(angle), sin(angle)};
}

/// Exponent n with tau^n = e^{i pi k / d}, where tau = -e^{i pi / d}.
/// All Weyl-Heisenberg phases are powers of e^{i pi / d}; they are tracked
/// as integers modulo 2d and only turned into scalars at the end.
constexpr long long tau_power_to_half_turns(long long n, int d) { return mod(n * (d + 1), 2LL * d); }

/// Label (l, alpha) of D_{l alpha} = tau^{l alpha} X^l Z^alpha, reduced to [0, d).
struct DisplacementIndex {
  int l = 0;
  int alpha = 0;
  int d = 2;

  DisplacementIndex() = default;
  DisplacementIndex(long long shift, long long phase, int dim)
      : l(static_cast<int>(mod(shift, dim))), alpha(static_cast<int>(mod(phase, dim))), d(dim) {
    require_dimension(dim);
  }

  friend DisplacementIndex operator+(const DisplacementIndex& a, const DisplacementIndex& b) {
    if (a.d != b.d) throw std::invalid_argument("displacement indices from different dimensions");
    return {a.l + b.l, a.alpha + b.alpha, a.d};
  }
  DisplacementIndex operator-() const { return {-l, -alpha, d}; }
  friend DisplacementIndex operator-(const DisplacementIndex& a, const DisplacementIndex& b) { return a + (-b); }
  friend bool operator==(const DisplacementIndex&, const DisplacementIndex&) = default;
  friend auto operator<=>(const DisplacementIndex&, const DisplacementIndex&) = default;

  int flat() const { return l * d + alpha; }
};

/// Phase-times-permutation operator: e_j -> e^{i pi phase[j] / d} e_{target[j]}.
/// Shift, phase and displacement operators (and their products) all have
/// this form, so products and eigenvectors can be computed exactly.
struct MonomialOperator {
  int d = 2;
  std::vector<int> target;
  std::vector<long long> phase;  // in units of e^{i pi / d}, reduced mod 2d

  static MonomialOperator identity(int d) {
    MonomialOperator m{d, std::vector<int>(d), std::vector<long long>(d, 0)};
    for (int j = 0; j < d; ++j) m.target[j] = j;
    return m;
  }

  /// D for an unreduced integer label: the phase tau^{l alpha} depends on the
  /// label modulo 2d, which matters in even dimensions.
  static MonomialOperator displacement(int d, long long l, long long alpha) {
    require_dimension(d);
    MonomialOperator m{d, std::vector<int>(d), std::vector<long long>(d)};
    const long long base = tau_power_to_half_turns(mod(l, 2LL * d) * mod(alpha, 2LL * d), d);
    for (int j = 0; j < d; ++j) {
      m.target[j] = static_cast<int>(mod(j + l, d));
      m.phase[j] = mod(base + 2 * mod(alpha, d) * j, 2LL * d);
    }
    return m;
  }

  /// (*this) * rhs
  MonomialOperator operator*(const MonomialOperator& rhs) const {
    MonomialOperator out{d, std::vector<int>(d), std::vector<long long>(d)};
    for (int j = 0; j < d; ++j) {
      const int mid = rhs.target[j];
      out.target[j] = target[mid];
      out.phase[j] = mod(rhs.phase[j] + phase[mid], 2LL * d);
    }
    return out;
  }

  template <typename Scalar>
  CMatrix<Scalar> matrix() const {
    CMatrix<Scalar> m = CMatrix<Scalar>::Zero(d, d);
    for (int j = 0; j < d; ++j) m(target[j], j) = root_of_unity<Scalar>(phase[j], 2LL * d);
    return m;
  }

  template <typename Scalar>
  CVector<Scalar> apply(const CVector<Scalar>& v) const {
    CVector<Scalar> out(d);
    for (int j = 0; j < d; ++j) out(target[j]) = root_of_unity<Scalar>(phase[j], 2LL * d) * v(j);
    return out;
  }
};

/// Cyclic shift X: X e_j = e_{j+1 mod d}.
template <typename Scalar = double>
CMatrix<Scalar> shift_operator(int d) {
  return MonomialOperator::displacement(d, 1, 0).matrix<Scalar>();
}

/// Clock Z = diag(1, w, ..., w^{d-1}) with w = e^{2 pi i / d}.
template <typename Scalar = double>
CMatrix<Scalar> phase_operator(int d) {
  return MonomialOperator::displacement(d, 0, 1).matrix<Scalar>();
}

template <typename Scalar = double>
CMatrix<Scalar> displacement(const DisplacementIndex& idx) {
  return MonomialOperator::displacement(idx.d, idx.l, idx.alpha).matrix<Scalar>();
}

/// D_a D_b = phase * D_{a+b}, with a+b reduced to [0, d).
struct Composition {
  DisplacementIndex index;
  long long half_turns = 0;  // phase = e^{i pi half_turns / d}

  template <typename Scalar = double>
  Complex<Scalar> phase() const {
    return root_of_unity<Scalar>(half_turns, 2LL * index.d);
  }
};

inline Composition compose_indices(const DisplacementIndex& a, const DisplacementIndex& b) {
  if (a.d != b.d) throw std::invalid_argument("compose_indices: dimension mismatch");
  const int d = a.d;
  const long long raw_l = a.l + b.l;
  const long long raw_alpha = a.alpha + b.alpha;
  const DisplacementIndex sum{raw_l, raw_alpha, d};
  // tau^{alpha m - beta l} from the composition law, plus the correction
  // between the unreduced label a+b and its reduction.
  const long long tau_exp = static_cast<long long>(a.alpha) * b.l - static_cast<long long>(b.alpha) * a.l +
                            raw_l * raw_alpha - static_cast<long long>(sum.l) * sum.alpha;
  return {sum, tau_power_to_half_turns(mod(tau_exp, 2LL * d), d)};
}

/// 2x2 integer matrix acting on displacement labels. Entries are kept as an
/// integer lift modulo 2d (row-major [[a, b], [c, e]]); the group element is
/// its reduction modulo d.
struct SymplecticMatrix {
  std::array<long long, 4> lift{1, 0, 0, 1};
  int d = 2;

  SymplecticMatrix() = default;
  SymplecticMatrix(std::array<long long, 4> entries, int dim) : d(dim) {
    require_dimension(dim);
    for (int i = 0; i < 4; ++i) lift[i] = mod(entries[i], 2LL * dim);
  }

  static SymplecticMatrix identity(int d) { return {{1, 0, 0, 1}, d}; }

  /// Entry reduced modulo d.
  long long operator()(int row, int col) const { return mod(lift[2 * row + col], d); }
  long long determinant() const { return mod((*this)(0, 0) * (*this)(1, 1) - (*this)(0, 1) * (*this)(1, 0), d); }
  bool is_symplectic() const { return determinant() == 1; }

  DisplacementIndex apply(const DisplacementIndex& u) const {
    return {(*this)(0, 0) * u.l + (*this)(0, 1) * u.alpha, (*this)(1, 0) * u.l + (*this)(1, 1) * u.alpha, d};
  }

  friend SymplecticMatrix operator*(const SymplecticMatrix& x, const SymplecticMatrix& y) {
    const auto& a = x.lift;
    const auto& b = y.lift;
    return {{a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]},
            x.d};
  }

  /// Equality of the group elements (reduction modulo d).
  friend bool operator==(const SymplecticMatrix& x, const SymplecticMatrix& y) {
    if (x.d != y.d) return false;
    for (int i = 0; i < 4; ++i)
      if (mod(x.lift[i], x.d) != mod(y.lift[i], y.d)) return false;
    return true;
  }
};

/// (m, n) -> (-n, m - n). Order three, even over the integers.
inline SymplecticMatrix zauner_symplectic(int d) { return {{0, -1, 1, -1}, d}; }

/// Extended Clifford group element: v -> realized * (conjugate ? conj(v) : v).
/// `realized` already includes the translation D_translation on the left.
template <typename Scalar = double>
struct CliffordElement {
  SymplecticMatrix symplectic;
  DisplacementIndex translation;
  bool conjugate = false;
  CMatrix<Scalar> realized;

  CVector<Scalar> apply(const CVector<Scalar>& v) const {
    if (conjugate) return realized * v.conjugate();
    return realized * v;
  }
};

namespace detail {

// Unit eigenvector of a monomial operator for eigenvalue 1, as exact phase
// exponents on the support (-1 marks a zero entry). Returns the cycle length.
inline int fixed_vector(const MonomialOperator& op, std::vector<long long>& exponents) {
  const int d = op.d;
  std::vector<bool> seen(d, false);
  for (int start = 0; start < d; ++start) {
    if (seen[start]) continue;
    std::vector<int> cycle;
    long long total = 0;
    for (int j = start; !seen[j]; j = op.target[j]) {
      seen[j] = true;
      cycle.push_back(j);
      total += op.phase[j];
    }
    if (mod(total, 2LL * d) != 0) continue;
    exponents.assign(d, -1);
    long long e = 0;
    for (int j : cycle) {
      exponents[j] = e;
      e = mod(e + op.phase[j], 2LL * d);
    }
    return static_cast<int>(cycle.size());
  }
  return 0;
}

template <typename Scalar>
Scalar max_abs(const CMatrix<Scalar>& m) {
  using std::abs;
  Scalar best(0);
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const Scalar v = abs(m.data()[i]);
    if (v > best) best = v;
  }
  return best;
}

}  // namespace detail

/// Max over the generators X, Z of the distance between R D R^dagger and the
/// best phase multiple of D_{F e}.
template <typename Scalar>
Scalar intertwining_error(const CMatrix<Scalar>& realized, const SymplecticMatrix& f) {
  using std::abs;
  const int d = f.d;
  Scalar worst(0);
  for (const DisplacementIndex e : {DisplacementIndex{1, 0, d}, DisplacementIndex{0, 1, d}}) {
    const CMatrix<Scalar> image = realized * displacement<Scalar>(e) * realized.adjoint();
    const CMatrix<Scalar> expected = displacement<Scalar>(f.apply(e));
    const Complex<Scalar> phase = (expected.adjoint() * image).trace() / Scalar(d);
    const CMatrix<Scalar> diff = image - phase * expected;
    const Scalar err = detail::max_abs<Scalar>(diff) + abs(abs(phase) - Scalar(1));
    if (err > worst) worst = err;
  }
  return worst;
}

/// Unitary V with V D_u V^dagger proportional to D_{F u}, composed on the left
/// with D_translation.
///
/// The constraints V X = D_{F e1} V and V Z = D_{F e2} V force the columns of V
/// to be v_j = D_{F e1}^j v_0 with v_0 spanning the kernel of D_{F e2} - I.
/// Both operators are monomial, so the kernel is read off exactly from the
/// cycle whose phase product is one.
template <typename Scalar = double>
CliffordElement<Scalar> clifford_from_symplectic(int d, const SymplecticMatrix& f,
                                                 const DisplacementIndex& translation) {
  using std::sqrt;
  require_dimension(d);
  if (f.d != d || translation.d != d) throw std::invalid_argument("clifford_from_symplectic: dimension mismatch");
  if (!f.is_symplectic())
    throw std::invalid_argument("clifford_from_symplectic: determinant is " + std::to_string(f.determinant()) +
                                " mod " + std::to_string(d) + ", expected 1");

  const MonomialOperator image_x = MonomialOperator::displacement(d, f.lift[0], f.lift[2]);
  const MonomialOperator image_z = MonomialOperator::displacement(d, f.lift[1], f.lift[3]);

  std::vector<long long> column;
  const int support = detail::fixed_vector(image_z, column);
  if (support == 0) throw std::runtime_error("clifford_from_symplectic: intertwining system has no solution");

  CMatrix<Scalar> v = CMatrix<Scalar>::Zero(d, d);
  const Scalar scale = Scalar(1) / sqrt(Scalar(support));
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < d; ++i)
      if (column[i] >= 0) v(i, j) = scale * root_of_unity<Scalar>(column[i], 2LL * d);
    std::vector<long long> next(d, -1);
    for (int i = 0; i < d; ++i)
      if (column[i] >= 0) next[image_x.target[i]] = mod(column[i] + image_x.phase[i], 2LL * d);
    column.swap(next);
  }

  if constexpr (std::is_floating_point_v<Scalar>) {
    // Polar factor; removes rounding drift from the constructed columns.
    Eigen::JacobiSVD<CMatrix<Scalar>> svd(v, Eigen::ComputeFullU | Eigen::ComputeFullV);
    v = svd.matrixU() * svd.matrixV().adjoint();
  }

  CliffordElement<Scalar> out;
  out.symplectic = f;
  out.translation = translation;
  out.realized = MonomialOperator::displacement(d, translation.l, translation.alpha).matrix<Scalar>() * v;

  if (intertwining_error<Scalar>(out.realized, f) > Scalar(1e-10))
    throw std::runtime_error("clifford_from_symplectic: realized unitary fails the intertwining check");
  return out;
}

template <typename Scalar = double>
CliffordElement<Scalar> clifford_from_symplectic(int d, const SymplecticMatrix& f) {
  return clifford_from_symplectic<Scalar>(d, f, DisplacementIndex{0, 0, d});
}

template <typename Scalar = double>
struct ZaunerData {
  int dim = 0;
  CMatrix<Scalar> unitary;
  std::array<Complex<Scalar>, 3> eigenvalues;
  std::array<CMatrix<Scalar>, 3> projectors;
  std::array<int, 3> subspace_dims{0, 0, 0};
};

/// Zauner unitary rescaled so that U^3 = I, with P_m = (1/3) sum_j lambda_m^{-j} U^j.
template <typename Scalar = double>
ZaunerData<Scalar> zauner_unitary(int d) {
  using std::acos;
  using std::arg;
  using std::conj;
  using std::polar;
  using std::real;

  CMatrix<Scalar> u = clifford_from_symplectic<Scalar>(d, zauner_symplectic(d)).realized;
  const CMatrix<Scalar> cube = u * u * u;
  // Pin the branch of arg at -pi to +pi so every scalar type picks the same
  // cube root; otherwise eigenvalue labels could differ between precisions.
  Scalar theta = arg(cube(0, 0));
  const Scalar pi = acos(Scalar(-1));
  if (static_cast<double>(theta) < -3.14159265) theta += 2 * pi;
  u *= polar(Scalar(1), -theta / Scalar(3));

  const CMatrix<Scalar> identity = CMatrix<Scalar>::Identity(d, d);
  const CMatrix<Scalar> u2 = u * u;
  if (detail::max_abs<Scalar>(CMatrix<Scalar>(u2 * u - identity)) > Scalar(1e-10))
    throw std::runtime_error("zauner_unitary: cube of the realized unitary is not a multiple of the identity");

  ZaunerData<Scalar> z;
  z.dim = d;
  z.unitary = u;
  for (int m = 0; m < 3; ++m) {
    const Complex<Scalar> lambda = root_of_unity<Scalar>(m, 3);
    const Complex<Scalar> inv = conj(lambda);
    z.eigenvalues[m] = lambda;
    z.projectors[m] = (identity + inv * u + inv * inv * u2) / Scalar(3);
    z.subspace_dims[m] = static_cast<int>(llround(static_cast<double>(real(z.projectors[m].trace()))));
  }
  return z;
}

}  // namespace sic
