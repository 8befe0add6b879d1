#pragma once

// Closed-form fiducials in dimensions 2 and 3.

#include "sic/whgroup.hpp"

#include <cmath>

namespace sic {

/// Tetrahedral qubit fiducial: (sqrt(3+sqrt3), e^{i pi/4} sqrt(3-sqrt3)) / sqrt6.
template <typename Scalar = double>
CVector<Scalar> qubit_fiducial() {
  using std::sqrt;
  const Scalar s3 = sqrt(Scalar(3));
  const Scalar norm = sqrt(Scalar(6));
  CVector<Scalar> a(2);
  a(0) = Complex<Scalar>(sqrt(Scalar(3) + s3) / norm, Scalar(0));
  a(1) = root_of_unity<Scalar>(1, 8) * (sqrt(Scalar(3) - s3) / norm);
  return a;
}

/// Hesse fiducial (0, 1, -1) / sqrt2. Invariant under the whole Clifford group.
template <typename Scalar = double>
CVector<Scalar> hesse_fiducial() {
  using std::sqrt;
  const Scalar h = Scalar(1) / sqrt(Scalar(2));
  CVector<Scalar> a(3);
  a << Complex<Scalar>(0), Complex<Scalar>(h), Complex<Scalar>(-h);
  return a;
}

/// Norrell fiducial (0, 1, 1) / sqrt2.
template <typename Scalar = double>
CVector<Scalar> norrell_fiducial() {
  using std::sqrt;
  const Scalar h = Scalar(1) / sqrt(Scalar(2));
  CVector<Scalar> a(3);
  a << Complex<Scalar>(0), Complex<Scalar>(h), Complex<Scalar>(h);
  return a;
}

}  // namespace sic
