#pragma once

// Hermitian 2x2 model of Minkowski 4-space:
//
//   (x0,x1,x2,x3)  ~  [[x0+x3, x1+i x2], [x1-i x2, x0-x3]],   <x,x> = -det X.
//
// SL(2,C) acts by X -> F X F*.  The stabiliser of the isotropic point-sphere
// complex (upper triangular, unimodular up to phase) is the isometry group of
// isotropic 3-space; spin factors B = [[alpha, conj(beta)], [0, conj(alpha)]]
// add the positive scaling that drives spin transformations.

#include <cmath>
#include <complex>

#include "isogeo/mink.hpp"

namespace isogeo {

struct Mat2C {
  cplx a{}, b{}, c{}, d{};  // [[a, b], [c, d]], row major

  static Mat2C identity() { return {1.0, 0.0, 0.0, 1.0}; }

  friend Mat2C operator*(const Mat2C& l, const Mat2C& r) {
    return {l.a * r.a + l.b * r.c, l.a * r.b + l.b * r.d,
            l.c * r.a + l.d * r.c, l.c * r.b + l.d * r.d};
  }
  friend Mat2C operator+(const Mat2C& l, const Mat2C& r) {
    return {l.a + r.a, l.b + r.b, l.c + r.c, l.d + r.d};
  }
  friend Mat2C operator-(const Mat2C& l, const Mat2C& r) {
    return {l.a - r.a, l.b - r.b, l.c - r.c, l.d - r.d};
  }
  friend Mat2C operator*(cplx s, const Mat2C& m) {
    return {s * m.a, s * m.b, s * m.c, s * m.d};
  }

  Mat2C adjoint() const {
    return {std::conj(a), std::conj(c), std::conj(b), std::conj(d)};
  }
  cplx det() const { return a * d - b * c; }
  Mat2C inverse() const {
    cplx dd = det();
    return {d / dd, -b / dd, -c / dd, a / dd};
  }
  double max_abs() const {
    return std::max(std::max(std::abs(a), std::abs(b)),
                    std::max(std::abs(c), std::abs(d)));
  }
};

// Hermitian matrix stored as four reals so Hermiticity is structural;
// off-diagonal entry is o (top right), conj(o) bottom left.
struct Herm2 {
  double d00 = 0, d11 = 0;
  cplx o{};

  Mat2C mat() const { return {d00, o, std::conj(o), d11}; }
  double det() const { return d00 * d11 - std::norm(o); }
};

inline Herm2 to_herm(const MinkVec& x) {
  return {x.x0 + x.x3, x.x0 - x.x3, {x.x1, x.x2}};
}

inline MinkVec from_herm(const Herm2& X) {
  return {(X.d00 + X.d11) / 2, X.o.real(), X.o.imag(), (X.d00 - X.d11) / 2};
}

// Hermitian part of an (in exact arithmetic already Hermitian) product;
// symmetrising scrubs roundoff asymmetry.
inline Herm2 hermitian_part(const Mat2C& m) {
  return {m.a.real(), m.d.real(), (m.b + std::conj(m.c)) * 0.5};
}

inline Herm2 act(const Mat2C& F, const Herm2& X) {
  return hermitian_part(F * X.mat() * F.adjoint());
}

// Membership defect for the isometry group of isotropic 3-space:
// unimodular and fixing the point-sphere complex diag(1,0).
inline double su101_residual(const Mat2C& F) {
  Mat2C e{1.0, 0.0, 0.0, 0.0};
  Mat2C defect = F * e * F.adjoint() - e;
  return std::max(std::abs(F.det() - 1.0), defect.max_abs());
}

inline Mat2C su101_from_params(double theta, double a, double b) {
  cplx phase = std::polar(1.0, theta);
  return {phase, cplx{a, b}, 0.0, std::conj(phase)};
}

// Group members also preserve diag(0,1) under the transposed action.
inline double fixed_form_residual(const Mat2C& F) {
  Mat2C e{0.0, 0.0, 0.0, 1.0};
  Mat2C defect = F.adjoint() * e * F - e;
  return defect.max_abs();
}

// ---------------------------------------------------------------------------

struct SpinFactor {
  cplx alpha{1.0};  // nonzero
  cplx beta{};

  Mat2C mat() const {
    return {alpha, std::conj(beta), 0.0, std::conj(alpha)};
  }
  double det() const { return std::norm(alpha); }
};

}  // namespace isogeo
