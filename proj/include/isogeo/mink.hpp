#pragma once

// Minkowski 4-space with signature (-,+,+,+) and the sphere-geometric
// dictionary for isotropic 3-space sitting inside it.
//
// Points of isotropic 3-space (l, x, y) embed on the lightlike slice
// (l, x, y, l).  Oriented spheres of isotropic radius r are represented by
// the vector c + r*K_DUAL, oriented planes by a linear condition <., g> = q
// against a spacelike-normalisable lightlike vector g.  Two fixed lightlike
// directions drive everything:
//
//   K       = ( 1, 0, 0, 1)        isotropic point-sphere complex
//   K_DUAL  = (-1/2, 0, 0, 1/2)    complementary lightlike direction
//
// with <K,K> = <K_DUAL,K_DUAL> = 0 and <K,K_DUAL> = 1.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "isogeo/grid.hpp"

namespace isogeo {

struct MinkVec {
  double x0 = 0, x1 = 0, x2 = 0, x3 = 0;

  friend MinkVec operator+(const MinkVec& a, const MinkVec& b) {
    return {a.x0 + b.x0, a.x1 + b.x1, a.x2 + b.x2, a.x3 + b.x3};
  }
  friend MinkVec operator-(const MinkVec& a, const MinkVec& b) {
    return {a.x0 - b.x0, a.x1 - b.x1, a.x2 - b.x2, a.x3 - b.x3};
  }
  friend MinkVec operator*(double s, const MinkVec& a) {
    return {s * a.x0, s * a.x1, s * a.x2, s * a.x3};
  }
  MinkVec operator-() const { return {-x0, -x1, -x2, -x3}; }

  double max_abs() const {
    return std::max(std::max(std::abs(x0), std::abs(x1)),
                    std::max(std::abs(x2), std::abs(x3)));
  }
  bool finite() const {
    return std::isfinite(x0) && std::isfinite(x1) && std::isfinite(x2) &&
           std::isfinite(x3);
  }
};

inline double mink_inner(const MinkVec& a, const MinkVec& b) {
  return -a.x0 * b.x0 + a.x1 * b.x1 + a.x2 * b.x2 + a.x3 * b.x3;
}

// Compensated inner product (fma-exact products, Neumaier accumulation).
// Plain evaluation rounds each product at |term|*eps, which swamps small
// residuals of the null/orthogonality identities once the entries are large;
// this variant measures them at the underlying data's accuracy instead.
inline double mink_inner_comp(const MinkVec& a, const MinkVec& b) {
  double terms[4][2] = {{-a.x0, b.x0}, {a.x1, b.x1}, {a.x2, b.x2},
                        {a.x3, b.x3}};
  double sum = 0, comp = 0;
  for (auto& t : terms) {
    double p = t[0] * t[1];
    comp += std::fma(t[0], t[1], -p);  // exact product error
    double s = sum + p;
    comp += std::abs(sum) >= std::abs(p) ? (sum - s) + p : (p - s) + sum;
    sum = s;
  }
  return sum + comp;
}

inline constexpr MinkVec K{1, 0, 0, 1};
inline constexpr MinkVec K_DUAL{-0.5, 0, 0, 0.5};
// Euclidean point-sphere complex, kept for the radius comparison below.
inline constexpr MinkVec K_EUCLID{1, 0, 0, 0};

// ---------------------------------------------------------------------------
// Isotropic 3-space

struct IsoPoint {
  double l = 0, x = 0, y = 0;  // isotropic height first, then the base plane

  MinkVec embed() const { return {l, x, y, l}; }

  friend IsoPoint operator+(const IsoPoint& a, const IsoPoint& b) {
    return {a.l + b.l, a.x + b.x, a.y + b.y};
  }
  friend IsoPoint operator-(const IsoPoint& a, const IsoPoint& b) {
    return {a.l - b.l, a.x - b.x, a.y - b.y};
  }
  friend IsoPoint operator*(double s, const IsoPoint& a) {
    return {s * a.l, s * a.x, s * a.y};
  }
  double max_abs() const {
    return std::max(std::abs(l), std::max(std::abs(x), std::abs(y)));
  }
};

// Isotropic spheres are paraboloids of revolution about the l-direction:
// (x - c.x)^2 + (y - c.y)^2 = 2 r (l - c.l).  Negative r flips orientation;
// r = 0 degenerates to the point sphere at the apex.
struct SphereI {
  IsoPoint center;
  double radius = 0;
};

// Oriented plane <x, normal> = offset with lightlike normal; spacelike
// (non-isotropic) planes have <normal, K> != 0.
struct PlaneI {
  MinkVec normal;
  double offset = 0;
};

// Oriented line through base with lightlike direction dir; parametrises the
// pencil of spheres base + t*dir in oriented contact with a fixed plane
// element.
struct ContactLine {
  MinkVec base, dir;
};

class LightlikePlaneError : public std::runtime_error {
 public:
  LightlikePlaneError() : std::runtime_error(
      "plane has no spacelike representative (top coefficient vanishes)") {}
};

class IsotropicLineError : public std::runtime_error {
 public:
  IsotropicLineError() : std::runtime_error(
      "line direction pairs to zero against the point-sphere complex") {}
};

// ---------------------------------------------------------------------------
// Sphere <-> vector dictionary

inline MinkVec sphere_point(const SphereI& s) {
  return s.center.embed() + s.radius * K_DUAL;
}
inline MinkVec sphere_point(const IsoPoint& center, double radius) {
  return sphere_point(SphereI{center, radius});
}

inline double sphere_radius(const MinkVec& s) { return mink_inner(s, K); }

inline SphereI sphere_decompose(const MinkVec& s) {
  double r = sphere_radius(s);
  MinkVec c = s - r * K_DUAL;
  return {IsoPoint{c.x0, c.x1, c.x2}, r};
}

// Same vector read as a Euclidean oriented sphere: signed radius in the
// timelike slot, center in the spatial slots.
struct EuclidSphere {
  std::array<double, 3> center{};
  double radius = 0;
};

inline EuclidSphere euclid_sphere_decompose(const MinkVec& s) {
  return {{s.x1, s.x2, s.x3}, s.x0};
}

// Signed incidence defect of a point against an oriented isotropic sphere.
inline double sphere_residual(const SphereI& s, const IsoPoint& p) {
  double dx = p.x - s.center.x, dy = p.y - s.center.y;
  return dx * dx + dy * dy - 2.0 * s.radius * (p.l - s.center.l);
}

// ---------------------------------------------------------------------------
// Planes and contact

// Oriented plane a*l + b*x + c*y = q, a != 0, as a unit-speed graph normal
// in isotropic geometry: the returned point packs (slope-energy, -b/a, -c/a).
inline IsoPoint plane_unit_normal(double a, double b, double c) {
  if (a == 0.0) throw LightlikePlaneError{};
  double p = -b / a, q = -c / a;
  return {(p * p + q * q) / 2.0, p, q};
}

inline double oriented_contact_residual(const MinkVec& sphere,
                                        const PlaneI& plane) {
  return mink_inner(sphere, plane.normal) - plane.offset;
}

// The unique point sphere on a contact line: solve <base + t dir, K> = 0.
inline IsoPoint contact_point(const ContactLine& line) {
  double denom = mink_inner(line.dir, K);
  if (denom == 0.0) throw IsotropicLineError{};
  double t = -mink_inner(line.base, K) / denom;
  MinkVec s = line.base + t * line.dir;
  return {s.x0, s.x1, s.x2};
}

// ---------------------------------------------------------------------------
// Legendre (contact lift) residuals for a sampled line family.
//
// Writes each sample as a plane element (point ell = base, lightlike plane
// direction g = dir scaled to <g, K> = 1) and measures, over interior grid
// samples with second-order central differences:
//   contact    max |<d ell, g>|              (the lift stays tangent)
//   immersion  min over samples of the smaller singular value of d ell
//              projected to the screen space W = g-perp  intersect  K-perp
// The projection uses w = v - <v,K> g - <v,g> K, valid because g and K are
// both lightlike with <g,K> = 1.

struct LegendreResiduals {
  double contact = 0;
  double immersion = 0;
};

inline LegendreResiduals legendre_residuals(
    const GridSpec& grid, const std::vector<ContactLine>& lines) {
  grid.validate();
  if (static_cast<int>(lines.size()) != grid.size())
    throw std::invalid_argument("legendre_residuals: family size != grid");

  LegendreResiduals out;
  out.immersion = std::numeric_limits<double>::infinity();
  auto ell = [&](int iu, int iv) { return lines[grid.index(iu, iv)].base; };

  for (int iu = 1; iu + 1 < grid.nu; ++iu)
    for (int iv = 1; iv + 1 < grid.nv; ++iv) {
      const ContactLine& ln = lines[grid.index(iu, iv)];
      double scale = mink_inner(ln.dir, K);
      if (scale == 0.0) throw IsotropicLineError{};
      MinkVec g = (1.0 / scale) * ln.dir;

      MinkVec lu = grid_du<MinkVec>(ell, grid, iu, iv, 2);
      MinkVec lv = grid_dv<MinkVec>(ell, grid, iu, iv, 2);
      out.contact = std::max(
          out.contact,
          std::max(std::abs(mink_inner(lu, g)), std::abs(mink_inner(lv, g))));

      auto screen = [&](const MinkVec& vvec) {
        return vvec - mink_inner(vvec, K) * g - mink_inner(vvec, g) * K;
      };
      MinkVec wu = screen(lu), wv = screen(lv);
      double a = mink_inner(wu, wu), b = mink_inner(wu, wv),
             c = mink_inner(wv, wv);
      double lam_min = (a + c) / 2 - std::hypot((a - c) / 2, b);
      out.immersion =
          std::min(out.immersion, std::sqrt(std::max(0.0, lam_min)));
    }
  return out;
}

}  // namespace isogeo
