#pragma once

// Generators: surfaces from holomorphic/meromorphic data.
//
//   weierstrass_surface  - minimal (H = 0) patches from (h, omega), with
//                          x_z = (h omega, omega, -i omega)/2.
//   kenmotsu_surface     - constant-H patches from (H, h2, omega); the
//                          auxiliary potential h1 solves dh1 = H omega dz.
//   spinor_surface       - patches from (alpha, beta) with beta split as
//                          beta_h(z) * conj(beta_ah(z)); the compatibility
//                          test Im(alpha beta_zbar) = 0 gates integration.
//
// Plus the worked closed-form catalogue (sphere, cylinder, Delaunay-type,
// singly-periodic) with predicted representation fields, the Gauss-map
// parameter h with its null lift, and exact period bookkeeping for the
// singly-periodic family.

#include <string>
#include <utility>
#include <vector>

#include "isogeo/expr.hpp"
#include "isogeo/grid.hpp"
#include "isogeo/surface.hpp"

namespace isogeo {

class CompatibilityError : public std::runtime_error {
 public:
  explicit CompatibilityError(double residual)
      : std::runtime_error(
            "spinor data violates the reality condition (residual " +
            std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

// ---------------------------------------------------------------------------
// Exact rationals for the singly-periodic parameters.

struct Rational {
  long long num = 0;
  long long den = 1;  // always > 0, gcd(|num|, den) = 1 after normalize()

  Rational() = default;
  Rational(long long n, long long d);

  double value() const { return static_cast<double>(num) / den; }
  std::string str() const;

  friend bool operator==(const Rational&, const Rational&) = default;
};

// "p", "-p", or "p/q"; anything else (decimals in particular) throws
// std::invalid_argument.
Rational parse_rational(const std::string& text);

// Minimal L > 0 with a*L and b*L integral: L = lcm(q1, q2)/gcd(|p1|, |p2|).
// Zero inputs are rejected.
Rational period_multiplier(const Rational& a, const Rational& b);

// Symmetry label D_n with n = L*|b| of the (a, b) family.
std::string dihedral_label(const Rational& a, const Rational& b);

// ---------------------------------------------------------------------------

// Null lift of the Gauss-map parameter h:
//   g = -( (1+|h|^2)/2, Re h, -Im h, (|h|^2-1)/2 );  h = 0 gives the dual
// direction of the base plane.
MinkVec gauss_from_h(cplx h);

// ---------------------------------------------------------------------------
// Generator inputs.

struct SpinorData {
  ExprPtr alpha;    // nonvanishing on the grid
  ExprPtr beta_h;   // beta = beta_h(z) * conj(beta_ah(z))
  ExprPtr beta_ah;  // null means identically 1 (beta holomorphic)
};

struct KenmotsuData {
  double mean = 0;  // the prescribed constant H
  ExprPtr h2;       // meromorphic; null means identically 0 (sphere data)
  ExprPtr omega;    // holomorphic 1-form coefficient
};

// All generators integrate the differential 2 Re(x_z dz) from the anchor
// sample, pin x(anchor) = x0, and carry predicted per-sample fields
// (metric, mean, Hopf coefficient, Gauss parameter) for cross-checks.
// Tangents are analytic; second derivatives come from one level of
// fourth-order central differencing of the tangent fields.

SurfacePatch weierstrass_surface(const ExprPtr& h, const ExprPtr& omega,
                                 const GridSpec& grid,
                                 std::pair<int, int> anchor,
                                 const IsoPoint& x0);

// h1_at_anchor fixes the gauge of the potential h1 at the anchor sample;
// the catalogue closed forms correspond to specific nonzero choices.
SurfacePatch kenmotsu_surface(const KenmotsuData& data, const GridSpec& grid,
                              std::pair<int, int> anchor, const IsoPoint& x0,
                              cplx h1_at_anchor = 0.0);

SurfacePatch spinor_surface(const SpinorData& data, const GridSpec& grid,
                            std::pair<int, int> anchor, const IsoPoint& x0,
                            double compat_tol = 1e-6);

// ---------------------------------------------------------------------------
// Closed-form catalogue.

struct CatalogueParams {
  double mean = 1.0;     // H; sphere/delaunay/singly-periodic need H != 0
  double a = 1.0;        // delaunay flux parameter
  Rational ra{1, 1};     // singly-periodic (a, b), exact
  Rational rb{-3, 1};
};

std::vector<std::string> catalogue_names();

// name is one of catalogue_names(); throws std::invalid_argument otherwise,
// std::domain_error for out-of-range parameters.  Patches have closed-form
// jets and carry predicted representation fields.
SurfacePatch catalogue_patch(const std::string& name,
                             const CatalogueParams& params,
                             const GridSpec& grid);

// The (H, h2, omega) data reproducing a catalogue entry, together with the
// potential h1 as an expression (its anchor value fixes the gauge).
struct CatalogueKenmotsu {
  KenmotsuData data;
  ExprPtr h1;
};

CatalogueKenmotsu kenmotsu_of(const std::string& name,
                              const CatalogueParams& params);

}  // namespace isogeo
