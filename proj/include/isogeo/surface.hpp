#pragma once

// Sampled conformal surface patches in isotropic 3-space: jets, the
// lightlike Gauss map, fundamental forms, and residuals of the structure
// equations (Gauss, Codazzi, Gauss-Weingarten, vertical Laplace identity).
//
// Conventions: Wirtinger operators d_z = (d_u - i d_v)/2, d_zbar its
// conjugate; conformal factor e^{2 sigma} = (|x_u|^2 + |x_v|^2)/2 in the
// degenerate (spatial) metric; the Gauss map is the unique lightlike normal
// with <g, K> = 1.

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "isogeo/grid.hpp"
#include "isogeo/mink.hpp"

namespace isogeo {

class NonSpacelikeError : public std::runtime_error {
 public:
  NonSpacelikeError()
      : std::runtime_error("sample is not spacelike (degenerate tangents)") {}
};

class NonConformalError : public std::runtime_error {
 public:
  explicit NonConformalError(double residual)
      : std::runtime_error("parametrization is not conformal (residual " +
                           std::to_string(residual) + ")") {}
};

class IntegrabilityError : public std::runtime_error {
 public:
  explicit IntegrabilityError(double loop)
      : std::runtime_error("differential is not closed on the grid "
                           "(loop residual " + std::to_string(loop) + ")") {}
};

// Complex 4-vector, used for x_z and other complexified Minkowski fields.
struct CMinkVec {
  cplx x0{}, x1{}, x2{}, x3{};

  friend CMinkVec operator+(const CMinkVec& a, const CMinkVec& b) {
    return {a.x0 + b.x0, a.x1 + b.x1, a.x2 + b.x2, a.x3 + b.x3};
  }
  friend CMinkVec operator-(const CMinkVec& a, const CMinkVec& b) {
    return {a.x0 - b.x0, a.x1 - b.x1, a.x2 - b.x2, a.x3 - b.x3};
  }
  friend CMinkVec operator*(cplx s, const CMinkVec& a) {
    return {s * a.x0, s * a.x1, s * a.x2, s * a.x3};
  }
  MinkVec real() const {
    return {x0.real(), x1.real(), x2.real(), x3.real()};
  }
  MinkVec imag() const {
    return {x0.imag(), x1.imag(), x2.imag(), x3.imag()};
  }
  double max_abs() const {
    return std::max(std::max(std::abs(x0), std::abs(x1)),
                    std::max(std::abs(x2), std::abs(x3)));
  }
};

inline CMinkVec complexify(const MinkVec& re, const MinkVec& im) {
  return {{re.x0, im.x0}, {re.x1, im.x1}, {re.x2, im.x2}, {re.x3, im.x3}};
}

struct Jet {
  IsoPoint x;
  MinkVec xu, xv;          // embedded tangents, <., K> = 0
  MinkVec xuu, xuv, xvv;   // embedded second derivatives

  CMinkVec xz() const { return 0.5 * complexify(xu, -1.0 * xv); }
  CMinkVec xzbar() const { return 0.5 * complexify(xu, xv); }
  // d_z d_z and d_z d_zbar of the position
  CMinkVec xzz() const {
    return complexify(0.25 * (xuu - xvv), -0.5 * xuv);
  }
  MinkVec xzzbar() const { return 0.25 * (xuu + xvv); }
};

struct FundForms {
  double sigma = 0;           // conformal factor exponent
  double L = 0, M = 0, N = 0; // second fundamental form against g
  double H = 0;               // mean curvature (trace/2 of shape operator)
  cplx Q{};                   // Hopf differential coefficient
  double K = 0;               // relative (extrinsic) curvature
};

enum class Provenance { ClosedForm, Integrated };

// Per-sample values predicted analytically by a representation; empty
// vectors mean "not available".  Used for cross-checks against measured
// quantities.
struct ReprFields {
  std::vector<double> metric;  // predicted e^{2 sigma}
  std::vector<double> mean;    // predicted H
  std::vector<cplx> hopf;      // predicted Q
  std::vector<cplx> h;         // predicted Gauss-map parameter
};

struct PatchMeta {
  Provenance provenance = Provenance::ClosedForm;
  std::string source;                 // generator tag, informational
  std::optional<double> h_const;      // prescribed constant mean curvature
  std::optional<double> period_v;     // exact period in v, if any
  std::string dihedral;               // symmetry label, if any
  bool expects_sphere = false;        // generator guarantees a sphere
};

struct SurfacePatch {
  GridSpec grid;
  std::vector<Jet> jets;
  std::vector<MinkVec> gauss;       // lightlike Gauss map, valid samples
  std::vector<FundForms> forms;     // valid samples
  std::vector<std::uint8_t> spacelike;  // per-sample validity
  PatchMeta meta;
  std::optional<ReprFields> repr;

  const Jet& jet(int iu, int iv) const { return jets[grid.index(iu, iv)]; }
  bool all_spacelike() const;
};

// ---------------------------------------------------------------------------

struct SurfaceClosure {
  std::function<IsoPoint(double, double)> position;     // required
  std::function<Jet(double, double)> analytic;          // optional full jet
};

// Samples a closure into jets.  With an analytic closure the jets are exact;
// otherwise derivatives use 2nd-order stencils (central inside, one-sided at
// the boundary) on the sampled positions.
std::vector<Jet> jets_from_closure(const SurfaceClosure& f,
                                   const GridSpec& grid);

// The unique lightlike g with <g, K> = 1, <x_u, g> = <x_v, g> = 0.
MinkVec lightlike_gauss(const MinkVec& xu, const MinkVec& xv);

// max(| |x_u|^2 - |x_v|^2 |, |<x_u, x_v>|) in the degenerate metric.
double conformality_residual(const Jet& j);

FundForms fundamental_forms(const Jet& j, const MinkVec& g,
                            double conformal_tol = 1e-6);

// k1 <= k2 with k1 k2 = K and (k1 + k2)/2 = H.
std::pair<double, double> principal_curvatures(const FundForms& f);

// Builds the Gauss map and forms for every sample; samples whose tangents
// are degenerate are flagged instead of failing the whole patch.
SurfacePatch assemble_patch(const GridSpec& grid, std::vector<Jet> jets,
                            PatchMeta meta,
                            std::optional<ReprFields> repr = std::nullopt);

struct StructResiduals {
  double gauss = 0;     // |sigma_zzbar|
  double codazzi = 0;   // |H_z - 2 e^{-2 sigma} Q_zbar|
  double gw1 = 0;       // |x_zz - 2 sigma_z x_z - Q K|
  double gw2 = 0;       // |x_zzbar - 1/2 e^{2 sigma} H K|
  double gw3 = 0;       // |g_z + H x_z + 2 e^{-2 sigma} Q x_zbar|
  double vertical = 0;  // |l_zzbar - 1/2 e^{2 sigma} H|
};

// Residuals per sample.  Derivatives of the derived scalar fields (sigma, H,
// Q) use 4th-order central stencils so truncation does not mask the residuals
// being measured; the normal's derivative is exact, computed from the jet's
// second derivatives.  Evaluation is restricted to samples two in from each
// edge (where all stencils are central).  Excluded samples, and samples too
// close to flagged (non-spacelike) ones, report zeros.
std::vector<StructResiduals> structure_residuals(const SurfacePatch& patch);

StructResiduals max_residuals(const std::vector<StructResiduals>& rs);

}  // namespace isogeo
