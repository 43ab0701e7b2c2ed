#pragma once

// Spin transformations of conformal patches.  A field of upper-triangular
// factors B acts on the tangent differential by dX -> B dX B* in the
// Hermitian model; the Dirac-type residual measures whether the transformed
// differential is closed (with potential rho), and integrate_spin rebuilds
// the transformed immersion from it.

#include <utility>
#include <vector>

#include "isogeo/grid.hpp"
#include "isogeo/hermitian.hpp"
#include "isogeo/surface.hpp"

namespace isogeo {

// Wirtinger derivatives of the factor entries alpha, beta.
struct SpinDerivs {
  cplx alpha_z{}, alpha_zb{};
  cplx beta_z{}, beta_zb{};
};

struct SpinField {
  GridSpec grid;
  std::vector<SpinFactor> samples;
  std::vector<double> rho;         // potential; empty = unspecified
  std::vector<SpinDerivs> derivs;  // analytic derivatives; empty = use FD

  void validate() const;
};

// The transformed tangent differential B dX B*.  Tangency (vanishing lower
// diagonal entry) is preserved exactly.
Herm2 spin_differential(const SpinFactor& b, const Herm2& dx);

// Mean curvature of the transformed patch: (H + rho) / det B.
// det B must be positive.
double transformed_mean(double mean, double rho, double det_b);

// Pointwise closedness defect of the transformed differential:
//   (B^-1 B_z) X_zbar - (B^-1 B_zbar) X_z
//     + rho (X_z Pt X_zbar - X_zbar Pt X_z),     Pt = diag(0, -1),
// reported as the max-abs entry of the 2x2 residual per sample.  With
// analytic derivatives every sample is evaluated; with finite differences
// only interior samples are (boundary entries report zero).  field.rho is
// required.
std::vector<double> dirac_residual(const SpinField& field,
                                   const SurfacePatch& base);

// The exact potential for a factor field over the flat base plane
// x = (0, u, v): rho = Re (B^-1 B_z)_{12}.
std::vector<double> rho_base_plane(const SpinField& field);

// Integrates B dX B* from the anchor sample, pinning x(anchor) = x0.
// Edge quadrature is the plain trapezoid rule; the worst per-cell loop
// circulation above 1e-6 * grid diameter raises IntegrabilityError.  When
// field.rho is present the patch carries predicted mean (H + rho)/det B and
// metric (det B)^2 e^{2 sigma}.
SurfacePatch integrate_spin(const SpinField& field, const SurfacePatch& base,
                            std::pair<int, int> anchor, const IsoPoint& x0,
                            bool columns_first = false);

}  // namespace isogeo
