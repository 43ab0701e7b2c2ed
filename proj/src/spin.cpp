#include "isogeo/spin.hpp"

#include <cmath>
#include <stdexcept>

namespace isogeo {

namespace {

bool same_grid(const GridSpec& a, const GridSpec& b) {
  return a.u0 == b.u0 && a.u1 == b.u1 && a.v0 == b.v0 && a.v1 == b.v1 &&
         a.nu == b.nu && a.nv == b.nv;
}

// B = [[alpha, conj(beta)], [0, conj(alpha)]], so
// B_z = [[alpha_z, conj(beta_zbar)], [0, conj(alpha_zbar)]] and the bar
// derivative swaps the conjugated slots.
Mat2C factor_d_z(const SpinDerivs& d) {
  return {d.alpha_z, std::conj(d.beta_zb), 0.0, std::conj(d.alpha_zb)};
}
Mat2C factor_d_zbar(const SpinDerivs& d) {
  return {d.alpha_zb, std::conj(d.beta_z), 0.0, std::conj(d.alpha_z)};
}

SpinDerivs fd_derivs(const SpinField& f, int iu, int iv) {
  auto alpha = [&](int a, int b) { return f.samples[f.grid.index(a, b)].alpha; };
  auto beta = [&](int a, int b) { return f.samples[f.grid.index(a, b)].beta; };
  cplx au = grid_du<cplx>(alpha, f.grid, iu, iv, 2);
  cplx av = grid_dv<cplx>(alpha, f.grid, iu, iv, 2);
  cplx bu = grid_du<cplx>(beta, f.grid, iu, iv, 2);
  cplx bv = grid_dv<cplx>(beta, f.grid, iu, iv, 2);
  const cplx i{0, 1};
  return {0.5 * (au - i * av), 0.5 * (au + i * av),
          0.5 * (bu - i * bv), 0.5 * (bu + i * bv)};
}

Mat2C left_log_z(const SpinField& f, int s, const SpinDerivs& d) {
  const SpinFactor& b = f.samples[s];
  if (b.det() == 0.0)
    throw std::domain_error("spin factor is singular (alpha = 0)");
  return b.mat().inverse() * factor_d_z(d);
}

}  // namespace

void SpinField::validate() const {
  grid.validate();
  if (static_cast<int>(samples.size()) != grid.size())
    throw std::invalid_argument("spin field: samples size != grid");
  if (!rho.empty() && static_cast<int>(rho.size()) != grid.size())
    throw std::invalid_argument("spin field: rho size != grid");
  if (!derivs.empty() && static_cast<int>(derivs.size()) != grid.size())
    throw std::invalid_argument("spin field: derivs size != grid");
}

Herm2 spin_differential(const SpinFactor& b, const Herm2& dx) {
  return act(b.mat(), dx);
}

double transformed_mean(double mean, double rho, double det_b) {
  if (!(det_b > 0))
    throw std::domain_error("transformed_mean: det B must be positive");
  return (mean + rho) / det_b;
}

std::vector<double> dirac_residual(const SpinField& field,
                                   const SurfacePatch& base) {
  field.validate();
  if (!same_grid(field.grid, base.grid))
    throw std::invalid_argument("dirac_residual: grids differ");
  if (field.rho.empty())
    throw std::invalid_argument("dirac_residual: rho is required");

  const GridSpec& g = field.grid;
  const bool analytic = !field.derivs.empty();
  const cplx i{0, 1};
  const Mat2C pt{0.0, 0.0, 0.0, -1.0};

  std::vector<double> out(g.size(), 0.0);
  for (int iu = 0; iu < g.nu; ++iu)
    for (int iv = 0; iv < g.nv; ++iv) {
      if (!analytic &&
          (iu == 0 || iu == g.nu - 1 || iv == 0 || iv == g.nv - 1))
        continue;
      int s = g.index(iu, iv);
      SpinDerivs d = analytic ? field.derivs[s] : fd_derivs(field, iu, iv);
      const SpinFactor& b = field.samples[s];
      if (b.det() == 0.0)
        throw std::domain_error("spin factor is singular (alpha = 0)");
      Mat2C binv = b.mat().inverse();
      Mat2C cz = binv * factor_d_z(d);
      Mat2C czb = binv * factor_d_zbar(d);

      const Jet& j = base.jets[s];
      Mat2C xu = to_herm(j.xu).mat(), xv = to_herm(j.xv).mat();
      Mat2C xz = 0.5 * (xu - i * xv);
      Mat2C xzb = 0.5 * (xu + i * xv);

      Mat2C r = (cz * xzb - czb * xz) +
                field.rho[s] * (xz * pt * xzb - xzb * pt * xz);
      out[s] = r.max_abs();
    }
  return out;
}

std::vector<double> rho_base_plane(const SpinField& field) {
  field.validate();
  const GridSpec& g = field.grid;
  const bool analytic = !field.derivs.empty();
  std::vector<double> out(g.size(), 0.0);
  for (int iu = 0; iu < g.nu; ++iu)
    for (int iv = 0; iv < g.nv; ++iv) {
      int s = g.index(iu, iv);
      SpinDerivs d = analytic ? field.derivs[s] : fd_derivs(field, iu, iv);
      out[s] = left_log_z(field, s, d).b.real();
    }
  return out;
}

SurfacePatch integrate_spin(const SpinField& field, const SurfacePatch& base,
                            std::pair<int, int> anchor, const IsoPoint& x0,
                            bool columns_first) {
  field.validate();
  if (!same_grid(field.grid, base.grid))
    throw std::invalid_argument("integrate_spin: grids differ");
  const GridSpec& g = field.grid;
  const int n = g.size();

  std::vector<MinkVec> fu(n), fv(n);
  for (int s = 0; s < n; ++s) {
    const SpinFactor& b = field.samples[s];
    if (b.det() == 0.0)
      throw std::domain_error("spin factor is singular (alpha = 0)");
    fu[s] = from_herm(spin_differential(b, to_herm(base.jets[s].xu)));
    fv[s] = from_herm(spin_differential(b, to_herm(base.jets[s].xv)));
  }

  auto fu_at = [&](int a, int b) { return fu[g.index(a, b)]; };
  auto fv_at = [&](int a, int b) { return fv[g.index(a, b)]; };
  auto res = integrate_path<MinkVec>(
      g, fu_at, fv_at, anchor.first, anchor.second, x0.embed(),
      [](const MinkVec& v) { return v.max_abs(); }, columns_first);
  if (res.loop_residual > 1e-6 * g.diameter())
    throw IntegrabilityError(res.loop_residual);

  std::vector<Jet> jets(n);
  for (int iu = 0; iu < g.nu; ++iu)
    for (int iv = 0; iv < g.nv; ++iv) {
      int s = g.index(iu, iv);
      Jet& j = jets[s];
      const MinkVec& p = res.values[s];
      j.x = {p.x0, p.x1, p.x2};
      j.xu = fu[s];
      j.xv = fv[s];
      j.xuu = grid_du<MinkVec>(fu_at, g, iu, iv, 4);
      j.xvv = grid_dv<MinkVec>(fv_at, g, iu, iv, 4);
      MinkVec m1 = grid_dv<MinkVec>(fu_at, g, iu, iv, 4);
      MinkVec m2 = grid_du<MinkVec>(fv_at, g, iu, iv, 4);
      j.xuv = 0.5 * (m1 + m2);
    }

  PatchMeta meta;
  meta.provenance = Provenance::Integrated;
  meta.source = "spin";

  std::optional<ReprFields> repr;
  if (!field.rho.empty()) {
    ReprFields r;
    r.mean.assign(n, 0.0);
    r.metric.assign(n, 0.0);
    for (int s = 0; s < n; ++s) {
      double det = field.samples[s].det();
      r.mean[s] = transformed_mean(base.forms[s].H, field.rho[s], det);
      r.metric[s] = det * det * std::exp(2 * base.forms[s].sigma);
    }
    repr = std::move(r);
  }
  return assemble_patch(g, std::move(jets), std::move(meta), std::move(repr));
}

}  // namespace isogeo
