#include "isogeo/surface.hpp"

#include <cmath>

namespace isogeo {

bool SurfacePatch::all_spacelike() const {
  for (auto s : spacelike)
    if (!s) return false;
  return true;
}

std::vector<Jet> jets_from_closure(const SurfaceClosure& f,
                                   const GridSpec& grid) {
  grid.validate();
  std::vector<Jet> jets(grid.size());

  if (f.analytic) {
    for (int iu = 0; iu < grid.nu; ++iu)
      for (int iv = 0; iv < grid.nv; ++iv) {
        Jet j = f.analytic(grid.u(iu), grid.v(iv));
        if (!j.x.embed().finite() || !j.xu.finite() || !j.xv.finite() ||
            !j.xuu.finite() || !j.xuv.finite() || !j.xvv.finite())
          throw std::runtime_error("jets_from_closure: non-finite jet");
        jets[grid.index(iu, iv)] = j;
      }
    return jets;
  }

  std::vector<MinkVec> pos(grid.size());
  for (int iu = 0; iu < grid.nu; ++iu)
    for (int iv = 0; iv < grid.nv; ++iv) {
      IsoPoint p = f.position(grid.u(iu), grid.v(iv));
      MinkVec e = p.embed();
      if (!e.finite())
        throw std::runtime_error("jets_from_closure: non-finite position");
      pos[grid.index(iu, iv)] = e;
      jets[grid.index(iu, iv)].x = p;
    }

  auto at = [&](int iu, int iv) { return pos[grid.index(iu, iv)]; };
  std::vector<MinkVec> xu(grid.size());
  for (int iu = 0; iu < grid.nu; ++iu)
    for (int iv = 0; iv < grid.nv; ++iv) {
      int s = grid.index(iu, iv);
      xu[s] = grid_du<MinkVec>(at, grid, iu, iv, 2);
      jets[s].xu = xu[s];
      jets[s].xv = grid_dv<MinkVec>(at, grid, iu, iv, 2);
      jets[s].xuu = grid_duu<MinkVec>(at, grid, iu, iv);
      jets[s].xvv = grid_dvv<MinkVec>(at, grid, iu, iv);
    }
  auto xu_at = [&](int iu, int iv) { return xu[grid.index(iu, iv)]; };
  for (int iu = 0; iu < grid.nu; ++iu)
    for (int iv = 0; iv < grid.nv; ++iv)
      jets[grid.index(iu, iv)].xuv =
          grid_dv<MinkVec>(xu_at, grid, iu, iv, 2);
  return jets;
}

MinkVec lightlike_gauss(const MinkVec& xu, const MinkVec& xv) {
  double a = xu.x1, b = xu.x2;
  double c = xv.x1, d = xv.x2;
  double det = a * d - b * c;
  double norm_a = std::max(std::abs(a) + std::abs(b), std::abs(c) + std::abs(d));
  if (det == 0.0 ||
      norm_a * (std::max(std::abs(d) + std::abs(b),
                         std::abs(c) + std::abs(a)) /
                std::abs(det)) > 1e8)
    throw NonSpacelikeError{};
  double r1 = -xu.x0, r2 = -xv.x0;
  double nu1 = (d * r1 - b * r2) / det;
  double nu2 = (-c * r1 + a * r2) / det;
  double nu0 = -(nu1 * nu1 + nu2 * nu2) / 2;
  return {nu0 - 0.5, nu1, nu2, nu0 + 0.5};
}

double conformality_residual(const Jet& j) {
  double E = mink_inner(j.xu, j.xu);
  double G = mink_inner(j.xv, j.xv);
  double F = mink_inner(j.xu, j.xv);
  return std::max(std::abs(E - G), std::abs(F));
}

FundForms fundamental_forms(const Jet& j, const MinkVec& g,
                            double conformal_tol) {
  double E = mink_inner(j.xu, j.xu);
  double G = mink_inner(j.xv, j.xv);
  double F = mink_inner(j.xu, j.xv);
  double e2s = 0.5 * (E + G);
  if (!(e2s > 0)) throw NonSpacelikeError{};
  double conf = std::max(std::abs(E - G), std::abs(F));
  if (conf > conformal_tol * e2s) throw NonConformalError(conf / e2s);

  FundForms f;
  f.sigma = 0.5 * std::log(e2s);
  f.L = mink_inner(j.xuu, g);
  f.M = mink_inner(j.xuv, g);
  f.N = mink_inner(j.xvv, g);
  f.H = (f.L + f.N) / (2 * e2s);
  f.Q = cplx{0.25 * (f.L - f.N), -0.5 * f.M};
  f.K = f.H * f.H - 4 * std::exp(-4 * f.sigma) * std::norm(f.Q);
  return f;
}

std::pair<double, double> principal_curvatures(const FundForms& f) {
  double disc = std::sqrt(std::max(0.0, f.H * f.H - f.K));
  return {f.H - disc, f.H + disc};
}

SurfacePatch assemble_patch(const GridSpec& grid, std::vector<Jet> jets,
                            PatchMeta meta, std::optional<ReprFields> repr) {
  grid.validate();
  if (static_cast<int>(jets.size()) != grid.size())
    throw std::invalid_argument("assemble_patch: jets size != grid");

  SurfacePatch p;
  p.grid = grid;
  p.jets = std::move(jets);
  p.meta = std::move(meta);
  p.repr = std::move(repr);
  p.gauss.assign(grid.size(), MinkVec{});
  p.forms.assign(grid.size(), FundForms{});
  p.spacelike.assign(grid.size(), 1);

  for (int s = 0; s < grid.size(); ++s) {
    try {
      p.gauss[s] = lightlike_gauss(p.jets[s].xu, p.jets[s].xv);
      p.forms[s] = fundamental_forms(p.jets[s], p.gauss[s]);
    } catch (const NonSpacelikeError&) {
      p.spacelike[s] = 0;
      p.gauss[s] = MinkVec{};
      p.forms[s] = FundForms{};
    }
  }
  return p;
}

namespace {

// Derivatives of the lightlike normal along u and v, obtained by
// differentiating the 2x2 tangency system; needs only the jet's second
// derivatives, so it is exact wherever the jet is.  Finite differencing the
// normal instead would square the field's growth rate and the truncation
// error with it.  Returns false when the spatial frame is singular.
bool gauss_derivs_from_jet(const Jet& j, MinkVec& gu, MinkVec& gv) {
  double a = j.xu.x1, b = j.xu.x2;
  double c = j.xv.x1, d = j.xv.x2;
  double det = a * d - b * c;
  if (det == 0.0 || !std::isfinite(det)) return false;
  double r1 = -j.xu.x0, r2 = -j.xv.x0;
  double nu1 = (d * r1 - b * r2) / det;
  double nu2 = (-c * r1 + a * r2) / det;
  auto solve = [&](const MinkVec& m1, const MinkVec& m2, double& o1,
                   double& o2) {
    double b1 = -m1.x0 - (m1.x1 * nu1 + m1.x2 * nu2);
    double b2 = -m2.x0 - (m2.x1 * nu1 + m2.x2 * nu2);
    o1 = (d * b1 - b * b2) / det;
    o2 = (-c * b1 + a * b2) / det;
  };
  double n1u, n2u, n1v, n2v;
  solve(j.xuu, j.xuv, n1u, n2u);
  solve(j.xuv, j.xvv, n1v, n2v);
  double n0u = -(nu1 * n1u + nu2 * n2u);
  double n0v = -(nu1 * n1v + nu2 * n2v);
  gu = {n0u, n1u, n2u, n0u};
  gv = {n0v, n1v, n2v, n0v};
  return gu.finite() && gv.finite();
}

}  // namespace

std::vector<StructResiduals> structure_residuals(const SurfacePatch& patch) {
  const GridSpec& g = patch.grid;
  g.validate();
  const int n = g.size();

  // Validity mask: a sample's residual needs clean field values within the
  // widest stencil footprint (4 in each axis direction).
  std::vector<std::uint8_t> usable(n, 1);
  if (!patch.all_spacelike()) {
    for (int iu = 0; iu < g.nu; ++iu)
      for (int iv = 0; iv < g.nv; ++iv) {
        bool ok = true;
        for (int du = -4; du <= 4 && ok; ++du)
          for (int dv = -4; dv <= 4 && ok; ++dv) {
            int ju = iu + du, jv = iv + dv;
            if (ju < 0 || ju >= g.nu || jv < 0 || jv >= g.nv) continue;
            if (!patch.spacelike[g.index(ju, jv)]) ok = false;
          }
        usable[g.index(iu, iv)] = ok ? 1 : 0;
      }
  }

  auto sig = [&](int iu, int iv) { return patch.forms[g.index(iu, iv)].sigma; };
  auto mean = [&](int iu, int iv) { return patch.forms[g.index(iu, iv)].H; };
  auto hopf = [&](int iu, int iv) { return patch.forms[g.index(iu, iv)].Q; };

  // Residuals are measured where every stencil row is central: two samples in
  // from each edge (when the axis has at least five samples).  One-sided rows
  // amplify truncation ~6x and would dominate the PDE residuals under test.
  const int mu = g.nu >= 5 ? 2 : 0;
  const int mv = g.nv >= 5 ? 2 : 0;

  std::vector<StructResiduals> out(n);
  for (int iu = mu; iu < g.nu - mu; ++iu)
    for (int iv = mv; iv < g.nv - mv; ++iv) {
      int s = g.index(iu, iv);
      if (!usable[s] || !patch.spacelike[s]) continue;
      const Jet& j = patch.jets[s];
      const FundForms& f = patch.forms[s];
      double e2s = std::exp(2 * f.sigma);

      // Wirtinger derivatives of the derived fields.
      double sig_u = grid_du<double>(sig, g, iu, iv, 4);
      double sig_v = grid_dv<double>(sig, g, iu, iv, 4);
      cplx sigma_z = 0.5 * cplx{sig_u, -sig_v};
      double sig_lap = grid_duu<double>(sig, g, iu, iv, 4) +
                       grid_dvv<double>(sig, g, iu, iv, 4);

      double H_u = grid_du<double>(mean, g, iu, iv, 4);
      double H_v = grid_dv<double>(mean, g, iu, iv, 4);
      cplx H_z = 0.5 * cplx{H_u, -H_v};

      cplx Q_u = grid_du<cplx>(hopf, g, iu, iv, 4);
      cplx Q_v = grid_dv<cplx>(hopf, g, iu, iv, 4);
      cplx Q_zbar = 0.5 * (Q_u + cplx{0, 1} * Q_v);

      MinkVec g_u{}, g_v{};
      if (!gauss_derivs_from_jet(j, g_u, g_v)) continue;
      CMinkVec g_z = 0.5 * complexify(g_u, -1.0 * g_v);

      StructResiduals& r = out[s];
      r.gauss = std::abs(0.25 * sig_lap);
      r.codazzi = std::abs(H_z - 2.0 * std::exp(-2 * f.sigma) * Q_zbar);

      CMinkVec xz = j.xz(), xzb = j.xzbar();
      CMinkVec Kc = complexify(K, MinkVec{});
      r.gw1 = (j.xzz() - 2.0 * sigma_z * xz - f.Q * Kc).max_abs();
      r.gw2 = (j.xzzbar() - 0.5 * e2s * f.H * K).max_abs();
      r.gw3 =
          (g_z + f.H * xz + (2.0 * std::exp(-2 * f.sigma) * f.Q) * xzb)
              .max_abs();

      auto vert = [&](int a, int b) { return patch.jets[g.index(a, b)].x.l; };
      double l_lap = grid_duu<double>(vert, g, iu, iv, 4) +
                     grid_dvv<double>(vert, g, iu, iv, 4);
      r.vertical = std::abs(0.25 * l_lap - 0.5 * e2s * f.H);
    }
  return out;
}

StructResiduals max_residuals(const std::vector<StructResiduals>& rs) {
  StructResiduals m;
  for (const auto& r : rs) {
    m.gauss = std::max(m.gauss, r.gauss);
    m.codazzi = std::max(m.codazzi, r.codazzi);
    m.gw1 = std::max(m.gw1, r.gw1);
    m.gw2 = std::max(m.gw2, r.gw2);
    m.gw3 = std::max(m.gw3, r.gw3);
    m.vertical = std::max(m.vertical, r.vertical);
  }
  return m;
}

}  // namespace isogeo
