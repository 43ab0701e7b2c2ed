#include "isogeo/represent.hpp"

#include <cctype>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace isogeo {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

ExprPtr rc(double v) {
  return v < 0 ? make_neg(make_const(-v)) : make_const(v);
}

ExprPtr cconst(cplx v) {
  if (v.imag() == 0) return rc(v.real());
  ExprPtr im = make_mul(rc(std::abs(v.imag())), make_imag_unit());
  if (v.imag() < 0) im = make_neg(im);
  if (v.real() == 0) return im;
  return make_add(rc(v.real()), im);
}

// exp(k z) as an expression
ExprPtr exp_kz(double k) {
  ExprPtr arg = k == 1.0 ? make_var() : make_mul(rc(k), make_var());
  return make_call(Func::Exp, arg);
}

// Per-sample x_z together with its z- and zbar-derivatives; everything the
// quadrature and the jets need.
struct XzData {
  std::vector<CMinkVec> xz, dz, dzb;
};

CMinkVec xz_of(cplx l_slot, cplx spatial) {
  // (l_z, x_z, y_z, l_z) with x_z + i y_z analytic data "spatial"
  cplx x = 0.5 * spatial;
  cplx y = -0.5 * cplx{0, 1} * spatial;
  cplx l = 0.5 * l_slot;
  return {l, x, y, l};
}

SurfacePatch integrate_xz(const GridSpec& g, const XzData& d,
                          std::pair<int, int> anchor, const IsoPoint& x0,
                          PatchMeta meta, ReprFields repr) {
  const int n = g.size();
  const cplx i{0, 1};
  std::vector<MinkVec> fu(n), fv(n), cu(n), cv(n);
  for (int s = 0; s < n; ++s) {
    fu[s] = 2.0 * d.xz[s].real();
    fv[s] = -2.0 * d.xz[s].imag();
    CMinkVec sum = d.dz[s] + d.dzb[s];
    CMinkVec dif = i * (d.dz[s] - d.dzb[s]);
    cu[s] = 2.0 * sum.real();   // du of fu
    cv[s] = -2.0 * dif.imag();  // dv of fv
  }

  auto fu_at = [&](int a, int b) { return fu[g.index(a, b)]; };
  auto fv_at = [&](int a, int b) { return fv[g.index(a, b)]; };
  auto res = integrate_path<MinkVec>(
      g, fu_at, fv_at, anchor.first, anchor.second, x0.embed(),
      [](const MinkVec& w) { return w.max_abs(); }, false, &cu, &cv);
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
      j.xuv = 0.5 * (grid_dv<MinkVec>(fu_at, g, iu, iv, 4) +
                     grid_du<MinkVec>(fv_at, g, iu, iv, 4));
    }
  return assemble_patch(g, std::move(jets), std::move(meta), std::move(repr));
}

cplx soft_eval(const ExprPtr& e, cplx z) {
  try {
    return eval(e, z);
  } catch (const PoleError&) {
    // only reachable where the immersion itself degenerates; those samples
    // are flagged non-spacelike and excluded from representation checks
    return {0, 0};
  }
}

}  // namespace

// ---------------------------------------------------------------------------

Rational::Rational(long long n, long long d) : num(n), den(d) {
  if (den == 0) throw std::invalid_argument("rational: zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  long long g = std::gcd(num < 0 ? -num : num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
}

std::string Rational::str() const {
  if (den == 1) return std::to_string(num);
  return std::to_string(num) + "/" + std::to_string(den);
}

Rational parse_rational(const std::string& text) {
  size_t i = 0;
  const size_t n = text.size();
  auto skip = [&] {
    while (i < n && (text[i] == ' ' || text[i] == '\t')) ++i;
  };
  auto digits = [&]() -> long long {
    size_t d0 = i;
    while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
    if (i == d0)
      throw std::invalid_argument("rational: expected digits in '" + text +
                                  "'");
    return std::stoll(text.substr(d0, i - d0));
  };
  skip();
  bool neg = false;
  if (i < n && (text[i] == '-' || text[i] == '+')) {
    neg = text[i] == '-';
    ++i;
  }
  long long num = digits();
  long long den = 1;
  if (i < n && text[i] == '/') {
    ++i;
    den = digits();
  }
  skip();
  if (i != n)
    throw std::invalid_argument("rational: trailing characters in '" + text +
                                "'");
  return Rational(neg ? -num : num, den);
}

Rational period_multiplier(const Rational& a, const Rational& b) {
  if (a.num == 0 || b.num == 0)
    throw std::domain_error("period: parameters must be nonzero");
  long long l = std::lcm(a.den, b.den);
  long long g = std::gcd(a.num < 0 ? -a.num : a.num, b.num < 0 ? -b.num : b.num);
  return Rational(l, g);
}

std::string dihedral_label(const Rational& a, const Rational& b) {
  Rational L = period_multiplier(a, b);
  Rational n(L.num * (b.num < 0 ? -b.num : b.num), L.den * b.den);
  return "D_" + n.str();
}

MinkVec gauss_from_h(cplx h) {
  double q = std::norm(h);
  return {-(1 + q) / 2, -h.real(), h.imag(), (1 - q) / 2};
}

// ---------------------------------------------------------------------------

SurfacePatch weierstrass_surface(const ExprPtr& h, const ExprPtr& omega,
                                 const GridSpec& grid,
                                 std::pair<int, int> anchor,
                                 const IsoPoint& x0) {
  if (!h || !omega)
    throw std::invalid_argument("weierstrass: h and omega are required");
  grid.validate();
  ExprPtr hw = make_mul(h, omega);
  ExprPtr dhw = differentiate(hw);
  ExprPtr domega = differentiate(omega);
  ExprPtr qf = make_mul(omega, differentiate(h));  // 2 Q

  const int n = grid.size();
  XzData d;
  d.xz.resize(n);
  d.dz.resize(n);
  d.dzb.assign(n, CMinkVec{});
  ReprFields r;
  r.metric.resize(n);
  r.mean.assign(n, 0.0);
  r.hopf.resize(n);
  r.h.resize(n);

  for (int iu = 0; iu < grid.nu; ++iu)
    for (int iv = 0; iv < grid.nv; ++iv) {
      int s = grid.index(iu, iv);
      cplx z = grid.z(iu, iv);
      cplx w = eval(omega, z);
      cplx wd = eval(domega, z);
      cplx lw = eval_rescued(hw, z);
      cplx lwd = eval_rescued(dhw, z);
      d.xz[s] = xz_of(lw, w);
      d.dz[s] = xz_of(lwd, wd);
      r.metric[s] = std::norm(w);
      r.hopf[s] = 0.5 * soft_eval(qf, z);
      r.h[s] = soft_eval(h, z);
    }

  PatchMeta meta;
  meta.provenance = Provenance::Integrated;
  meta.source = "weierstrass";
  meta.h_const = 0.0;
  return integrate_xz(grid, d, anchor, x0, std::move(meta), std::move(r));
}

SurfacePatch kenmotsu_surface(const KenmotsuData& data, const GridSpec& grid,
                              std::pair<int, int> anchor, const IsoPoint& x0,
                              cplx h1_at_anchor) {
  if (!data.omega)
    throw std::invalid_argument("kenmotsu: omega is required");
  grid.validate();

  if (data.mean == 0.0) {
    // dh1 = 0: the potential is the constant gauge value and the data is
    // plain Weierstrass data with h = conj(h1) + h2.
    ExprPtr h = cconst(std::conj(h1_at_anchor));
    if (data.h2) h = make_add(data.h2, h);
    return weierstrass_surface(h, data.omega, grid, anchor, x0);
  }

  const double H = data.mean;
  const int n = grid.size();
  ExprPtr domega = differentiate(data.omega);

  // potential: dh1 = H omega dz, corrected-trapezoid path integral
  std::vector<cplx> pot_u(n), pot_v(n), pot_cu(n), pot_cv(n);
  for (int iu = 0; iu < grid.nu; ++iu)
    for (int iv = 0; iv < grid.nv; ++iv) {
      int s = grid.index(iu, iv);
      cplx z = grid.z(iu, iv);
      cplx w = eval(data.omega, z);
      cplx wd = eval(domega, z);
      pot_u[s] = H * w;
      pot_v[s] = cplx{0, 1} * H * w;
      pot_cu[s] = H * wd;             // du of pot_u
      pot_cv[s] = -H * wd;            // dv of pot_v = i * (i H omega')
    }
  auto pu = [&](int a, int b) { return pot_u[grid.index(a, b)]; };
  auto pv = [&](int a, int b) { return pot_v[grid.index(a, b)]; };
  auto pot = integrate_path<cplx>(
      grid, pu, pv, anchor.first, anchor.second, h1_at_anchor,
      [](cplx c) { return std::abs(c); }, false, &pot_cu, &pot_cv);
  if (pot.loop_residual > 1e-6 * grid.diameter())
    throw IntegrabilityError(pot.loop_residual);
  const std::vector<cplx>& h1 = pot.values;

  ExprPtr h2w, dh2w, qf;
  if (data.h2) {
    h2w = make_mul(data.h2, data.omega);
    dh2w = differentiate(h2w);
    qf = make_mul(data.omega, differentiate(data.h2));
  }

  XzData d;
  d.xz.resize(n);
  d.dz.resize(n);
  d.dzb.resize(n);
  ReprFields r;
  r.metric.resize(n);
  r.mean.assign(n, H);
  r.hopf.assign(n, cplx{});
  r.h.resize(n);

  for (int iu = 0; iu < grid.nu; ++iu)
    for (int iv = 0; iv < grid.nv; ++iv) {
      int s = grid.index(iu, iv);
      cplx z = grid.z(iu, iv);
      cplx w = eval(data.omega, z);
      cplx wd = eval(domega, z);
      cplx h1c = std::conj(h1[s]);
      cplx lw = h1c * w, lwd = h1c * wd;
      if (data.h2) {
        lw += eval_rescued(h2w, z);
        lwd += eval_rescued(dh2w, z);
      }
      d.xz[s] = xz_of(lw, w);
      d.dz[s] = xz_of(lwd, wd);
      d.dzb[s] = xz_of(H * std::norm(w), 0.0);
      r.metric[s] = std::norm(w);
      if (data.h2) r.hopf[s] = 0.5 * soft_eval(qf, z);
      r.h[s] = h1c + (data.h2 ? soft_eval(data.h2, z) : cplx{});
    }

  bool h2_zero = !data.h2;
  if (!h2_zero) {
    h2_zero = true;
    for (cplx zt : {cplx{0.31, 0.17}, cplx{-0.73, 0.41}, cplx{0.2, -0.58}}) {
      try {
        if (std::abs(eval(data.h2, zt)) > 1e-13) h2_zero = false;
      } catch (const PoleError&) {
        h2_zero = false;
      }
      if (!h2_zero) break;
    }
  }

  PatchMeta meta;
  meta.provenance = Provenance::Integrated;
  meta.source = "kenmotsu";
  meta.h_const = H;
  meta.expects_sphere = h2_zero;
  return integrate_xz(grid, d, anchor, x0, std::move(meta), std::move(r));
}

SurfacePatch spinor_surface(const SpinorData& data, const GridSpec& grid,
                            std::pair<int, int> anchor, const IsoPoint& x0,
                            double compat_tol) {
  if (!data.alpha || !data.beta_h)
    throw std::invalid_argument("spinor: alpha and beta_h are required");
  grid.validate();
  const int n = grid.size();

  ExprPtr da = differentiate(data.alpha);
  ExprPtr df = differentiate(data.beta_h);
  ExprPtr dg = data.beta_ah ? differentiate(data.beta_ah) : nullptr;

  XzData d;
  d.xz.resize(n);
  d.dz.resize(n);
  d.dzb.resize(n);
  ReprFields r;
  r.metric.resize(n);
  r.mean.resize(n);
  r.hopf.resize(n);
  r.h.resize(n);

  double compat = 0.0;
  for (int iu = 0; iu < grid.nu; ++iu)
    for (int iv = 0; iv < grid.nv; ++iv) {
      int s = grid.index(iu, iv);
      cplx z = grid.z(iu, iv);
      cplx a = eval(data.alpha, z);
      if (std::abs(a) < 1e-12) throw PoleError(z);
      cplx ad = eval(da, z);
      cplx f = eval(data.beta_h, z);
      cplx fd = eval(df, z);
      cplx g = data.beta_ah ? eval(data.beta_ah, z) : cplx{1, 0};
      cplx gd = dg ? eval(dg, z) : cplx{};
      cplx beta = f * std::conj(g);
      cplx beta_z = fd * std::conj(g);
      cplx beta_zb = f * std::conj(gd);

      compat = std::max(compat, std::abs(2.0 * std::imag(a * beta_zb)));

      cplx a2 = a * a;
      d.xz[s] = xz_of(a * beta, a2);
      d.dz[s] = xz_of(ad * beta + a * beta_z, 2.0 * a * ad);
      d.dzb[s] = xz_of(a * beta_zb, 0.0);

      double det = std::norm(a);
      r.metric[s] = det * det;
      r.mean[s] = std::real(beta_zb / (std::conj(a) * det));
      r.hopf[s] = 0.5 * (a * beta_z - ad * beta);
      r.h[s] = beta / a;
    }
  if (compat > compat_tol) throw CompatibilityError(compat);

  PatchMeta meta;
  meta.provenance = Provenance::Integrated;
  meta.source = "spinor";
  return integrate_xz(grid, d, anchor, x0, std::move(meta), std::move(r));
}

// ---------------------------------------------------------------------------
// Closed-form catalogue.

namespace {

Jet delaunay_jet(double H, double a, double u, double v) {
  double c = std::cos(v), s = std::sin(v), eu = std::exp(u), e2u = eu * eu;
  double l = 0.5 * (H * e2u + 2 * a * u);
  double lu = H * e2u + a, luu = 2 * H * e2u;
  Jet j;
  j.x = {l, eu * c, eu * s};
  j.xu = {lu, eu * c, eu * s, lu};
  j.xv = {0, -eu * s, eu * c, 0};
  j.xuu = {luu, eu * c, eu * s, luu};
  j.xuv = {0, -eu * s, eu * c, 0};
  j.xvv = {0, -eu * c, -eu * s, 0};
  return j;
}

Jet cylinder_jet(double H, double u, double v) {
  Jet j;
  j.x = {H * u * u, u, v};
  j.xu = {2 * H * u, 1, 0, 2 * H * u};
  j.xv = {0, 0, 1, 0};
  j.xuu = {2 * H, 0, 0, 2 * H};
  return j;
}

Jet singly_jet(double H, double a, double b, double u, double v) {
  double eau = std::exp(a * u), ebu = std::exp(b * u);
  double ca = std::cos(a * v), sa = std::sin(a * v);
  double cb = std::cos(b * v), sb = std::sin(b * v);
  Jet j;
  double l = H * eau * eau / (2 * a * a) + ebu * cb / b;
  double lu = H * eau * eau / a + ebu * cb;
  double lv = -ebu * sb;
  j.x = {l, eau * ca / a, eau * sa / a};
  j.xu = {lu, eau * ca, eau * sa, lu};
  j.xv = {lv, -eau * sa, eau * ca, lv};
  double luu = 2 * H * eau * eau + b * ebu * cb;
  double luv = -b * ebu * sb;
  double lvv = -b * ebu * cb;
  j.xuu = {luu, a * eau * ca, a * eau * sa, luu};
  j.xuv = {luv, -a * eau * sa, a * eau * ca, luv};
  j.xvv = {lvv, -a * eau * ca, -a * eau * sa, lvv};
  return j;
}

template <class JetFn, class ReprFn>
SurfacePatch build_catalogue(const GridSpec& g, JetFn&& jet, PatchMeta meta,
                             ReprFn&& fill) {
  g.validate();
  std::vector<Jet> jets(g.size());
  ReprFields r;
  r.metric.resize(g.size());
  r.mean.resize(g.size());
  r.hopf.resize(g.size());
  r.h.resize(g.size());
  for (int iu = 0; iu < g.nu; ++iu)
    for (int iv = 0; iv < g.nv; ++iv) {
      int s = g.index(iu, iv);
      jets[s] = jet(g.u(iu), g.v(iv));
      fill(s, g.u(iu), g.v(iv), r);
    }
  return assemble_patch(g, std::move(jets), std::move(meta), std::move(r));
}

}  // namespace

std::vector<std::string> catalogue_names() {
  return {"sphere", "cylinder", "delaunay", "singly_periodic"};
}

SurfacePatch catalogue_patch(const std::string& name,
                             const CatalogueParams& p, const GridSpec& g) {
  const double H = p.mean;
  if (name == "sphere") {
    if (H == 0) throw std::domain_error("sphere: mean curvature must be nonzero");
    PatchMeta m{Provenance::ClosedForm, "sphere", H, {}, "", true};
    return build_catalogue(
        g, [H](double u, double v) { return delaunay_jet(H, 0, u, v); }, m,
        [H](int s, double u, double v, ReprFields& r) {
          double e2u = std::exp(2 * u);
          r.metric[s] = e2u;
          r.mean[s] = H;
          r.hopf[s] = 0;
          r.h[s] = H * std::exp(cplx{u, -v});
        });
  }
  if (name == "cylinder") {
    PatchMeta m{Provenance::ClosedForm, "cylinder", H, {}, "", false};
    return build_catalogue(
        g, [H](double u, double v) { return cylinder_jet(H, u, v); }, m,
        [H](int s, double u, double v, ReprFields& r) {
          r.metric[s] = 1;
          r.mean[s] = H;
          r.hopf[s] = H / 2;
          r.h[s] = 2 * H * u;
        });
  }
  if (name == "delaunay") {
    const double a = p.a;
    PatchMeta m{Provenance::ClosedForm, "delaunay", H, {}, "", a == 0};
    return build_catalogue(
        g, [H, a](double u, double v) { return delaunay_jet(H, a, u, v); }, m,
        [H, a](int s, double u, double v, ReprFields& r) {
          r.metric[s] = std::exp(2 * u);
          r.mean[s] = H;
          r.hopf[s] = -a / 2;
          r.h[s] = H * std::exp(cplx{u, -v}) + a * std::exp(cplx{-u, -v});
        });
  }
  if (name == "singly_periodic") {
    if (p.ra.num == 0 || p.rb.num == 0)
      throw std::domain_error("singly_periodic: a and b must be nonzero");
    const double a = p.ra.value(), b = p.rb.value();
    Rational L = period_multiplier(p.ra, p.rb);
    PatchMeta m{Provenance::ClosedForm, "singly_periodic", H,
                kTwoPi * L.value(), dihedral_label(p.ra, p.rb), false};
    return build_catalogue(
        g, [H, a, b](double u, double v) { return singly_jet(H, a, b, u, v); },
        m, [H, a, b](int s, double u, double v, ReprFields& r) {
          r.metric[s] = std::exp(2 * a * u);
          r.mean[s] = H;
          r.hopf[s] = 0.5 * (b - a) * std::exp(b * cplx{u, v});
          r.h[s] = (H / a) * std::exp(a * cplx{u, -v}) +
                   std::exp((b - a) * cplx{u, v});
        });
  }
  throw std::invalid_argument("catalogue: unknown surface '" + name + "'");
}

CatalogueKenmotsu kenmotsu_of(const std::string& name,
                              const CatalogueParams& p) {
  const double H = p.mean;
  CatalogueKenmotsu out;
  out.data.mean = H;
  if (name == "sphere") {
    out.data.omega = exp_kz(1);
    out.data.h2 = nullptr;
    out.h1 = make_mul(rc(H), exp_kz(1));
    return out;
  }
  if (name == "cylinder") {
    out.data.omega = make_const(1);
    out.data.h2 = make_mul(rc(H), make_var());
    out.h1 = out.data.h2;
    return out;
  }
  if (name == "delaunay") {
    out.data.omega = exp_kz(1);
    out.data.h2 = make_mul(rc(p.a), exp_kz(-1));
    out.h1 = make_mul(rc(H), exp_kz(1));
    return out;
  }
  if (name == "singly_periodic") {
    if (p.ra.num == 0 || p.rb.num == 0)
      throw std::domain_error("singly_periodic: a and b must be nonzero");
    const double a = p.ra.value(), b = p.rb.value();
    out.data.omega = exp_kz(a);
    out.data.h2 = exp_kz(b - a);
    out.h1 = make_mul(rc(H / a), exp_kz(a));
    return out;
  }
  throw std::invalid_argument("catalogue: unknown surface '" + name + "'");
}

}  // namespace isogeo
