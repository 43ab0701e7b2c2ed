#include <doctest.h>

#include <cmath>
#include <random>

#include "isogeo/surface.hpp"

using namespace isogeo;

namespace {

// Rotational cmc family: x = ((H e^{2u} + 2 a u)/2, e^u cos v, e^u sin v).
// a = 0 is the sphere of radius 1/H.
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
  j.xuv = {};
  j.xvv = {};
  return j;
}

Jet paraboloid_jet(double u, double v) {
  Jet j;
  j.x = {0.5 * (u * u + v * v), u, v};
  j.xu = {u, 1, 0, u};
  j.xv = {v, 0, 1, v};
  j.xuu = {1, 0, 0, 1};
  j.xuv = {};
  j.xvv = {1, 0, 0, 1};
  return j;
}

Jet plane_jet(double u, double v) {
  Jet j;
  j.x = {0, u, v};
  j.xu = {0, 1, 0, 0};
  j.xv = {0, 0, 1, 0};
  return j;
}

SurfaceClosure closure_of(Jet (*jet)(double, double)) {
  return {[jet](double u, double v) { return jet(u, v).x; },
          [jet](double u, double v) { return jet(u, v); }};
}

SurfaceClosure position_only(Jet (*jet)(double, double)) {
  return {[jet](double u, double v) { return jet(u, v).x; }, nullptr};
}

Jet sphere_jet(double u, double v) { return delaunay_jet(1.0, 0.0, u, v); }

double jet_distance(const Jet& a, const Jet& b) {
  double m = (a.x.embed() - b.x.embed()).max_abs();
  m = std::max(m, (a.xu - b.xu).max_abs());
  m = std::max(m, (a.xv - b.xv).max_abs());
  m = std::max(m, (a.xuu - b.xuu).max_abs());
  m = std::max(m, (a.xuv - b.xuv).max_abs());
  m = std::max(m, (a.xvv - b.xvv).max_abs());
  return m;
}

}  // namespace

TEST_CASE("analytic closure is sampled exactly") {
  GridSpec g{-1, 1, -1, 1, 5, 5};
  auto jets = jets_from_closure(closure_of(&paraboloid_jet), g);
  Jet want = paraboloid_jet(g.u(3), g.v(1));
  CHECK(jet_distance(jets[g.index(3, 1)], want) == 0.0);
  CHECK(jets.size() == 25);
}

TEST_CASE("position-only jets match analytic jets to 1e-6 at h = 1e-3") {
  GridSpec g{-0.1, 0.1, -0.1, 0.1, 201, 201};
  auto fd = jets_from_closure(position_only(&sphere_jet), g);
  double worst = 0;
  for (int iu = 1; iu < g.nu - 1; ++iu)
    for (int iv = 1; iv < g.nv - 1; ++iv) {
      Jet want = sphere_jet(g.u(iu), g.v(iv));
      worst = std::max(worst, jet_distance(fd[g.index(iu, iv)], want));
    }
  CHECK(worst < 1e-6);
}

TEST_CASE("halving the spacing divides the jet error by about four") {
  double errs[2];
  for (int k = 0; k < 2; ++k) {
    int n = k == 0 ? 41 : 81;
    GridSpec g{-1, 1, -1, 1, n, n};
    auto fd = jets_from_closure(position_only(&sphere_jet), g);
    double worst = 0;
    for (int iu = 0; iu < g.nu; ++iu)
      for (int iv = 0; iv < g.nv; ++iv)
        worst = std::max(
            worst, jet_distance(fd[g.index(iu, iv)], sphere_jet(g.u(iu), g.v(iv))));
    errs[k] = worst;
  }
  double ratio = errs[0] / errs[1];
  CHECK(ratio > 3.5);
  CHECK(ratio < 4.5);
}

TEST_CASE("non-finite closures are rejected") {
  SurfaceClosure bad{[](double u, double v) {
                       return IsoPoint{u == 0 && v == 0 ? 1.0 / 0.0 : 0.0, u, v};
                     },
                     nullptr};
  GridSpec g{-1, 1, -1, 1, 3, 3};
  CHECK_THROWS_AS(jets_from_closure(bad, g), std::runtime_error);
  GridSpec tiny{-1, 1, -1, 1, 2, 3};
  CHECK_THROWS_AS(jets_from_closure(closure_of(&plane_jet), tiny),
                  std::invalid_argument);
}

TEST_CASE("lightlike Gauss map worked values") {
  // plane: the constant dual direction
  MinkVec g0 = lightlike_gauss({0, 1, 0, 0}, {0, 0, 1, 0});
  CHECK((g0 - K_DUAL).max_abs() == 0.0);

  // paraboloid at (u, v) = (1, 2)
  Jet p = paraboloid_jet(1, 2);
  MinkVec g1 = lightlike_gauss(p.xu, p.xv);
  CHECK((g1 - MinkVec{-3, -1, -2, -2}).max_abs() < 1e-14);

  // cylinder H = 1 at u = 2: nu = (-4, 0), nu0 = -8
  Jet c = cylinder_jet(1, 2, 0);
  MinkVec g2 = lightlike_gauss(c.xu, c.xv);
  CHECK((g2 - MinkVec{-8.5, -4, 0, -7.5}).max_abs() < 1e-14);
}

TEST_CASE("Gauss map defining identities on random tangents") {
  std::mt19937 rng(19);
  std::uniform_real_distribution<double> d(-3, 3);
  int tested = 0;
  for (int k = 0; k < 400; ++k) {
    // spatial parts must be independent; l-parts free
    MinkVec xu{d(rng), d(rng), d(rng), 0}, xv{d(rng), d(rng), d(rng), 0};
    xu.x3 = xu.x0;
    xv.x3 = xv.x0;
    double det = xu.x1 * xv.x2 - xu.x2 * xv.x1;
    if (std::abs(det) < 0.1) continue;
    MinkVec g = lightlike_gauss(xu, xv);
    double scale = 1.0 + g.max_abs() * g.max_abs();
    CHECK(std::abs(mink_inner(g, g)) < 1e-12 * scale);
    CHECK(std::abs(mink_inner(g, K) - 1) < 1e-12);
    CHECK(std::abs(mink_inner(xu, g)) < 1e-11 * scale);
    CHECK(std::abs(mink_inner(xv, g)) < 1e-11 * scale);
    ++tested;
  }
  CHECK(tested > 300);
}

TEST_CASE("degenerate tangents are flagged") {
  // lightlike tangent: no spatial part at all
  CHECK_THROWS_AS(lightlike_gauss({1, 0, 0, 1}, {0, 0, 1, 0}),
                  NonSpacelikeError);
  // nearly parallel spatial parts: conditioning guard
  CHECK_THROWS_AS(lightlike_gauss({0, 1, 1, 0}, {0, 1, 1 + 1e-12, 0}),
                  NonSpacelikeError);
}

TEST_CASE("fundamental forms on the flat catalogue") {
  MinkVec gp = lightlike_gauss(plane_jet(0, 0).xu, plane_jet(0, 0).xv);
  FundForms f = fundamental_forms(plane_jet(0.4, -2), gp);
  CHECK(f.sigma == 0.0);
  CHECK(f.L == 0.0);
  CHECK(f.M == 0.0);
  CHECK(f.N == 0.0);
  CHECK(f.H == 0.0);
  CHECK(std::abs(f.Q) == 0.0);
  CHECK(f.K == 0.0);
  auto [k1, k2] = principal_curvatures(f);
  CHECK(k1 == 0.0);
  CHECK(k2 == 0.0);
}

TEST_CASE("fundamental forms on the paraboloid: totally umbilic") {
  for (double u : {0.0, 1.0, -0.7})
    for (double v : {0.0, -2.0, 0.3}) {
      Jet j = paraboloid_jet(u, v);
      MinkVec g = lightlike_gauss(j.xu, j.xv);
      FundForms f = fundamental_forms(j, g);
      CHECK(std::abs(f.sigma) < 1e-14);
      CHECK(std::abs(f.L - 1) < 1e-12);
      CHECK(std::abs(f.M) < 1e-12);
      CHECK(std::abs(f.N - 1) < 1e-12);
      CHECK(std::abs(f.H - 1) < 1e-12);
      CHECK(std::abs(f.Q) < 1e-12);
      CHECK(std::abs(f.K - 1) < 1e-12);
      auto [k1, k2] = principal_curvatures(f);
      CHECK(std::abs(k1 - 1) < 1e-12);
      CHECK(std::abs(k2 - 1) < 1e-12);
    }
}

TEST_CASE("fundamental forms on the cylinder: flat but curved") {
  double H = 1.5;
  Jet j = cylinder_jet(H, 0.8, -0.3);
  FundForms f = fundamental_forms(j, lightlike_gauss(j.xu, j.xv));
  CHECK(std::abs(f.sigma) < 1e-14);
  CHECK(std::abs(f.L - 2 * H) < 1e-12);
  CHECK(std::abs(f.N) < 1e-12);
  CHECK(std::abs(f.H - H) < 1e-12);
  CHECK(std::abs(f.Q - cplx{H / 2, 0}) < 1e-12);
  CHECK(std::abs(f.K) < 1e-12);
  auto [k1, k2] = principal_curvatures(f);
  CHECK(std::abs(k1) < 1e-12);
  CHECK(std::abs(k2 - 2 * H) < 1e-12);
}

TEST_CASE("fundamental forms on the sphere family") {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> d(-1, 1);
  for (int k = 0; k < 100; ++k) {
    double u = d(rng), v = 3 * d(rng);
    Jet j = sphere_jet(u, v);
    CHECK(conformality_residual(j) < 1e-12 * std::exp(2 * u));
    FundForms f = fundamental_forms(j, lightlike_gauss(j.xu, j.xv));
    CHECK(std::abs(f.sigma - u) < 1e-12);
    CHECK(std::abs(f.H - 1) < 1e-12);
    CHECK(std::abs(f.Q) < 1e-12 * std::exp(2 * u));
    CHECK(std::abs(f.K - 1) < 1e-12);
    // scalar consistency identities
    CHECK(std::abs(std::exp(2 * f.sigma) * f.H - 0.5 * (f.L + f.N)) <
          1e-12 * (1 + std::abs(f.L)));
    auto [k1, k2] = principal_curvatures(f);
    CHECK(std::abs(k1 * k2 - f.K) < 1e-12);
    CHECK(std::abs(0.5 * (k1 + k2) - f.H) < 1e-12);
  }
}

TEST_CASE("non-conformal parametrizations are rejected") {
  Jet j;
  j.x = {0, 0, 0};
  j.xu = {0, 2, 0, 0};
  j.xv = {0, 0, 1, 0};
  CHECK_THROWS_AS(fundamental_forms(j, K_DUAL), NonConformalError);
  try {
    fundamental_forms(j, K_DUAL);
  } catch (const NonConformalError& e) {
    CHECK(std::string(e.what()).find("conformal") != std::string::npos);
  }
  Jet z;
  z.x = {0, 0, 0};
  CHECK_THROWS_AS(fundamental_forms(z, K_DUAL), NonSpacelikeError);
}

TEST_CASE("patch assembly on the cylinder") {
  GridSpec g{-1, 1, -1, 1, 11, 11};
  SurfaceClosure f{[](double u, double v) { return cylinder_jet(2, u, v).x; },
                   [](double u, double v) { return cylinder_jet(2, u, v); }};
  auto patch = assemble_patch(g, jets_from_closure(f, g), {});
  CHECK(patch.all_spacelike());
  for (int s = 0; s < g.size(); ++s) CHECK(std::abs(patch.forms[s].H - 2) < 1e-12);

  // poke one degenerate sample: flagged, the rest untouched
  auto jets = jets_from_closure(f, g);
  jets[g.index(5, 5)].xu = {};
  jets[g.index(5, 5)].xv = {};
  auto patched = assemble_patch(g, jets, {});
  CHECK(!patched.all_spacelike());
  CHECK(patched.spacelike[g.index(5, 5)] == 0);
  CHECK(patched.spacelike[g.index(5, 6)] == 1);
  CHECK(patched.gauss[g.index(5, 5)].max_abs() == 0.0);
}

TEST_CASE("structure residuals vanish identically on flat patches") {
  GridSpec g{-1, 1, -1, 1, 21, 21};
  for (auto* jet : {&plane_jet, &paraboloid_jet}) {
    auto patch = assemble_patch(g, jets_from_closure(closure_of(*jet), g), {});
    StructResiduals m = max_residuals(structure_residuals(patch));
    CHECK(m.gauss < 1e-12);
    CHECK(m.codazzi < 1e-12);
    CHECK(m.gw1 < 1e-12);
    CHECK(m.gw2 < 1e-12);
    CHECK(m.gw3 < 1e-12);
    CHECK(m.vertical < 1e-12);
  }
}

TEST_CASE("structure residuals on curved closed forms stay below 1e-5") {
  GridSpec g{-1, 1, -1, 1, 201, 201};
  struct Case {
    double H, a;
  };
  for (Case c : {Case{1, 0}, Case{1, 1}, Case{1, -2}}) {
    double H = c.H, a = c.a;
    SurfaceClosure f{
        [H, a](double u, double v) { return delaunay_jet(H, a, u, v).x; },
        [H, a](double u, double v) { return delaunay_jet(H, a, u, v); }};
    auto patch = assemble_patch(g, jets_from_closure(f, g), {});
    StructResiduals m = max_residuals(structure_residuals(patch));
    CHECK(m.gauss < 1e-5);
    CHECK(m.codazzi < 1e-5);
    CHECK(m.gw1 < 1e-5);
    CHECK(m.gw2 < 1e-5);
    CHECK(m.gw3 < 1e-5);
    CHECK(m.vertical < 1e-5);
  }
}

TEST_CASE("residuals near a flagged sample are masked, not poisoned") {
  GridSpec g{-1, 1, -1, 1, 41, 41};
  SurfaceClosure f{[](double u, double v) { return sphere_jet(u, v).x; },
                   [](double u, double v) { return sphere_jet(u, v); }};
  auto jets = jets_from_closure(f, g);
  jets[g.index(20, 20)].xu = {};
  jets[g.index(20, 20)].xv = {};
  auto patch = assemble_patch(g, jets, {});
  auto rs = structure_residuals(patch);
  // inside the mask margin: zeroed
  CHECK(rs[g.index(20, 22)].gw3 == 0.0);
  // far away: still measured and small
  CHECK(rs[g.index(5, 5)].vertical > 0.0);
  StructResiduals m = max_residuals(rs);
  CHECK(m.gw3 < 1e-4);
  CHECK(m.vertical < 1e-4);
}
