#include <doctest.h>

#include <cmath>
#include <random>

#include "isogeo/spin.hpp"

using namespace isogeo;

namespace {

Jet plane_jet(double u, double v) {
  Jet j;
  j.x = {0, u, v};
  j.xu = {0, 1, 0, 0};
  j.xv = {0, 0, 1, 0};
  return j;
}

Jet paraboloid_jet(double H, double u, double v) {
  Jet j;
  j.x = {0.5 * H * (u * u + v * v), u, v};
  j.xu = {H * u, 1, 0, H * u};
  j.xv = {H * v, 0, 1, H * v};
  j.xuu = {H, 0, 0, H};
  j.xuv = {};
  j.xvv = {H, 0, 0, H};
  return j;
}

SurfacePatch plane_patch(const GridSpec& g) {
  SurfaceClosure f{[](double u, double v) { return plane_jet(u, v).x; },
                   [](double u, double v) { return plane_jet(u, v); }};
  return assemble_patch(g, jets_from_closure(f, g), {});
}

// beta = c * conj(z); alpha = 1.  The model family for the Dirac tests.
SpinField conj_linear_field(const GridSpec& g, cplx c, bool analytic,
                            bool with_rho) {
  SpinField f;
  f.grid = g;
  f.samples.resize(g.size());
  if (analytic) f.derivs.resize(g.size());
  for (int iu = 0; iu < g.nu; ++iu)
    for (int iv = 0; iv < g.nv; ++iv) {
      int s = g.index(iu, iv);
      cplx z = g.z(iu, iv);
      f.samples[s] = {1.0, c * std::conj(z)};
      if (analytic) f.derivs[s] = {0.0, 0.0, 0.0, c};
    }
  if (with_rho) f.rho.assign(g.size(), c.real());
  return f;
}

}  // namespace

TEST_CASE("spin differential worked values") {
  Herm2 xu = to_herm({0, 1, 0, 0});

  // identity factor: unchanged, [[0, 1], [1, 0]]
  Herm2 t = spin_differential({}, xu);
  CHECK(t.d00 == 0.0);
  CHECK(t.d11 == 0.0);
  CHECK(t.o == cplx{1, 0});

  // real homothety: scales by det B = k^2
  Herm2 h = spin_differential({2.0, 0.0}, xu);
  CHECK((from_herm(h) - MinkVec{0, 4, 0, 0}).max_abs() == 0.0);

  // beta = conj(z): du-differential of the plane turns into [[2u, 1], [1, 0]]
  double u = 0.7, v = -0.4;
  SpinFactor b{1.0, cplx{u, -v}};
  Herm2 s = spin_differential(b, xu);
  CHECK(std::abs(s.d00 - 2 * u) < 1e-15);
  CHECK(s.d11 == 0.0);
  CHECK(std::abs(s.o - cplx{1, 0}) < 1e-15);
}

TEST_CASE("spin differential preserves tangency exactly") {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> d(-2, 2);
  for (int k = 0; k < 200; ++k) {
    SpinFactor b{{d(rng), d(rng)}, {d(rng), d(rng)}};
    MinkVec tangent{d(rng), d(rng), d(rng), 0};
    tangent.x3 = tangent.x0;  // <tangent, K> = 0
    Herm2 out = spin_differential(b, to_herm(tangent));
    CHECK(out.d11 == 0.0);  // structural zero, not approximate
    MinkVec w = from_herm(out);
    CHECK(std::abs(w.x0 - w.x3) < 1e-15);
  }
}

TEST_CASE("transformed mean curvature") {
  CHECK(transformed_mean(1, 0, 1) == 1.0);
  CHECK(transformed_mean(0, 1, 1) == 1.0);
  CHECK(transformed_mean(0, 1, 4) == 0.25);
  CHECK(transformed_mean(2, 1, 2) == 1.5);
  CHECK_THROWS_AS(transformed_mean(1, 1, 0), std::domain_error);
  CHECK_THROWS_AS(transformed_mean(1, 1, -1), std::domain_error);
}

TEST_CASE("Dirac residual vanishes for the closed model family") {
  GridSpec g{-1, 1, -1, 1, 41, 41};
  auto base = plane_patch(g);

  // finite-difference derivatives, interior only
  auto fd = conj_linear_field(g, 1.0, false, true);
  auto r1 = dirac_residual(fd, base);
  double worst = 0;
  for (double x : r1) worst = std::max(worst, x);
  CHECK(worst < 1e-12);

  // analytic derivatives, all samples including the boundary
  auto an = conj_linear_field(g, 1.0, true, true);
  auto r2 = dirac_residual(an, base);
  worst = 0;
  for (double x : r2) worst = std::max(worst, x);
  CHECK(worst < 1e-14);
}

TEST_CASE("Dirac residual detects a wrong potential") {
  GridSpec g{-1, 1, -1, 1, 21, 21};
  auto base = plane_patch(g);
  auto f = conj_linear_field(g, 1.0, true, true);
  f.rho.assign(g.size(), 0.0);  // should be 1
  auto r = dirac_residual(f, base);
  // residual matrix is [[1 - rho, 0], [0, 0]]
  CHECK(std::abs(r[g.index(10, 10)] - 1.0) < 1e-14);
}

TEST_CASE("Dirac residual requires a potential") {
  GridSpec g{-1, 1, -1, 1, 5, 5};
  auto base = plane_patch(g);
  auto f = conj_linear_field(g, 1.0, false, false);
  CHECK_THROWS_AS(dirac_residual(f, base), std::invalid_argument);
}

TEST_CASE("base-plane potential recovery") {
  GridSpec g{-1, 1, -1, 1, 21, 21};
  for (double c : {1.0, 2.0, -0.5}) {
    auto f = conj_linear_field(g, c, true, false);
    auto rho = rho_base_plane(f);
    for (double r : rho) CHECK(std::abs(r - c) < 1e-14);
  }
  // constant factor: no potential needed
  SpinField id;
  id.grid = g;
  id.samples.assign(g.size(), SpinFactor{2.0, cplx{0.3, -1}});
  auto rho = rho_base_plane(id);
  for (double r : rho) CHECK(std::abs(r) < 1e-13);
}

TEST_CASE("integrating the identity factor translates the base") {
  GridSpec g{-1, 1, -1, 1, 31, 31};
  auto base = plane_patch(g);
  SpinField id;
  id.grid = g;
  id.samples.assign(g.size(), SpinFactor{});
  IsoPoint x0{5, 1, -2};
  auto out = integrate_spin(id, base, {15, 15}, x0);
  // base anchor is the origin, so everything shifts by x0
  for (int s = 0; s < g.size(); ++s) {
    IsoPoint want = base.jets[s].x + x0;
    CHECK((out.jets[s].x - want).max_abs() < 1e-13);
  }
  CHECK(out.meta.provenance == Provenance::Integrated);
  CHECK(out.meta.source == "spin");
}

TEST_CASE("the conj(z) factor turns the plane into the unit-mean sphere") {
  GridSpec g{-1, 1, -1, 1, 201, 201};
  auto base = plane_patch(g);
  auto f = conj_linear_field(g, 1.0, true, true);
  int au = 100, av = 100;  // grid point at z = 0
  IsoPoint x0 = paraboloid_jet(1, g.u(au), g.v(av)).x;
  auto out = integrate_spin(f, base, {au, av}, x0);

  double worst = 0;
  for (int iu = 0; iu < g.nu; ++iu)
    for (int iv = 0; iv < g.nv; ++iv) {
      IsoPoint want = paraboloid_jet(1, g.u(iu), g.v(iv)).x;
      worst = std::max(worst,
                       (out.jets[g.index(iu, iv)].x - want).max_abs());
    }
  CHECK(worst < 1e-6);   // the sphere oracle
  CHECK(worst < 1e-12);  // in fact exact: the differential is linear

  // predicted fields match the measured patch
  REQUIRE(out.repr.has_value());
  for (int s = 0; s < g.size(); ++s) {
    CHECK(std::abs(out.repr->mean[s] - 1.0) == 0.0);
    CHECK(std::abs(out.forms[s].H - 1.0) < 1e-8);
    CHECK(std::abs(out.repr->metric[s] - std::exp(2 * out.forms[s].sigma)) <
          1e-8);
    CHECK(std::abs(out.forms[s].Q) < 1e-8);  // umbilic
  }
}

TEST_CASE("scaled factor doubles the mean curvature") {
  GridSpec g{-1, 1, -1, 1, 101, 101};
  auto base = plane_patch(g);
  auto f = conj_linear_field(g, 2.0, true, true);
  IsoPoint x0 = paraboloid_jet(2, g.u(50), g.v(50)).x;
  auto out = integrate_spin(f, base, {50, 50}, x0);
  for (int iu = 0; iu < g.nu; ++iu)
    for (int iv = 0; iv < g.nv; ++iv) {
      IsoPoint want = paraboloid_jet(2, g.u(iu), g.v(iv)).x;
      CHECK((out.jets[g.index(iu, iv)].x - want).max_abs() < 1e-12);
    }
  for (int s = 0; s < g.size(); ++s)
    CHECK(std::abs(out.forms[s].H - 2.0) < 1e-8);
}

TEST_CASE("row-then-column and column-then-row sweeps agree") {
  GridSpec g{-1, 1, -1, 1, 81, 81};
  auto base = plane_patch(g);
  auto f = conj_linear_field(g, 1.0, true, true);
  auto a = integrate_spin(f, base, {40, 40}, {0, 0, 0}, false);
  auto b = integrate_spin(f, base, {40, 40}, {0, 0, 0}, true);
  double worst = 0;
  for (int s = 0; s < g.size(); ++s)
    worst = std::max(worst, (a.jets[s].x - b.jets[s].x).max_abs());
  CHECK(worst < 1e-8);
}

TEST_CASE("a non-closed differential raises IntegrabilityError") {
  GridSpec g{-1, 1, -1, 1, 41, 41};
  auto base = plane_patch(g);
  SpinField f;
  f.grid = g;
  f.samples.resize(g.size());
  for (int iu = 0; iu < g.nu; ++iu)
    for (int iv = 0; iv < g.nv; ++iv) {
      cplx z = g.z(iu, iv);
      // beta = conj(z)^2 fails the compatibility condition: B^-1 B_z has
      // off-diagonal 2z, which no real potential can cancel.
      f.samples[g.index(iu, iv)] = {1.0, std::conj(z) * std::conj(z)};
    }
  CHECK_THROWS_AS(integrate_spin(f, base, {20, 20}, {0, 0, 0}),
                  IntegrabilityError);
}

TEST_CASE("grid mismatch and singular factors are rejected") {
  GridSpec g{-1, 1, -1, 1, 11, 11};
  GridSpec g2{-1, 1, -1, 1, 11, 13};
  auto base = plane_patch(g);
  SpinField f;
  f.grid = g2;
  f.samples.resize(g2.size());
  CHECK_THROWS_AS(integrate_spin(f, base, {5, 5}, {0, 0, 0}),
                  std::invalid_argument);

  SpinField sing;
  sing.grid = g;
  sing.samples.assign(g.size(), SpinFactor{0.0, 1.0});
  CHECK_THROWS_AS(integrate_spin(sing, base, {5, 5}, {0, 0, 0}),
                  std::domain_error);

  SpinField wrong;
  wrong.grid = g;
  wrong.samples.resize(3);
  CHECK_THROWS_AS(wrong.validate(), std::invalid_argument);
}
