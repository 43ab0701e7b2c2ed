#include "isogeo/mink.hpp"

#include <doctest.h>
#include <random>

using namespace isogeo;

namespace {
double dist(const MinkVec& a, const MinkVec& b) { return (a - b).max_abs(); }
}  // namespace

TEST_CASE("fixed lightlike complexes pair exactly") {
  CHECK(mink_inner(K, K) == 0.0);
  CHECK(mink_inner(K_DUAL, K_DUAL) == 0.0);
  CHECK(mink_inner(K, K_DUAL) == 1.0);
}

TEST_CASE("inner product oracle values") {
  CHECK(mink_inner({1, 2, 3, 4}, {1, 2, 3, 4}) == 28.0);
  // bilinear + symmetric on a random sweep
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> d(-5, 5);
  for (int k = 0; k < 200; ++k) {
    MinkVec a{d(rng), d(rng), d(rng), d(rng)};
    MinkVec b{d(rng), d(rng), d(rng), d(rng)};
    MinkVec c{d(rng), d(rng), d(rng), d(rng)};
    double s = d(rng);
    CHECK(mink_inner(a, b) == doctest::Approx(mink_inner(b, a)).epsilon(1e-14));
    CHECK(mink_inner(a + s * b, c) ==
          doctest::Approx(mink_inner(a, c) + s * mink_inner(b, c))
              .epsilon(1e-12));
  }
}

TEST_CASE("embedded isotropic points are orthogonal to K") {
  IsoPoint p{2.5, -1.0, 0.75};
  CHECK(mink_inner(p.embed(), K) == 0.0);
}

TEST_CASE("sphere dictionary") {
  CHECK(dist(sphere_point({{0, 0, 0}, 1.0}), K_DUAL) == 0.0);
  CHECK(dist(sphere_point({{0, 0, 0}, 0.0}), MinkVec{}) == 0.0);
  CHECK(dist(sphere_point(IsoPoint{1, 2, 3}, 2.0), MinkVec{0, 2, 3, 2}) == 0.0);

  SphereI unit = sphere_decompose(K_DUAL);
  CHECK(unit.radius == 1.0);
  CHECK(unit.center.max_abs() == 0.0);
  // boundary equation x^2 + y^2 = 2 l for that sphere
  CHECK(sphere_residual(unit, {0.5, 1, 0}) == 0.0);

  SphereI cyl = sphere_decompose({1, 2, 3, 1});
  CHECK(cyl.radius == 0.0);
  CHECK(cyl.center.l == 1.0);
  CHECK(cyl.center.x == 2.0);
  CHECK(cyl.center.y == 3.0);

  SphereI back = sphere_decompose({0, 2, 3, 2});
  CHECK(back.radius == 2.0);
  CHECK(back.center.l == 1.0);
}

TEST_CASE("sphere roundtrip on random input") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> d(-10, 10);
  for (int k = 0; k < 500; ++k) {
    MinkVec s{d(rng), d(rng), d(rng), d(rng)};
    SphereI dec = sphere_decompose(s);
    CHECK(dist(sphere_point(dec), s) < 1e-12);
    IsoPoint c{d(rng), d(rng), d(rng)};
    double r = d(rng);
    SphereI dec2 = sphere_decompose(sphere_point(c, r));
    CHECK(std::abs(dec2.radius - r) < 1e-12);
    CHECK((dec2.center - c).max_abs() < 1e-12);
    // apex always lies on the paraboloid
    CHECK(std::abs(sphere_residual(dec2, c)) < 1e-12);
  }
}

TEST_CASE("sphere residual detects off-sphere points") {
  SphereI unit{{0, 0, 0}, 1.0};
  CHECK(sphere_residual(unit, {0, 1, 0}) == 1.0);
}

TEST_CASE("plane unit normal") {
  auto n0 = plane_unit_normal(1, 0, 0);
  CHECK(n0.max_abs() == 0.0);
  auto n1 = plane_unit_normal(1, 1, 0);
  CHECK(n1.l == 0.5);
  CHECK(n1.x == -1.0);
  CHECK(n1.y == 0.0);
  auto n2 = plane_unit_normal(2, 2, 2);
  CHECK(n2.l == 1.0);
  CHECK(n2.x == -1.0);
  CHECK(n2.y == -1.0);
  CHECK_THROWS_AS(plane_unit_normal(0, 1, 1), LightlikePlaneError);
}

TEST_CASE("plane unit normal properties") {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> d(-4, 4);
  for (int k = 0; k < 300; ++k) {
    double a = d(rng);
    if (std::abs(a) < 1e-3) continue;
    double b = d(rng), c = d(rng);
    IsoPoint n = plane_unit_normal(a, b, c);
    // lies on the isotropic unit sphere x^2 + y^2 = 2 l
    CHECK(std::abs(n.x * n.x + n.y * n.y - 2 * n.l) < 1e-12 * (1.0 + 2 * std::abs(n.l)));
    // scale invariance (positive scale); l grows like 1/a^2, so compare relatively
    IsoPoint m = plane_unit_normal(2.5 * a, 2.5 * b, 2.5 * c);
    CHECK((n - m).max_abs() < 1e-12 * (1.0 + n.max_abs()));
  }
}

TEST_CASE("oriented contact residual") {
  CHECK(oriented_contact_residual(MinkVec{}, {{1, 1, 1, 1}, 0}) == 0.0);
  CHECK(oriented_contact_residual(K_DUAL, {K, 1.0}) == 0.0);
  CHECK(oriented_contact_residual(K_DUAL, {K, 0.0}) == 1.0);
}

TEST_CASE("contact point of a null line") {
  IsoPoint o = contact_point({K_DUAL, K_DUAL});
  CHECK(o.max_abs() == 0.0);
  IsoPoint p = contact_point({{0, 1, 0, 0}, K_DUAL});
  CHECK(p.l == 0.0);
  CHECK(p.x == 1.0);
  CHECK(p.y == 0.0);
  IsoPoint q = contact_point({K_DUAL + MinkVec{1, 2, 3, 1}, K_DUAL});
  CHECK(q.l == doctest::Approx(1.0));
  CHECK(q.x == doctest::Approx(2.0));
  CHECK(q.y == doctest::Approx(3.0));
  CHECK_THROWS_AS(contact_point({K_DUAL, {0, 1, 0, 0}}), IsotropicLineError);
}

TEST_CASE("contact point embeds orthogonal to K") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> d(-3, 3);
  for (int k = 0; k < 300; ++k) {
    MinkVec base{d(rng), d(rng), d(rng), d(rng)};
    double w = d(rng);
    // lightlike direction with <dir,K> = 1
    double n0 = -(w * w + 1) / 2;
    MinkVec dir{n0 - 0.5, w, 1.0, n0 + 0.5};
    IsoPoint x = contact_point({base, dir});
    CHECK(mink_inner(x.embed(), K) == 0.0);
  }
}

TEST_CASE("euclid sphere decompose") {
  auto s = euclid_sphere_decompose({2, 0, 0, 0});
  CHECK(s.radius == 2.0);
  CHECK(s.center == std::array<double, 3>{0, 0, 0});
  auto p = euclid_sphere_decompose({0, 1, 1, 1});
  CHECK(p.radius == 0.0);
  CHECK(p.center == std::array<double, 3>{1, 1, 1});
  CHECK(euclid_sphere_decompose({-1, 0, 0, 0}).radius == -1.0);
}

namespace {

// Contact lift of the graph l = (u^2+v^2)/2: point sphere at the graph point,
// line direction the lightlike plane normal of the tangent plane.
ContactLine paraboloid_lift(double u, double v) {
  IsoPoint x{(u * u + v * v) / 2, u, v};
  double n0 = -(u * u + v * v) / 2;
  MinkVec dir{n0 - 0.5, -u, -v, n0 + 0.5};
  return {x.embed(), dir};
}

}  // namespace

TEST_CASE("legendre residuals") {
  GridSpec g{-1, 1, -1, 1, 201, 201};

  SUBCASE("constant plane family is a frontal") {
    std::vector<ContactLine> fam(g.size());
    for (int iu = 0; iu < g.nu; ++iu)
      for (int iv = 0; iv < g.nv; ++iv)
        fam[g.index(iu, iv)] =
            ContactLine{{0, g.u(iu), g.v(iv), 0}, K_DUAL};
    auto r = legendre_residuals(g, fam);
    CHECK(r.contact == doctest::Approx(0.0).epsilon(1e-12));
  }

  SUBCASE("paraboloid lift is a front") {
    std::vector<ContactLine> fam(g.size());
    for (int iu = 0; iu < g.nu; ++iu)
      for (int iv = 0; iv < g.nv; ++iv)
        fam[g.index(iu, iv)] = paraboloid_lift(g.u(iu), g.v(iv));
    auto r = legendre_residuals(g, fam);
    CHECK(r.contact <= 1e-6);
    CHECK(r.immersion > 0.5);  // conformal factor 1 for this graph
  }

  SUBCASE("perturbed direction violates contact") {
    std::vector<ContactLine> fam(g.size());
    for (int iu = 0; iu < g.nu; ++iu)
      for (int iv = 0; iv < g.nv; ++iv) {
        auto lift = paraboloid_lift(g.u(iu), g.v(iv));
        lift.dir = lift.dir + MinkVec{0, 0.1, 0, 0};
        fam[g.index(iu, iv)] = lift;
      }
    auto r = legendre_residuals(g, fam);
    CHECK(r.contact > 1e-3);
  }

  SUBCASE("family size must match grid") {
    std::vector<ContactLine> fam(3);
    CHECK_THROWS_AS(legendre_residuals(g, fam), std::invalid_argument);
  }
}
