#pragma once

// Uniform parameter grids plus the finite-difference and quadrature kernels
// shared by the surface, spin and representation layers.
//
// Derivative kernels come in two accuracies:
//   *_o2  - classical second-order stencils (3-point central, 3/4-point
//           one-sided).  Used where a plain O(h^2) error model is wanted,
//           e.g. when building jets from a position-only closure.
//   *_o4  - fourth-order stencils (5-point central plus matching one-sided
//           and offset rows).  Used when differentiating fields that are
//           already exact per sample (analytic tangents, sigma, H, Q, the
//           Gauss map), where O(h^2) truncation would drown the residuals
//           being measured.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace isogeo {

using cplx = std::complex<double>;

struct GridSpec {
  double u0 = -1.0, u1 = 1.0;
  double v0 = -1.0, v1 = 1.0;
  int nu = 3, nv = 3;

  void validate() const {
    if (!(u0 < u1) || !(v0 < v1))
      throw std::invalid_argument("grid: require u0 < u1 and v0 < v1");
    if (nu < 3 || nv < 3)
      throw std::invalid_argument("grid: require nu >= 3 and nv >= 3");
  }

  double du() const { return (u1 - u0) / (nu - 1); }
  double dv() const { return (v1 - v0) / (nv - 1); }
  double u(int iu) const { return u0 + iu * du(); }
  double v(int iv) const { return v0 + iv * dv(); }
  cplx z(int iu, int iv) const { return {u(iu), v(iv)}; }

  // Row-major, u-major: sample (iu, iv) lives at iu*nv + iv.
  int index(int iu, int iv) const { return iu * nv + iv; }
  int size() const { return nu * nv; }
  double diameter() const { return std::hypot(u1 - u0, v1 - v0); }

  // Nearest sample indices to a parameter point; clamped to the grid.
  std::pair<int, int> nearest(double u_, double v_) const {
    auto clamp = [](int i, int n) { return i < 0 ? 0 : (i >= n ? n - 1 : i); };
    int iu = clamp(static_cast<int>(std::lround((u_ - u0) / du())), nu);
    int iv = clamp(static_cast<int>(std::lround((v_ - v0) / dv())), nv);
    return {iu, iv};
  }
};

// f is an index accessor i -> T on a line of n samples with spacing h.
// T needs addition, subtraction and double* scaling.

template <class T, class F>
T line_d1_o2(F&& f, int i, int n, double h) {
  if (n < 3) throw std::invalid_argument("d1_o2: need n >= 3");
  if (i == 0) return (1.0 / (2 * h)) * (-3.0 * f(0) + 4.0 * f(1) - f(2));
  if (i == n - 1)
    return (1.0 / (2 * h)) * (3.0 * f(n - 1) - 4.0 * f(n - 2) + f(n - 3));
  return (1.0 / (2 * h)) * (f(i + 1) - f(i - 1));
}

template <class T, class F>
T line_d2_o2(F&& f, int i, int n, double h) {
  if (n < 3) throw std::invalid_argument("d2_o2: need n >= 3");
  double s = 1.0 / (h * h);
  if (i == 0) {
    if (n >= 4) return s * (2.0 * f(0) - 5.0 * f(1) + 4.0 * f(2) - f(3));
    return s * (f(0) - 2.0 * f(1) + f(2));
  }
  if (i == n - 1) {
    if (n >= 4)
      return s * (2.0 * f(n - 1) - 5.0 * f(n - 2) + 4.0 * f(n - 3) - f(n - 4));
    return s * (f(n - 1) - 2.0 * f(n - 2) + f(n - 3));
  }
  return s * (f(i + 1) - 2.0 * f(i) + f(i - 1));
}

// Fourth-order second derivative.  Only the central row is provided; near the
// boundary (or on short lines) it degrades to the o2 stencils.  Residual
// evaluation restricts itself to samples where the central row applies.
template <class T, class F>
T line_d2_o4(F&& f, int i, int n, double h) {
  if (n < 5 || i < 2 || i > n - 3) return line_d2_o2<T>(f, i, n, h);
  double s = 1.0 / (12 * h * h);
  return s * (-f(i - 2) + 16.0 * f(i - 1) - 30.0 * f(i) + 16.0 * f(i + 1) -
              f(i + 2));
}

template <class T, class F>
T line_d1_o4(F&& f, int i, int n, double h) {
  if (n < 5) return line_d1_o2<T>(f, i, n, h);  // degrade gracefully
  double s = 1.0 / (12 * h);
  if (i == 0)
    return s * (-25.0 * f(0) + 48.0 * f(1) - 36.0 * f(2) + 16.0 * f(3) -
                3.0 * f(4));
  if (i == 1)
    return s *
           (-3.0 * f(0) - 10.0 * f(1) + 18.0 * f(2) - 6.0 * f(3) + f(4));
  if (i == n - 1)
    return s * (25.0 * f(n - 1) - 48.0 * f(n - 2) + 36.0 * f(n - 3) -
                16.0 * f(n - 4) + 3.0 * f(n - 5));
  if (i == n - 2)
    return s * (3.0 * f(n - 1) + 10.0 * f(n - 2) - 18.0 * f(n - 3) +
                6.0 * f(n - 4) - f(n - 5));
  return s * (f(i - 2) - 8.0 * f(i - 1) + 8.0 * f(i + 1) - f(i + 2));
}

// Grid-axis wrappers.  field is (iu, iv) -> T.

template <class T, class F>
T grid_du(F&& field, const GridSpec& g, int iu, int iv, int order) {
  auto line = [&](int i) { return field(i, iv); };
  return order >= 4 ? line_d1_o4<T>(line, iu, g.nu, g.du())
                    : line_d1_o2<T>(line, iu, g.nu, g.du());
}

template <class T, class F>
T grid_dv(F&& field, const GridSpec& g, int iu, int iv, int order) {
  auto line = [&](int i) { return field(iu, i); };
  return order >= 4 ? line_d1_o4<T>(line, iv, g.nv, g.dv())
                    : line_d1_o2<T>(line, iv, g.nv, g.dv());
}

template <class T, class F>
T grid_duu(F&& field, const GridSpec& g, int iu, int iv, int order = 2) {
  auto line = [&](int i) { return field(i, iv); };
  return order >= 4 ? line_d2_o4<T>(line, iu, g.nu, g.du())
                    : line_d2_o2<T>(line, iu, g.nu, g.du());
}

template <class T, class F>
T grid_dvv(F&& field, const GridSpec& g, int iu, int iv, int order = 2) {
  auto line = [&](int i) { return field(iu, i); };
  return order >= 4 ? line_d2_o4<T>(line, iv, g.nv, g.dv())
                    : line_d2_o2<T>(line, iv, g.nv, g.dv());
}

// Path integration of a differential given by per-sample partial-derivative
// fields fu, fv: values propagate from the anchor sample along its row, then
// along every column (or the transpose order).  Each edge uses the trapezoid
// rule; when endpoint derivatives of the integrand along the edge direction
// are supplied (dfu_du, dfv_dv) the Hermite-corrected trapezoid
//   int ~= h/2 (f0 + f1) + h^2/12 (f0' - f1')
// is used instead, which is O(h^4) per step without interior samples.
//
// loop_residual reports the worst per-cell circulation of the same edge
// quadrature: it is exactly the path dependence between the two orders.

template <class T>
struct PathIntegralResult {
  std::vector<T> values;
  double loop_residual = 0.0;
};

template <class T, class Fu, class Fv, class Norm>
PathIntegralResult<T> integrate_path(
    const GridSpec& g, Fu&& fu, Fv&& fv, int base_iu, int base_iv,
    const T& anchor, Norm&& norm, bool columns_first = false,
    const std::vector<T>* dfu_du = nullptr,
    const std::vector<T>* dfv_dv = nullptr) {
  g.validate();
  if (base_iu < 0 || base_iu >= g.nu || base_iv < 0 || base_iv >= g.nv)
    throw std::invalid_argument("integrate_path: anchor outside grid");

  const double hu = g.du(), hv = g.dv();
  // Signed edge integral from sample a to the adjacent sample b.
  auto edge_u = [&](int iu_from, int iu_to, int iv) {
    double sgn = iu_to > iu_from ? 1.0 : -1.0;
    T s = (hu / 2) * (fu(iu_from, iv) + fu(iu_to, iv));
    if (dfu_du) {
      const T& d0 = (*dfu_du)[g.index(iu_from, iv)];
      const T& d1 = (*dfu_du)[g.index(iu_to, iv)];
      s = s + (hu * hu / 12) * (sgn > 0 ? d0 - d1 : d1 - d0);
    }
    return sgn * s;
  };
  auto edge_v = [&](int iu, int iv_from, int iv_to) {
    double sgn = iv_to > iv_from ? 1.0 : -1.0;
    T s = (hv / 2) * (fv(iu, iv_from) + fv(iu, iv_to));
    if (dfv_dv) {
      const T& d0 = (*dfv_dv)[g.index(iu, iv_from)];
      const T& d1 = (*dfv_dv)[g.index(iu, iv_to)];
      s = s + (hv * hv / 12) * (sgn > 0 ? d0 - d1 : d1 - d0);
    }
    return sgn * s;
  };

  PathIntegralResult<T> out;
  out.values.assign(g.size(), anchor);
  auto& x = out.values;

  auto sweep_u = [&](int iv) {
    for (int iu = base_iu + 1; iu < g.nu; ++iu)
      x[g.index(iu, iv)] = x[g.index(iu - 1, iv)] + edge_u(iu - 1, iu, iv);
    for (int iu = base_iu - 1; iu >= 0; --iu)
      x[g.index(iu, iv)] = x[g.index(iu + 1, iv)] + edge_u(iu + 1, iu, iv);
  };
  auto sweep_v = [&](int iu) {
    for (int iv = base_iv + 1; iv < g.nv; ++iv)
      x[g.index(iu, iv)] = x[g.index(iu, iv - 1)] + edge_v(iu, iv - 1, iv);
    for (int iv = base_iv - 1; iv >= 0; --iv)
      x[g.index(iu, iv)] = x[g.index(iu, iv + 1)] + edge_v(iu, iv + 1, iv);
  };

  if (columns_first) {
    sweep_v(base_iu);
    for (int iv = 0; iv < g.nv; ++iv) sweep_u(iv);
  } else {
    sweep_u(base_iv);
    for (int iu = 0; iu < g.nu; ++iu) sweep_v(iu);
  }

  for (int iu = 0; iu + 1 < g.nu; ++iu)
    for (int iv = 0; iv + 1 < g.nv; ++iv) {
      T circ = edge_u(iu, iu + 1, iv) + edge_v(iu + 1, iv, iv + 1) -
               edge_u(iu, iu + 1, iv + 1) - edge_v(iu, iv, iv + 1);
      out.loop_residual = std::max(out.loop_residual, norm(circ));
    }
  return out;
}

}  // namespace isogeo
