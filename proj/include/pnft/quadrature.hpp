#pragma once

#include <cmath>
#include <complex>
#include <string>

#include "pnft/errors.hpp"

namespace pnft::detail {

// Gauss-Kronrod 7-15 abscissae and weights on [-1, 1].
inline constexpr double kGkNode[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

inline constexpr double kKronrodW[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

// Gauss-7 weights attached to the odd-indexed Kronrod nodes.
inline constexpr double kGaussW[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

template <class F>
std::complex<double> gk15_panel(F&& f, double a, double b, double& err) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  std::complex<double> fc = f(mid);
  std::complex<double> kronrod = kKronrodW[7] * fc;
  std::complex<double> gauss = kGaussW[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kGkNode[i];
    const std::complex<double> fsum = f(mid + dx) + f(mid - dx);
    kronrod += kKronrodW[i] * fsum;
    if (i % 2 == 1) gauss += kGaussW[i / 2] * fsum;
  }
  kronrod *= half;
  gauss *= half;
  err = std::abs(kronrod - gauss);
  return kronrod;
}

// Adaptive bisection around the GK15 rule. The integrand is a complex-valued
// function of a real parameter and must be smooth on [a, b].
template <class F>
std::complex<double> integrate_adaptive(F&& f, double a, double b,
                                        double abs_tol, double rel_tol,
                                        int max_depth = 30) {
  struct Worker {
    F& fn;
    double rel;
    std::complex<double> run(double lo, double hi, double tol, int depth) {
      double err = 0;
      const std::complex<double> whole = gk15_panel(fn, lo, hi, err);
      if (err <= tol || err <= rel * std::abs(whole)) return whole;
      if (depth <= 0)
        throw numerical_error("adaptive quadrature did not converge on [" +
                              std::to_string(lo) + ", " + std::to_string(hi) +
                              "]");
      const double mid = 0.5 * (lo + hi);
      return run(lo, mid, 0.5 * tol, depth - 1) +
             run(mid, hi, 0.5 * tol, depth - 1);
    }
  };
  if (a == b) return 0.0;
  Worker w{f, rel_tol};
  return w.run(a, b, abs_tol, max_depth);
}

// Adaptive integration with the absolute budget scaled to the integral's own
// magnitude (single-panel estimate), so that tiny integrals are still
// resolved to `tol` relative accuracy.
template <class F>
std::complex<double> integrate_relative(F&& f, double a, double b,
                                        double tol) {
  if (a == b) return 0.0;
  double err = 0.0;
  const double scale = std::abs(gk15_panel(f, a, b, err)) + err;
  return integrate_adaptive(f, a, b, std::max(scale, 1e-30) * tol, tol);
}

}  // namespace pnft::detail
