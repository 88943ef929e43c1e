#pragma once

#include <array>
#include <cmath>

#include "pnft/contour.hpp"

namespace pnft {

// Second/third-kind differentials with only the required leading divergence:
//   dOmega~_0 = lambda^g / P,
//   dOmega~_1 = (lambda^{g+1} - d1 lambda^g) / P,
//   dOmega~_2 = 4 (lambda^{g+2} - d1 lambda^{g+1} - d2 lambda^g) / P.
struct OmegaTilde {
  std::array<RationalDifferential, 3> diff;
  Complex d1;
  Complex d2;
};

inline OmegaTilde omega_tilde_numerators(const OrderedSpectrum& spec,
                                         double center = 0.0,
                                         double scale = 1.0) {
  const int g = spec.genus();
  Complex sum = 0.0, sum_sq = 0.0, sum_cross = 0.0;
  const auto& pts = spec.points;
  for (std::size_t j = 0; j < pts.size(); ++j) {
    sum += pts[j];
    sum_sq += pts[j] * pts[j];
    for (std::size_t kk = 0; kk < j; ++kk) sum_cross += pts[j] * pts[kk];
  }

  OmegaTilde out;
  out.d1 = 0.5 * sum;
  out.d2 = (sum_sq - 2.0 * sum_cross) / 8.0;

  detail::Poly p0(g + 1, Complex(0.0));
  p0[g] = 1.0;
  detail::Poly p1(g + 2, Complex(0.0));
  p1[g + 1] = 1.0;
  p1[g] = -out.d1;
  detail::Poly p2(g + 3, Complex(0.0));
  p2[g + 2] = 4.0;
  p2[g + 1] = -4.0 * out.d1;
  p2[g] = -4.0 * out.d2;

  const detail::Poly* polys[3] = {&p0, &p1, &p2};
  for (int i = 0; i < 3; ++i) {
    out.diff[i].center = center;
    out.diff[i].scale = scale;
    out.diff[i].numer = (center == 0.0 && scale == 1.0)
                            ? *polys[i]
                            : detail::poly_affine_compose(*polys[i], center,
                                                          scale);
  }
  return out;
}

// Subtract alpha_j * dpsi_j so every a-period of the result vanishes. The
// second sweep removes the quadrature residue of the first (the alphas can
// be large while the final periods must vanish absolutely).
inline RationalDifferential normalize_meromorphic(const OrderedSpectrum& spec,
                                                  const HomologyBasis& basis,
                                                  const PeriodData& pd,
                                                  int which,
                                                  double tol = kQuadTol) {
  const int g = spec.genus();
  RationalDifferential f =
      omega_tilde_numerators(spec, pd.center, pd.scale).diff[which];
  for (int pass = 0; pass < 2; ++pass)
    for (int j = 0; j < g; ++j) {
      const Complex alpha = integrate_path(f, basis.a[j], spec, tol);
      for (int m = 0; m < g; ++m) f.numer[m] -= alpha * pd.a_inv(j, m);
    }
  return f;
}

struct ScalarParams {
  double K0_abs = 0.0;
  double omega0 = 0.0;
  double k0 = 0.0;
};

namespace detail {

// Stable evaluation of int_M^inf (f/P - lead) dlambda via u = M/lambda.
// Written as a difference of nearly equal terms the integrand drowns in
// roundoff for small u; rationalizing with
//   f/P - q = (f^2 - q^2 P^2) / (P (f + q P))
// cancels the leading coefficients exactly in coefficient space. Here
// q(lambda) is the leading part: 1/lambda, 1 or 4 lambda (the 1/lambda case
// is cleared by one extra factor of lambda first). All polynomials live in
// the mu = (lambda - c)/s basis of the differential.
inline Complex omega_tail(const OrderedSpectrum& spec,
                          const RationalDifferential& f, int which, double m,
                          double tol) {
  const double c = f.center, s = f.scale;
  std::vector<Complex> mu_roots;
  for (const Complex& r : spec.points) mu_roots.push_back((r - c) / s);
  // P^2(lambda) = s^{2g+2} * prod (mu - mu_k)
  const Poly p2 = poly_scale(poly_from_roots(mu_roots),
                             std::pow(s, static_cast<double>(spec.points.size())));
  const Poly affine{Complex(c), Complex(s)};  // lambda as a poly in mu

  const int g = spec.genus();
  Poly fp = f.numer;
  Poly num;
  int lam_powers_in_denom = 0;
  int true_degree = 0;  // the divergence design cancels everything above this
  switch (which) {
    case 0:  // lead 1/lambda: rationalize lambda*f - P
      fp = poly_mul(fp, affine);
      num = poly_sub(poly_mul(fp, fp), p2);
      lam_powers_in_denom = 1;
      true_degree = 2 * g + 1;
      break;
    case 1:  // lead 1: f - P
      num = poly_sub(poly_mul(fp, fp), p2);
      true_degree = 2 * g;
      break;
    default:  // lead 4 lambda: f - 4 lambda P
      num = poly_sub(poly_mul(fp, fp),
                     poly_mul(poly_scale(poly_mul(affine, affine), 16.0), p2));
      true_degree = 2 * g + 1;
      break;
  }
  // The coefficients above true_degree cancel exactly (that is what d1, d2
  // are for); drop their roundoff residue, which would otherwise reinstate
  // a spurious divergence.
  if (num.size() > static_cast<std::size_t>(true_degree + 1))
    num.resize(true_degree + 1);
  const auto integrand = [&](double u) {
    const Complex lam(m / u, 0.0);
    const Complex mu = (lam - c) / s;
    const Complex p = principal_sqrt(spec.p_squared(lam));
    Complex denom_lead;
    switch (which) {
      case 0:
      case 1: denom_lead = poly_eval(fp, mu) + p; break;
      default: denom_lead = poly_eval(fp, mu) + 4.0 * lam * p; break;
    }
    Complex denom = p * denom_lead;
    for (int i = 0; i < lam_powers_in_denom; ++i) denom *= lam;
    return poly_eval(num, mu) / denom * (m / (u * u));
  };
  return integrate_relative(integrand, 0.0, 1.0, tol);
}

}  // namespace detail

// Evaluate the three regularized integrals
//   r_k = int_{M^-}^{M^+} dOmega_k  +  (analytic middle)  +  2 int_M^inf (dOmega_k - lead_k)
// and read off |K0|^2 = -4 exp(-r_0), omega0 = r_1, k0 = r_2.
inline ScalarParams scalar_params(const OrderedSpectrum& spec,
                                  const HomologyBasis& basis,
                                  const PeriodData& pd,
                                  double tol = kQuadTol) {
  const double m = basis.m;
  std::array<Complex, 3> r;
  for (int which = 0; which < 3; ++which) {
    const RationalDifferential f =
        normalize_meromorphic(spec, basis, pd, which, tol);
    const Complex loop = integrate_path(f, basis.infinity_path, spec, tol);
    Complex middle;
    switch (which) {
      case 0: middle = -2.0 * std::log(m); break;
      case 1: middle = -2.0 * m; break;
      default: middle = -4.0 * m * m; break;
    }
    const Complex tail = detail::omega_tail(spec, f, which, m, tol);
    r[which] = loop + middle + 2.0 * tail;
  }

  // Reality residues are judged against the size of the cancelling analytic
  // middles; a sheet bug shows up at that scale, quadrature noise far below.
  const double reality_tol = 1e-6;
  ScalarParams out;

  const Complex k0_sq = -4.0 * std::exp(-r[0]);
  if (std::abs(k0_sq.imag()) > reality_tol * std::max(1.0, std::abs(k0_sq)))
    throw numerical_error("|K0|^2 has imaginary residue " +
                          std::to_string(k0_sq.imag()));
  if (k0_sq.real() <= 0.0)
    throw numerical_error("|K0|^2 came out non-positive (inconsistent sheets)");
  out.K0_abs = std::sqrt(k0_sq.real());

  if (std::abs(r[1].imag()) > reality_tol * std::max(1.0, 2.0 * m))
    throw numerical_error("omega0 has imaginary residue " +
                          std::to_string(r[1].imag()));
  out.omega0 = r[1].real();

  if (std::abs(r[2].imag()) > reality_tol * std::max(1.0, 4.0 * m * m))
    throw numerical_error("k0 has imaginary residue " +
                          std::to_string(r[2].imag()));
  out.k0 = r[2].real();
  return out;
}

}  // namespace pnft
