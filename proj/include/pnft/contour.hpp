#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <string>
#include <vector>

#include "pnft/homology.hpp"
#include "pnft/polynomial.hpp"
#include "pnft/quadrature.hpp"

namespace pnft {

inline constexpr double kQuadTol = 1e-11;
inline constexpr double kRealityTol = 1e-8;

// An Abelian differential f(lambda)/P(lambda) dlambda. The numerator is held
// in powers of mu = (lambda - center)/scale; a centered basis keeps the
// period matrices well conditioned for wide spectra.
struct RationalDifferential {
  std::vector<Complex> numer;  // numer[i] multiplies mu^i
  double center = 0.0;
  double scale = 1.0;

  Complex operator()(Complex lam) const {
    return detail::poly_eval(numer, (lam - center) / scale);
  }

  static RationalDifferential monomial(int power, double center = 0.0,
                                       double scale = 1.0) {
    RationalDifferential d;
    d.numer.assign(power + 1, Complex(0.0));
    d.numer[power] = 1.0;
    d.center = center;
    d.scale = scale;
    return d;
  }
};

// Path integral of f/P over a sheeted path per the subsegment sum: each piece
// between consecutive sheet changes is integrated on the principal branch and
// weighted by the running sheet sign.
inline Complex integrate_path(const RationalDifferential& f,
                              const SheetedPath& path,
                              const OrderedSpectrum& spec,
                              double tol = kQuadTol) {
  Complex total = 0.0;
  std::size_t cum = 0;
  for (int k = 0; k < path.segment_count(); ++k) {
    const Complex p = path.waypoints[k];
    const Complex q = path.waypoints[k + 1];
    const Complex dir = q - p;
    const auto& ch = path.changes[k];
    if (std::abs(dir) == 0.0) {
      cum += ch.size();
      continue;
    }
    const auto integrand = [&](double s) {
      const Complex lam = p + s * dir;
      return f(lam) / principal_sqrt(spec.p_squared(lam));
    };
    std::vector<double> bounds;
    bounds.reserve(ch.size() + 2);
    bounds.push_back(0.0);
    bounds.insert(bounds.end(), ch.begin(), ch.end());
    bounds.push_back(1.0);
    for (std::size_t l = 0; l + 1 < bounds.size(); ++l) {
      const int sign = ((cum + l) % 2) ? -path.initial_sheet : path.initial_sheet;
      try {
        total += static_cast<double>(sign) * dir *
                 detail::integrate_relative(integrand, bounds[l],
                                            bounds[l + 1], tol);
      } catch (const numerical_error& e) {
        throw numerical_error(std::string(e.what()) + " (path segment " +
                              std::to_string(k) + ")");
      }
    }
    cum += ch.size();
  }
  return total;
}

struct PeriodData {
  Eigen::MatrixXcd A;      // a-periods of the mu-basis differentials
  Eigen::MatrixXcd B;      // b-periods, same basis
  Eigen::MatrixXcd a_inv;  // inverse of A (mu basis)
  Eigen::MatrixXcd tau;
  Eigen::VectorXd omega;        // realified
  Eigen::VectorXd k;            // realified
  Eigen::VectorXcd delta_diff;  // delta^+ - delta^-
  double center = 0.0;          // basis parameters, shared with the
  double scale = 1.0;           // normalized differentials dpsi
  double im_residue = 0.0;      // largest |Im| zeroed out of omega and k
};

namespace detail {

inline double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Change of basis mu^{j-1} -> lambda^{m-1}: the rows of A^{-1} in the
// monomial frame are (A~^{-1} Cinv) with Cinv_{jm} = C(j-1,m-1) (-c)^{j-m}/s^{j-1}.
inline Eigen::MatrixXd mu_to_lambda_matrix(int g, double center, double scale) {
  Eigen::MatrixXd cinv = Eigen::MatrixXd::Zero(g, g);
  for (int j = 0; j < g; ++j)
    for (int m = 0; m <= j; ++m)
      cinv(j, m) =
          binom(j, m) * std::pow(-center, j - m) / std::pow(scale, j);
  return cinv;
}

}  // namespace detail

// (delta^+ - delta^-)_j = 2 pi * int_{inf^-}^{inf^+} dpsi_j, split into the
// sheeted loop M^- -> M^+ and two analytic tails along [M, inf).
inline Eigen::VectorXcd compute_delta_diff(const OrderedSpectrum& spec,
                                           const HomologyBasis& basis,
                                           const PeriodData& pd,
                                           double tol = kQuadTol) {
  const int g = spec.genus();
  Eigen::VectorXcd du_total(g);
  for (int kk = 0; kk < g; ++kk) {
    const RationalDifferential du =
        RationalDifferential::monomial(kk, pd.center, pd.scale);
    const Complex loop = integrate_path(du, basis.infinity_path, spec, tol);
    // Incoming tail (sheet -1, from infinity) and outgoing tail (sheet +1)
    // contribute equally.
    const auto integrand = [&](double u) {
      const Complex lam(basis.m / u, 0.0);
      return du(lam) / principal_sqrt(spec.p_squared(lam)) *
             (basis.m / (u * u));
    };
    const Complex tail = detail::integrate_relative(integrand, 0.0, 1.0, tol);
    du_total(kk) = loop + 2.0 * tail;
  }
  return 2.0 * M_PI * (pd.a_inv * du_total);
}

inline PeriodData compute_period_data(const OrderedSpectrum& spec,
                                      const HomologyBasis& basis,
                                      double tol = kQuadTol) {
  const int g = spec.genus();
  PeriodData pd;

  // Center and half-spread of the branch points; the spectrum is conjugate
  // symmetric so the centroid is real.
  double max_dev = 1.0;
  Complex mean = 0.0;
  for (const Complex& p : spec.points) mean += p;
  mean /= static_cast<double>(spec.points.size());
  pd.center = mean.real();
  for (const Complex& p : spec.points)
    max_dev = std::max(max_dev, std::abs(p - mean));
  pd.scale = max_dev;

  pd.A.resize(g, g);
  pd.B.resize(g, g);
  for (int j = 0; j < g; ++j) {
    const RationalDifferential du =
        RationalDifferential::monomial(j, pd.center, pd.scale);
    for (int kk = 0; kk < g; ++kk) {
      pd.A(j, kk) = integrate_path(du, basis.a[kk], spec, tol);
      pd.B(j, kk) = integrate_path(du, basis.b[kk], spec, tol);
    }
  }

  if (g > 0) {
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(pd.A);
    if (!lu.isInvertible())
      throw numerical_error("matrix of a-periods is singular (defective basis)");
    pd.a_inv = lu.inverse();
  } else {
    pd.a_inv.resize(0, 0);
  }
  pd.tau = pd.a_inv * pd.B;

  if (g > 0) {
    const double defect = (pd.tau - pd.tau.transpose()).cwiseAbs().maxCoeff();
    if (defect > kRealityTol)
      throw numerical_error("period matrix not symmetric, defect " +
                            std::to_string(defect));
    // Shift b-cycles by integer combinations of a-cycles so that the
    // off-diagonal real parts land in [-1/2, 1/2). The theta function is
    // exactly invariant under this (hollow symmetric integer shifts of tau).
    Eigen::MatrixXd shift = Eigen::MatrixXd::Zero(g, g);
    for (int i = 0; i < g; ++i)
      for (int j = i + 1; j < g; ++j) {
        const double n = std::floor(pd.tau(i, j).real() + 0.5);
        shift(i, j) = -n;
        shift(j, i) = -n;
      }
    if (shift.cwiseAbs().maxCoeff() > 0.0) {
      pd.B += pd.A * shift;
      pd.tau += shift.cast<Complex>();
    }
    Eigen::MatrixXd y = 0.5 * (pd.tau.imag() + pd.tau.imag().transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(y);
    if (es.eigenvalues().minCoeff() <= 0.0)
      throw numerical_error("Im(tau) is not positive definite");
  }

  // omega and k read off the last columns of A^{-1} in the monomial frame.
  const Eigen::MatrixXcd a_inv_mono =
      g > 0 ? Eigen::MatrixXcd(pd.a_inv *
                               detail::mu_to_lambda_matrix(g, pd.center,
                                                           pd.scale)
                                   .cast<Complex>())
            : Eigen::MatrixXcd(0, 0);
  pd.omega.resize(g);
  pd.k.resize(g);
  const Complex lam_sum = spec.sum();
  double residue = 0.0;
  for (int j = 0; j < g; ++j) {
    const Complex cg = a_inv_mono(j, g - 1);
    const Complex cg1 = g >= 2 ? a_inv_mono(j, g - 2) : Complex(0.0);
    const Complex omega_j = -4.0 * M_PI * Complex(0, 1) * cg;
    const Complex k_j =
        -8.0 * M_PI * Complex(0, 1) * (cg1 + 0.5 * cg * lam_sum);
    residue = std::max({residue, std::abs(omega_j.imag()), std::abs(k_j.imag())});
    pd.omega(j) = omega_j.real();
    pd.k(j) = k_j.real();
  }
  pd.im_residue = residue;
  if (residue > kRealityTol)
    throw numerical_error("omega/k have imaginary residue " +
                          std::to_string(residue) +
                          " above the reality tolerance");

  pd.delta_diff = compute_delta_diff(spec, basis, pd, tol);
  return pd;
}

}  // namespace pnft
