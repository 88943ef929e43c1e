#pragma once

#include <optional>
#include <vector>

#include "pnft/meromorphic.hpp"
#include "pnft/theta.hpp"

namespace pnft {

inline constexpr double kThetaTol = 1e-12;

// Everything needed to evaluate the closed-form solution
//   q(t,z) = |K0| theta((w t + k z + d^-)/2pi | tau)
//                / theta((w t + k z + d^+)/2pi | tau) exp(i w0 t + i k0 z).
// delta^+ is fixed to zero (real by construction); the phase of K0 is the
// free gauge and is fixed to zero as well.
struct ThetaParams {
  double K0_abs = 0.0;
  double omega0 = 0.0;
  double k0 = 0.0;
  Eigen::VectorXd omega;
  Eigen::VectorXd k;
  Eigen::VectorXd delta_plus;
  Eigen::VectorXcd delta_minus;
  Eigen::MatrixXcd tau;
  OrderedSpectrum spectrum;

  int genus() const { return static_cast<int>(omega.size()); }
};

namespace detail {

// Map the real part into (-pi, pi]; a residue at -pi lands on +pi.
inline Complex normalize_phase(Complex d) {
  double re = std::remainder(d.real(), 2.0 * M_PI);
  if (re <= -M_PI + 1e-9) re += 2.0 * M_PI;
  return Complex(re, d.imag());
}

}  // namespace detail

struct ComputeOptions {
  double quad_tol = kQuadTol;
};

inline ThetaParams compute_params(const MainSpectrum& spec,
                                  const ComputeOptions& opts = {}) {
  const OrderedSpectrum ordered = sort_spectrum(spec);
  const HomologyBasis basis = homology_basis(ordered);
  const PeriodData pd = compute_period_data(ordered, basis, opts.quad_tol);
  const ScalarParams sc = scalar_params(ordered, basis, pd, opts.quad_tol);

  ThetaParams out;
  out.K0_abs = sc.K0_abs;
  out.omega0 = sc.omega0;
  out.k0 = sc.k0;
  out.omega = pd.omega;
  out.k = pd.k;
  out.tau = pd.tau;
  out.delta_plus = Eigen::VectorXd::Zero(ordered.genus());
  out.delta_minus.resize(ordered.genus());
  for (int j = 0; j < ordered.genus(); ++j)
    out.delta_minus(j) = detail::normalize_phase(-pd.delta_diff(j));
  out.spectrum = ordered;
  return out;
}

// Theta-ratio evaluator; reuses one truncated series for both arguments and
// supports incremental evaluation along uniform t-grids.
class QEvaluator {
 public:
  explicit QEvaluator(ThetaParams params, double theta_tol = kThetaTol)
      : p_(std::move(params)), series_(p_.tau, theta_tol) {}

  const ThetaParams& params() const { return p_; }

  Complex eval(double t, double z) const {
    const int g = p_.genus();
    if (g == 0)
      return p_.K0_abs * std::exp(Complex(0, p_.omega0 * t + p_.k0 * z));
    Eigen::VectorXcd x_minus(g), x_plus(g);
    for (int j = 0; j < g; ++j) {
      const Complex base = p_.omega(j) * t + p_.k(j) * z;
      x_minus(j) = (base + p_.delta_minus(j)) / (2.0 * M_PI);
      x_plus(j) = (base + p_.delta_plus(j)) / (2.0 * M_PI);
    }
    const Complex den = series_.eval(x_plus);
    if (std::abs(den) < 1e-12)
      throw numerical_error("near-singular theta denominator at t=" +
                            std::to_string(t) + ", z=" + std::to_string(z));
    const Complex num = series_.eval(x_minus);
    return p_.K0_abs * num / den *
           std::exp(Complex(0, p_.omega0 * t + p_.k0 * z));
  }

  // q on the uniform grid t = t0 + i dt, i = 0..n-1, at fixed z. One complex
  // exponential per lattice term total; per-sample cost is one multiply-add
  // per term.
  std::vector<Complex> sample_line(double t0, double dt, int n,
                                   double z) const {
    std::vector<Complex> out(n);
    const int g = p_.genus();
    if (g == 0) {
      for (int i = 0; i < n; ++i)
        out[i] = p_.K0_abs *
                 std::exp(Complex(0, p_.omega0 * (t0 + i * dt) + p_.k0 * z));
      return out;
    }

    Eigen::VectorXcd x0m(g), x0p(g);
    Eigen::VectorXd v(g);
    for (int j = 0; j < g; ++j) {
      const Complex base = p_.k(j) * z + p_.delta_minus(j);
      x0m(j) = (p_.omega(j) * t0 + base) / (2.0 * M_PI);
      x0p(j) = (p_.omega(j) * t0 + p_.k(j) * z + p_.delta_plus(j)) / (2.0 * M_PI);
      v(j) = p_.omega(j) / (2.0 * M_PI);
    }
    // Im(x) is t-independent, so the recentering offset is constant along
    // the sweep.
    const Eigen::VectorXd cm = series_.center(x0m);
    const Eigen::VectorXcd xsm = x0m - p_.tau * cm.cast<Complex>();

    const auto& lattice = series_.lattice();
    const std::size_t terms = lattice.size();
    std::vector<Complex> cur_m(terms), step_m(terms), cur_p(terms),
        step_p(terms);
    for (std::size_t ti = 0; ti < terms; ++ti) {
      const auto& term = lattice[ti];
      const Complex dot_m = (term.n.cast<Complex>().transpose() * xsm)(0);
      const double dot_p_re =
          (term.n.transpose() * x0p.real().matrix())(0);
      const double ndotv = term.n.dot(v);
      cur_m[ti] = term.weight * std::exp(Complex(0, 2 * M_PI) * dot_m);
      cur_p[ti] = term.weight * std::exp(Complex(0, 2 * M_PI * dot_p_re));
      step_m[ti] = std::exp(Complex(0, 2 * M_PI * ndotv * dt));
      step_p[ti] = step_m[ti];
    }
    // Prefactor restoring theta(x) from theta(x - tau c) for the numerator;
    // delta^+ is real so the denominator needs no recentering.
    const Complex cquad =
        (cm.cast<Complex>().transpose() * (p_.tau * cm.cast<Complex>()).eval())(0);
    Complex pref = std::exp(Complex(0, M_PI) * cquad -
                            Complex(0, 2 * M_PI) *
                                (cm.cast<Complex>().transpose() * x0m)(0));
    const Complex pref_step =
        std::exp(Complex(0, -2 * M_PI * dt) * Complex(cm.dot(v), 0));

    for (int i = 0; i < n; ++i) {
      Complex num = 0.0, den = 0.0;
      for (std::size_t ti = 0; ti < terms; ++ti) {
        num += cur_m[ti];
        den += cur_p[ti];
        cur_m[ti] *= step_m[ti];
        cur_p[ti] *= step_p[ti];
      }
      num *= pref;
      pref *= pref_step;
      if (std::abs(den) < 1e-12)
        throw numerical_error("near-singular theta denominator in sweep");
      const double t = t0 + i * dt;
      out[i] = p_.K0_abs * num / den *
               std::exp(Complex(0, p_.omega0 * t + p_.k0 * z));
    }
    return out;
  }

 private:
  ThetaParams p_;
  ThetaSeries series_;
};

inline Complex eval_q(const ThetaParams& params, double t, double z,
                      double theta_tol = kThetaTol) {
  return QEvaluator(params, theta_tol).eval(t, z);
}

// Snap the omega entries that carry a full base oscillation to exact
// multiples of `base`; entries below base/2 are left alone (they are the
// slow residual frequencies of the plane-wave limit).
inline ThetaParams periodize(const ThetaParams& params, double base,
                             double proximity = 0.2) {
  if (!(base > 0.0)) throw input_error("periodize needs a positive base");
  ThetaParams out = params;
  for (int j = 0; j < params.genus(); ++j) {
    const double w = params.omega(j);
    const double snapped = base * std::round(w / base);
    if (std::abs(w - snapped) > proximity * base)
      throw validation_error("omega_" + std::to_string(j + 1) + " = " +
                             std::to_string(w) +
                             " is not within 20% of a multiple of " +
                             std::to_string(base));
    if (std::abs(w) >= 0.5 * base) out.omega(j) = snapped;
  }
  return out;
}

inline MainSpectrum shift_spectrum(const MainSpectrum& spec, double shift) {
  MainSpectrum out = spec;
  for (Complex& p : out.upper) p += shift;
  return out;
}

struct Waveform {
  double t0 = 0.0;
  double dt = 0.0;
  double z = 0.0;
  std::vector<Complex> samples;
  std::optional<double> period_hint;

  int size() const { return static_cast<int>(samples.size()); }
  double t(int i) const { return t0 + i * dt; }
  double duration() const { return dt * size(); }
};

namespace detail {

// Greatest common divisor of a set of frequencies, to tolerance; zero result
// means incommensurate.
inline double common_base(const Eigen::VectorXd& omega, double rel_tol = 1e-6) {
  double scale = 0.0;
  for (int j = 0; j < omega.size(); ++j)
    scale = std::max(scale, std::abs(omega(j)));
  if (scale == 0.0) return 0.0;
  const double tol = rel_tol * scale;
  double g = 0.0;
  for (int j = 0; j < omega.size(); ++j) {
    double b = std::abs(omega(j));
    if (b < tol) continue;
    if (g == 0.0) {
      g = b;
      continue;
    }
    double a = std::max(g, b);
    b = std::min(g, b);
    while (b > tol) {
      const double r = std::fmod(a, b);
      a = b;
      b = std::min(r, b - r);  // fold residues near b back toward zero
    }
    g = a;
  }
  if (g < tol) return 0.0;
  for (int j = 0; j < omega.size(); ++j) {
    const double q = omega(j) / g;
    if (std::abs(q - std::round(q)) > 1e-6 * std::max(1.0, std::abs(q)))
      return 0.0;
  }
  return g;
}

}  // namespace detail

inline Waveform sample_waveform(const ThetaParams& params, double t0,
                                double t1, int n, double z,
                                double theta_tol = kThetaTol) {
  if (n < 2) throw input_error("need at least two samples");
  if (!(t1 > t0)) throw input_error("need t1 > t0");
  Waveform w;
  w.t0 = t0;
  w.dt = (t1 - t0) / (n - 1);
  w.z = z;
  QEvaluator q(params, theta_tol);
  w.samples = q.sample_line(t0, w.dt, n, z);
  if (params.genus() > 0) {
    const double base = detail::common_base(params.omega);
    if (base > 0.0) w.period_hint = 2.0 * M_PI / base;
  }
  return w;
}

// One exact period sampled cell-wise: t_i = t0 + i T/n, i = 0..n-1.
inline Waveform sample_period(const ThetaParams& params, double period, int n,
                              double z, double t0 = 0.0,
                              double theta_tol = kThetaTol) {
  if (n < 2) throw input_error("need at least two samples");
  Waveform w;
  w.t0 = t0;
  w.dt = period / n;
  w.z = z;
  w.period_hint = period;
  QEvaluator q(params, theta_tol);
  w.samples = q.sample_line(t0, w.dt, n, z);
  return w;
}

}  // namespace pnft
