#pragma once

#include <Eigen/Dense>
#include <vector>

#include "pnft/synthesis.hpp"

namespace pnft {

struct Monodromy {
  Complex lambda;
  Eigen::Matrix2cd matrix;
  Complex discriminant;  // half-trace
  double det_defect = 0.0;
};

namespace detail {

// Exact exponential of dt*U for the traceless generator
//   U = [[-i lambda, q], [-conj(q), i lambda]].
inline Eigen::Matrix2cd step_exp(Complex q, Complex lambda, double dt) {
  Eigen::Matrix2cd u;
  u << Complex(0, -1) * lambda, q, -std::conj(q), Complex(0, 1) * lambda;
  const Complex mu2 = dt * dt * (-lambda * lambda - std::norm(q));
  const Complex mu = std::sqrt(mu2);
  Complex ch, shm;  // cosh(mu), sinh(mu)/mu
  if (std::abs(mu) < 1e-6) {
    ch = 1.0 + mu2 / 2.0 + mu2 * mu2 / 24.0;
    shm = 1.0 + mu2 / 6.0 + mu2 * mu2 / 120.0;
  } else {
    ch = std::cosh(mu);
    shm = std::sinh(mu) / mu;
  }
  return ch * Eigen::Matrix2cd::Identity() + shm * dt * u;
}

}  // namespace detail

// Transfer-matrix product over exactly one period of samples (cell values on
// t_i = t0 + i T/n).
inline Monodromy monodromy(const Waveform& w, Complex lambda) {
  if (w.size() < 2) throw input_error("monodromy needs at least two samples");
  const double dt = w.dt;
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Identity();
  for (const Complex& q : w.samples) m = detail::step_exp(q, lambda, dt) * m;
  Monodromy out;
  out.lambda = lambda;
  out.matrix = m;
  out.discriminant = 0.5 * (m(0, 0) + m(1, 1));
  out.det_defect = std::abs(m.determinant() - Complex(1.0));
  if (out.det_defect > 1e-6)
    throw numerical_error("monodromy determinant defect " +
                          std::to_string(out.det_defect));
  return out;
}

struct FindOptions {
  double im_floor = 0.1;       // drop split double points near the real axis
  double dedup_tol = 1e-4;
  double newton_tol = 1e-10;   // on |Delta^2 - 1|
  int max_iterations = 30;
};

struct SpectrumSearch {
  std::vector<Complex> points;  // deduplicated roots with |Im| >= im_floor
  int failed_seeds = 0;
};

// Newton iteration on Delta^2(lambda) - 1 from each seed, with a numerically
// differenced derivative. Non-convergence of individual seeds is recorded,
// not fatal.
inline SpectrumSearch find_main_spectrum(const Waveform& w,
                                         const std::vector<Complex>& seeds,
                                         const FindOptions& opts = {}) {
  const auto f = [&](Complex lam) {
    const Complex d = monodromy(w, lam).discriminant;
    return d * d - 1.0;
  };
  SpectrumSearch out;
  for (const Complex& seed : seeds) {
    Complex lam = seed;
    bool ok = false;
    try {
      for (int it = 0; it < opts.max_iterations; ++it) {
        const Complex val = f(lam);
        if (std::abs(val) < opts.newton_tol) {
          ok = true;
          break;
        }
        const double h = 1e-6 * (1.0 + std::abs(lam));
        const Complex deriv = (f(lam + h) - f(lam - h)) / (2.0 * h);
        if (std::abs(deriv) == 0.0) break;
        const Complex step = val / deriv;
        lam -= step;
        if (std::abs(lam - seed) > 8.0) break;  // left the search basin
      }
    } catch (const numerical_error&) {
      ok = false;  // transfer product overflowed far off the spectrum
    }
    if (!ok) {
      ++out.failed_seeds;
      continue;
    }
    if (std::abs(lam.imag()) < opts.im_floor) continue;
    bool dup = false;
    for (const Complex& p : out.points)
      if (std::abs(p - lam) < opts.dedup_tol) {
        dup = true;
        break;
      }
    if (!dup) out.points.push_back(lam);
  }
  std::sort(out.points.begin(), out.points.end(), [](Complex a, Complex b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return out;
}

// Nominal points, their conjugates, and an 8-neighborhood around each.
inline std::vector<Complex> default_seeds(const std::vector<Complex>& nominal,
                                          double radius = 0.5) {
  std::vector<Complex> seeds;
  for (const Complex& p : nominal)
    for (const Complex& q : {p, std::conj(p)}) {
      seeds.push_back(q);
      for (int dx = -1; dx <= 1; ++dx)
        for (int dy = -1; dy <= 1; ++dy) {
          if (dx == 0 && dy == 0) continue;
          seeds.push_back(q + Complex(radius * dx, radius * dy));
        }
    }
  return seeds;
}

struct RoundtripRow {
  Complex nominal;
  Complex recovered;
  double abs_error;
};

struct RoundtripReport {
  std::vector<RoundtripRow> rows;
  double max_error = 0.0;
  int failed_seeds = 0;
};

// Synthesize one period, recover the spectrum from the samples, and match
// the upper nominal points by nearest neighbor.
inline RoundtripReport roundtrip_report(const MainSpectrum& spec,
                                        int n_samples,
                                        double period_override = 0.0,
                                        const FindOptions& opts = {}) {
  const ThetaParams params = compute_params(spec);
  double period = period_override;
  if (period <= 0.0) {
    if (params.genus() == 0)
      throw input_error("genus-0 round trip needs an explicit period");
    const double base = detail::common_base(params.omega);
    if (base <= 0.0)
      throw validation_error("omega vector is incommensurate; no exact period");
    period = 2.0 * M_PI / base;
  }
  const Waveform w = sample_period(params, period, n_samples, 0.0);
  const SpectrumSearch found =
      find_main_spectrum(w, default_seeds(spec.upper), opts);

  RoundtripReport report;
  report.failed_seeds = found.failed_seeds;
  for (const Complex& nominal : spec.upper) {
    RoundtripRow row;
    row.nominal = nominal;
    row.abs_error = std::numeric_limits<double>::infinity();
    for (const Complex& rec : found.points) {
      if (rec.imag() <= 0.0) continue;
      const double err = std::abs(rec - nominal);
      if (err < row.abs_error) {
        row.abs_error = err;
        row.recovered = rec;
      }
    }
    report.max_error = std::max(report.max_error, row.abs_error);
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace pnft
