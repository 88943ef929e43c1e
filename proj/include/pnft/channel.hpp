#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <unsupported/Eigen/FFT>
#include <vector>

#include "pnft/synthesis.hpp"

namespace pnft {

struct FiberParams {
  double alpha_db_per_km = 0.2;
  double beta2_ps2_per_km = -21.5;  // anomalous dispersion
  double gamma_per_w_km = 1.3;
  double span_km = 75.0;
  double noise_figure_db = 5.5;
  int spans = 1;
};

inline double alpha_nepers_per_km(const FiberParams& p) {
  return p.alpha_db_per_km * std::log(10.0) / 10.0;
}

// Path-averaged nonlinearity of the transformed lossless model,
// gamma * (1 - exp(-alpha L)) / (alpha L), in 1/W/km.
inline double gamma_eff(const FiberParams& p) {
  const double al = alpha_nepers_per_km(p) * p.span_km;
  if (al < 1e-12) return p.gamma_per_w_km;
  return p.gamma_per_w_km * (1.0 - std::exp(-al)) / al;
}

// Dispersive memory estimate Delta T = 2 pi |beta2| L B, in seconds.
inline double cyclic_prefix_duration(double link_km, double bandwidth_hz,
                                     double beta2_ps2_per_km) {
  const double beta2_si = std::abs(beta2_ps2_per_km) * 1e-24 / 1e3;  // s^2/m
  return 2.0 * M_PI * beta2_si * (link_km * 1e3) * bandwidth_hz;
}

// Conversion between the dimensionless NLSE i q_z + q_tt + 2|q|^2 q = 0 and
// SI units. With t = T/t0 the equation above absorbs beta2/2 into a distance
// unit of 2 z0 meters, z0 = t0^2/|beta2|; the power unit 1/(gamma_eff z0)
// then reproduces the plane-wave phase gamma P zeta exactly.
struct UnitMap {
  double t0_s = 0.0;
  double z0_m = 0.0;
  double p0_w = 0.0;

  static UnitMap make(double t0_seconds, const FiberParams& fiber) {
    UnitMap u;
    u.t0_s = t0_seconds;
    const double beta2_si = std::abs(fiber.beta2_ps2_per_km) * 1e-24 / 1e3;
    u.z0_m = t0_seconds * t0_seconds / beta2_si;
    const double gamma_eff_si = gamma_eff(fiber) * 1e-3;  // 1/W/m
    u.p0_w = 1.0 / (gamma_eff_si * u.z0_m);
    return u;
  }

  // t0 chosen so that `dimless_period` time units span `period_seconds`.
  static UnitMap from_period(double period_seconds, double dimless_period,
                             const FiberParams& fiber) {
    return make(period_seconds / dimless_period, fiber);
  }

  double km_to_z(double km) const { return km * 1e3 / (2.0 * z0_m); }
  double watts_to_q2(double watts) const { return watts / p0_w; }
};

struct PropagateOptions {
  double dz = 1e-4;       // dimensionless step
  double dz_cap = 1e-3;
  bool noise = true;
  std::uint64_t seed = 1;
};

namespace detail {

inline bool is_power_of_two(std::size_t n) { return n && !(n & (n - 1)); }

// Box-Muller on raw 64-bit draws; stable across standard libraries.
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : rng_(seed) {}
  double next() {
    if (have_) {
      have_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = std::ldexp(static_cast<double>(rng_()), -64);
    } while (u1 <= 0.0);
    const double u2 = std::ldexp(static_cast<double>(rng_()), -64);
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    have_ = true;
    return r * std::cos(2.0 * M_PI * u2);
  }

 private:
  std::mt19937_64 rng_;
  bool have_ = false;
  double spare_ = 0.0;
};

}  // namespace detail

// Symmetric split-step integration of the dimensionless NLSE with the
// transformed lossless model: per span, dispersion/nonlinearity stepping and
// one lumped ASE injection with the span gain exp(alpha L).
inline Waveform propagate(const Waveform& input, const FiberParams& fiber,
                          const UnitMap& units,
                          const PropagateOptions& opts = {}) {
  if (!detail::is_power_of_two(input.samples.size()))
    throw validation_error("propagate needs a power-of-two grid");
  if (opts.dz > opts.dz_cap)
    throw validation_error("step size exceeds the configured cap");

  const int n = input.size();
  const double z_span = units.km_to_z(fiber.span_km);

  // Dimensionless angular frequencies of the FFT bins.
  std::vector<double> w2(n);
  for (int i = 0; i < n; ++i) {
    const int k = i <= n / 2 ? i : i - n;
    const double w = 2.0 * M_PI * k / (n * input.dt);
    w2[i] = w * w;
  }

  // Per-quadrature ASE variance in watts over the sampled bandwidth.
  double sigma_q = 0.0;
  if (opts.noise && fiber.noise_figure_db > 0.0) {
    const double planck = 6.62607015e-34;
    const double nu = 193.4e12;
    const double gain = std::exp(alpha_nepers_per_km(fiber) * fiber.span_km);
    const double b_sample = 1.0 / (input.dt * units.t0_s);
    const double var_w = 0.5 * std::pow(10.0, fiber.noise_figure_db / 10.0) *
                         (gain - 1.0) * planck * nu * b_sample;
    sigma_q = std::sqrt(units.watts_to_q2(var_w));
  }
  detail::GaussianSource gauss(opts.seed);

  Eigen::FFT<double> fft;
  std::vector<Complex> q = input.samples, spec(n);

  const auto dispersion_half = [&](double h) {
    fft.fwd(spec, q);
    for (int i = 0; i < n; ++i)
      spec[i] *= std::exp(Complex(0, -w2[i] * 0.5 * h));
    fft.inv(q, spec);
  };

  for (int span = 0; span < fiber.spans; ++span) {
    double remaining = z_span;
    while (remaining > 1e-15) {
      const double h = std::min(opts.dz, remaining);
      dispersion_half(h);
      for (Complex& v : q) v *= std::exp(Complex(0, 2.0 * std::norm(v) * h));
      dispersion_half(h);
      remaining -= h;
    }
    if (sigma_q > 0.0)
      for (Complex& v : q) v += sigma_q * Complex(gauss.next(), gauss.next());
    for (const Complex& v : q)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw numerical_error("split-step produced a non-finite field at span " +
                              std::to_string(span + 1));
  }

  Waveform out = input;
  out.samples = std::move(q);
  out.z = input.z + fiber.spans * z_span;
  return out;
}

// Brick-wall band-pass: keep |omega - w_center| <= w_max (dimensionless
// angular frequencies).
inline Waveform low_pass(const Waveform& input, double w_max,
                         double w_center = 0.0) {
  if (!detail::is_power_of_two(input.samples.size()))
    throw validation_error("low_pass needs a power-of-two grid");
  const int n = input.size();
  Eigen::FFT<double> fft;
  std::vector<Complex> spec(n), in = input.samples;
  fft.fwd(spec, in);
  for (int i = 0; i < n; ++i) {
    const int k = i <= n / 2 ? i : i - n;
    const double w = 2.0 * M_PI * k / (n * input.dt);
    if (std::abs(w - w_center) > w_max) spec[i] = 0.0;
  }
  Waveform out = input;
  fft.inv(out.samples, spec);
  return out;
}

// Prepend n cyclic copies of a frame covering an integer number of periods.
inline Waveform add_prefix(const Waveform& w, int n_periods) {
  if (n_periods < 0) throw input_error("negative prefix length");
  if (!w.period_hint)
    throw validation_error("prefix handling needs a period hint");
  const double periods = w.duration() / *w.period_hint;
  if (std::abs(periods - std::round(periods)) > 1e-6)
    throw validation_error("frame does not cover an integer number of periods");
  Waveform out = w;
  out.t0 = w.t0 - n_periods * *w.period_hint;
  out.samples.clear();
  out.samples.reserve(w.samples.size() * (n_periods + 1));
  const int per = static_cast<int>(std::lround(w.samples.size() / periods));
  for (int rep = 0; rep < n_periods; ++rep)
    out.samples.insert(out.samples.end(), w.samples.begin(),
                       w.samples.begin() + per);
  out.samples.insert(out.samples.end(), w.samples.begin(), w.samples.end());
  return out;
}

// Remove the cyclic extension, recentering on the middle period.
inline Waveform strip_prefix(const Waveform& w, int n_periods) {
  if (n_periods < 0) throw input_error("negative prefix length");
  if (!w.period_hint)
    throw validation_error("prefix handling needs a period hint");
  const double periods_d = w.duration() / *w.period_hint;
  if (std::abs(periods_d - std::round(periods_d)) > 1e-6)
    throw validation_error("frame does not cover an integer number of periods");
  const int total = static_cast<int>(std::lround(periods_d));
  if (total != n_periods + 1)
    throw validation_error("frame does not contain the stated prefix");
  if (n_periods == 0) return w;
  const int per = w.size() / total;
  const int pick = total / 2;
  Waveform out = w;
  out.t0 = w.t0 + pick * *w.period_hint;
  out.samples.assign(w.samples.begin() + pick * per,
                     w.samples.begin() + (pick + 1) * per);
  return out;
}

}  // namespace pnft
