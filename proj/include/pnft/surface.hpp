#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "pnft/errors.hpp"

namespace pnft {

using Complex = std::complex<double>;

// Two spectral points closer (Chebyshev) than this are a degenerate double
// point; the curve loses a handle and the construction below breaks down.
inline constexpr double kDistinctTol = 1e-9;

inline double cheb_dist(Complex a, Complex b) {
  return std::max(std::abs(a.real() - b.real()), std::abs(a.imag() - b.imag()));
}

// Principal square root, pinned to the +0 side of the cut so that a negative
// real argument yields the value with positive imaginary part.
inline Complex principal_sqrt(Complex z) {
  if (z.imag() == 0.0) z = Complex(z.real(), 0.0);
  return std::sqrt(z);
}

// Upper-half-plane branch points; conjugates are implied, never stored.
struct MainSpectrum {
  std::vector<Complex> upper;

  int genus() const { return static_cast<int>(upper.size()) - 1; }
};

inline MainSpectrum make_main_spectrum(std::vector<Complex> points) {
  if (points.empty())
    throw validation_error("spectrum must contain at least one point");
  for (const Complex& p : points) {
    if (!(p.imag() > 0.0))
      throw validation_error("spectrum point must have Im > 0, got (" +
                             std::to_string(p.real()) + ", " +
                             std::to_string(p.imag()) + ")");
  }
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j)
      if (cheb_dist(points[i], points[j]) < kDistinctTol)
        throw validation_error("degenerate spectrum: double point near (" +
                               std::to_string(points[i].real()) + ", " +
                               std::to_string(points[i].imag()) + ")");
  return MainSpectrum{std::move(points)};
}

// All 2g+2 branch points in the order required by the homology construction:
//   lambda_{2j-1} = conj(lambda_{2j}),
//   |Im lambda_{2j}| <= |Im lambda_{2j+1}|,
//   sign(Im lambda_{2j}) == sign(Im lambda_{2j+1}).
struct OrderedSpectrum {
  std::vector<Complex> points;

  int genus() const { return static_cast<int>(points.size()) / 2 - 1; }

  // P^2(lambda), the defining polynomial of the curve.
  Complex p_squared(Complex lam) const {
    Complex prod = 1.0;
    for (const Complex& p : points) prod *= lam - p;
    return prod;
  }

  Complex sum() const {
    Complex s = 0.0;
    for (const Complex& p : points) s += p;
    return s;
  }
};

struct SurfacePoint {
  Complex lambda;
  int sheet = +1;  // sigma, exactly +1 or -1
};

inline OrderedSpectrum sort_spectrum(const MainSpectrum& spec) {
  std::vector<Complex> upper = spec.upper;
  // Pairs ascending by |Im|; ties broken by ascending real part of the upper
  // representative. The sign chain below then fixes each pair's orientation.
  std::sort(upper.begin(), upper.end(), [](Complex a, Complex b) {
    if (a.imag() != b.imag()) return a.imag() < b.imag();
    return a.real() < b.real();
  });

  OrderedSpectrum out;
  out.points.reserve(2 * upper.size());
  int slot_sign = +1;  // sign of Im(lambda_{2j}); the chain starts positive
  for (const Complex& u : upper) {
    const Complex even = slot_sign > 0 ? u : std::conj(u);
    out.points.push_back(std::conj(even));
    out.points.push_back(even);
    slot_sign = -slot_sign;
  }

  // The chain construction cannot fail for distinct upper-half-plane points;
  // verify anyway so a broken tie-break surfaces here and not downstream.
  const int g = out.genus();
  for (int j = 1; j <= g; ++j) {
    const double im_even = out.points[2 * j - 1].imag();
    const double im_next = out.points[2 * j].imag();
    if (std::abs(im_even) > std::abs(im_next) ||
        (im_even > 0) != (im_next > 0))
      throw numerical_error("spectrum ordering violates the sort constraints");
  }
  return out;
}

// P = sigma * sqrt(prod_k (lambda - lambda_k)) with the principal branch.
inline Complex eval_p(const OrderedSpectrum& spec, const SurfacePoint& p) {
  return static_cast<double>(p.sheet) * principal_sqrt(spec.p_squared(p.lambda));
}

// Half the minimal pairwise Chebyshev distance: a square of side 2*epsilon
// centered on one branch point keeps distance >= epsilon to any other.
inline double epsilon(const OrderedSpectrum& spec) {
  const std::size_t n = spec.points.size();
  if (n < 2) throw validation_error("epsilon needs at least two branch points");
  double min_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      min_d = std::min(min_d, cheb_dist(spec.points[i], spec.points[j]));
  return 0.5 * min_d;
}

}  // namespace pnft
