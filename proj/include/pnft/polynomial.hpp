#pragma once

#include <cmath>
#include <vector>

#include "pnft/surface.hpp"

namespace pnft::detail {

using Poly = std::vector<Complex>;  // coeffs[i] multiplies x^i

inline Poly poly_mul(const Poly& a, const Poly& b) {
  Poly out(a.size() + b.size() - 1, Complex(0.0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

inline Poly poly_sub(Poly a, const Poly& b) {
  if (a.size() < b.size()) a.resize(b.size(), Complex(0.0));
  for (std::size_t i = 0; i < b.size(); ++i) a[i] -= b[i];
  while (a.size() > 1 && std::abs(a.back()) == 0.0) a.pop_back();
  return a;
}

inline Poly poly_scale(Poly a, Complex f) {
  for (Complex& c : a) c *= f;
  return a;
}

inline Poly poly_from_roots(const std::vector<Complex>& roots) {
  Poly p{Complex(1.0)};
  for (const Complex& r : roots) {
    Poly next(p.size() + 1, Complex(0.0));
    for (std::size_t i = 0; i < p.size(); ++i) {
      next[i + 1] += p[i];
      next[i] -= r * p[i];
    }
    p = std::move(next);
  }
  return p;
}

inline Complex poly_eval(const Poly& p, Complex x) {
  Complex acc = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
  return acc;
}

// Rewrite p(lambda) in powers of mu with lambda = scale*mu + center.
inline Poly poly_affine_compose(const Poly& p, double center, double scale) {
  Poly out{Complex(0.0)};
  const Poly affine{Complex(center), Complex(scale)};
  for (auto it = p.rbegin(); it != p.rend(); ++it) {
    out = poly_mul(out, affine);
    out[0] += *it;
  }
  return out;
}

}  // namespace pnft::detail
