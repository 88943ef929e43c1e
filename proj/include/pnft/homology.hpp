#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "pnft/surface.hpp"

namespace pnft {

// A polyline in the lambda-plane with the sheet bookkeeping needed to lift it
// onto the curve: the sheet sign at the first waypoint and, per segment, the
// ordered parametric positions where the principal square root flips.
struct SheetedPath {
  std::vector<Complex> waypoints;
  int initial_sheet = +1;
  std::vector<std::vector<double>> changes;  // per segment, ascending in (0,1)
  double margin = 0.0;                       // drawn clearance to branch points

  int segment_count() const { return static_cast<int>(waypoints.size()) - 1; }

  std::size_t total_changes() const {
    std::size_t n = 0;
    for (const auto& c : changes) n += c.size();
    return n;
  }

  int exit_sheet() const {
    return (total_changes() % 2) ? -initial_sheet : initial_sheet;
  }

  bool is_closed() const {
    return waypoints.size() > 1 && waypoints.front() == waypoints.back();
  }

  Complex point(int seg, double s) const {
    return waypoints[seg] + s * (waypoints[seg + 1] - waypoints[seg]);
  }

  // Sheet sign on segment `seg` at parameter `s` (not exactly at a change).
  int sheet_at(int seg, double s) const {
    std::size_t flips = 0;
    for (int k = 0; k < seg; ++k) flips += changes[k].size();
    for (double c : changes[seg])
      if (c < s) ++flips;
    return (flips % 2) ? -initial_sheet : initial_sheet;
  }

  SheetedPath reversed() const {
    SheetedPath r;
    r.waypoints.assign(waypoints.rbegin(), waypoints.rend());
    r.initial_sheet = exit_sheet();
    r.margin = margin;
    r.changes.resize(changes.size());
    const int n = segment_count();
    for (int k = 0; k < n; ++k) {
      std::vector<double> c(changes[n - 1 - k].rbegin(),
                            changes[n - 1 - k].rend());
      for (double& s : c) s = 1.0 - s;
      r.changes[k] = std::move(c);
    }
    return r;
  }
};

// Sheet changes of the principal square root along the straight segment
// [a, b]: parameters where Im(P^2) = 0, Re(P^2) < 0 and the branch actually
// flips across the point.
inline std::vector<double> find_sheet_changes(const OrderedSpectrum& spec,
                                              Complex a, Complex b,
                                              double eps) {
  std::vector<double> roots;
  const Complex dir = b - a;
  const double len = std::abs(dir);
  if (len == 0.0) return roots;

  const auto p2 = [&](double s) { return spec.p_squared(a + s * dir); };
  const auto h = [&](double s) { return p2(s).imag(); };

  const int n = std::max(64, static_cast<int>(std::ceil(len / (eps / 8.0))));
  std::vector<double> hv(n + 1);
  for (int i = 0; i <= n; ++i) hv[i] = h(static_cast<double>(i) / n);

  std::vector<double> candidates;
  int zero_run = 0;
  for (int i = 0; i <= n; ++i) {
    const double s = static_cast<double>(i) / n;
    if (hv[i] == 0.0) {
      if (p2(s).real() < 0.0 && ++zero_run > 2)
        throw numerical_error("path segment runs along a branch cut");
      candidates.push_back(s);
      continue;
    }
    zero_run = 0;
    if (i < n && hv[i] * hv[i + 1] < 0.0) {
      double lo = static_cast<double>(i) / n, hi = static_cast<double>(i + 1) / n;
      double flo = hv[i];
      for (int it = 0; it < 80 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = h(mid);
        if (fm == 0.0) {
          lo = hi = mid;
          break;
        }
        if (flo * fm < 0.0) {
          hi = mid;
        } else {
          lo = mid;
          flo = fm;
        }
      }
      candidates.push_back(0.5 * (lo + hi));
    }
  }

  const double probe = std::max(1e-9, 8e-12);
  for (double s : candidates) {
    if (s <= 1e-12 || s >= 1.0 - 1e-12) continue;
    if (!roots.empty() && s - roots.back() < 1e-10) continue;
    if (p2(s).real() >= 0.0) continue;
    // Genuine cut crossing: the principal root jumps to (near) its negative.
    const Complex before = principal_sqrt(p2(s - probe));
    const Complex after = principal_sqrt(p2(s + probe));
    if (std::abs(before - after) > std::abs(before + after))
      roots.push_back(s);
  }
  return roots;
}

inline SheetedPath make_sheeted(const OrderedSpectrum& spec,
                                std::vector<Complex> waypoints,
                                int initial_sheet, double eps,
                                double margin = 0.0) {
  SheetedPath path;
  path.waypoints = std::move(waypoints);
  path.initial_sheet = initial_sheet;
  path.margin = margin;
  path.changes.resize(path.segment_count());
  for (int k = 0; k < path.segment_count(); ++k)
    path.changes[k] =
        find_sheet_changes(spec, path.waypoints[k], path.waypoints[k + 1], eps);
  return path;
}

// Closed rectangle around `inside` with cut-outs for stray points, traversed
// clockwise from the top-left corner. `shrink` scales eps when drawing;
// exclusion decisions use the unscaled eps.
inline std::vector<Complex> cycle_waypoints(const std::vector<Complex>& inside,
                                            const OrderedSpectrum& all,
                                            double eps, double shrink) {
  if (inside.empty()) throw validation_error("cycle with empty interior");

  const double e = shrink * eps;
  double lr = std::numeric_limits<double>::infinity(), hr = -lr;
  for (const Complex& p : all.points) {
    lr = std::min(lr, p.real());
    hr = std::max(hr, p.real());
  }
  lr -= e;
  hr += e;
  double li = std::numeric_limits<double>::infinity(), hi = -li;
  for (const Complex& p : inside) {
    li = std::min(li, p.imag());
    hi = std::max(hi, p.imag());
  }
  li -= e;
  hi += e;

  const auto is_inside = [&](const Complex& p) {
    return std::find(inside.begin(), inside.end(), p) != inside.end();
  };

  std::vector<Complex> xtop, xbot;
  for (const Complex& p : all.points) {
    if (is_inside(p)) continue;
    bool near_top = p.imag() >= hi - eps && p.imag() <= hi + eps;
    bool near_bot = p.imag() <= li + eps && p.imag() >= li - eps;
    if (near_top && near_bot) {
      // Thin rectangle, point level with the interior: cut once, from the
      // nearer edge (double cut-outs would cancel and leave it enclosed).
      if (hi - p.imag() <= p.imag() - li)
        near_bot = false;
      else
        near_top = false;
    }
    if (near_top)
      xtop.push_back(p);
    else if (near_bot)
      xbot.push_back(p);
  }
  std::sort(xtop.begin(), xtop.end(),
            [](Complex a, Complex b) { return a.real() < b.real(); });
  std::sort(xbot.begin(), xbot.end(),
            [](Complex a, Complex b) { return a.real() > b.real(); });

  std::vector<Complex> cycle;
  cycle.emplace_back(lr, hi);
  for (const Complex& p : xtop) {
    const double r = p.real(), ii = p.imag() - e;
    cycle.emplace_back(r - e, hi);
    cycle.emplace_back(r - e, ii);
    cycle.emplace_back(r + e, ii);
    cycle.emplace_back(r + e, hi);
  }
  cycle.emplace_back(hr, hi);
  cycle.emplace_back(hr, li);
  for (const Complex& p : xbot) {
    const double r = p.real(), ii = p.imag() + e;
    cycle.emplace_back(r + e, li);
    cycle.emplace_back(r + e, ii);
    cycle.emplace_back(r - e, ii);
    cycle.emplace_back(r - e, li);
  }
  cycle.emplace_back(lr, li);
  cycle.emplace_back(lr, hi);
  return cycle;
}

// Open path from M^- to M^+: a square of half-side eps around lambda_{2g+2}
// reached from M = max Re(lambda) + eps along the horizontal. A positive
// m_margin moves the split point further out without touching the square.
inline std::vector<Complex> path_to_m_waypoints(const OrderedSpectrum& spec,
                                                double eps, double& m_out,
                                                double m_margin = 0.0) {
  double max_re = -std::numeric_limits<double>::infinity();
  for (const Complex& p : spec.points) max_re = std::max(max_re, p.real());
  const double m = max_re + eps + m_margin;
  m_out = m;

  const Complex last = spec.points.back();
  const double s = last.imag() >= 0 ? 1.0 : -1.0;
  const double r = last.real(), i = last.imag();

  return {Complex(m, 0),
          Complex(m, i + s * eps),
          Complex(r - eps, i + s * eps),
          Complex(r - eps, i - s * eps),
          Complex(r + eps, i - s * eps),
          Complex(r + eps, i + s * eps),
          Complex(m, i + s * eps),
          Complex(m, 0)};
}

struct HomologyBasis {
  std::vector<SheetedPath> a;
  std::vector<SheetedPath> b;
  SheetedPath infinity_path;  // runs M^- -> M^+ (initial sheet -1)
  double m = 0.0;
  double eps = 0.0;
};

// ---------------------------------------------------------------------------
// Intersections and winding numbers

struct Crossing {
  Complex where;
  int sign;  // sign of cross(tangent_a, tangent_b)
  int sheet_a;
  int sheet_b;
};

namespace detail {

inline double cross2(Complex u, Complex v) {
  return u.real() * v.imag() - u.imag() * v.real();
}

}  // namespace detail

// Transversal crossings of two polylines in the lambda-plane, in traversal
// order along `pa`. Touching endpoints and collinear contact do not count.
inline std::vector<Crossing> crossings(const SheetedPath& pa,
                                       const SheetedPath& pb) {
  std::vector<Crossing> out;
  for (int i = 0; i < pa.segment_count(); ++i) {
    const Complex p1 = pa.waypoints[i], p2 = pa.waypoints[i + 1];
    const Complex r = p2 - p1;
    if (std::abs(r) == 0.0) continue;
    std::vector<std::pair<double, Crossing>> on_seg;
    for (int j = 0; j < pb.segment_count(); ++j) {
      const Complex p3 = pb.waypoints[j], p4 = pb.waypoints[j + 1];
      const Complex s = p4 - p3;
      if (std::abs(s) == 0.0) continue;
      const double denom = detail::cross2(r, s);
      const double scale = std::abs(r) * std::abs(s);
      if (std::abs(denom) <= 1e-12 * scale) continue;  // parallel or touching
      const double t = detail::cross2(p3 - p1, s) / denom;
      const double u = detail::cross2(p3 - p1, r) / denom;
      const double tol = 1e-12;
      if (t <= tol || t >= 1.0 - tol || u <= tol || u >= 1.0 - tol) continue;
      Crossing c;
      c.where = p1 + t * r;
      c.sign = denom > 0 ? +1 : -1;
      c.sheet_a = pa.sheet_at(i, t);
      c.sheet_b = pb.sheet_at(j, u);
      on_seg.emplace_back(t, c);
    }
    std::sort(on_seg.begin(), on_seg.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    for (auto& [t, c] : on_seg) out.push_back(c);
  }
  return out;
}

// Intersection number on the surface: only crossings where both paths sit on
// the same sheet count.
inline int intersection_number(const SheetedPath& pa, const SheetedPath& pb) {
  int n = 0;
  for (const Crossing& c : crossings(pa, pb))
    if (c.sheet_a == c.sheet_b) n += c.sign;
  return n;
}

// True if the polylines share a segment of positive length (collinear
// overlap). Single shared points are fine.
inline bool share_segment(const SheetedPath& pa, const SheetedPath& pb) {
  for (int i = 0; i < pa.segment_count(); ++i) {
    const Complex p1 = pa.waypoints[i], p2 = pa.waypoints[i + 1];
    const Complex r = p2 - p1;
    const double lr = std::abs(r);
    if (lr == 0.0) continue;
    for (int j = 0; j < pb.segment_count(); ++j) {
      const Complex p3 = pb.waypoints[j], p4 = pb.waypoints[j + 1];
      const Complex s = p4 - p3;
      const double ls = std::abs(s);
      if (ls == 0.0) continue;
      const double scale = lr * ls;
      if (std::abs(detail::cross2(r, s)) > 1e-12 * scale) continue;
      if (std::abs(detail::cross2(p3 - p1, r)) > 1e-12 * lr * std::abs(p3 - p1) &&
          std::abs(p3 - p1) > 0)
        continue;
      // Same line; check span overlap along r.
      const double t3 = ((p3 - p1) / r).real();
      const double t4 = ((p4 - p1) / r).real();
      const double lo = std::min(t3, t4), hi = std::max(t3, t4);
      if (std::min(hi, 1.0) - std::max(lo, 0.0) > 1e-9) return true;
    }
  }
  return false;
}

inline int winding_number(const std::vector<Complex>& waypoints, Complex z) {
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < waypoints.size(); ++k) {
    const Complex a = waypoints[k] - z, b = waypoints[k + 1] - z;
    if (std::abs(a) == 0.0 || std::abs(b) == 0.0)
      throw numerical_error("winding number evaluated on the path");
    total += std::arg(b / a);
  }
  return static_cast<int>(std::lround(total / (2.0 * M_PI)));
}

// ---------------------------------------------------------------------------
// Basis construction (Algorithms 1-3 plus orientation)

// Flip b_j onto a_j's sheet at their first common point if needed, then
// direct b_j so that the intersection number a_j o b_j is +1.
inline void orient_canonical(HomologyBasis& basis) {
  for (std::size_t j = 0; j < basis.a.size(); ++j) {
    SheetedPath& bj = basis.b[j];
    std::vector<Crossing> cr = crossings(basis.a[j], bj);
    if (cr.empty())
      throw numerical_error("cycles a_" + std::to_string(j + 1) + " and b_" +
                            std::to_string(j + 1) +
                            " do not meet (drawing-scale collision)");
    if (cr.front().sheet_a != cr.front().sheet_b) bj.initial_sheet = -bj.initial_sheet;
    int n = intersection_number(basis.a[j], bj);
    if (n == 0)
      throw numerical_error("a o b vanished after sheet alignment for cycle " +
                            std::to_string(j + 1));
    if (n < 0) {
      bj = bj.reversed();
      n = intersection_number(basis.a[j], bj);
    }
    if (n != 1)
      throw numerical_error("could not normalize a o b to +1 for cycle " +
                            std::to_string(j + 1));
  }
}

inline HomologyBasis homology_basis(const OrderedSpectrum& spec,
                                    double m_margin = 0.0) {
  HomologyBasis basis;
  basis.eps = epsilon(spec);
  const int g = spec.genus();

  for (int j = 1; j <= g; ++j) {
    // Distinct sub-unit drawing scales keep cycles from sharing segments;
    // the infinity path alone is drawn at the full eps. All cycles start on
    // the sigma = -1 sheet (the sheet reaching infinity^-); together with the
    // clockwise traversal this fixes the signs of omega, k and delta.
    const double shrink_a = 1.0 - 0.008 * (2 * j - 1);
    const double shrink_b = 1.0 - 0.008 * (2 * j);
    std::vector<Complex> in_a(spec.points.begin(), spec.points.begin() + 2 * j);
    std::vector<Complex> in_b{spec.points[2 * j - 1], spec.points[2 * j]};

    SheetedPath aj = make_sheeted(
        spec, cycle_waypoints(in_a, spec, basis.eps, shrink_a), -1, basis.eps,
        shrink_a * basis.eps);
    SheetedPath bj = make_sheeted(
        spec, cycle_waypoints(in_b, spec, basis.eps, shrink_b), -1, basis.eps,
        shrink_b * basis.eps);
    if (aj.total_changes() % 2 || bj.total_changes() % 2)
      throw numerical_error("closed cycle with odd sheet-change parity");
    basis.a.push_back(std::move(aj));
    basis.b.push_back(std::move(bj));
  }

  std::vector<Complex> inf_wp =
      path_to_m_waypoints(spec, basis.eps, basis.m, m_margin);
  basis.infinity_path =
      make_sheeted(spec, std::move(inf_wp), -1, basis.eps, basis.eps);
  if (basis.infinity_path.total_changes() % 2 == 0)
    throw numerical_error("infinity path must have odd sheet-change parity");

  orient_canonical(basis);

  // The delta integrals are defined modulo periods, so what must vanish is
  // the net (signed, same-sheet) crossing count of the infinity path with
  // every basis cycle; paired +/- crossings are harmless.
  for (const std::vector<SheetedPath>* group : {&basis.a, &basis.b})
    for (const SheetedPath& cyc : *group) {
      if (intersection_number(basis.infinity_path, cyc) != 0)
        throw numerical_error("infinity path has nonzero net crossing with a basis cycle");
      if (share_segment(basis.infinity_path, cyc))
        throw numerical_error("infinity path runs along a basis cycle");
    }

  return basis;
}

inline SheetedPath path_to_m(const OrderedSpectrum& spec) {
  const double eps = epsilon(spec);
  double m = 0.0;
  std::vector<Complex> wp = path_to_m_waypoints(spec, eps, m);
  return make_sheeted(spec, std::move(wp), -1, eps, eps);
}

}  // namespace pnft
