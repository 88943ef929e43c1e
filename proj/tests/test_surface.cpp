#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "pnft/surface.hpp"

using namespace pnft;

namespace {

// Exhaustive oracle: enumerate every pair permutation and orientation that
// satisfies the ordering constraints plus the documented tie-breaks, and
// require a unique survivor.
std::vector<Complex> sort_oracle(std::vector<Complex> upper) {
  std::sort(upper.begin(), upper.end(), [](Complex a, Complex b) {
    return std::make_pair(a.real(), a.imag()) <
           std::make_pair(b.real(), b.imag());
  });
  std::vector<std::vector<Complex>> survivors;
  do {
    const int n = static_cast<int>(upper.size());
    for (int mask = 0; mask < (1 << n); ++mask) {
      std::vector<Complex> pts;
      for (int j = 0; j < n; ++j) {
        const Complex even =
            (mask >> j) & 1 ? upper[j] : std::conj(upper[j]);
        pts.push_back(std::conj(even));
        pts.push_back(even);
      }
      bool ok = true;
      for (int j = 1; j < n && ok; ++j) {
        const double a = pts[2 * j - 1].imag(), b = pts[2 * j].imag();
        if (std::abs(a) > std::abs(b) || (a > 0) != (b > 0)) ok = false;
      }
      // tie-breaks: ascending |Im| with ascending Re among ties, chain
      // starting positive
      for (int j = 1; j < n && ok; ++j) {
        const Complex u1 = pts[2 * j - 1].imag() > 0 ? pts[2 * j - 1]
                                                     : pts[2 * j];
        const Complex u0 = pts[2 * j - 3].imag() > 0 ? pts[2 * j - 3]
                                                     : pts[2 * j - 2];
        const Complex uu0(u0.real(), std::abs(u0.imag()));
        const Complex uu1(u1.real(), std::abs(u1.imag()));
        if (std::make_pair(uu0.imag(), uu0.real()) >
            std::make_pair(uu1.imag(), uu1.real()))
          ok = false;
      }
      if (ok && pts[1].imag() < 0) ok = false;
      if (ok) survivors.push_back(pts);
    }
  } while (std::next_permutation(
      upper.begin(), upper.end(), [](Complex a, Complex b) {
        return std::make_pair(a.real(), a.imag()) <
               std::make_pair(b.real(), b.imag());
      }));
  EXPECT_EQ(survivors.size(), 1u);
  return survivors.front();
}

}  // namespace

TEST(Surface, SortTableOne) {
  MainSpectrum spec = make_main_spectrum({{-1, 3}, {0, 5}, {1, 3}});
  OrderedSpectrum ord = sort_spectrum(spec);
  const std::vector<Complex> expected{{-1, -3}, {-1, 3}, {1, 3},
                                      {1, -3},  {0, -5}, {0, 5}};
  ASSERT_EQ(ord.points.size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i)
    EXPECT_EQ(ord.points[i], expected[i]) << "position " << i;
  EXPECT_EQ(sort_oracle(spec.upper), ord.points);
}

TEST(Surface, SortGenusZero) {
  OrderedSpectrum ord = sort_spectrum(make_main_spectrum({{0, 2}}));
  EXPECT_EQ(ord.points, (std::vector<Complex>{{0, -2}, {0, 2}}));
  EXPECT_EQ(ord.genus(), 0);
}

TEST(Surface, SortInvariantsHoldOnWideSpectrum) {
  MainSpectrum spec =
      make_main_spectrum({{-30, 5}, {-10, 7}, {10, 7}, {30, 5}});
  OrderedSpectrum ord = sort_spectrum(spec);
  const int g = ord.genus();
  for (int j = 1; j <= g + 1; ++j)
    EXPECT_EQ(ord.points[2 * j - 2], std::conj(ord.points[2 * j - 1]));
  for (int j = 1; j <= g; ++j) {
    EXPECT_LE(std::abs(ord.points[2 * j - 1].imag()),
              std::abs(ord.points[2 * j].imag()));
    EXPECT_EQ(ord.points[2 * j - 1].imag() > 0, ord.points[2 * j].imag() > 0);
  }
  // |Im| of even entries across pairs: 5,5,7,7
  EXPECT_DOUBLE_EQ(std::abs(ord.points[1].imag()), 5);
  EXPECT_DOUBLE_EQ(std::abs(ord.points[3].imag()), 5);
  EXPECT_DOUBLE_EQ(std::abs(ord.points[5].imag()), 7);
  EXPECT_DOUBLE_EQ(std::abs(ord.points[7].imag()), 7);
}

TEST(Surface, SortIsPermutationOfInput) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> re(-5, 5), im(0.2, 4);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<Complex> upper;
    for (int i = 0; i < 4; ++i) upper.emplace_back(re(rng), im(rng));
    OrderedSpectrum ord;
    try {
      ord = sort_spectrum(make_main_spectrum(upper));
    } catch (const validation_error&) {
      continue;  // random double point
    }
    std::vector<Complex> expected;
    for (const Complex& u : upper) {
      expected.push_back(u);
      expected.push_back(std::conj(u));
    }
    auto key = [](Complex a, Complex b) {
      return std::make_pair(a.real(), a.imag()) <
             std::make_pair(b.real(), b.imag());
    };
    std::vector<Complex> got = ord.points;
    std::sort(expected.begin(), expected.end(), key);
    std::sort(got.begin(), got.end(), key);
    EXPECT_EQ(got, expected);
  }
}

TEST(Surface, EvalP) {
  OrderedSpectrum ord = sort_spectrum(make_main_spectrum({{0, 1}}));
  EXPECT_NEAR(std::abs(eval_p(ord, {Complex(0, 0), +1}) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(eval_p(ord, {Complex(0, 1), +1})), 0.0, 1e-7);
  EXPECT_NEAR(std::abs(eval_p(ord, {Complex(0, 1), -1})), 0.0, 1e-7);

  // direct product-then-sqrt oracle on the genus-2 curve
  OrderedSpectrum t1 = sort_spectrum(make_main_spectrum({{-1, 3}, {0, 5}, {1, 3}}));
  const Complex z(0.3, 0.7);
  Complex prod = 1.0;
  for (const Complex& p : t1.points) prod *= z - p;
  EXPECT_NEAR(std::abs(eval_p(t1, {z, +1}) - principal_sqrt(prod)), 0.0, 1e-12);
}

TEST(Surface, EvalPSheetAntisymmetryAndConjugation) {
  OrderedSpectrum ord = sort_spectrum(make_main_spectrum({{-1, 3}, {0, 5}, {1, 3}}));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-4, 4);
  for (int i = 0; i < 100; ++i) {
    const Complex z(u(rng), u(rng));
    EXPECT_EQ(eval_p(ord, {z, -1}), -eval_p(ord, {z, +1}));
    EXPECT_NEAR(std::abs(eval_p(ord, {z, +1})),
                std::abs(eval_p(ord, {std::conj(z), +1})), 1e-9);
  }
}

TEST(Surface, PrincipalBranch) {
  // negative real axis resolves to the value with positive imaginary part
  EXPECT_EQ(principal_sqrt(Complex(-4.0, 0.0)), Complex(0.0, 2.0));
  EXPECT_EQ(principal_sqrt(Complex(-4.0, -0.0)), Complex(0.0, 2.0));
  EXPECT_GE(principal_sqrt(Complex(3.0, -5.0)).real(), 0.0);
}

TEST(Surface, Epsilon) {
  // brute-force Chebyshev oracle
  const auto oracle = [](const OrderedSpectrum& s) {
    double best = 1e300;
    for (std::size_t i = 0; i < s.points.size(); ++i)
      for (std::size_t j = i + 1; j < s.points.size(); ++j)
        best = std::min(best, cheb_dist(s.points[i], s.points[j]));
    return 0.5 * best;
  };
  OrderedSpectrum t1 = sort_spectrum(make_main_spectrum({{-1, 3}, {0, 5}, {1, 3}}));
  EXPECT_DOUBLE_EQ(epsilon(t1), 1.0);
  EXPECT_DOUBLE_EQ(epsilon(t1), oracle(t1));

  OrderedSpectrum pw = sort_spectrum(make_main_spectrum({{0, 1}}));
  EXPECT_DOUBLE_EQ(epsilon(pw), 1.0);

  OrderedSpectrum t2 =
      sort_spectrum(make_main_spectrum({{-30, 5}, {-10, 7}, {10, 7}, {30, 5}}));
  EXPECT_DOUBLE_EQ(epsilon(t2), oracle(t2));
  EXPECT_DOUBLE_EQ(epsilon(t2), 5.0);

  // every branch point's 2 eps square excludes every other point
  for (const Complex& p : t2.points)
    for (const Complex& q : t2.points)
      if (p != q) EXPECT_GE(cheb_dist(p, q), 2 * epsilon(t2));
}

TEST(Surface, Validation) {
  EXPECT_THROW(make_main_spectrum({}), validation_error);
  EXPECT_THROW(make_main_spectrum({{1, -0.5}}), validation_error);
  EXPECT_THROW(make_main_spectrum({{1, 0}}), validation_error);
  EXPECT_THROW(make_main_spectrum({{0, 1}, {5e-10, 1}}), validation_error);
}
