#include <gtest/gtest.h>

#include "pnft/contour.hpp"

using namespace pnft;

namespace {

OrderedSpectrum table1() {
  return sort_spectrum(make_main_spectrum({{-1, 3}, {0, 5}, {1, 3}}));
}

OrderedSpectrum table2() {
  return sort_spectrum(
      make_main_spectrum({{-30, 5}, {-10, 7}, {10, 7}, {30, 5}}));
}

// Dense-trapezoid oracle along the same sheeted path.
Complex trapezoid_oracle(const RationalDifferential& f, const SheetedPath& path,
                         const OrderedSpectrum& spec, int n_per_unit) {
  Complex total = 0.0;
  std::size_t cum = 0;
  for (int k = 0; k < path.segment_count(); ++k) {
    const Complex p = path.waypoints[k], q = path.waypoints[k + 1];
    const Complex dir = q - p;
    const auto& ch = path.changes[k];
    if (std::abs(dir) == 0.0) {
      cum += ch.size();
      continue;
    }
    std::vector<double> bounds{0.0};
    bounds.insert(bounds.end(), ch.begin(), ch.end());
    bounds.push_back(1.0);
    for (std::size_t l = 0; l + 1 < bounds.size(); ++l) {
      const double sign =
          ((cum + l) % 2) ? -path.initial_sheet : path.initial_sheet;
      const int n = std::max(
          8, static_cast<int>(std::abs(dir) * (bounds[l + 1] - bounds[l]) *
                              n_per_unit));
      Complex acc = 0.0;
      for (int i = 0; i <= n; ++i) {
        const double s =
            bounds[l] + (bounds[l + 1] - bounds[l]) * i / double(n);
        const Complex lam = p + s * dir;
        const Complex v = f(lam) / principal_sqrt(spec.p_squared(lam));
        acc += (i == 0 || i == n) ? 0.5 * v : v;
      }
      total += sign * dir * (bounds[l + 1] - bounds[l]) / double(n) * acc;
    }
    cum += ch.size();
  }
  return total;
}

}  // namespace

TEST(Contour, TrapezoidOracle) {
  // a_1 on the curve P^2 = (lambda^2+1)((lambda-1)^2+1)
  OrderedSpectrum ord = sort_spectrum(make_main_spectrum({{0, 1}, {1, 1}}));
  HomologyBasis basis = homology_basis(ord);
  const RationalDifferential one = RationalDifferential::monomial(0);
  const Complex mine = integrate_path(one, basis.a[0], ord);
  const Complex ref = trapezoid_oracle(one, basis.a[0], ord, 200000);
  EXPECT_NEAR(std::abs(mine - ref), 0.0, 1e-8);
}

TEST(Contour, DegenerateAndReversedPaths) {
  OrderedSpectrum ord = table1();
  const RationalDifferential f = RationalDifferential::monomial(1);

  SheetedPath null_path =
      make_sheeted(ord, {Complex(0, 2), Complex(0, 2)}, +1, 1.0);
  EXPECT_EQ(integrate_path(f, null_path, ord), Complex(0.0));

  HomologyBasis basis = homology_basis(ord);
  const Complex fwd = integrate_path(f, basis.a[1], ord);
  const Complex bwd = integrate_path(f, basis.a[1].reversed(), ord);
  EXPECT_NEAR(std::abs(fwd + bwd), 0.0, 1e-10);
}

TEST(Contour, PeriodDataTableOne) {
  OrderedSpectrum ord = table1();
  HomologyBasis basis = homology_basis(ord);
  PeriodData pd = compute_period_data(ord, basis);

  EXPECT_NEAR(pd.omega(0), 0.0, 2e-4);
  EXPECT_NEAR(pd.omega(1), 8.4308, 1e-4);
  EXPECT_NEAR(pd.k(0), -76.3942, 1e-4);
  EXPECT_NEAR(pd.k(1), 38.1971, 1e-4);

  EXPECT_NEAR(std::abs(pd.tau(0, 0) - Complex(0, 0.7567)), 0.0, 1e-4);
  EXPECT_NEAR(std::abs(pd.tau(0, 1) - Complex(-0.5, -0.3783)), 0.0, 1e-4);
  EXPECT_NEAR(std::abs(pd.tau(1, 1) - Complex(0, 0.6918)), 0.0, 1e-4);

  // delta^+ = 0 gives delta^- = -(delta^+ - delta^-)
  EXPECT_NEAR(std::abs(-pd.delta_diff(0) - Complex(0, -1.9104)), 0.0, 1e-4);
  Complex d2 = -pd.delta_diff(1);
  d2 = Complex(std::remainder(d2.real(), 2 * M_PI), d2.imag());
  EXPECT_NEAR(std::abs(d2.imag() - 0.9552), 0.0, 1e-4);
  EXPECT_NEAR(std::abs(std::abs(d2.real()) - M_PI), 0.0, 1e-6);

  EXPECT_LT(pd.im_residue, 1e-8);
}

TEST(Contour, PeriodDataTableTwo) {
  OrderedSpectrum ord = table2();
  HomologyBasis basis = homology_basis(ord);
  PeriodData pd = compute_period_data(ord, basis);

  EXPECT_NEAR(pd.omega(0), -40.9973, 1e-3);
  EXPECT_NEAR(pd.omega(1), -1.0643, 1e-3);
  EXPECT_NEAR(pd.omega(2), -43.1260, 1e-3);
  EXPECT_NEAR(std::abs(pd.k(0)), 0.0, 1e-3);
  EXPECT_NEAR(std::abs(pd.k(1)), 3544.5, 0.1);
  EXPECT_NEAR(std::abs(pd.k(2)), 0.0, 1e-3);

  const double expected_abs[3][3] = {
      {4.9497, std::abs(Complex(-0.5, -3.4209)), 1.8921},
      {std::abs(Complex(-0.5, -3.4209)), 3.1654, std::abs(Complex(0.5, 1.5363))},
      {1.8921, std::abs(Complex(0.5, 1.5363)), 1.1804}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      EXPECT_NEAR(std::abs(pd.tau(i, j)), expected_abs[i][j], 5e-3)
          << i << "," << j;

  EXPECT_NEAR(std::abs(pd.delta_diff(0).imag()), 5.9443, 1e-3);
  EXPECT_NEAR(std::abs(pd.delta_diff(1).imag()), 7.3887, 1e-3);
  EXPECT_NEAR(std::abs(pd.delta_diff(2).imag()), 3.7084, 1e-3);
  EXPECT_LT(pd.im_residue, 1e-8);
}

TEST(Contour, DeltaRealPartsAreMultiplesOfPi) {
  for (const OrderedSpectrum& ord : {table1(), table2()}) {
    HomologyBasis basis = homology_basis(ord);
    PeriodData pd = compute_period_data(ord, basis);
    for (int j = 0; j < ord.genus(); ++j) {
      const double q = pd.delta_diff(j).real() / M_PI;
      EXPECT_NEAR(q, std::round(q), 1e-8) << "component " << j;
    }
  }
}

TEST(Contour, TauInvariants) {
  for (const OrderedSpectrum& ord :
       {table1(), table2(),
        sort_spectrum(make_main_spectrum({{0, 1}, {1, 1}}))}) {
    HomologyBasis basis = homology_basis(ord);
    PeriodData pd = compute_period_data(ord, basis);
    const int g = ord.genus();
    EXPECT_LT((pd.tau - pd.tau.transpose()).cwiseAbs().maxCoeff(), 1e-8);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        Eigen::MatrixXd(0.5 * (pd.tau.imag() + pd.tau.imag().transpose())));
    EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);

    // normalized differentials integrate to the identity over a-cycles
    for (int j = 0; j < g; ++j)
      for (int k = 0; k < g; ++k) {
        Complex acc = 0.0;
        for (int m = 0; m < g; ++m) acc += pd.a_inv(j, m) * pd.A(m, k);
        EXPECT_NEAR(std::abs(acc - (j == k ? 1.0 : 0.0)), 0.0, 1e-8);
      }
  }
}

TEST(Contour, QuadratureRefinement) {
  OrderedSpectrum ord = table1();
  HomologyBasis basis = homology_basis(ord);
  for (int j = 0; j < 2; ++j) {
    const RationalDifferential du = RationalDifferential::monomial(j);
    for (int k = 0; k < 2; ++k) {
      const Complex coarse = integrate_path(du, basis.a[k], ord, 1e-11);
      const Complex fine = integrate_path(du, basis.a[k], ord, 1e-13);
      EXPECT_LT(std::abs(coarse - fine), 1e-9 * std::abs(fine));
    }
  }
}

TEST(Contour, GenusZeroPeriodData) {
  OrderedSpectrum ord = sort_spectrum(make_main_spectrum({{0, 2}}));
  HomologyBasis basis = homology_basis(ord);
  PeriodData pd = compute_period_data(ord, basis);
  EXPECT_EQ(pd.omega.size(), 0);
  EXPECT_EQ(pd.tau.rows(), 0);
  EXPECT_EQ(pd.delta_diff.size(), 0);
}
