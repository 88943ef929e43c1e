#include <gtest/gtest.h>

#include "pnft/meromorphic.hpp"

using namespace pnft;

namespace {

OrderedSpectrum table1() {
  return sort_spectrum(make_main_spectrum({{-1, 3}, {0, 5}, {1, 3}}));
}

}  // namespace

TEST(Meromorphic, GenusZeroNumerators) {
  const double A = 2.0;
  OrderedSpectrum ord = sort_spectrum(make_main_spectrum({{0, A}}));
  OmegaTilde ot = omega_tilde_numerators(ord);
  EXPECT_NEAR(std::abs(ot.d1), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(ot.d2 - Complex(-A * A / 2.0)), 0.0, 1e-12);
  ASSERT_EQ(ot.diff[0].numer.size(), 1u);
  EXPECT_EQ(ot.diff[0].numer[0], Complex(1.0));
  ASSERT_EQ(ot.diff[1].numer.size(), 2u);
  EXPECT_EQ(ot.diff[1].numer[1], Complex(1.0));
  EXPECT_NEAR(std::abs(ot.diff[1].numer[0]), 0.0, 1e-14);
  ASSERT_EQ(ot.diff[2].numer.size(), 3u);
  EXPECT_EQ(ot.diff[2].numer[2], Complex(4.0));
  EXPECT_NEAR(std::abs(ot.diff[2].numer[0] - Complex(2.0 * A * A)), 0.0, 1e-12);
}

TEST(Meromorphic, DOneRealForConjugateSymmetricSpectra) {
  OrderedSpectrum wide =
      sort_spectrum(make_main_spectrum({{-3, 1}, {0.5, 2}, {4, 0.7}}));
  OmegaTilde ot = omega_tilde_numerators(wide);
  EXPECT_NEAR(ot.d1.imag(), 0.0, 1e-12);

  // negation-symmetric spectrum: d1 = 0
  OmegaTilde t1 = omega_tilde_numerators(table1());
  EXPECT_NEAR(std::abs(t1.d1), 0.0, 1e-12);
}

TEST(Meromorphic, NormalizedAPeriodsVanish) {
  for (auto spec : {std::vector<Complex>{{-1, 3}, {0, 5}, {1, 3}},
                    std::vector<Complex>{{0, 1}, {1, 1}}}) {
    OrderedSpectrum ord = sort_spectrum(make_main_spectrum(spec));
    HomologyBasis basis = homology_basis(ord);
    PeriodData pd = compute_period_data(ord, basis);
    for (int which = 0; which < 3; ++which) {
      const RationalDifferential f =
          normalize_meromorphic(ord, basis, pd, which);
      for (int j = 0; j < ord.genus(); ++j)
        EXPECT_NEAR(std::abs(integrate_path(f, basis.a[j], ord)), 0.0, 1e-8)
            << "which=" << which << " j=" << j;
    }
  }
}

TEST(Meromorphic, NormalizationTouchesOnlyLowOrders) {
  OrderedSpectrum ord = table1();
  HomologyBasis basis = homology_basis(ord);
  PeriodData pd = compute_period_data(ord, basis);
  const int g = ord.genus();
  const RationalDifferential before =
      omega_tilde_numerators(ord, pd.center, pd.scale).diff[0];
  const RationalDifferential after = normalize_meromorphic(ord, basis, pd, 0);
  ASSERT_EQ(before.numer.size(), after.numer.size());
  for (std::size_t i = g; i < before.numer.size(); ++i)
    EXPECT_EQ(before.numer[i], after.numer[i]) << "coefficient " << i;
}

TEST(Meromorphic, GenusZeroNeedsNoSubtraction) {
  OrderedSpectrum ord = sort_spectrum(make_main_spectrum({{0, 2}}));
  HomologyBasis basis = homology_basis(ord);
  PeriodData pd = compute_period_data(ord, basis);
  const RationalDifferential f = normalize_meromorphic(ord, basis, pd, 0);
  const RationalDifferential raw =
      omega_tilde_numerators(ord, pd.center, pd.scale).diff[0];
  ASSERT_EQ(f.numer.size(), raw.numer.size());
  for (std::size_t i = 0; i < f.numer.size(); ++i)
    EXPECT_EQ(f.numer[i], raw.numer[i]);
}

TEST(Meromorphic, ScalarsTableOne) {
  OrderedSpectrum ord = table1();
  HomologyBasis basis = homology_basis(ord);
  PeriodData pd = compute_period_data(ord, basis);
  ScalarParams sc = scalar_params(ord, basis, pd);
  EXPECT_NEAR(sc.K0_abs, 3.6061, 1e-4);
  EXPECT_NEAR(sc.omega0, 0.0, 1e-6);
  EXPECT_NEAR(sc.k0, 78.8096, 1e-3);
}

TEST(Meromorphic, ScalarsTableTwo) {
  OrderedSpectrum ord = sort_spectrum(
      make_main_spectrum({{-30, 5}, {-10, 7}, {10, 7}, {30, 5}}));
  HomologyBasis basis = homology_basis(ord);
  PeriodData pd = compute_period_data(ord, basis);
  ScalarParams sc = scalar_params(ord, basis, pd);
  EXPECT_NEAR(sc.K0_abs, 6.4261, 5e-3);  // the table quotes the magnitude
  EXPECT_NEAR(sc.omega0, -21.5630, 5e-3);
  EXPECT_NEAR(sc.k0, 2.6069, 5e-3);
}

TEST(Meromorphic, ScalarsPlaneWave) {
  // q = A exp(2 i A^2 z) forces |K0| = A, omega0 = 0, k0 = 2 A^2
  const double A = 2.0;
  OrderedSpectrum ord = sort_spectrum(make_main_spectrum({{0, A}}));
  HomologyBasis basis = homology_basis(ord);
  PeriodData pd = compute_period_data(ord, basis);
  ScalarParams sc = scalar_params(ord, basis, pd);
  EXPECT_NEAR(sc.K0_abs, A, 1e-9);
  EXPECT_NEAR(sc.omega0, 0.0, 1e-9);
  EXPECT_NEAR(sc.k0, 2 * A * A, 1e-8);
}

TEST(Meromorphic, TailSplitIndependence) {
  OrderedSpectrum ord = table1();
  HomologyBasis near = homology_basis(ord, 0.0);
  HomologyBasis far = homology_basis(ord, 3.0);
  ASSERT_NE(near.m, far.m);
  PeriodData pd_near = compute_period_data(ord, near);
  PeriodData pd_far = compute_period_data(ord, far);
  ScalarParams a = scalar_params(ord, near, pd_near);
  ScalarParams b = scalar_params(ord, far, pd_far);
  EXPECT_NEAR(a.K0_abs, b.K0_abs, 1e-7);
  EXPECT_NEAR(a.omega0, b.omega0, 1e-7);
  EXPECT_NEAR(a.k0, b.k0, 1e-7);
}
