#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <vector>

#include "pnft/errors.hpp"
#include "pnft/surface.hpp"

namespace pnft {

struct TauDiagnostics {
  double symmetry_defect = 0.0;
  double min_im_eigenvalue = 0.0;
};

inline TauDiagnostics validate_tau(const Eigen::MatrixXcd& tau) {
  TauDiagnostics d;
  if (tau.rows() == 0) {
    d.min_im_eigenvalue = std::numeric_limits<double>::infinity();
    return d;
  }
  d.symmetry_defect = (tau - tau.transpose()).cwiseAbs().maxCoeff();
  Eigen::MatrixXd y = 0.5 * (tau.imag() + tau.imag().transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(y);
  d.min_im_eigenvalue = es.eigenvalues().minCoeff();
  return d;
}

// Riemann theta series
//   theta(x | tau) = sum_{m in Z^g} exp(pi i m^T tau m + 2 pi i m^T x)
// summed over an axis-aligned box after recentering x by the rounded
// Gaussian offset c = round(Im(tau)^{-1} Im(x)). The box is sized so the
// discarded tail is below `tol` in absolute value (for offsets bounded by
// the recentering), using the per-axis stiffness kappa_j = 1/(Y^{-1})_{jj}.
class ThetaSeries {
 public:
  explicit ThetaSeries(Eigen::MatrixXcd tau, double tol = 1e-12)
      : tau_(std::move(tau)), tol_(tol) {
    g_ = static_cast<int>(tau_.rows());
    if (g_ == 0) return;

    const TauDiagnostics diag = validate_tau(tau_);
    if (diag.symmetry_defect > 1e-8)
      throw validation_error("tau is not symmetric (defect " +
                             std::to_string(diag.symmetry_defect) + ")");
    if (diag.min_im_eigenvalue <= 0.0)
      throw validation_error("Im(tau) is not positive definite");
    lambda_min_ = diag.min_im_eigenvalue;

    y_ = 0.5 * (tau_.imag() + tau_.imag().transpose());
    y_solver_.compute(y_);
    const Eigen::MatrixXd y_inv = y_solver_.solve(
        Eigen::MatrixXd::Identity(g_, g_));

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(y_);
    const double lambda_max = es.eigenvalues().maxCoeff();
    // Recentering leaves |o_j| <= 1/2, so the Gaussian center stays within
    // rho of the origin and the amplitude factor within growth.
    const double rho = 0.5 * std::sqrt(static_cast<double>(g_));
    const double growth = std::exp(0.25 * M_PI * lambda_max * g_);

    const auto shell_count = [&](int r) {
      return 2.0 * g_ * std::pow(2.0 * r + 1.0, g_ - 1);
    };
    int radius = 1;
    for (; radius < 64; ++radius) {
      double tail = 0.0;
      for (int r = radius + 1; r < radius + 60; ++r) {
        const double d = r - rho;
        if (d <= 0) {
          tail = std::numeric_limits<double>::infinity();
          break;
        }
        tail += shell_count(r) * growth * std::exp(-M_PI * lambda_min_ * d * d);
      }
      if (tail < tol_) break;
    }
    if (radius >= 64)
      throw numerical_error("theta truncation radius exceeds 64; tau is too "
                            "ill-conditioned for the box sum");

    radii_.resize(g_);
    const double log_budget =
        std::log(std::max(1.0, 2.0 * g_ * growth *
                                   std::pow(2.0 * radius + 1.0, g_ - 1)) /
                 tol_);
    for (int j = 0; j < g_; ++j) {
      const double kappa = 1.0 / y_inv(j, j);  // min of m^T Y m with m_j fixed
      const int rj = static_cast<int>(
          std::ceil(0.5 + std::sqrt(log_budget / (M_PI * kappa))));
      radii_[j] = std::min(radius, std::max(1, rj));
    }

    std::size_t count = 1;
    for (int j = 0; j < g_; ++j) count *= 2 * radii_[j] + 1;
    if (count > (std::size_t{1} << 24))
      throw numerical_error("theta lattice too large (" +
                            std::to_string(count) + " points)");
    lattice_.reserve(count);
    Eigen::VectorXd n(g_);
    std::vector<int> idx(g_, 0);
    for (int j = 0; j < g_; ++j) idx[j] = -radii_[j];
    while (true) {
      for (int j = 0; j < g_; ++j) n(j) = idx[j];
      Term t;
      t.n = n;
      const Complex quad = (n.transpose() * (tau_ * n).eval())(0);
      t.weight = std::exp(Complex(0, M_PI) * quad);
      lattice_.push_back(std::move(t));
      int j = 0;
      for (; j < g_; ++j) {
        if (++idx[j] <= radii_[j]) break;
        idx[j] = -radii_[j];
      }
      if (j == g_) break;
    }
  }

  int genus() const { return g_; }
  const Eigen::MatrixXcd& tau() const { return tau_; }

  // Integer recentering offset for the argument x.
  Eigen::VectorXd center(const Eigen::VectorXcd& x) const {
    Eigen::VectorXd c = y_solver_.solve(x.imag());
    for (int j = 0; j < g_; ++j) c(j) = std::round(c(j));
    return c;
  }

  Complex eval(const Eigen::VectorXcd& x) const {
    if (g_ == 0) return 1.0;
    const Eigen::VectorXd c = center(x);
    const Eigen::VectorXcd xs = x - tau_ * c.cast<Complex>();
    Complex sum = 0.0;
    for (const Term& t : lattice_) {
      const Complex dot = (t.n.cast<Complex>().transpose() * xs)(0);
      sum += t.weight * std::exp(Complex(0, 2.0 * M_PI) * dot);
    }
    // Undo the quasi-periodic shift x -> x - tau c.
    const Complex cquad =
        (c.cast<Complex>().transpose() * (tau_ * c.cast<Complex>()).eval())(0);
    const Complex cdotx = (c.cast<Complex>().transpose() * x)(0);
    return std::exp(Complex(0, M_PI) * cquad - Complex(0, 2.0 * M_PI) * cdotx) *
           sum;
  }

  struct Term {
    Eigen::VectorXd n;
    Complex weight;  // exp(pi i n^T tau n)
  };
  const std::vector<Term>& lattice() const { return lattice_; }

 private:
  Eigen::MatrixXcd tau_;
  Eigen::MatrixXd y_;
  Eigen::LDLT<Eigen::MatrixXd> y_solver_;
  double tol_;
  double lambda_min_ = 0.0;
  int g_ = 0;
  std::vector<int> radii_;
  std::vector<Term> lattice_;
};

inline Complex theta(const Eigen::VectorXcd& x, const Eigen::MatrixXcd& tau,
                     double tol = 1e-12) {
  return ThetaSeries(tau, tol).eval(x);
}

}  // namespace pnft
