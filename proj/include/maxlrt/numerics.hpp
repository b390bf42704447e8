#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>

#include "maxlrt/errors.hpp"
#include "maxlrt/rng.hpp"

namespace maxlrt {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// ---------------------------------------------------------------------------
// Special functions
// ---------------------------------------------------------------------------

double normal_cdf(double x);
/// Upper tail 1 - normal_cdf(x) without cancellation.
double normal_sf(double x);
/// Inverse of normal_cdf; throws DomainError unless 0 < p < 1.
double normal_quantile(double p);

/// Survival function of the chi-square distribution with integer df.
double chisq_sf(double x, int df);

/// P(sup_{0<=x<=1} |B(x)| > q) for a standard Brownian motion B.
double brownian_sup_sf(double q);

// ---------------------------------------------------------------------------
// Quadrature and root finding
// ---------------------------------------------------------------------------

using ScalarFunction = std::function<double(double)>;

/// Globally adaptive Gauss-Kronrod (7/15) quadrature to absolute error `tol`.
double integrate(const ScalarFunction& f, double a, double b, double tol = 1e-8);

/// Brent's bracketing solver; requires f(lo) * f(hi) <= 0.
/// Returns once the bracket is narrower than `tol` or f hits zero.
double find_root(const ScalarFunction& f, double lo, double hi, double tol = 1e-8);

// ---------------------------------------------------------------------------
// Matrices
// ---------------------------------------------------------------------------

template <typename Scalar>
struct PseudoInverse {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> matrix;
  int rank = 0;
};

template <typename Derived>
bool is_symmetric(const Eigen::MatrixBase<Derived>& m, typename Derived::Scalar tol = 1e-8) {
  if (m.rows() != m.cols()) return false;
  const auto scale = std::max<typename Derived::Scalar>(1, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol * scale;
}

/// Moore-Penrose inverse of a symmetric PSD matrix via its eigendecomposition.
/// Eigenvalues below rank_tol * (largest eigenvalue) are treated as zero.
template <typename Derived>
PseudoInverse<typename Derived::Scalar> pseudo_inverse(const Eigen::MatrixBase<Derived>& m,
                                                       typename Derived::Scalar rank_tol = 1e-10) {
  using Scalar = typename Derived::Scalar;
  using MatrixType = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (!is_symmetric(m)) throw MatrixError("pseudo_inverse: matrix is not symmetric");

  const MatrixType sym = (m + m.transpose()) / Scalar(2);
  Eigen::SelfAdjointEigenSolver<MatrixType> eig(sym);
  if (eig.info() != Eigen::Success) throw NumericError("pseudo_inverse: eigensolver failed");

  const auto& values = eig.eigenvalues();
  const Scalar largest = values.size() ? values.maxCoeff() : Scalar(0);
  PseudoInverse<Scalar> out;
  out.matrix = MatrixType::Zero(m.rows(), m.cols());
  if (largest <= Scalar(0)) return out;

  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> inv = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(values.size());
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values[i] >= rank_tol * largest) {
      inv[i] = Scalar(1) / values[i];
      ++out.rank;
    }
  }
  out.matrix = eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
  return out;
}

/// Symmetric, unit diagonal, entries in [-1, 1], PSD up to `tol`.
bool is_correlation_matrix(const Matrix& corr, double tol = 1e-8);

/// Rescale a covariance matrix to unit diagonal. Throws DegenerateDataError on a
/// non-positive diagonal entry.
Matrix covariance_to_correlation(const Matrix& sigma);

// ---------------------------------------------------------------------------
// Multivariate normal rectangle probabilities
// ---------------------------------------------------------------------------

struct MvnOptions {
  double abs_tol = 5e-5;           // target standard error
  long max_points = 1L << 17;      // total integrand evaluations
  int n_shifts = 12;               // randomizations of the lattice rule
};

struct MvnEstimate {
  double probability = 0;
  double std_error = 0;
  long n_points = 0;
};

/// P(lower <= Z <= upper) for Z ~ N(0, corr) by randomized lattice QMC over
/// the Genz separation-of-variables transform. Singular (rank-deficient)
/// correlation matrices are supported. Infinite bounds are allowed.
/// The stream is taken by value: the caller's stream is not advanced, so
/// repeated calls with the same stream use common random numbers.
MvnEstimate mvn_rect_prob(const Matrix& corr, const Vector& lower, const Vector& upper,
                          RngStream rng, const MvnOptions& options = {});

inline MvnEstimate mvn_rect_prob(const Matrix& corr, const Vector& lower, const Vector& upper,
                                 double tol, RngStream rng) {
  MvnOptions options;
  options.abs_tol = tol;
  return mvn_rect_prob(corr, lower, upper, std::move(rng), options);
}

}  // namespace maxlrt
