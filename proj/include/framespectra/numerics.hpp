#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "framespectra/rng.hpp"
#include "framespectra/types.hpp"

namespace framespectra {

using RealMatrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;

// Eigenvalues of a Hermitian (or real symmetric) matrix, ascending.
// Rejects inputs whose Hermitian defect exceeds 1e-12 relative.
std::vector<double> hermitian_eigenvalues(const RealMatrix& g);
std::vector<double> hermitian_eigenvalues(const ComplexMatrix& g);

// Q factor of a QR decomposition with the phase convention diag(R) > 0,
// so that Gaussian input yields exactly Haar measure.
RealMatrix haar_qr(const RealMatrix& g);
ComplexMatrix haar_qr(const ComplexMatrix& g);

// Haar-distributed orthogonal/unitary n-by-n matrix.
RealMatrix haar_orthogonal(int n, RngStream& rng);
ComplexMatrix haar_unitary(int n, RngStream& rng);

RealMatrix gaussian_matrix(int rows, int cols, RngStream& rng);
ComplexMatrix complex_gaussian_matrix(int rows, int cols, RngStream& rng);

// Adaptive Simpson quadrature. With singular_edges set, substitutes
// x = a + (b-a) sin^2(theta) first, which removes inverse-square-root
// endpoint singularities. Throws NumericError on non-convergence.
double integrate(const std::function<double(double)>& f, double a, double b,
                 bool singular_edges, double tol);

struct RegressionResult {
  double intercept = 0.0;
  std::vector<double> slopes;     // one per regressor
  std::vector<double> slope_ses;  // OLS standard errors
  double r_squared = 0.0;
  int n_points = 0;

  double slope() const { return slopes.at(0); }
  double slope_se() const { return slope_ses.at(0); }
};

// Ordinary least squares with intercept; one or two regressors.
RegressionResult linear_regression(
    const std::vector<std::vector<double>>& regressors,
    const std::vector<double>& y);
RegressionResult linear_regression(const std::vector<double>& x,
                                   const std::vector<double>& y);

// Regularized incomplete beta function I_x(a, b), continued fraction.
double regularized_incomplete_beta(double a, double b, double x);

// Two-sided p-value of Student's t with `dof` degrees of freedom.
double student_t_two_sided_p(double t, int dof);

}  // namespace framespectra
