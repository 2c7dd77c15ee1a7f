#include "framespectra/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace framespectra {

namespace {

template <typename Mat>
std::vector<double> hermitian_eigenvalues_impl(const Mat& g) {
  if (g.rows() != g.cols()) {
    throw std::invalid_argument("hermitian_eigenvalues: matrix not square");
  }
  const double scale = g.norm();
  const double defect = (g - g.adjoint()).norm();
  if (defect > 1e-12 * std::max(scale, 1.0)) {
    std::ostringstream msg;
    msg << "hermitian_eigenvalues: input not Hermitian, defect " << defect
        << " (relative " << defect / std::max(scale, 1e-300) << ")";
    throw std::invalid_argument(msg.str());
  }
  Eigen::SelfAdjointEigenSolver<Mat> solver(g, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericError("hermitian_eigenvalues: solver did not converge",
                       std::numeric_limits<double>::quiet_NaN(), defect);
  }
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

template <typename Mat>
Mat haar_qr_impl(const Mat& g) {
  using Scalar = typename Mat::Scalar;
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ();
  Mat r = qr.matrixQR().template triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    const Scalar d = r(j, j);
    const double mag = std::abs(d);
    if (mag < 1e-300 * std::max(1.0, g.norm())) {
      throw NumericError("haar_qr: rank-deficient input, resample",
                         std::numeric_limits<double>::quiet_NaN(), mag);
    }
    q.col(j) *= d / Scalar(mag);
  }
  return q;
}

struct SimpsonState {
  const std::function<double(double)>* f;
  long evals = 0;
  long budget = 0;
  double residual = 0.0;  // error accepted at depth exhaustion
};

double eval(SimpsonState& s, double x) {
  ++s.evals;
  const double v = (*s.f)(x);
  return std::isfinite(v) ? v : 0.0;
}

double simpson_recurse(SimpsonState& s, double a, double b, double fa,
                       double fm, double fb, double whole, double tol,
                       int depth) {
  const double m = 0.5 * (a + b);
  const double flm = eval(s, 0.5 * (a + m));
  const double frm = eval(s, 0.5 * (m + b));
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tol || depth <= 0 || s.evals > s.budget) {
    if (std::abs(delta) > 15.0 * tol) {
      s.residual += std::abs(delta) / 15.0;
    }
    return left + right + delta / 15.0;
  }
  return simpson_recurse(s, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_recurse(s, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol) {
  SimpsonState s{&f, 0, 2'000'000, 0.0};
  const double fa = eval(s, a);
  const double m = 0.5 * (a + b);
  const double fm = eval(s, m);
  const double fb = eval(s, b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double result = simpson_recurse(s, a, b, fa, fm, fb, whole, tol, 48);
  if (s.residual > tol) {
    throw NumericError("integrate: adaptive rule did not reach tolerance",
                       result, s.residual);
  }
  return result;
}

}  // namespace

std::vector<double> hermitian_eigenvalues(const RealMatrix& g) {
  return hermitian_eigenvalues_impl(g);
}

std::vector<double> hermitian_eigenvalues(const ComplexMatrix& g) {
  return hermitian_eigenvalues_impl(g);
}

RealMatrix haar_qr(const RealMatrix& g) { return haar_qr_impl(g); }
ComplexMatrix haar_qr(const ComplexMatrix& g) { return haar_qr_impl(g); }

RealMatrix gaussian_matrix(int rows, int cols, RngStream& rng) {
  RealMatrix g(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) {
      g(i, j) = rng.gaussian();
    }
  }
  return g;
}

ComplexMatrix complex_gaussian_matrix(int rows, int cols, RngStream& rng) {
  ComplexMatrix g(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) {
      g(i, j) = rng.complex_gaussian();
    }
  }
  return g;
}

RealMatrix haar_orthogonal(int n, RngStream& rng) {
  return haar_qr(gaussian_matrix(n, n, rng));
}

ComplexMatrix haar_unitary(int n, RngStream& rng) {
  return haar_qr(complex_gaussian_matrix(n, n, rng));
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 bool singular_edges, double tol) {
  if (!(a < b)) {
    throw std::invalid_argument("integrate: requires a < b");
  }
  if (!singular_edges) {
    return adaptive_simpson(f, a, b, tol);
  }
  const double len = b - a;
  // The substituted integrand has a finite limit at the endpoints even when f
  // blows up like an inverse square root; evaluating exactly at theta = 0 or
  // pi/2 would hit the raw singularity, so nudge endpoint nodes inward.
  constexpr double kEdge = 1e-6;
  auto substituted = [&](double theta) {
    theta = std::clamp(theta, kEdge, M_PI_2 - kEdge);
    const double st = std::sin(theta);
    const double x = a + len * st * st;
    const double w = len * std::sin(2.0 * theta);
    return f(x) * w;
  };
  return adaptive_simpson(substituted, 0.0, M_PI_2, tol);
}

RegressionResult linear_regression(
    const std::vector<std::vector<double>>& regressors,
    const std::vector<double>& y) {
  const int p = static_cast<int>(regressors.size()) + 1;
  const int n = static_cast<int>(y.size());
  if (regressors.empty() || regressors.size() > 2) {
    throw std::invalid_argument("linear_regression: 1 or 2 regressors");
  }
  for (const auto& x : regressors) {
    if (static_cast<int>(x.size()) != n) {
      throw std::invalid_argument("linear_regression: length mismatch");
    }
  }
  if (n < p + 1) {
    throw std::invalid_argument("linear_regression: too few points");
  }

  Eigen::MatrixXd design(n, p);
  Eigen::VectorXd rhs(n);
  for (int i = 0; i < n; ++i) {
    design(i, 0) = 1.0;
    for (int j = 0; j + 1 < p; ++j) {
      design(i, j + 1) = regressors[j][i];
    }
    rhs(i) = y[i];
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  qr.setThreshold(1e-10);
  if (qr.rank() < p) {
    throw std::invalid_argument("linear_regression: collinear design");
  }
  const Eigen::VectorXd coef = qr.solve(rhs);
  const Eigen::VectorXd resid = rhs - design * coef;
  const double rss = resid.squaredNorm();
  const double mean_y = rhs.mean();
  const double tss = (rhs.array() - mean_y).square().sum();

  const double sigma2 = rss / static_cast<double>(n - p);
  const Eigen::MatrixXd xtx_inv =
      (design.transpose() * design).ldlt().solve(Eigen::MatrixXd::Identity(p, p));

  RegressionResult out;
  out.n_points = n;
  out.intercept = coef(0);
  for (int j = 1; j < p; ++j) {
    out.slopes.push_back(coef(j));
    out.slope_ses.push_back(std::sqrt(std::max(0.0, sigma2 * xtx_inv(j, j))));
  }
  out.r_squared = tss > 0.0 ? std::clamp(1.0 - rss / tss, 0.0, 1.0) : 1.0;
  return out;
}

RegressionResult linear_regression(const std::vector<double>& x,
                                   const std::vector<double>& y) {
  return linear_regression(std::vector<std::vector<double>>{x}, y);
}

namespace {

// Continued fraction for the incomplete beta function (modified Lentz).
double incbeta_cf(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-15;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 300; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) {
      return h;
    }
  }
  throw NumericError("regularized_incomplete_beta: CF did not converge", h,
                     std::numeric_limits<double>::quiet_NaN());
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (x < 0.0 || x > 1.0 || a <= 0.0 || b <= 0.0) {
    throw std::invalid_argument("regularized_incomplete_beta: bad arguments");
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * incbeta_cf(a, b, x) / a;
  }
  return 1.0 - front * incbeta_cf(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, int dof) {
  if (dof < 1) {
    throw std::invalid_argument("student_t_two_sided_p: dof must be >= 1");
  }
  if (!std::isfinite(t)) {
    return 0.0;
  }
  if (t == 0.0) {
    return 1.0;
  }
  const double nu = static_cast<double>(dof);
  const double x = nu / (nu + t * t);
  return regularized_incomplete_beta(0.5 * nu, 0.5, x);
}

}  // namespace framespectra
