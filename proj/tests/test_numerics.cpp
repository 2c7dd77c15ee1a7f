#include <doctest.h>

#include <cmath>
#include <numeric>

#include "framespectra/numerics.hpp"

using namespace framespectra;

TEST_CASE("hermitian eigenvalues reproduce trace and determinant") {
  RngStream rng(42, 0);
  for (int n : {5, 40, 200}) {
    RealMatrix a = gaussian_matrix(n, n, rng);
    RealMatrix s = 0.5 * (a + a.transpose());
    const auto eigs = hermitian_eigenvalues(s);
    REQUIRE(static_cast<int>(eigs.size()) == n);
    CHECK(std::is_sorted(eigs.begin(), eigs.end()));
    const double tr = std::accumulate(eigs.begin(), eigs.end(), 0.0);
    CHECK(tr == doctest::Approx(s.trace()).epsilon(1e-10));
    double logdet = 0.0;
    bool ok = true;
    for (double v : eigs) {
      if (v <= 0.0) ok = false;
      // determinant check only via |det|: sum of log|lambda|
      logdet += std::log(std::abs(v));
    }
    (void)ok;
    CHECK(logdet ==
          doctest::Approx(std::log(std::abs(s.determinant()))).epsilon(1e-8));
  }
}

TEST_CASE("complex hermitian eigenvalues: known 2x2") {
  ComplexMatrix h(2, 2);
  h << std::complex<double>(1, 0), std::complex<double>(0, -2),
      std::complex<double>(0, 2), std::complex<double>(1, 0);
  const auto eigs = hermitian_eigenvalues(h);
  CHECK(eigs[0] == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(eigs[1] == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("hermitian eigensolver rejects non-hermitian input") {
  RealMatrix a(2, 2);
  a << 0, 1, 2, 0;
  CHECK_THROWS(hermitian_eigenvalues(a));
}

TEST_CASE("haar orthogonal is orthogonal and phase-fixed") {
  RngStream rng(1, 5);
  const RealMatrix q = haar_orthogonal(8, rng);
  CHECK((q.transpose() * q - RealMatrix::Identity(8, 8)).cwiseAbs().maxCoeff() <
        1e-12);
  const ComplexMatrix u = haar_unitary(8, rng);
  CHECK((u.adjoint() * u - ComplexMatrix::Identity(8, 8)).cwiseAbs().maxCoeff() <
        1e-12);
}

TEST_CASE("haar unitary first entry matches known moment") {
  // |U_00|^2 has mean 1/n for Haar measure; Monte-Carlo check at n=10.
  const int n = 10;
  const int reps = 10000;
  double sum = 0.0;
  RngStream rng(7, 0);
  for (int r = 0; r < reps; ++r) {
    const ComplexMatrix u = haar_unitary(n, rng);
    sum += std::norm(u(0, 0));
  }
  const double mean = sum / reps;
  // Var(|U_00|^2) ~ 1/n^2, so 3 standard errors is about 3/(n sqrt(reps)).
  CHECK(std::abs(mean - 1.0 / n) < 3.0 / (n * std::sqrt(double(reps))));
}

TEST_CASE("quadrature: polynomial exactness and known integrals") {
  auto poly = [](double x) {
    return 1 + x * (2 + x * (3 + x * (4 + x * (5 + x * (6 + 7 * x)))));
  };
  // antiderivative at 1 minus at 0: 1 + 1 + 1 + 1 + 1 + 1 + 1 = 7
  CHECK(integrate(poly, 0.0, 1.0, false, 1e-12) ==
        doctest::Approx(7.0).epsilon(1e-12));
  CHECK(integrate([](double x) { return std::sin(x); }, 0.0, M_PI, false,
                  1e-12) == doctest::Approx(2.0).epsilon(1e-11));
}

TEST_CASE("quadrature handles inverse-sqrt edge singularities") {
  // int_0^1 dx / sqrt(x(1-x)) = pi
  auto f = [](double x) { return 1.0 / std::sqrt(x * (1.0 - x)); };
  CHECK(integrate(f, 0.0, 1.0, true, 1e-10) ==
        doctest::Approx(M_PI).epsilon(1e-9));
  // int_0^4 sqrt(x(4-x)) dx = 2 pi (semicircle of radius 2)
  auto g = [](double x) { return std::sqrt(x * (4.0 - x)); };
  CHECK(integrate(g, 0.0, 4.0, true, 1e-10) ==
        doctest::Approx(2.0 * M_PI).epsilon(1e-9));
}

TEST_CASE("regression recovers exact affine data") {
  std::vector<double> x, y;
  for (int i = 0; i < 10; ++i) {
    x.push_back(i);
    y.push_back(3.5 - 2.25 * i);
  }
  const auto fit = linear_regression(x, y);
  CHECK(fit.slope() == doctest::Approx(-2.25).epsilon(1e-12));
  CHECK(fit.intercept == doctest::Approx(3.5).epsilon(1e-12));
  CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit.slope_se() == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("regression recovers a power law from log-log data") {
  std::vector<double> x, y;
  for (int n : {100, 200, 400, 800, 1600}) {
    x.push_back(std::log(double(n)));
    y.push_back(std::log(2.7 * std::pow(double(n), 0.9)));
  }
  const auto fit = linear_regression(x, y);
  CHECK(fit.slope() == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(std::exp(fit.intercept) == doctest::Approx(2.7).epsilon(1e-10));
}

TEST_CASE("regression standard errors are calibrated") {
  // Across many seeds, |b_hat - b| < 2 SE should hold about 95% of the time.
  int covered = 0;
  const int seeds = 100;
  for (int s = 0; s < seeds; ++s) {
    RngStream rng(1000 + s, 0);
    std::vector<double> x, y;
    for (int i = 0; i < 30; ++i) {
      x.push_back(0.1 * i);
      y.push_back(1.0 + 2.0 * (0.1 * i) + 0.3 * rng.gaussian());
    }
    const auto fit = linear_regression(x, y);
    if (std::abs(fit.slope() - 2.0) < 2.0 * fit.slope_se()) ++covered;
  }
  CHECK(covered >= 90);
}

TEST_CASE("two-regressor fit recovers both slopes") {
  std::vector<double> x1, x2, y;
  for (int i = 0; i < 12; ++i) {
    x1.push_back(std::log(100.0 + 37.0 * i));
    x2.push_back(std::log(x1.back()));
    y.push_back(0.4 + 1.8 * x1.back() - 1.0 * x2.back());
  }
  const auto fit = linear_regression({x1, x2}, y);
  CHECK(fit.slopes[0] == doctest::Approx(1.8).epsilon(1e-9));
  CHECK(fit.slopes[1] == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("regression rejects collinear regressors") {
  std::vector<double> x1 = {1, 2, 3, 4, 5};
  std::vector<double> x2 = {2, 4, 6, 8, 10};
  std::vector<double> y = {1, 2, 3, 4, 5};
  CHECK_THROWS(linear_regression({x1, x2}, y));
}

TEST_CASE("incomplete beta against closed forms") {
  // I_x(1, b) = 1 - (1-x)^b
  CHECK(regularized_incomplete_beta(1.0, 3.0, 0.4) ==
        doctest::Approx(1.0 - std::pow(0.6, 3.0)).epsilon(1e-12));
  // symmetry I_x(a,b) = 1 - I_{1-x}(b,a)
  CHECK(regularized_incomplete_beta(2.5, 4.0, 0.3) ==
        doctest::Approx(1.0 - regularized_incomplete_beta(4.0, 2.5, 0.7))
            .epsilon(1e-12));
}

TEST_CASE("student t p-values against numeric CDF oracle") {
  // Oracle: p = 2 * int_t^inf f(u) du computed by direct quadrature of the
  // t density, independent of the incomplete-beta path.
  auto density = [](double u, int dof) {
    const double v = dof;
    return std::exp(std::lgamma((v + 1) / 2) - std::lgamma(v / 2)) /
           std::sqrt(v * M_PI) * std::pow(1.0 + u * u / v, -(v + 1) / 2);
  };
  for (int dof : {5, 20, 50}) {
    for (double t : {0.5, 1.0037, 2.0}) {
      const double tail = integrate(
          [&](double u) { return density(u, dof); }, t, 60.0, false, 1e-11);
      CHECK(student_t_two_sided_p(t, dof) ==
            doctest::Approx(2.0 * tail).epsilon(2e-3));
    }
  }
  CHECK(student_t_two_sided_p(0.0, 10) == doctest::Approx(1.0));
  CHECK(student_t_two_sided_p(1e9, 10) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("rng streams are deterministic and distinct") {
  RngStream a(5, 1), b(5, 1), c(5, 2);
  CHECK(a.next_u64() == b.next_u64());
  CHECK(a.next_u64() == b.next_u64());
  RngStream a2(5, 1);
  CHECK(a2.next_u64() != c.next_u64());
}

TEST_CASE("gaussian stream has reasonable moments") {
  RngStream rng(11, 3);
  const int reps = 200000;
  double s1 = 0, s2 = 0;
  for (int i = 0; i < reps; ++i) {
    const double g = rng.gaussian();
    s1 += g;
    s2 += g * g;
  }
  CHECK(std::abs(s1 / reps) < 0.01);
  CHECK(s2 / reps == doctest::Approx(1.0).epsilon(0.01));
  std::complex<double> z = rng.complex_gaussian();
  (void)z;
  double sc = 0;
  for (int i = 0; i < reps; ++i) sc += std::norm(rng.complex_gaussian());
  CHECK(sc / reps == doctest::Approx(1.0).epsilon(0.01));
}
