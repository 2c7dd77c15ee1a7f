#pragma once

#include <functional>
#include <string>
#include <vector>

#include "framespectra/frames.hpp"
#include "framespectra/types.hpp"

namespace framespectra {

enum class LawKind { MP, MANOVA };

// Limiting spectral law: Marchenko-Pastur(beta) or MANOVA(beta, gamma).
// The continuous density lives on [r_minus, r_plus]; MANOVA carries a point
// mass at 1/gamma of weight (1 + 1/beta - 1/(beta gamma))^+ and, for beta > 1,
// a mass (1 - 1/beta) at zero.
class LimitLaw {
 public:
  static LimitLaw marchenko_pastur(double beta);
  static LimitLaw manova(double beta, double gamma);

  LawKind kind() const { return kind_; }
  double beta() const { return beta_; }
  double gamma() const { return gamma_; }
  double r_minus() const { return r_minus_; }
  double r_plus() const { return r_plus_; }
  double point_mass() const { return point_mass_; }
  double zero_mass() const { return zero_mass_; }
  double point_mass_location() const { return 1.0 / gamma_; }

  // Continuous part of the density.
  double density(double x) const;

  // Full CDF including masses, from the cached grid (about 1e-7 accurate).
  double cdf(double x) const;

  // Inverse of the continuous part of the CDF, by bisection.
  double quantile(double p) const;

  // Integral of psi against the whole law (continuous part by adaptive
  // quadrature on the edge-regularized parametrization, plus masses).
  double integrate_against(const std::function<double(double)>& psi,
                           double tol = 1e-10) const;

  // Integral of psi against the continuous part only, no masses.
  double integrate_continuous(const std::function<double(double)>& psi,
                              double tol = 1e-10) const;

 private:
  LimitLaw() = default;
  void build_grid();
  double theta_weight(double theta) const;  // density * dx/dtheta, closed form

  LawKind kind_ = LawKind::MP;
  double beta_ = 0.0;
  double gamma_ = 0.0;  // unused for MP
  double r_minus_ = 0.0;
  double r_plus_ = 0.0;
  double point_mass_ = 0.0;
  double zero_mass_ = 0.0;

  // CDF grid, uniform in theta with x = r- + (r+-r-) sin^2(theta).
  std::vector<double> grid_x_;
  std::vector<double> grid_cdf_;  // continuous mass below grid_x_[i]
};

struct SpectralSample {
  std::string frame_id;
  std::vector<int> subset;          // sorted indices into [0, n)
  std::vector<double> eigenvalues;  // ascending, length k
  double beta_n = 0.0;              // k/m
  double gamma_n = 0.0;             // m/n
};

// Eigenvalues of the Gram matrix of the rows of f indexed by subset. For
// k > m the spectrum is padded with k-m structural zeros.
SpectralSample subset_spectrum(const FrameMatrix& f, std::vector<int> subset);

// Kolmogorov-Smirnov distance between the empirical spectral CDF and the law.
// For laws with a zero mass (beta > 1), structural zeros are dropped and the
// nonzero part is compared against the conditional law.
double ks_distance(const std::vector<double>& ascending_eigenvalues,
                   const LimitLaw& law);
double ks_distance(const SpectralSample& s, const LimitLaw& law);

}  // namespace framespectra
