#include "framespectra/spectra.hpp"

#include <algorithm>
#include <cmath>

#include "framespectra/numerics.hpp"

namespace framespectra {

namespace {

constexpr int kGridIntervals = 2048;
constexpr double kStructuralZeroCut = 1e-10;

}  // namespace

LimitLaw LimitLaw::marchenko_pastur(double beta) {
  if (!(beta > 0.0)) {
    throw std::invalid_argument("marchenko_pastur: beta must be positive");
  }
  LimitLaw law;
  law.kind_ = LawKind::MP;
  law.beta_ = beta;
  law.gamma_ = 0.0;
  const double s = std::sqrt(beta);
  law.r_minus_ = (1.0 - s) * (1.0 - s);
  law.r_plus_ = (1.0 + s) * (1.0 + s);
  law.point_mass_ = 0.0;
  law.zero_mass_ = std::max(0.0, 1.0 - 1.0 / beta);
  law.build_grid();
  return law;
}

LimitLaw LimitLaw::manova(double beta, double gamma) {
  if (!(beta > 0.0) || !(gamma > 0.0) || gamma > 1.0) {
    throw std::invalid_argument("manova law: need beta > 0, 0 < gamma <= 1");
  }
  if (beta * gamma > 1.0) {
    throw std::invalid_argument(
        "manova law: beta*gamma > 1 (more than n vectors requested)");
  }
  LimitLaw law;
  law.kind_ = LawKind::MANOVA;
  law.beta_ = beta;
  law.gamma_ = gamma;
  const double u = std::sqrt(beta * (1.0 - gamma));
  const double v = std::sqrt(1.0 - beta * gamma);
  law.r_minus_ = (u - v) * (u - v);
  law.r_plus_ = (u + v) * (u + v);
  law.point_mass_ = std::max(0.0, 1.0 + 1.0 / beta - 1.0 / (beta * gamma));
  law.zero_mass_ = std::max(0.0, 1.0 - 1.0 / beta);
  law.build_grid();
  return law;
}

double LimitLaw::density(double x) const {
  if (x <= r_minus_ || x >= r_plus_) return 0.0;
  const double num = std::sqrt((x - r_minus_) * (r_plus_ - x));
  if (kind_ == LawKind::MP) {
    return num / (2.0 * beta_ * M_PI * x);
  }
  return num / (2.0 * beta_ * M_PI * x * (1.0 - gamma_ * x));
}

// Substituting x = r- + (r+-r-) sin^2(theta) turns both edge factors into
// exact sines: sqrt((x-r-)(r+-x)) = (r+-r-) sin(2 theta)/2 and
// dx = (r+-r-) sin(2 theta) dtheta, so the weight is smooth on [0, pi/2].
double LimitLaw::theta_weight(double theta) const {
  const double len = r_plus_ - r_minus_;
  const double st = std::sin(theta);
  const double x = r_minus_ + len * st * st;
  const double s2 = std::sin(2.0 * theta);
  double denom = 2.0 * beta_ * M_PI * x;
  if (kind_ == LawKind::MANOVA) denom *= (1.0 - gamma_ * x);
  return len * len * s2 * s2 / (2.0 * denom);
}

void LimitLaw::build_grid() {
  const int n = kGridIntervals;
  grid_x_.resize(n + 1);
  grid_cdf_.resize(n + 1);
  std::vector<double> w(n + 1);
  const double h = M_PI_2 / n;
  for (int i = 0; i <= n; ++i) {
    const double theta = h * i;
    const double st = std::sin(theta);
    grid_x_[i] = r_minus_ + (r_plus_ - r_minus_) * st * st;
    w[i] = theta_weight(theta);
  }
  grid_cdf_[0] = 0.0;
  for (int i = 1; i <= n; ++i) {
    grid_cdf_[i] = grid_cdf_[i - 1] + 0.5 * h * (w[i - 1] + w[i]);
  }
  // Pin the grid total to the exact continuous mass so that
  // cdf(r+) = 1 - point_mass holds to full precision.
  const double target = 1.0 - point_mass_ - zero_mass_;
  const double total = grid_cdf_[n];
  if (total > 0.0) {
    const double scale = target / total;
    for (double& c : grid_cdf_) c *= scale;
  }
}

double LimitLaw::cdf(double x) const {
  double c = x < 0.0 ? 0.0 : zero_mass_;
  if (x > r_minus_) {
    if (x >= r_plus_) {
      c += grid_cdf_.back();
    } else {
      const auto it = std::upper_bound(grid_x_.begin(), grid_x_.end(), x);
      const auto i = static_cast<std::size_t>(it - grid_x_.begin()) - 1;
      const double x0 = grid_x_[i];
      const double x1 = grid_x_[i + 1];
      const double t = x1 > x0 ? (x - x0) / (x1 - x0) : 0.0;
      c += grid_cdf_[i] + t * (grid_cdf_[i + 1] - grid_cdf_[i]);
    }
  }
  if (kind_ == LawKind::MANOVA && gamma_ > 0.0 && x >= 1.0 / gamma_) {
    c += point_mass_;
  }
  return c;
}

double LimitLaw::quantile(double p) const {
  const double lo_mass = zero_mass_;
  const double hi_mass = zero_mass_ + grid_cdf_.back();
  if (p <= lo_mass) return r_minus_;
  if (p >= hi_mass) return r_plus_;
  double lo = r_minus_;
  double hi = r_plus_;
  for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double LimitLaw::integrate_continuous(
    const std::function<double(double)>& psi, double tol) const {
  const double len = r_plus_ - r_minus_;
  auto integrand = [&](double theta) {
    const double st = std::sin(theta);
    const double x = r_minus_ + len * st * st;
    return psi(x) * theta_weight(theta);
  };
  return integrate(integrand, 0.0, M_PI_2, /*singular_edges=*/false, tol);
}

double LimitLaw::integrate_against(const std::function<double(double)>& psi,
                                   double tol) const {
  double total = integrate_continuous(psi, tol);
  if (point_mass_ > 0.0) total += point_mass_ * psi(1.0 / gamma_);
  if (zero_mass_ > 0.0) total += zero_mass_ * psi(0.0);
  return total;
}

SpectralSample subset_spectrum(const FrameMatrix& f, std::vector<int> subset) {
  std::sort(subset.begin(), subset.end());
  if (std::adjacent_find(subset.begin(), subset.end()) != subset.end()) {
    throw std::invalid_argument("subset_spectrum: duplicate indices");
  }
  if (!subset.empty() && (subset.front() < 0 || subset.back() >= f.n)) {
    throw std::invalid_argument("subset_spectrum: index out of range");
  }
  const int k = static_cast<int>(subset.size());

  SpectralSample s;
  s.frame_id = to_string(f.family);
  s.beta_n = static_cast<double>(k) / f.m;
  s.gamma_n = f.gamma_n;

  auto eigs = std::visit(
      [&](const auto& x) {
        using Mat = std::decay_t<decltype(x)>;
        Mat rows(k, f.m);
        for (int i = 0; i < k; ++i) rows.row(i) = x.row(subset[i]);
        const int d = std::min(k, f.m);
        Mat gram(d, d);
        gram.setZero();
        if (k <= f.m) {
          gram.template selfadjointView<Eigen::Lower>().rankUpdate(rows);
        } else {
          gram.template selfadjointView<Eigen::Lower>().rankUpdate(
              rows.adjoint());
        }
        gram = gram.template selfadjointView<Eigen::Lower>();
        return hermitian_eigenvalues(Mat(gram));
      },
      f.x);
  for (double& v : eigs) v = std::max(v, 0.0);
  if (k > f.m) {
    eigs.insert(eigs.begin(), static_cast<std::size_t>(k - f.m), 0.0);
  }
  s.subset = std::move(subset);
  s.eigenvalues = std::move(eigs);
  return s;
}

double ks_distance(const std::vector<double>& ascending_eigenvalues,
                   const LimitLaw& law) {
  std::vector<double> eigs = ascending_eigenvalues;
  bool conditional = false;
  if (law.zero_mass() > 0.0) {
    // Compare the nonzero part against the law conditioned on being nonzero.
    const double cut =
        eigs.empty() ? 0.0 : kStructuralZeroCut * std::abs(eigs.back());
    eigs.erase(std::remove_if(eigs.begin(), eigs.end(),
                              [&](double v) { return v <= cut; }),
               eigs.end());
    conditional = true;
  }
  const auto n = eigs.size();
  if (n == 0) return 1.0;
  const double zm = conditional ? law.zero_mass() : 0.0;
  double sup = 0.0;
  // Tied eigenvalues (e.g. the structural cluster at the law's interior atom)
  // are handled as one jump of the empirical CDF: compare the law's left and
  // right limits at the value against the group's low and high ranks.
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && eigs[j + 1] == eigs[i]) ++j;
    const double x = eigs[i];
    double fx_right = law.cdf(x);
    double fx_left = fx_right;
    if (law.point_mass() > 0.0 &&
        std::abs(x - law.point_mass_location()) <=
            1e-12 * law.point_mass_location()) {
      fx_left -= law.point_mass();
    }
    if (conditional) {
      fx_right = (fx_right - zm) / (1.0 - zm);
      fx_left = (fx_left - zm) / (1.0 - zm);
    }
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(j + 1) / n;
    sup = std::max({sup, std::abs(fx_right - hi), std::abs(fx_left - lo)});
    i = j + 1;
  }
  return sup;
}

double ks_distance(const SpectralSample& s, const LimitLaw& law) {
  return ks_distance(s.eigenvalues, law);
}

}  // namespace framespectra
