#include "framespectra/ensembles.hpp"

#include <algorithm>
#include <cmath>

namespace framespectra {

namespace {

void validate(const ManovaParams& p) {
  if (p.k < 1 || p.m < 1 || p.m > p.n || p.k > p.n) {
    throw std::invalid_argument("sample_manova: need 1 <= k,m <= n");
  }
}

// Eigenvalues of (n/m) L^{-1} BB' L^{-H} where LL' = AA' + BB'. Congruence
// keeps the pencil symmetric and avoids explicit matrix square roots.
template <typename Mat>
std::vector<double> draw(const ManovaParams& p, RngStream& rng, Mat (*gauss)(int, int, RngStream&)) {
  const int k = p.k;
  const int extra = p.n - p.m;
  for (int attempt = 0; attempt < 2; ++attempt) {
    const Mat b = gauss(k, p.m, rng);
    Mat s(k, k);
    s.setZero();
    s.template selfadjointView<Eigen::Lower>().rankUpdate(b);
    if (extra > 0) {
      const Mat a = gauss(k, extra, rng);
      s.template selfadjointView<Eigen::Lower>().rankUpdate(a);
    }
    Eigen::LLT<Mat> llt(s);
    if (llt.info() != Eigen::Success) {
      if (attempt == 0) continue;  // resample once
      throw NumericError("sample_manova: singular AA'+BB'",
                         std::numeric_limits<double>::quiet_NaN(), 0.0);
    }
    const Mat c = llt.matrixL().solve(b);
    Mat w(k, k);
    w.setZero();
    w.template selfadjointView<Eigen::Lower>().rankUpdate(c);
    w = w.template selfadjointView<Eigen::Lower>();
    w *= static_cast<double>(p.n) / p.m;
    std::vector<double> ev = hermitian_eigenvalues(Mat(w));
    for (double& v : ev) v = std::max(v, 0.0);
    return ev;
  }
  throw std::logic_error("sample_manova: unreachable");
}

}  // namespace

std::vector<double> sample_manova(const ManovaParams& p, RngStream& rng) {
  validate(p);
  if (p.field == Field::Real) {
    return draw<RealMatrix>(p, rng, &gaussian_matrix);
  }
  return draw<ComplexMatrix>(p, rng, &complex_gaussian_matrix);
}

std::vector<double> sample_manova_reversed(const ManovaParams& swapped,
                                           double beta_scale, RngStream& rng) {
  std::vector<double> ev = sample_manova(swapped, rng);
  for (double& v : ev) v *= beta_scale;
  return ev;
}

}  // namespace framespectra
