#include "framespectra/frames.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <sstream>

namespace framespectra {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};

std::complex<double> unit_phase(double turns) {
  // exp(2*pi*i*turns); turns reduced first to keep large arguments accurate.
  const double frac = turns - std::floor(turns);
  return std::polar(1.0, 2.0 * M_PI * frac);
}

long pow_mod(long base, long exp, long mod) {
  long result = 1 % mod;
  base %= mod;
  while (exp > 0) {
    if (exp & 1) result = result * base % mod;
    base = base * base % mod;
    exp >>= 1;
  }
  return result;
}

// Legendre symbol for prime p.
int legendre(long a, long p) {
  a %= p;
  if (a < 0) a += p;
  if (a == 0) return 0;
  return pow_mod(a, (p - 1) / 2, p) == 1 ? 1 : -1;
}

std::vector<long> quadratic_residues(long p) {
  std::vector<long> qr;
  for (long t = 1; t <= (p - 1) / 2; ++t) {
    qr.push_back(t * t % p);
  }
  std::sort(qr.begin(), qr.end());
  return qr;
}

bool is_power_of_two(long n) { return n > 0 && (n & (n - 1)) == 0; }

void require(bool ok, const std::string& msg) {
  if (!ok) throw InadmissibleSize(msg);
}

FrameMatrix make_frame(FrameFamily family, std::variant<RealMatrix, ComplexMatrix> x) {
  FrameMatrix f;
  f.family = family;
  const auto rows = std::visit([](const auto& mat) { return mat.rows(); }, x);
  const auto cols = std::visit([](const auto& mat) { return mat.cols(); }, x);
  f.n = static_cast<int>(rows);
  f.m = static_cast<int>(cols);
  f.gamma_n = static_cast<double>(f.m) / static_cast<double>(f.n);
  f.x = std::move(x);
  return f;
}

// Partial DFT frame: rows t = 0..n-1, columns are DFT frequencies freq[j],
// entries of modulus 1/sqrt(m).
ComplexMatrix partial_dft(int n, const std::vector<long>& freqs) {
  const int m = static_cast<int>(freqs.size());
  ComplexMatrix x(n, m);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  for (int j = 0; j < m; ++j) {
    for (int t = 0; t < n; ++t) {
      x(t, j) = scale * unit_phase(static_cast<double>(t) * freqs[j] / n);
    }
  }
  return x;
}

// Factor a rank-m Hermitian/symmetric projection into an n-by-m frame matrix
// with unit-norm rows. The columns are an orthonormal basis of range(P),
// obtained by rank-revealing QR; this is exact for projections with a clean
// 0/1 spectrum and avoids iterative eigensolvers, which can stall on
// matrices with only two distinct eigenvalues.
template <typename Mat>
Mat projection_factor(const Mat& projection, int m) {
  const int n = static_cast<int>(projection.rows());
  Eigen::ColPivHouseholderQR<Mat> qr(projection);
  const Mat q = qr.householderQ();
  Mat x = q.leftCols(m);
  const double defect = (x * x.adjoint() - projection).cwiseAbs().maxCoeff();
  if (!(defect < 1e-10)) {
    throw NumericError("projection_factor: factor does not reproduce the "
                       "projection (rank mismatch?)",
                       std::numeric_limits<double>::quiet_NaN(), defect);
  }
  for (int i = 0; i < n; ++i) {
    x.row(i) /= x.row(i).norm();
  }
  return x;
}

// Symmetric Paley conference matrix of order p+1, p prime = 1 (mod 4).
RealMatrix paley_conference_symmetric(long p) {
  const int n = static_cast<int>(p + 1);
  RealMatrix c = RealMatrix::Zero(n, n);
  for (int j = 1; j < n; ++j) {
    c(0, j) = 1.0;
    c(j, 0) = 1.0;
  }
  for (int i = 1; i < n; ++i) {
    for (int j = 1; j < n; ++j) {
      if (i != j) c(i, j) = legendre(j - i, p);
    }
  }
  return c;
}

// Antisymmetric Paley conference matrix of order p+1, p prime = 3 (mod 4).
RealMatrix paley_conference_skew(long p) {
  const int n = static_cast<int>(p + 1);
  RealMatrix c = RealMatrix::Zero(n, n);
  for (int j = 1; j < n; ++j) {
    c(0, j) = 1.0;
    c(j, 0) = -1.0;
  }
  for (int i = 1; i < n; ++i) {
    for (int j = 1; j < n; ++j) {
      if (i != j) c(i, j) = legendre(j - i, p);
    }
  }
  return c;
}

RealMatrix sylvester_hadamard(int m) {
  RealMatrix h(1, 1);
  h(0, 0) = 1.0;
  while (h.rows() < m) {
    const int s = static_cast<int>(h.rows());
    RealMatrix next(2 * s, 2 * s);
    next.topLeftCorner(s, s) = h;
    next.topRightCorner(s, s) = h;
    next.bottomLeftCorner(s, s) = h;
    next.bottomRightCorner(s, s) = -h;
    h = std::move(next);
  }
  return h;
}

RealMatrix dct_matrix(int n) {
  RealMatrix d(n, n);
  for (int j = 0; j < n; ++j) {
    const double scale = j == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
    for (int t = 0; t < n; ++t) {
      d(t, j) = scale * std::cos(M_PI * (2.0 * t + 1.0) * j / (2.0 * n));
    }
  }
  return d;
}

std::vector<long> sample_column_subset(int n, int m, RngStream& rng) {
  std::vector<long> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  for (int i = 0; i < m; ++i) {
    const auto j = i + static_cast<int>(rng.uniform_below(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(m);
  std::sort(idx.begin(), idx.end());
  return idx;
}

template <typename Mat>
Mat select_scaled_columns(const Mat& full, const std::vector<long>& cols,
                          double scale) {
  Mat x(full.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    x.col(static_cast<Eigen::Index>(j)) = scale * full.col(cols[j]);
  }
  return x;
}

}  // namespace

bool is_prime(long n) {
  if (n < 2) return false;
  for (long d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

FamilyTraits family_traits(FrameFamily family) {
  switch (family) {
    case FrameFamily::DSS:
      return {Field::Complex, true, true, 0.5};
    case FrameFamily::GF:
      return {Field::Complex, true, true, 0.5};
    case FrameFamily::RealPF:
      return {Field::Real, true, true, 0.5};
    case FrameFamily::ComplexPF:
      return {Field::Complex, true, true, 0.5};
    case FrameFamily::Alltop:
      return {Field::Complex, true, false, std::nullopt};
    case FrameFamily::SS:
      return {Field::Complex, true, false, 0.5};
    case FrameFamily::SH:
      return {Field::Real, true, false, 0.5};
    case FrameFamily::Haar:
      return {Field::Complex, false, false, std::nullopt};
    case FrameFamily::RealHaar:
      return {Field::Real, false, false, std::nullopt};
    case FrameFamily::RandDFT:
      return {Field::Complex, false, false, std::nullopt};
    case FrameFamily::RandDCT:
      return {Field::Real, false, false, std::nullopt};
    case FrameFamily::GaussianIID:
      return {Field::Real, false, false, std::nullopt};
    case FrameFamily::LowPass:
      return {Field::Complex, true, false, std::nullopt};
  }
  throw std::logic_error("family_traits: unknown family");
}

std::string to_string(FrameFamily family) {
  switch (family) {
    case FrameFamily::DSS: return "dss";
    case FrameFamily::GF: return "gf";
    case FrameFamily::RealPF: return "realpf";
    case FrameFamily::ComplexPF: return "complexpf";
    case FrameFamily::Alltop: return "alltop";
    case FrameFamily::SS: return "ss";
    case FrameFamily::SH: return "sh";
    case FrameFamily::Haar: return "haar";
    case FrameFamily::RealHaar: return "realhaar";
    case FrameFamily::RandDFT: return "randdft";
    case FrameFamily::RandDCT: return "randdct";
    case FrameFamily::GaussianIID: return "gaussian";
    case FrameFamily::LowPass: return "lowpass";
  }
  throw std::logic_error("to_string: unknown family");
}

const std::vector<FrameFamily>& all_families() {
  static const std::vector<FrameFamily> families = {
      FrameFamily::DSS,      FrameFamily::GF,       FrameFamily::RealPF,
      FrameFamily::ComplexPF, FrameFamily::Alltop,  FrameFamily::SS,
      FrameFamily::SH,       FrameFamily::Haar,     FrameFamily::RealHaar,
      FrameFamily::RandDFT,  FrameFamily::RandDCT,  FrameFamily::GaussianIID,
      FrameFamily::LowPass};
  return families;
}

FrameFamily family_from_string(const std::string& label) {
  std::string s;
  for (char ch : label) s.push_back(static_cast<char>(std::tolower(ch)));
  for (FrameFamily f : all_families()) {
    if (to_string(f) == s) return f;
  }
  throw ConfigError("unknown frame family: " + label);
}

std::vector<std::pair<int, int>> admissible_sizes(FrameFamily family, int n_min,
                                                  int n_max,
                                                  double gamma_target) {
  std::vector<std::pair<int, int>> out;
  if (n_min > n_max) {
    throw std::invalid_argument("admissible_sizes: n_min > n_max");
  }
  auto free_m = [&](int n) {
    return std::clamp(static_cast<int>(std::lround(gamma_target * n)), 1, n);
  };
  switch (family) {
    case FrameFamily::DSS:
      for (int n = std::max(3, n_min); n <= n_max; ++n) {
        if (n % 4 == 3 && is_prime(n)) out.emplace_back(n, (n - 1) / 2);
      }
      break;
    case FrameFamily::ComplexPF:
      for (int n = std::max(3, n_min); n <= n_max; ++n) {
        if (n % 4 == 3 && is_prime(n)) out.emplace_back(n, (n + 1) / 2);
      }
      break;
    case FrameFamily::GF:
      for (int n = std::max(4, n_min); n <= n_max; ++n) {
        if (n % 2 == 0 && (n - 1) % 4 == 3 && is_prime(n - 1)) {
          out.emplace_back(n, n / 2);
        }
      }
      break;
    case FrameFamily::RealPF:
      for (int n = std::max(4, n_min); n <= n_max; ++n) {
        if (n % 2 == 0 && (n - 1) % 4 == 1 && is_prime(n - 1)) {
          out.emplace_back(n, n / 2);
        }
      }
      break;
    case FrameFamily::Alltop: {
      const int chirps = std::max<int>(2, std::lround(1.0 / gamma_target));
      for (int m = 2; static_cast<long>(chirps) * m <= n_max; ++m) {
        const int n = chirps * m;
        if (n >= n_min && is_prime(m)) out.emplace_back(n, m);
      }
      break;
    }
    case FrameFamily::SS:
      for (int n = std::max(2, n_min); n <= n_max; ++n) {
        if (n % 2 == 0) out.emplace_back(n, n / 2);
      }
      break;
    case FrameFamily::SH:
      for (int m = 1; 2L * m <= n_max; m *= 2) {
        const int n = 2 * m;
        if (n >= n_min) out.emplace_back(n, m);
      }
      break;
    default:
      for (int n = std::max(1, n_min); n <= n_max; ++n) {
        out.emplace_back(n, free_m(n));
      }
      break;
  }
  return out;
}

FrameMatrix construct(FrameFamily family, int n, int m, RngStream* rng) {
  const FamilyTraits traits = family_traits(family);
  if (traits.is_deterministic && rng != nullptr) {
    throw std::invalid_argument("construct: deterministic family takes no rng");
  }
  if (!traits.is_deterministic && rng == nullptr) {
    throw std::invalid_argument("construct: random family requires rng");
  }
  require(n >= 1 && m >= 1 && m <= n, "construct: need 1 <= m <= n");

  switch (family) {
    case FrameFamily::DSS: {
      require(n % 4 == 3 && is_prime(n), "dss: n must be prime = 3 (mod 4)");
      require(m == (n - 1) / 2, "dss: m must equal (n-1)/2");
      return make_frame(family, partial_dft(n, quadratic_residues(n)));
    }
    case FrameFamily::ComplexPF: {
      require(n % 4 == 3 && is_prime(n),
              "complexpf: n must be prime = 3 (mod 4)");
      require(m == (n + 1) / 2, "complexpf: m must equal (n+1)/2");
      std::vector<long> freqs = quadratic_residues(n);
      freqs.insert(freqs.begin(), 0);
      return make_frame(family, partial_dft(n, freqs));
    }
    case FrameFamily::GF: {
      require(n % 2 == 0 && (n - 1) % 4 == 3 && is_prime(n - 1),
              "gf: n must be p+1 with p prime = 3 (mod 4)");
      require(m == n / 2, "gf: m must equal n/2");
      const double root = std::sqrt(static_cast<double>(n - 1));
      const ComplexMatrix proj =
          0.5 * (ComplexMatrix::Identity(n, n) +
                 (kI / root) *
                     paley_conference_skew(n - 1).cast<std::complex<double>>());
      return make_frame(family, projection_factor(proj, m));
    }
    case FrameFamily::RealPF: {
      require(n % 2 == 0 && (n - 1) % 4 == 1 && is_prime(n - 1),
              "realpf: n must be p+1 with p prime = 1 (mod 4)");
      require(m == n / 2, "realpf: m must equal n/2");
      const double root = std::sqrt(static_cast<double>(n - 1));
      const RealMatrix proj =
          0.5 * (RealMatrix::Identity(n, n) +
                 paley_conference_symmetric(n - 1) / root);
      return make_frame(family, projection_factor(proj, m));
    }
    case FrameFamily::Alltop: {
      require(is_prime(m), "alltop: m must be prime");
      require(n % m == 0 && n / m >= 2, "alltop: n must be L*m with L >= 2");
      const int chirps = n / m;
      ComplexMatrix x(n, m);
      const double scale = 1.0 / std::sqrt(static_cast<double>(m));
      for (int a = 1; a <= chirps; ++a) {
        for (int t0 = 0; t0 < m; ++t0) {
          const int row = (a - 1) * m + t0;
          for (int t = 0; t < m; ++t) {
            const long phase = (static_cast<long>(a) * t % m) * t +
                               static_cast<long>(t0) * t;
            x(row, t) = scale * unit_phase(static_cast<double>(phase % m) / m);
          }
        }
      }
      return make_frame(family, std::move(x));
    }
    case FrameFamily::SS: {
      require(n == 2 * m, "ss: n must equal 2m");
      ComplexMatrix x = ComplexMatrix::Zero(n, m);
      const double scale = 1.0 / std::sqrt(static_cast<double>(m));
      for (int i = 0; i < m; ++i) x(i, i) = 1.0;
      for (int j = 0; j < m; ++j) {
        for (int t = 0; t < m; ++t) {
          x(m + j, t) = scale * unit_phase(static_cast<double>(j) * t / m);
        }
      }
      return make_frame(family, std::move(x));
    }
    case FrameFamily::SH: {
      require(is_power_of_two(m), "sh: m must be a power of two");
      require(n == 2 * m, "sh: n must equal 2m");
      RealMatrix x = RealMatrix::Zero(n, m);
      const RealMatrix h = sylvester_hadamard(m);
      const double scale = 1.0 / std::sqrt(static_cast<double>(m));
      for (int i = 0; i < m; ++i) x(i, i) = 1.0;
      x.bottomRows(m) = scale * h;
      return make_frame(family, std::move(x));
    }
    case FrameFamily::Haar: {
      const double scale = std::sqrt(static_cast<double>(n) / m);
      const ComplexMatrix q = haar_unitary(n, *rng);
      return make_frame(family, ComplexMatrix(scale * q.leftCols(m)));
    }
    case FrameFamily::RealHaar: {
      const double scale = std::sqrt(static_cast<double>(n) / m);
      const RealMatrix q = haar_orthogonal(n, *rng);
      return make_frame(family, RealMatrix(scale * q.leftCols(m)));
    }
    case FrameFamily::RandDFT: {
      const auto cols = sample_column_subset(n, m, *rng);
      return make_frame(family, partial_dft(n, cols));
    }
    case FrameFamily::RandDCT: {
      const auto cols = sample_column_subset(n, m, *rng);
      const double scale = std::sqrt(static_cast<double>(n) / m);
      return make_frame(family,
                        select_scaled_columns(dct_matrix(n), cols, scale));
    }
    case FrameFamily::GaussianIID: {
      const double scale = 1.0 / std::sqrt(static_cast<double>(m));
      return make_frame(family, RealMatrix(scale * gaussian_matrix(n, m, *rng)));
    }
    case FrameFamily::LowPass: {
      std::vector<long> freqs(m);
      for (int j = 0; j < m; ++j) freqs[j] = j;
      return make_frame(family, partial_dft(n, freqs));
    }
  }
  throw std::logic_error("construct: unknown family");
}

namespace {

template <typename Mat>
FrameDiagnostics diagnostics_impl(const Mat& x, int n, int m) {
  FrameDiagnostics d{};
  double max_norm_defect = 0.0;
  for (int i = 0; i < n; ++i) {
    max_norm_defect = std::max(max_norm_defect, std::abs(x.row(i).norm() - 1.0));
  }
  d.row_norm_defect = max_norm_defect;

  const double tight_target = static_cast<double>(n) / m;
  Mat xtx = x.adjoint() * x;
  xtx.diagonal().array() -= tight_target;
  d.tightness_defect = xtx.cwiseAbs().maxCoeff();

  const Mat gram = x * x.adjoint();
  double max_abs = 0.0;
  double min_abs = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double v = std::abs(gram(i, j));
      max_abs = std::max(max_abs, v);
      min_abs = std::min(min_abs, v);
    }
  }
  d.coherence = max_abs;
  d.equiangularity_defect = n > 1 ? max_abs - min_abs : 0.0;
  d.welch_bound =
      n > 1 ? std::sqrt(static_cast<double>(n - m) / (static_cast<double>(m) * (n - 1)))
            : 0.0;
  return d;
}

}  // namespace

FrameDiagnostics diagnostics(const FrameMatrix& f) {
  return std::visit(
      [&](const auto& mat) { return diagnostics_impl(mat, f.n, f.m); }, f.x);
}

}  // namespace framespectra
