#include <doctest.h>

#include <cmath>

#include "framespectra/frames.hpp"

using namespace framespectra;

namespace {

FrameMatrix build(FrameFamily fam, int n, int m, std::uint64_t seed = 0) {
  if (family_traits(fam).is_deterministic) return construct(fam, n, m);
  RngStream rng(seed, 0);
  return construct(fam, n, m, &rng);
}

void check_etf(FrameFamily fam, int n, int m) {
  const FrameDiagnostics d = diagnostics(build(fam, n, m));
  CAPTURE(to_string(fam));
  CAPTURE(n);
  CHECK(d.row_norm_defect <= 1e-12);
  CHECK(d.tightness_defect <= 1e-10);
  CHECK(d.equiangularity_defect <= 1e-10);
  CHECK(std::abs(d.coherence - d.welch_bound) <= 1e-10);
}

}  // namespace

TEST_CASE("primality helper") {
  CHECK(is_prime(2));
  CHECK(is_prime(3));
  CHECK(is_prime(863));
  CHECK_FALSE(is_prime(1));
  CHECK_FALSE(is_prime(861));  // 3 * 287
  CHECK_FALSE(is_prime(841));  // 29^2
}

TEST_CASE("admissible size enumeration") {
  // quadratic-residue family: primes = 3 (mod 4), m = (n-1)/2
  const auto dss = admissible_sizes(FrameFamily::DSS, 2, 32, 0.5);
  std::vector<std::pair<int, int>> want = {
      {3, 1}, {7, 3}, {11, 5}, {19, 9}, {23, 11}, {31, 15}};
  CHECK(dss == want);

  // Hadamard family: m a power of two, n = 2m
  const auto sh = admissible_sizes(FrameFamily::SH, 4, 130, 0.5);
  want = {{4, 2}, {8, 4}, {16, 8}, {32, 16}, {64, 32}, {128, 64}};
  CHECK(sh == want);

  // conference-matrix families: n = p + 1
  const auto realpf = admissible_sizes(FrameFamily::RealPF, 2, 20, 0.5);
  want = {{6, 3}, {14, 7}, {18, 9}};  // p = 5, 13, 17
  CHECK(realpf == want);
  const auto gf = admissible_sizes(FrameFamily::GF, 2, 20, 0.5);
  want = {{4, 2}, {8, 4}, {12, 6}, {20, 10}};  // p = 3, 7, 11, 19
  CHECK(gf == want);
}

TEST_CASE("inadmissible sizes are rejected with the family constraint") {
  CHECK_THROWS_AS(construct(FrameFamily::DSS, 13, 6), InadmissibleSize);
  CHECK_THROWS_AS(construct(FrameFamily::DSS, 7, 4), InadmissibleSize);
  CHECK_THROWS_AS(construct(FrameFamily::SH, 12, 6), InadmissibleSize);
  CHECK_THROWS_AS(construct(FrameFamily::RealPF, 8, 4), InadmissibleSize);
  CHECK_THROWS_AS(construct(FrameFamily::Alltop, 15, 4), InadmissibleSize);
}

TEST_CASE("random families require an rng, deterministic ones forbid it") {
  CHECK_THROWS(construct(FrameFamily::Haar, 16, 8));
  RngStream rng(3, 0);
  CHECK_THROWS(construct(FrameFamily::DSS, 7, 3, &rng));
}

TEST_CASE("quadratic-residue frame at n=7 matches hand-computed coherence") {
  const FrameMatrix f = build(FrameFamily::DSS, 7, 3);
  const FrameDiagnostics d = diagnostics(f);
  // Welch bound sqrt((7-3)/(3*6)) = sqrt(2/9)
  CHECK(d.welch_bound == doctest::Approx(std::sqrt(2.0 / 9.0)).epsilon(1e-14));
  CHECK(d.coherence == doctest::Approx(std::sqrt(2.0 / 9.0)).epsilon(1e-12));
  CHECK(d.equiangularity_defect <= 1e-12);
}

TEST_CASE("real conference frame at n=6 has coherence 1/sqrt(5)") {
  const FrameDiagnostics d = diagnostics(build(FrameFamily::RealPF, 6, 3));
  CHECK(d.coherence == doctest::Approx(1.0 / std::sqrt(5.0)).epsilon(1e-12));
  CHECK(d.equiangularity_defect <= 1e-12);
  CHECK(d.tightness_defect <= 1e-12);
}

TEST_CASE("equiangular families pass the full check at small sizes") {
  check_etf(FrameFamily::DSS, 7, 3);
  check_etf(FrameFamily::DSS, 23, 11);
  check_etf(FrameFamily::ComplexPF, 11, 6);
  check_etf(FrameFamily::ComplexPF, 23, 12);
  check_etf(FrameFamily::GF, 12, 6);
  check_etf(FrameFamily::GF, 24, 12);
  check_etf(FrameFamily::RealPF, 14, 7);
  check_etf(FrameFamily::RealPF, 18, 9);
}

TEST_CASE("spikes-and-hadamard is tight but far from equiangular") {
  const FrameDiagnostics d = diagnostics(build(FrameFamily::SH, 8, 4));
  CHECK(d.row_norm_defect <= 1e-12);
  CHECK(d.tightness_defect <= 1e-12);
  // off-diagonal magnitudes are 0 (within a block) and 1/2 (across blocks)
  CHECK(d.coherence == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(d.equiangularity_defect == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("spikes-and-sines and chirp frames are tight, not equiangular") {
  for (auto [fam, n, m] :
       {std::tuple{FrameFamily::SS, 16, 8}, {FrameFamily::Alltop, 20, 5}}) {
    const FrameDiagnostics d = diagnostics(build(fam, n, m));
    CAPTURE(to_string(fam));
    CHECK(d.row_norm_defect <= 1e-12);
    CHECK(d.tightness_defect <= 1e-10);
    CHECK(d.equiangularity_defect > 1e-6);
  }
}

TEST_CASE("random frame families have the advertised gross structure") {
  for (auto fam : {FrameFamily::Haar, FrameFamily::RealHaar,
                   FrameFamily::RandDFT, FrameFamily::RandDCT}) {
    const FrameMatrix f = build(fam, 32, 16, 9);
    CAPTURE(to_string(fam));
    const FrameDiagnostics d = diagnostics(f);
    // columns stay orthogonal with squared norm n/m under the scaling
    CHECK(d.tightness_defect <= 1e-10);
  }
  const FrameMatrix g = build(FrameFamily::GaussianIID, 64, 32, 9);
  CHECK(g.field() == Field::Real);
  const auto& x = std::get<RealMatrix>(g.x);
  // entries N(0, 1/m): mean squared entry close to 1/32
  CHECK(x.squaredNorm() / (64.0 * 32.0) == doctest::Approx(1.0 / 32.0).epsilon(0.15));
}

TEST_CASE("lowpass frame is tight but concentrates coherence") {
  const FrameDiagnostics d = diagnostics(build(FrameFamily::LowPass, 16, 8));
  CHECK(d.tightness_defect <= 1e-10);
  CHECK(d.coherence > 2.0 * d.welch_bound);
}

TEST_CASE("construction is reproducible for equal seeds") {
  const FrameMatrix a = build(FrameFamily::Haar, 20, 10, 77);
  const FrameMatrix b = build(FrameFamily::Haar, 20, 10, 77);
  const FrameMatrix c = build(FrameFamily::Haar, 20, 10, 78);
  const auto& xa = std::get<ComplexMatrix>(a.x);
  const auto& xb = std::get<ComplexMatrix>(b.x);
  const auto& xc = std::get<ComplexMatrix>(c.x);
  CHECK((xa - xb).cwiseAbs().maxCoeff() == 0.0);
  CHECK((xa - xc).cwiseAbs().maxCoeff() > 1e-3);
}

TEST_CASE("family name round trip") {
  for (FrameFamily fam : all_families()) {
    CHECK(family_from_string(to_string(fam)) == fam);
  }
  CHECK_THROWS_AS(family_from_string("nope"), ConfigError);
}
