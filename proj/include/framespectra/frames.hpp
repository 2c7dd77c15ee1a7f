#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "framespectra/numerics.hpp"
#include "framespectra/rng.hpp"
#include "framespectra/types.hpp"

namespace framespectra {

enum class FrameFamily {
  DSS,         // difference-set spectrum (quadratic residues mod p)
  GF,          // Grassmannian frame (antisymmetric Paley conference matrix)
  RealPF,      // real Paley frame (symmetric Paley conference matrix)
  ComplexPF,   // complex Paley frame (partial DFT on {0} + quadratic residues)
  Alltop,      // quadratic phase chirp
  SS,          // spikes and sines
  SH,          // spikes and Hadamard
  Haar,        // first m columns of a Haar unitary
  RealHaar,    // first m columns of a Haar orthogonal
  RandDFT,     // random columns of the unitary DFT
  RandDCT,     // random columns of the orthonormal DCT-II
  GaussianIID, // i.i.d. N(0, 1/m) entries
  LowPass,     // lowest-frequency DFT columns (negative control)
};

struct FamilyTraits {
  Field field;
  bool is_deterministic;
  bool is_etf;
  std::optional<double> natural_gamma;
};

FamilyTraits family_traits(FrameFamily family);
std::string to_string(FrameFamily family);
FrameFamily family_from_string(const std::string& label);
const std::vector<FrameFamily>& all_families();

struct FrameMatrix {
  FrameFamily family;
  std::variant<RealMatrix, ComplexMatrix> x;  // n-by-m, rows are frame vectors
  int n = 0;
  int m = 0;
  double gamma_n = 0.0;

  Field field() const {
    return std::holds_alternative<RealMatrix>(x) ? Field::Real : Field::Complex;
  }
};

// All (n, m) in [n_min, n_max] admissible for the family, with m/n closest to
// gamma_target where the family leaves m free. Empty result is valid.
std::vector<std::pair<int, int>> admissible_sizes(FrameFamily family, int n_min,
                                                  int n_max,
                                                  double gamma_target);

// Builds the n-by-m frame matrix. rng must be present exactly for random
// families. Throws InadmissibleSize naming the violated constraint.
FrameMatrix construct(FrameFamily family, int n, int m,
                      RngStream* rng = nullptr);

struct FrameDiagnostics {
  double row_norm_defect;        // max_i | ||x_i|| - 1 |
  double tightness_defect;       // || X'X - (n/m) I ||_max
  double coherence;              // max_{i != j} |<x_i, x_j>|
  double equiangularity_defect;  // max - min of off-diagonal |<x_i, x_j>|
  double welch_bound;            // sqrt((n-m)/(m(n-1)))
};

FrameDiagnostics diagnostics(const FrameMatrix& f);

bool is_prime(long n);

}  // namespace framespectra
