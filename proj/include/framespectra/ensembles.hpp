#pragma once

#include <vector>

#include "framespectra/numerics.hpp"
#include "framespectra/rng.hpp"
#include "framespectra/types.hpp"

namespace framespectra {

struct ManovaParams {
  int n = 0;
  int m = 0;
  int k = 0;
  Field field = Field::Complex;
};

// One draw of the classical MANOVA (Jacobi) ensemble eigenvalues:
// (n/m) (AA'+BB')^{-1/2} BB' (AA'+BB')^{-1/2} with A k-by-(n-m) and B k-by-m
// i.i.d. standard Gaussian over the field. Sorted ascending, length k; for
// k > m the spectrum carries k-m structural zeros.
std::vector<double> sample_manova(const ManovaParams& p, RngStream& rng);

// beta-scaled draw with the roles of k and m swapped, used as the baseline
// for subsets with more vectors than dimensions.
std::vector<double> sample_manova_reversed(const ManovaParams& swapped,
                                           double beta_scale, RngStream& rng);

}  // namespace framespectra
