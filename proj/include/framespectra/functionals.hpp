#pragma once

#include <string>
#include <vector>

#include "framespectra/spectra.hpp"

namespace framespectra {

enum class PsiKind { RIP, StRIP, AC, Shannon, Max, Min, Cond };

struct FunctionalSpec {
  PsiKind kind = PsiKind::AC;
  double delta = 0.4531;  // StRIP threshold
  double alpha = 1.0;     // Shannon SNR

  std::string label() const;
};

FunctionalSpec functional_from_string(const std::string& label);

// Evaluate the functional on an empirical spectrum (ascending eigenvalues).
// AC and Cond with a zero eigenvalue return +infinity.
double psi_eval(const FunctionalSpec& spec, const std::vector<double>& eigs);
double psi_eval(const FunctionalSpec& spec, const SpectralSample& s);

// Limiting value of the functional under the law. AC requires r- > 0 and no
// zero mass (beta < 1).
double psi_limit(const FunctionalSpec& spec, const LimitLaw& law);

// |psi_eval - psi_limit|.
double delta_psi(const FunctionalSpec& spec, const SpectralSample& s,
                 const LimitLaw& law);

}  // namespace framespectra
