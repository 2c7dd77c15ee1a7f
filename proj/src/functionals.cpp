#include "framespectra/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace framespectra {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

std::string FunctionalSpec::label() const {
  switch (kind) {
    case PsiKind::RIP: return "rip";
    case PsiKind::StRIP: return "strip";
    case PsiKind::AC: return "ac";
    case PsiKind::Shannon: return "shannon";
    case PsiKind::Max: return "max";
    case PsiKind::Min: return "min";
    case PsiKind::Cond: return "cond";
  }
  throw std::logic_error("FunctionalSpec::label: unknown kind");
}

FunctionalSpec functional_from_string(const std::string& label) {
  std::string s;
  for (char ch : label) s.push_back(static_cast<char>(std::tolower(ch)));
  for (PsiKind kind : {PsiKind::RIP, PsiKind::StRIP, PsiKind::AC,
                       PsiKind::Shannon, PsiKind::Max, PsiKind::Min,
                       PsiKind::Cond}) {
    FunctionalSpec spec;
    spec.kind = kind;
    if (spec.label() == s) return spec;
  }
  throw ConfigError("unknown functional: " + label);
}

double psi_eval(const FunctionalSpec& spec, const std::vector<double>& eigs) {
  if (eigs.empty()) {
    throw std::invalid_argument("psi_eval: empty spectrum");
  }
  const double lo = eigs.front();
  const double hi = eigs.back();
  const auto k = static_cast<double>(eigs.size());
  switch (spec.kind) {
    case PsiKind::RIP:
      return std::max(hi - 1.0, 1.0 - lo);
    case PsiKind::StRIP:
      return std::max(hi - 1.0, 1.0 - lo) <= spec.delta ? 1.0 : 0.0;
    case PsiKind::AC: {
      if (lo <= 0.0) return kInf;
      double harm_inv = 0.0;
      double mean = 0.0;
      for (double v : eigs) {
        harm_inv += 1.0 / v;
        mean += v;
      }
      return (harm_inv / k) * (mean / k);
    }
    case PsiKind::Shannon: {
      double sum = 0.0;
      for (double v : eigs) sum += std::log1p(spec.alpha * v);
      return sum / k;
    }
    case PsiKind::Max:
      return hi;
    case PsiKind::Min:
      return lo;
    case PsiKind::Cond:
      return lo > 0.0 ? hi / lo : kInf;
  }
  throw std::logic_error("psi_eval: unknown kind");
}

double psi_eval(const FunctionalSpec& spec, const SpectralSample& s) {
  return psi_eval(spec, s.eigenvalues);
}

double psi_limit(const FunctionalSpec& spec, const LimitLaw& law) {
  const double min_edge = law.zero_mass() > 0.0 ? 0.0 : law.r_minus();
  switch (spec.kind) {
    case PsiKind::RIP:
      return std::max(law.r_plus() - 1.0, 1.0 - min_edge);
    case PsiKind::StRIP:
      return std::max(law.r_plus() - 1.0, 1.0 - min_edge) <= spec.delta ? 1.0
                                                                        : 0.0;
    case PsiKind::AC: {
      if (law.zero_mass() > 0.0 || law.r_minus() <= 0.0) {
        throw std::invalid_argument(
            "psi_limit: AC diverges for beta >= 1 (zero in the spectrum)");
      }
      return law.integrate_against([](double x) { return 1.0 / x; }, 1e-10);
    }
    case PsiKind::Shannon:
      return law.integrate_against(
          [&](double x) { return std::log1p(spec.alpha * x); }, 1e-10);
    case PsiKind::Max:
      return law.r_plus();
    case PsiKind::Min:
      return min_edge;
    case PsiKind::Cond:
      return min_edge > 0.0 ? law.r_plus() / min_edge : kInf;
  }
  throw std::logic_error("psi_limit: unknown kind");
}

double delta_psi(const FunctionalSpec& spec, const SpectralSample& s,
                 const LimitLaw& law) {
  return std::abs(psi_eval(spec, s) - psi_limit(spec, law));
}

}  // namespace framespectra
