#include "framespectra/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <thread>

namespace framespectra {

namespace {

// Stream-index domains; trial i always draws from the same stream no matter
// how trials are split across workers.
constexpr std::uint64_t kDomainFrame = 1ULL << 60;
constexpr std::uint64_t kDomainSubsets = 2ULL << 60;
constexpr std::uint64_t kDomainBaseline = 3ULL << 60;

std::uint64_t grid_stream(std::uint64_t domain, int n_index, int trial = 0) {
  return domain | (static_cast<std::uint64_t>(n_index) << 32) |
         static_cast<std::uint64_t>(trial);
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  threads = std::clamp(threads, 1, count > 0 ? count : 1);
  if (threads == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      const int lo = static_cast<int>(static_cast<long>(count) * w / threads);
      const int hi =
          static_cast<int>(static_cast<long>(count) * (w + 1) / threads);
      for (int i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

std::vector<int> one_subset(int n, int k, RngStream& rng) {
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  for (int i = 0; i < k; ++i) {
    const auto j = i + static_cast<int>(rng.uniform_below(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

struct TrialOutputs {
  std::vector<double> ks;                    // per trial
  std::vector<std::vector<double>> psi;      // per functional, per trial
};

AggregateRecord reduce(const std::string& name, Field field,
                       const ManovaParams& sizes, std::uint64_t seed,
                       const std::vector<FunctionalSpec>& functionals,
                       const TrialOutputs& out) {
  AggregateRecord rec;
  rec.frame = name;
  rec.field = field;
  rec.n = sizes.n;
  rec.m = sizes.m;
  rec.k = sizes.k;
  rec.beta_n = static_cast<double>(sizes.k) / sizes.m;
  rec.gamma_n = static_cast<double>(sizes.m) / sizes.n;
  rec.trials = static_cast<int>(out.ks.size());
  rec.seed = seed;
  const double t = static_cast<double>(rec.trials);
  double sum = 0.0;
  double sum2 = 0.0;
  for (double v : out.ks) {
    sum += v;
    sum2 += v * v;
  }
  rec.mean_ks = sum / t;
  rec.mse_ks = sum2 / t;
  rec.var_ks = rec.mse_ks - rec.mean_ks * rec.mean_ks;
  for (std::size_t f = 0; f < functionals.size(); ++f) {
    double s2 = 0.0;
    for (double v : out.psi[f]) s2 += v * v;
    rec.mse_psi.emplace_back(functionals[f].label(), s2 / t);
  }
  return rec;
}

}  // namespace

double AggregateRecord::mse_psi_for(const std::string& label) const {
  for (const auto& [key, value] : mse_psi) {
    if (key == label) return value;
  }
  throw std::invalid_argument("no aggregate for functional " + label);
}

std::vector<std::vector<int>> sample_subsets(int n, int k, int trials,
                                             std::uint64_t master_seed,
                                             std::uint64_t stream_base) {
  if (k > n) throw std::invalid_argument("sample_subsets: k > n");
  std::vector<std::vector<int>> out(trials);
  for (int t = 0; t < trials; ++t) {
    RngStream rng(master_seed, stream_base + static_cast<std::uint64_t>(t));
    out[t] = one_subset(n, k, rng);
  }
  return out;
}

std::optional<ManovaParams> resolve_sizes(FrameFamily family, int n,
                                          double gamma_target,
                                          double beta_target) {
  const int lo = std::max(1, static_cast<int>(std::floor(0.9 * n)));
  const int hi = static_cast<int>(std::ceil(1.1 * n));
  const auto sizes = admissible_sizes(family, lo, hi, gamma_target);
  const ManovaParams* best = nullptr;
  ManovaParams candidate;
  double best_cost = std::numeric_limits<double>::infinity();
  for (const auto& [nn, mm] : sizes) {
    const double gamma_n = static_cast<double>(mm) / nn;
    if (std::abs(gamma_n - gamma_target) > 0.1 * gamma_target) continue;
    const double cost =
        std::abs(nn - n) + 1e-6 * std::abs(gamma_n - gamma_target);
    if (cost < best_cost) {
      best_cost = cost;
      candidate.n = nn;
      candidate.m = mm;
      best = &candidate;
    }
  }
  if (best == nullptr) return std::nullopt;
  candidate.k = std::clamp(
      static_cast<int>(std::lround(beta_target * candidate.m)), 1, candidate.n);
  candidate.field = family_traits(family).field;
  return candidate;
}

RunResult run_trials(const ExperimentConfig& cfg) {
  if (cfg.n_grid.empty()) throw ConfigError("run_trials: empty n grid");
  if (cfg.trials < 1) throw ConfigError("run_trials: trials must be >= 1");
  for (const auto& spec : cfg.functionals) {
    if (spec.kind == PsiKind::AC && cfg.beta_target >= 1.0) {
      throw ConfigError("run_trials: AC functional diverges for beta >= 1");
    }
  }

  RunResult result;
  const std::string frame_name = to_string(cfg.family);
  const Field field = family_traits(cfg.family).field;
  const std::string baseline_name =
      field == Field::Real ? "realmanova" : "manova";

  for (int n_index = 0; n_index < static_cast<int>(cfg.n_grid.size());
       ++n_index) {
    const int requested = cfg.n_grid[n_index];
    const auto sizes =
        resolve_sizes(cfg.family, requested, cfg.gamma_target, cfg.beta_target);
    if (!sizes) {
      std::cerr << "warning: no admissible (n,m) within 10% of targets near n="
                << requested << " for " << frame_name << ", skipping\n";
      continue;
    }
    const int k = sizes->k;
    const int m = sizes->m;
    const double beta_n = static_cast<double>(k) / m;
    const double gamma_n = static_cast<double>(m) / sizes->n;
    const LimitLaw law = LimitLaw::manova(beta_n, gamma_n);

    std::vector<double> limits(cfg.functionals.size());
    for (std::size_t f = 0; f < cfg.functionals.size(); ++f) {
      limits[f] = psi_limit(cfg.functionals[f], law);
    }

    RngStream* frame_rng_ptr = nullptr;
    RngStream frame_rng(cfg.master_seed, grid_stream(kDomainFrame, n_index));
    if (!family_traits(cfg.family).is_deterministic) {
      frame_rng_ptr = &frame_rng;
    }
    const FrameMatrix frame =
        construct(cfg.family, sizes->n, m, frame_rng_ptr);

    TrialOutputs frame_out;
    frame_out.ks.resize(cfg.trials);
    frame_out.psi.assign(cfg.functionals.size(),
                         std::vector<double>(cfg.trials));
    parallel_for(cfg.trials, cfg.threads, [&](int trial) {
      RngStream rng(cfg.master_seed,
                    grid_stream(kDomainSubsets, n_index, trial));
      const SpectralSample s = subset_spectrum(frame, one_subset(sizes->n, k, rng));
      frame_out.ks[trial] = ks_distance(s, law);
      for (std::size_t f = 0; f < cfg.functionals.size(); ++f) {
        frame_out.psi[f][trial] =
            std::abs(psi_eval(cfg.functionals[f], s) - limits[f]);
      }
    });
    result.frame_agg.records.push_back(reduce(
        frame_name, field, *sizes, cfg.master_seed, cfg.functionals, frame_out));

    TrialOutputs base_out;
    base_out.ks.resize(cfg.trials);
    base_out.psi.assign(cfg.functionals.size(),
                        std::vector<double>(cfg.trials));
    parallel_for(cfg.trials, cfg.threads, [&](int trial) {
      RngStream rng(cfg.master_seed,
                    grid_stream(kDomainBaseline, n_index, trial));
      std::vector<double> eigs;
      if (k <= m) {
        eigs = sample_manova({sizes->n, m, k, field}, rng);
      } else {
        // beta > 1: baseline is beta * MANOVA(n, k, m) padded with the
        // structural zeros of the k-subset spectrum.
        eigs = sample_manova_reversed({sizes->n, k, m, field}, beta_n, rng);
        eigs.insert(eigs.begin(), static_cast<std::size_t>(k - m), 0.0);
      }
      base_out.ks[trial] = ks_distance(eigs, law);
      for (std::size_t f = 0; f < cfg.functionals.size(); ++f) {
        base_out.psi[f][trial] =
            std::abs(psi_eval(cfg.functionals[f], eigs) - limits[f]);
      }
    });
    result.baseline_agg.records.push_back(
        reduce(baseline_name, field, *sizes, cfg.master_seed, cfg.functionals,
               base_out));
  }
  return result;
}

namespace {

std::vector<const AggregateRecord*> fit_records(const TrialAggregate& agg,
                                                int min_n) {
  std::vector<const AggregateRecord*> out;
  for (const auto& rec : agg.records) {
    if (rec.n >= min_n) out.push_back(&rec);
  }
  return out;
}

struct SlopeTest {
  double t = 0.0;
  double p = 1.0;
};

SlopeTest slope_test(double b, double se_b, double b_ref, double se_ref,
                     int dof) {
  SlopeTest out;
  const double denom = std::sqrt(se_b * se_b + se_ref * se_ref);
  const double diff = b - b_ref;
  if (denom == 0.0) {
    out.t = diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  } else {
    out.t = diff / denom;
  }
  out.p = student_t_two_sided_p(out.t, dof);
  return out;
}

}  // namespace

ConvergenceFit test1_fit(const TrialAggregate& frame,
                         const TrialAggregate& baseline, int min_n_for_fit) {
  const auto fr = fit_records(frame, min_n_for_fit);
  const auto br = fit_records(baseline, min_n_for_fit);
  if (fr.size() < 3 || br.size() < 3) {
    throw std::invalid_argument("test1_fit: need >= 3 grid points per side");
  }
  auto fit_side = [](const std::vector<const AggregateRecord*>& recs) {
    std::vector<double> x, y;
    for (const auto* rec : recs) {
      x.push_back(std::log(static_cast<double>(rec->n)));
      y.push_back(-0.5 * std::log(rec->var_ks));
    }
    return linear_regression(x, y);
  };
  const RegressionResult ff = fit_side(fr);
  const RegressionResult bf = fit_side(br);

  ConvergenceFit out;
  out.b_hat = ff.slope();
  out.slope_se = ff.slope_se();
  out.intercept = ff.intercept;
  out.r_squared = ff.r_squared;
  out.baseline_b = bf.slope();
  out.baseline_se = bf.slope_se();
  out.baseline_r2 = bf.r_squared;
  out.dof = static_cast<int>(fr.size() + br.size()) - 4;
  const SlopeTest st =
      slope_test(out.b_hat, out.slope_se, out.baseline_b, out.baseline_se,
                 out.dof);
  out.t_statistic = st.t;
  out.p_value = st.p;

  // Secondary fit of -log(mean KS^2) on log n: a good line verifies that the
  // squared mean decays polynomially along with the variance.
  {
    std::vector<double> x, y;
    for (const auto* rec : fr) {
      x.push_back(std::log(static_cast<double>(rec->n)));
      y.push_back(-std::log(rec->mse_ks));
    }
    out.mse_r2 = linear_regression(x, y).r_squared;
  }
  return out;
}

ConvergenceFit test2_fit(const TrialAggregate& frame,
                         const TrialAggregate& baseline,
                         const FunctionalSpec& functional, int min_n_for_fit,
                         bool invert_ratio) {
  const auto fr = fit_records(frame, min_n_for_fit);
  const auto br = fit_records(baseline, min_n_for_fit);
  if (br.size() < 5) {
    throw std::invalid_argument("test2_fit: baseline grid must span >= 5 points");
  }
  if (fr.size() < 3) {
    throw std::invalid_argument("test2_fit: need >= 3 frame grid points");
  }
  const std::string label = functional.label();

  std::vector<double> logn, loglogn, yb;
  for (const auto* rec : br) {
    logn.push_back(std::log(static_cast<double>(rec->n)));
    loglogn.push_back(std::log(std::log(static_cast<double>(rec->n))));
    yb.push_back(-std::log(rec->mse_psi_for(label)));
  }
  const RegressionResult stage1 = linear_regression({logn, loglogn}, yb);
  const double a0 = stage1.slopes[0];
  const double b0 = stage1.slopes[1];

  ConvergenceFit out;
  out.baseline_a0 = a0;
  out.baseline_b0 = b0;
  out.baseline_r2 = stage1.r_squared;
  out.dof = static_cast<int>(fr.size() + br.size()) - 4;

  if (std::abs(b0) < 1e-6) {
    out.ratio_fallback = true;
    std::vector<double> xf, yf;
    for (const auto* rec : fr) {
      xf.push_back(std::log(static_cast<double>(rec->n)));
      yf.push_back(-std::log(rec->mse_psi_for(label)));
    }
    const RegressionResult fit = linear_regression(xf, yf);
    out.b_hat = fit.slope();
    out.slope_se = fit.slope_se();
    out.intercept = fit.intercept;
    out.r_squared = fit.r_squared;
    out.a_hat = 0.0;
    out.baseline_b = a0;
    out.baseline_se = stage1.slope_ses[0];
    const SlopeTest st =
        slope_test(out.b_hat, out.slope_se, a0, stage1.slope_ses[0], out.dof);
    out.t_statistic = st.t;
    out.p_value = st.p;
    return out;
  }

  const double ratio = invert_ratio ? b0 / a0 : a0 / b0;
  std::vector<double> zf, yf;
  for (const auto* rec : fr) {
    const double ln = std::log(static_cast<double>(rec->n));
    zf.push_back(ln + ratio * std::log(ln));
    yf.push_back(-std::log(rec->mse_psi_for(label)));
  }
  const RegressionResult fit = linear_regression(zf, yf);
  out.b_hat = fit.slope();
  out.slope_se = fit.slope_se();
  out.intercept = fit.intercept;
  out.r_squared = fit.r_squared;
  out.a_hat = fit.slope() * ratio;
  out.baseline_b = b0;
  out.baseline_se = stage1.slope_ses[1];
  const SlopeTest st =
      slope_test(out.b_hat, out.slope_se, b0, stage1.slope_ses[1], out.dof);
  out.t_statistic = st.t;
  out.p_value = st.p;
  return out;
}

std::vector<TabulateRow> tabulate(const TrialAggregate& frame_agg,
                                  const FunctionalSpec& functional) {
  std::vector<TabulateRow> rows;
  for (const auto& rec : frame_agg.records) {
    const LimitLaw law = LimitLaw::manova(rec.beta_n, rec.gamma_n);
    TabulateRow row;
    row.n = rec.n;
    row.m = rec.m;
    row.k = rec.k;
    row.limit = psi_limit(functional, law);
    row.rmse = std::sqrt(rec.mse_psi_for(functional.label()));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace framespectra
