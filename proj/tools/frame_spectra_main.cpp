#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "framespectra/io.hpp"

namespace fs = framespectra;

namespace {

// Section prefixes are organizational only; the last definition of a key wins.
fs::Config flatten(const fs::Config& raw) {
  fs::Config flat;
  for (const auto& [key, value] : raw) {
    const auto dot = key.rfind('.');
    flat[dot == std::string::npos ? key : key.substr(dot + 1)] = value;
  }
  return flat;
}

int resolve_threads(std::optional<int> flag, const fs::Config& cfg) {
  if (flag) return *flag;
  if (const char* env = std::getenv("FRAME_SPECTRA_THREADS")) {
    try {
      return std::max(1, std::stoi(env));
    } catch (const std::exception&) {
      throw fs::ConfigError(std::string("FRAME_SPECTRA_THREADS: not a count: ") +
                            env);
    }
  }
  return std::max(1, fs::config_get_int(cfg, "threads", 1));
}

fs::RngStream* frame_rng(fs::FrameFamily family,
                         std::optional<std::uint64_t> seed,
                         std::optional<fs::RngStream>& storage) {
  if (fs::family_traits(family).is_deterministic) return nullptr;
  if (!seed) {
    throw fs::ConfigError("--seed is required for random frame families");
  }
  storage.emplace(*seed, 0);
  return &*storage;
}

int default_m(fs::FrameFamily family, int n, std::optional<int> m,
              double gamma) {
  if (m) return *m;
  const auto sizes = fs::admissible_sizes(family, n, n, gamma);
  if (sizes.empty()) {
    throw fs::InadmissibleSize(fs::to_string(family) +
                               ": no admissible m for n=" + std::to_string(n));
  }
  return sizes.front().second;
}

void print_diagnostics(const fs::FrameMatrix& f) {
  const fs::FrameDiagnostics d = fs::diagnostics(f);
  const auto traits = fs::family_traits(f.family);
  std::cout << "family: " << fs::to_string(f.family) << "\n"
            << "n: " << f.n << "\nm: " << f.m << "\nfield: "
            << fs::to_string(f.field()) << "\n"
            << "row_norm_defect: " << fs::format_double(d.row_norm_defect)
            << "\ntightness_defect: " << fs::format_double(d.tightness_defect)
            << "\ncoherence: " << fs::format_double(d.coherence)
            << "\nequiangularity_defect: "
            << fs::format_double(d.equiangularity_defect)
            << "\nwelch_bound: " << fs::format_double(d.welch_bound) << "\n";
  if (traits.is_etf) {
    const bool pass = d.row_norm_defect <= 1e-12 &&
                      d.tightness_defect <= 1e-10 &&
                      d.equiangularity_defect <= 1e-10 &&
                      std::abs(d.coherence - d.welch_bound) <= 1e-10;
    std::cout << "etf_check: " << (pass ? "PASS" : "FAIL") << "\n";
  }
}

fs::ExperimentConfig experiment_from(const fs::Config& cfg, int threads) {
  fs::ExperimentConfig e;
  e.family = fs::family_from_string(fs::config_get(cfg, "family"));
  e.gamma_target = fs::config_get_double(cfg, "gamma", 0.5);
  e.beta_target = fs::config_get_double(cfg, "beta", 0.8);
  e.n_grid = fs::config_get_int_list(cfg, "n_grid");
  e.trials = fs::config_get_int(cfg, "trials", 500);
  e.min_n_for_fit = fs::config_get_int(cfg, "min_n_for_fit", 100);
  e.test2_invert_ratio = fs::config_get(cfg, "invert_ratio", "0") == "1";
  e.threads = threads;
  if (!fs::family_traits(e.family).is_deterministic &&
      cfg.find("seed") == cfg.end()) {
    throw fs::ConfigError("seed is required for random frame families");
  }
  e.master_seed = fs::config_get_u64(cfg, "seed", 1);
  for (const auto& label :
       fs::split_list(fs::config_get(cfg, "functionals", "ac"))) {
    fs::FunctionalSpec spec = fs::functional_from_string(label);
    spec.delta = fs::config_get_double(cfg, "delta", spec.delta);
    spec.alpha = fs::config_get_double(cfg, "alpha", spec.alpha);
    e.functionals.push_back(spec);
  }
  return e;
}

int run_command(const fs::Config& cfg, int threads) {
  const std::string test = fs::config_get(cfg, "test", "test1");
  if (test != "test1" && test != "test2") {
    throw fs::ConfigError("test must be test1 or test2, got " + test);
  }
  const fs::ExperimentConfig e = experiment_from(cfg, threads);
  const std::string out_dir = fs::config_get(cfg, "out_dir", ".");
  std::filesystem::create_directories(out_dir);
  const std::string frame_name = fs::to_string(e.family);

  const fs::RunResult result = fs::run_trials(e);

  const std::string manifest_path = out_dir + "/manifest.json";
  const std::string frame_csv_path =
      out_dir + "/" + frame_name + "_aggregate.csv";
  const std::string base_csv_path = out_dir + "/baseline_aggregate.csv";

  std::vector<std::string> outputs = {frame_csv_path, base_csv_path};
  fs::write_text_file(frame_csv_path,
                      fs::aggregate_csv(result.frame_agg, manifest_path));
  fs::write_text_file(base_csv_path,
                      fs::aggregate_csv(result.baseline_agg, manifest_path));

  if (test == "test1") {
    const fs::ConvergenceFit fit =
        fs::test1_fit(result.frame_agg, result.baseline_agg, e.min_n_for_fit);
    const std::string path = out_dir + "/fit_test1_ks.json";
    fs::write_text_file(path, fs::fit_json("test1", frame_name, "ks", fit));
    outputs.push_back(path);
    std::cout << "test1 " << frame_name
              << ": b_hat=" << fs::format_double(fit.b_hat)
              << " se=" << fs::format_double(fit.slope_se)
              << " r2=" << fs::format_double(fit.r_squared)
              << " t=" << fs::format_double(fit.t_statistic)
              << " p=" << fs::format_double(fit.p_value) << "\n";
  } else {
    for (const auto& spec : e.functionals) {
      const fs::ConvergenceFit fit =
          fs::test2_fit(result.frame_agg, result.baseline_agg, spec,
                        e.min_n_for_fit, e.test2_invert_ratio);
      const std::string path =
          out_dir + "/fit_test2_" + spec.label() + ".json";
      fs::write_text_file(path,
                          fs::fit_json("test2", frame_name, spec.label(), fit));
      outputs.push_back(path);
      std::cout << "test2 " << frame_name << " " << spec.label()
                << ": b_hat=" << fs::format_double(fit.b_hat)
                << " a_hat=" << fs::format_double(fit.a_hat)
                << " p=" << fs::format_double(fit.p_value) << "\n";
    }
  }
  fs::write_text_file(manifest_path,
                      fs::manifest_json("run", cfg, e.master_seed, outputs));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frame subset spectra toolkit"};
  app.require_subcommand(1);

  std::string family_str = "dss";
  int n = 0;
  std::optional<int> m_opt;
  std::optional<std::uint64_t> seed_opt;
  std::optional<int> threads_opt;
  std::string out_path;
  std::string out_dir;
  std::string config_path;
  double beta = 0.8;
  double gamma = 0.5;
  std::string kind = "manova";
  int points = 512;
  int k = 0;
  int trials = 0;
  std::string functional_str = "ac";
  std::string n_grid_str;
  std::string test_name;
  bool invert_ratio = false;

  auto add_family = [&](CLI::App* cmd, bool need_n = true) {
    cmd->add_option("--family", family_str, "frame family name")->required();
    if (need_n) cmd->add_option("--n", n, "number of frame vectors")->required();
    cmd->add_option("--m", m_opt, "ambient dimension (family default if omitted)");
    cmd->add_option("--seed", seed_opt, "master seed (required for random families)");
  };

  auto* c_construct = app.add_subcommand("construct", "build a frame and dump it as CSV");
  add_family(c_construct);
  c_construct->add_option("--out", out_path, "matrix CSV path");

  auto* c_law = app.add_subcommand("law", "tabulate a limiting law as CSV");
  c_law->add_option("--kind", kind, "mp or manova");
  c_law->add_option("--beta", beta, "k/m aspect ratio")->required();
  c_law->add_option("--gamma", gamma, "m/n aspect ratio (manova)");
  c_law->add_option("--points", points, "table rows");
  c_law->add_option("--out", out_path, "law CSV path");

  auto* c_spectrum = app.add_subcommand("spectrum", "one random-subset spectrum draw");
  add_family(c_spectrum);
  c_spectrum->add_option("--k", k, "subset size")->required();
  c_spectrum->add_option("--out", out_path, "eigenvalue CSV path");

  auto* c_run = app.add_subcommand("run", "Monte-Carlo convergence experiment");
  c_run->add_option("--config", config_path, "key = value config file");
  c_run->add_option("--test", test_name, "test1 or test2");
  c_run->add_option("--family", family_str, "frame family name");
  c_run->add_option("--beta", beta, "target k/m");
  c_run->add_option("--gamma", gamma, "target m/n");
  c_run->add_option("--n-grid", n_grid_str, "comma-separated n values");
  c_run->add_option("--trials", trials, "trials per grid point");
  c_run->add_option("--seed", seed_opt, "master seed");
  c_run->add_option("--functionals", functional_str, "comma-separated functional names");
  c_run->add_option("--threads", threads_opt, "worker threads");
  c_run->add_flag("--invert-ratio", invert_ratio, "use b0/a0 in the stage-2 regressor");
  c_run->add_option("--out-dir", out_dir, "output directory");

  auto* c_tab = app.add_subcommand("tabulate", "functional limit vs empirical RMSE table");
  add_family(c_tab, /*need_n=*/false);
  c_tab->add_option("--functional", functional_str, "functional name");
  c_tab->add_option("--beta", beta, "target k/m");
  c_tab->add_option("--gamma", gamma, "target m/n");
  c_tab->add_option("--n-grid", n_grid_str, "comma-separated n values")->required();
  c_tab->add_option("--trials", trials, "trials per grid point");
  c_tab->add_option("--threads", threads_opt, "worker threads");
  c_tab->add_option("--out", out_path, "table CSV path");

  auto* c_validate = app.add_subcommand("validate", "frame diagnostics report");
  add_family(c_validate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (c_construct->parsed() || c_validate->parsed()) {
      const fs::FrameFamily family = fs::family_from_string(family_str);
      const int m = default_m(family, n, m_opt, gamma);
      std::optional<fs::RngStream> rng;
      const fs::FrameMatrix f =
          fs::construct(family, n, m, frame_rng(family, seed_opt, rng));
      print_diagnostics(f);
      if (c_construct->parsed() && !out_path.empty()) {
        fs::write_text_file(out_path, fs::matrix_csv(f, ""));
        std::cout << "wrote " << out_path << "\n";
      }
    } else if (c_law->parsed()) {
      const fs::LimitLaw law = kind == "mp"
                                   ? fs::LimitLaw::marchenko_pastur(beta)
                                   : fs::LimitLaw::manova(beta, gamma);
      const std::string csv = fs::law_csv(law, points, "");
      if (out_path.empty()) {
        std::cout << csv;
      } else {
        fs::write_text_file(out_path, csv);
        std::cout << "wrote " << out_path << "\n";
      }
    } else if (c_spectrum->parsed()) {
      const fs::FrameFamily family = fs::family_from_string(family_str);
      const int m = default_m(family, n, m_opt, gamma);
      if (!seed_opt) throw fs::ConfigError("--seed is required for spectrum");
      std::optional<fs::RngStream> rng;
      const fs::FrameMatrix f =
          fs::construct(family, n, m, frame_rng(family, seed_opt, rng));
      const auto subsets = fs::sample_subsets(n, k, 1, *seed_opt, 1ULL << 32);
      const fs::SpectralSample s = fs::subset_spectrum(f, subsets[0]);
      const fs::LimitLaw law = fs::LimitLaw::manova(s.beta_n, s.gamma_n);
      std::ostringstream csv;
      csv << "eigenvalue\n";
      for (double v : s.eigenvalues) csv << fs::format_double(v) << "\n";
      if (out_path.empty()) {
        std::cout << csv.str();
      } else {
        fs::write_text_file(out_path, csv.str());
      }
      std::cout << "ks_distance: " << fs::format_double(fs::ks_distance(s, law))
                << "\n";
    } else if (c_run->parsed()) {
      fs::Config cfg;
      if (!config_path.empty()) cfg = flatten(fs::parse_config_file(config_path));
      // Command-line flags override the file.
      if (c_run->count("--test")) cfg["test"] = test_name;
      if (c_run->count("--family")) cfg["family"] = family_str;
      if (c_run->count("--beta")) cfg["beta"] = fs::format_double(beta);
      if (c_run->count("--gamma")) cfg["gamma"] = fs::format_double(gamma);
      if (c_run->count("--n-grid")) cfg["n_grid"] = n_grid_str;
      if (c_run->count("--trials")) cfg["trials"] = std::to_string(trials);
      if (seed_opt) cfg["seed"] = std::to_string(*seed_opt);
      if (c_run->count("--functionals")) cfg["functionals"] = functional_str;
      if (invert_ratio) cfg["invert_ratio"] = "1";
      if (c_run->count("--out-dir")) cfg["out_dir"] = out_dir;
      return run_command(cfg, resolve_threads(threads_opt, cfg));
    } else if (c_tab->parsed()) {
      fs::Config cfg;
      cfg["family"] = family_str;
      cfg["beta"] = fs::format_double(beta);
      cfg["gamma"] = fs::format_double(gamma);
      cfg["n_grid"] = n_grid_str;
      if (trials > 0) cfg["trials"] = std::to_string(trials);
      if (seed_opt) cfg["seed"] = std::to_string(*seed_opt);
      cfg["functionals"] = functional_str;
      fs::ExperimentConfig e =
          experiment_from(cfg, resolve_threads(threads_opt, cfg));
      const fs::RunResult result = fs::run_trials(e);
      const auto rows = fs::tabulate(result.frame_agg, e.functionals.at(0));
      const std::string csv = fs::tabulate_csv(rows, "");
      if (out_path.empty()) {
        std::cout << csv;
      } else {
        fs::write_text_file(out_path, csv);
        std::cout << "wrote " << out_path << "\n";
      }
    }
    return 0;
  } catch (const fs::InadmissibleSize& e) {
    std::cerr << "inadmissible size: " << e.what() << "\n";
    return 3;
  } catch (const fs::NumericError& e) {
    std::cerr << "numeric failure: " << e.what()
              << " (best=" << fs::format_double(e.best_estimate)
              << ", residual=" << fs::format_double(e.residual) << ")\n";
    return 4;
  } catch (const fs::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
