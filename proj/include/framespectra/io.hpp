#pragma once

#include <map>
#include <string>
#include <vector>

#include "framespectra/experiments.hpp"

namespace framespectra {

inline constexpr const char* kVersion = "0.1.0";

// Shortest decimal that round-trips a double (up to 17 significant digits).
std::string format_double(double v);

// Flat key = value config text. '#' starts a comment, [section] lines prefix
// the keys that follow as "section.key". Later duplicates win.
using Config = std::map<std::string, std::string>;
Config parse_config_text(const std::string& text);
Config parse_config_file(const std::string& path);

// Typed lookups; throw ConfigError naming the key on absence or bad syntax.
std::string config_get(const Config& c, const std::string& key);
std::string config_get(const Config& c, const std::string& key,
                       const std::string& fallback);
double config_get_double(const Config& c, const std::string& key,
                         double fallback);
int config_get_int(const Config& c, const std::string& key, int fallback);
std::uint64_t config_get_u64(const Config& c, const std::string& key,
                             std::uint64_t fallback);
std::vector<int> config_get_int_list(const Config& c, const std::string& key);
std::vector<std::string> split_list(const std::string& text);

// Aggregate CSV: one row per grid point, header
// frame,field,n,m,k,beta_n,gamma_n,T,seed,mean_ks,var_ks,mse_ks,mse_psi_<kind>...
std::string aggregate_csv(const TrialAggregate& agg,
                          const std::string& manifest_ref);
TrialAggregate parse_aggregate_csv(const std::string& text);

// Matrix dump: complex entries become re,im column pairs.
std::string matrix_csv(const FrameMatrix& f, const std::string& manifest_ref);

// Law table: x, pdf, cdf rows plus a summary comment header.
std::string law_csv(const LimitLaw& law, int points,
                    const std::string& manifest_ref);

std::string tabulate_csv(const std::vector<TabulateRow>& rows,
                         const std::string& manifest_ref);

// Fit report as JSON text:
// {test, frame, functional, b_hat, se, r2, a_hat, baseline:{...}, t, dof, p}.
std::string fit_json(const std::string& test, const std::string& frame,
                     const std::string& functional, const ConvergenceFit& fit);

// Run manifest. The identity hash covers the command, config, version, and
// output list but not the timestamp, so reruns of one config share identity.
std::string manifest_json(const std::string& command, const Config& config,
                          std::uint64_t master_seed,
                          const std::vector<std::string>& outputs);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace framespectra
