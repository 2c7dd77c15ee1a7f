#include "framespectra/io.hpp"

#include <chrono>
#include <climits>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace framespectra {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': not a number: " + text);
  }
}

long long parse_integer(const std::string& key, const std::string& text) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(text, &pos);
    if (pos != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': not an integer: " + text);
  }
}

// FNV-1a, enough to tie outputs to their manifest identity.
std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string csv_header_note(const std::string& manifest_ref) {
  if (manifest_ref.empty()) return "";
  return "# manifest: " + manifest_ref + "\n";
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == v || (std::isnan(back) && std::isnan(v))) break;
  }
  return buf;
}

Config parse_config_text(const std::string& text) {
  Config out;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("config line " + std::to_string(lineno) +
                          ": unterminated section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    if (key.empty()) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": empty key");
    }
    if (!section.empty()) key = section + "." + key;
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

Config parse_config_file(const std::string& path) {
  return parse_config_text(read_text_file(path));
}

std::string config_get(const Config& c, const std::string& key) {
  const auto it = c.find(key);
  if (it == c.end()) throw ConfigError("missing config key: " + key);
  return it->second;
}

std::string config_get(const Config& c, const std::string& key,
                       const std::string& fallback) {
  const auto it = c.find(key);
  return it == c.end() ? fallback : it->second;
}

double config_get_double(const Config& c, const std::string& key,
                         double fallback) {
  const auto it = c.find(key);
  return it == c.end() ? fallback : parse_double(key, it->second);
}

int config_get_int(const Config& c, const std::string& key, int fallback) {
  const auto it = c.find(key);
  if (it == c.end()) return fallback;
  const long long v = parse_integer(key, it->second);
  if (v < INT_MIN || v > INT_MAX) {
    throw ConfigError("config key '" + key + "': out of range");
  }
  return static_cast<int>(v);
}

std::uint64_t config_get_u64(const Config& c, const std::string& key,
                             std::uint64_t fallback) {
  const auto it = c.find(key);
  if (it == c.end()) return fallback;
  try {
    std::size_t pos = 0;
    const std::uint64_t v = std::stoull(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': not an unsigned integer: " +
                      it->second);
  }
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<int> config_get_int_list(const Config& c, const std::string& key) {
  const std::string text = config_get(c, key);
  std::vector<int> out;
  for (const auto& item : split_list(text)) {
    out.push_back(static_cast<int>(parse_integer(key, item)));
  }
  if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
  return out;
}

std::string aggregate_csv(const TrialAggregate& agg,
                          const std::string& manifest_ref) {
  std::ostringstream out;
  out << csv_header_note(manifest_ref);
  out << "frame,field,n,m,k,beta_n,gamma_n,T,seed,mean_ks,var_ks,mse_ks";
  if (!agg.records.empty()) {
    for (const auto& [label, value] : agg.records.front().mse_psi) {
      out << ",mse_psi_" << label;
    }
  }
  out << "\n";
  for (const auto& r : agg.records) {
    out << r.frame << ',' << to_string(r.field) << ',' << r.n << ',' << r.m
        << ',' << r.k << ',' << format_double(r.beta_n) << ','
        << format_double(r.gamma_n) << ',' << r.trials << ',' << r.seed << ','
        << format_double(r.mean_ks) << ',' << format_double(r.var_ks) << ','
        << format_double(r.mse_ks);
    for (const auto& [label, value] : r.mse_psi) {
      out << ',' << format_double(value);
    }
    out << "\n";
  }
  return out.str();
}

TrialAggregate parse_aggregate_csv(const std::string& text) {
  TrialAggregate agg;
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> psi_labels;
  bool have_header = false;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto cells = split_list(line);
    if (!have_header) {
      if (cells.size() < 12 || cells[0] != "frame") {
        throw ConfigError("aggregate csv: unexpected header");
      }
      const std::string prefix = "mse_psi_";
      for (std::size_t i = 12; i < cells.size(); ++i) {
        if (cells[i].rfind(prefix, 0) != 0) {
          throw ConfigError("aggregate csv: unexpected column " + cells[i]);
        }
        psi_labels.push_back(cells[i].substr(prefix.size()));
      }
      have_header = true;
      continue;
    }
    if (cells.size() != 12 + psi_labels.size()) {
      throw ConfigError("aggregate csv: wrong cell count in row");
    }
    AggregateRecord r;
    r.frame = cells[0];
    r.field = cells[1] == "real" ? Field::Real : Field::Complex;
    r.n = static_cast<int>(parse_integer("n", cells[2]));
    r.m = static_cast<int>(parse_integer("m", cells[3]));
    r.k = static_cast<int>(parse_integer("k", cells[4]));
    r.beta_n = parse_double("beta_n", cells[5]);
    r.gamma_n = parse_double("gamma_n", cells[6]);
    r.trials = static_cast<int>(parse_integer("T", cells[7]));
    r.seed = static_cast<std::uint64_t>(parse_integer("seed", cells[8]));
    r.mean_ks = parse_double("mean_ks", cells[9]);
    r.var_ks = parse_double("var_ks", cells[10]);
    r.mse_ks = parse_double("mse_ks", cells[11]);
    for (std::size_t i = 0; i < psi_labels.size(); ++i) {
      r.mse_psi.emplace_back(psi_labels[i],
                             parse_double(psi_labels[i], cells[12 + i]));
    }
    agg.records.push_back(std::move(r));
  }
  return agg;
}

std::string matrix_csv(const FrameMatrix& f, const std::string& manifest_ref) {
  std::ostringstream out;
  out << csv_header_note(manifest_ref);
  if (f.field() == Field::Real) {
    const auto& x = std::get<RealMatrix>(f.x);
    for (int j = 0; j < f.m; ++j) out << (j ? "," : "") << "c" << j;
    out << "\n";
    for (int i = 0; i < f.n; ++i) {
      for (int j = 0; j < f.m; ++j) {
        out << (j ? "," : "") << format_double(x(i, j));
      }
      out << "\n";
    }
  } else {
    const auto& x = std::get<ComplexMatrix>(f.x);
    for (int j = 0; j < f.m; ++j) {
      out << (j ? "," : "") << "c" << j << "_re,c" << j << "_im";
    }
    out << "\n";
    for (int i = 0; i < f.n; ++i) {
      for (int j = 0; j < f.m; ++j) {
        out << (j ? "," : "") << format_double(x(i, j).real()) << ','
            << format_double(x(i, j).imag());
      }
      out << "\n";
    }
  }
  return out.str();
}

std::string law_csv(const LimitLaw& law, int points,
                    const std::string& manifest_ref) {
  std::ostringstream out;
  out << csv_header_note(manifest_ref);
  out << "# r_minus=" << format_double(law.r_minus())
      << " r_plus=" << format_double(law.r_plus())
      << " point_mass=" << format_double(law.point_mass())
      << " zero_mass=" << format_double(law.zero_mass()) << "\n";
  out << "x,pdf,cdf\n";
  const double lo = law.r_minus();
  const double hi = law.r_plus();
  for (int i = 0; i < points; ++i) {
    const double x = lo + (hi - lo) * i / (points - 1);
    out << format_double(x) << ',' << format_double(law.density(x)) << ','
        << format_double(law.cdf(x)) << "\n";
  }
  return out.str();
}

std::string tabulate_csv(const std::vector<TabulateRow>& rows,
                         const std::string& manifest_ref) {
  std::ostringstream out;
  out << csv_header_note(manifest_ref);
  out << "n,m,k,limit,rmse\n";
  for (const auto& r : rows) {
    out << r.n << ',' << r.m << ',' << r.k << ',' << format_double(r.limit)
        << ',' << format_double(r.rmse) << "\n";
  }
  return out.str();
}

std::string fit_json(const std::string& test, const std::string& frame,
                     const std::string& functional, const ConvergenceFit& fit) {
  nlohmann::ordered_json j;
  j["test"] = test;
  j["frame"] = frame;
  j["functional"] = functional;
  j["b_hat"] = fit.b_hat;
  j["se"] = fit.slope_se;
  j["r2"] = fit.r_squared;
  j["a_hat"] = fit.a_hat;
  nlohmann::ordered_json base;
  base["b"] = fit.baseline_b;
  base["se"] = fit.baseline_se;
  base["r2"] = fit.baseline_r2;
  base["a0"] = fit.baseline_a0;
  base["b0"] = fit.baseline_b0;
  j["baseline"] = base;
  j["t"] = fit.t_statistic;
  j["dof"] = fit.dof;
  j["p"] = fit.p_value;
  if (fit.mse_r2 != 0.0) j["mse_r2"] = fit.mse_r2;
  if (fit.ratio_fallback) j["ratio_fallback"] = true;
  return j.dump(2) + "\n";
}

std::string manifest_json(const std::string& command, const Config& config,
                          std::uint64_t master_seed,
                          const std::vector<std::string>& outputs) {
  nlohmann::ordered_json j;
  j["command"] = command;
  nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
  for (const auto& [key, value] : config) cfg[key] = value;
  j["config"] = cfg;
  j["version"] = kVersion;
  j["master_seed"] = master_seed;
  j["outputs"] = outputs;
  char hash[20];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(fnv1a(j.dump())));
  j["identity"] = hash;
  const auto now = std::chrono::system_clock::now();
  j["timestamp_unix"] =
      std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch())
          .count();
  return j.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  out << text;
  if (!out) throw ConfigError("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace framespectra
