#pragma once

// Text inputs: single-column datasets and key=value run configurations.

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "kappa4/distribution.hpp"
#include "kappa4/error.hpp"
#include "kappa4/estimators.hpp"
#include "kappa4/fitting.hpp"
#include "kappa4/simulation.hpp"

namespace kappa4::io {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Whole-token decimal parse; rejects trailing junk, nan and inf.
inline bool parse_double(std::string_view s, double& out) {
  const std::string tmp(trim(s));
  if (tmp.empty()) return false;
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(tmp.c_str(), &end);
  if (end != tmp.c_str() + tmp.size() || errno == ERANGE || !std::isfinite(v)) return false;
  out = v;
  return true;
}

inline bool parse_u64(std::string_view s, std::uint64_t& out) {
  const std::string tmp(trim(s));
  if (tmp.empty() || tmp.front() == '-') return false;
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(tmp.c_str(), &end, 10);
  if (end != tmp.c_str() + tmp.size() || errno == ERANGE) return false;
  out = v;
  return true;
}

// One numeric column. Blank lines and lines starting with '#' are skipped; the
// first remaining line is treated as a header when it is not numeric. CRLF
// line ends are accepted. Every other non-numeric row is reported by line number.
inline std::vector<double> parse_dataset(std::istream& in) {
  std::vector<double> values;
  std::vector<std::string> problems;
  std::string line;
  bool first_content = true;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    std::string_view s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    double v = 0.0;
    if (parse_double(s, v)) {
      values.push_back(v);
    } else if (!first_content) {
      problems.push_back("line " + std::to_string(lineno) + ": not a number: '" + std::string(s) + "'");
    }
    first_content = false;
  }
  if (!problems.empty()) {
    std::string msg = "dataset rejected:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw InputError(msg);
  }
  if (values.empty()) throw InputError("dataset contains no values");
  return values;
}

inline std::vector<double> read_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open dataset '" + path + "'");
  return parse_dataset(in);
}

// 64-bit FNV-1a, used as a short digest of configurations and flags.
inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Parsed run configuration. Shape and size keys take comma lists; the
// campaign grid is their Cartesian product (k outermost, then h, then n).
struct RunConfig {
  double mu = 0.0;
  double sigma = 1.0;
  std::vector<double> k{-0.2};
  std::vector<double> h{-0.2};
  std::vector<std::size_t> n{30};
  int reps = 1000;
  std::vector<double> levels{0.90, 0.95, 0.99, 0.995, 0.999};
  std::vector<std::string> methods{"MLE", "LME", "MPLE.MSo(k)MSo(h)"};
  std::uint64_t seed = 20240101;
  unsigned workers = 0;
  OptimizerConfig optimizer{};
  std::string digest;  // of the normalised key=value content

  std::vector<SimConfig> grid() const {
    std::vector<SimConfig> out;
    for (double kk : k) {
      for (double hh : h) {
        for (std::size_t nn : n) {
          SimConfig c;
          c.true_params = K4Params(mu, sigma, kk, hh);
          c.n = nn;
          c.reps = reps;
          c.quantile_levels = levels;
          c.methods = methods;
          c.seed = seed;
          c.optimizer = optimizer;
          c.workers = workers;
          out.push_back(std::move(c));
        }
      }
    }
    return out;
  }
};

inline const std::vector<std::string>& run_config_keys() {
  static const std::vector<std::string> keys{
      "mu",      "sigma",         "k",              "h",        "n",        "reps",           "levels",
      "methods", "seed",          "workers",        "rel_tolerance", "max_iterations", "restarts",
      "start_strategy", "branch_threshold"};
  return keys;
}

namespace detail {

inline std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  while (true) {
    const auto pos = s.find(',');
    out.push_back(trim(s.substr(0, pos)));
    if (pos == std::string_view::npos) break;
    s.remove_prefix(pos + 1);
  }
  return out;
}

}  // namespace detail

// key = value lines; '#' starts a comment line. Unknown keys, repeated keys
// and bad values are all collected and reported with their line numbers.
inline RunConfig parse_run_config(std::istream& in) {
  RunConfig cfg;
  std::vector<std::string> problems;
  std::map<std::string, std::string> seen;  // normalised content for the digest
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    const std::string_view s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) {
      problems.push_back(where + "expected key = value");
      continue;
    }
    const std::string key(trim(s.substr(0, eq)));
    const std::string_view value = trim(s.substr(eq + 1));
    const auto& keys = run_config_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      problems.push_back(where + "unknown key '" + key + "'");
      continue;
    }
    if (seen.count(key) != 0) {
      problems.push_back(where + "duplicate key '" + key + "'");
      continue;
    }
    seen[key] = std::string(value);
    auto bad = [&](const std::string& what) { problems.push_back(where + key + ": " + what); };
    auto number = [&](std::string_view v, double& out) {
      if (!parse_double(v, out)) {
        bad("not a number: '" + std::string(v) + "'");
        return false;
      }
      return true;
    };
    auto count = [&](std::string_view v, std::uint64_t& out, std::uint64_t min) {
      if (!parse_u64(v, out) || out < min) {
        bad("expected an integer >= " + std::to_string(min) + ", got '" + std::string(v) + "'");
        return false;
      }
      return true;
    };
    auto number_list = [&](std::vector<double>& out) {
      std::vector<double> vals;
      for (auto item : detail::split_list(value)) {
        double v = 0.0;
        if (!number(item, v)) return;
        vals.push_back(v);
      }
      out = std::move(vals);
    };
    double d = 0.0;
    std::uint64_t u = 0;
    if (key == "mu") {
      if (number(value, d)) cfg.mu = d;
    } else if (key == "sigma") {
      if (number(value, d)) {
        if (d > 0.0) cfg.sigma = d; else bad("must be > 0");
      }
    } else if (key == "k") {
      number_list(cfg.k);
    } else if (key == "h") {
      number_list(cfg.h);
    } else if (key == "n") {
      std::vector<std::size_t> ns;
      bool ok = true;
      for (auto item : detail::split_list(value)) {
        if (!count(item, u, 5)) {
          ok = false;
          break;
        }
        ns.push_back(static_cast<std::size_t>(u));
      }
      if (ok) cfg.n = std::move(ns);
    } else if (key == "reps") {
      if (count(value, u, 1)) cfg.reps = static_cast<int>(u);
    } else if (key == "levels") {
      number_list(cfg.levels);
      for (double lv : cfg.levels) {
        if (!(lv > 0.0 && lv < 1.0)) {
          bad("levels must lie in (0, 1)");
          break;
        }
      }
    } else if (key == "methods") {
      std::vector<std::string> names;
      for (auto item : detail::split_list(value)) {
        if (item == "all") {
          for (const auto& nm : all_method_names()) names.push_back(nm);
          continue;
        }
        try {
          names.push_back(make_estimator(item).name);
        } catch (const ConfigError&) {
          bad("unknown method '" + std::string(item) + "'");
        }
      }
      cfg.methods = std::move(names);
    } else if (key == "seed") {
      if (count(value, u, 0)) cfg.seed = u;
    } else if (key == "workers") {
      if (count(value, u, 0)) cfg.workers = static_cast<unsigned>(u);
    } else if (key == "rel_tolerance") {
      if (number(value, d)) {
        if (d > 0.0) cfg.optimizer.rel_tolerance = d; else bad("must be > 0");
      }
    } else if (key == "max_iterations") {
      if (count(value, u, 1)) cfg.optimizer.max_iterations = static_cast<int>(u);
    } else if (key == "restarts") {
      if (count(value, u, 1)) cfg.optimizer.restarts = static_cast<int>(u);
    } else if (key == "start_strategy") {
      if (value == "lme") {
        cfg.optimizer.start_strategy = StartStrategy::LmeStart;
      } else if (value == "moment") {
        cfg.optimizer.start_strategy = StartStrategy::MomentStart;
      } else if (value == "grid") {
        cfg.optimizer.start_strategy = StartStrategy::GridStart;
      } else {
        bad("expected lme, moment or grid");
      }
    } else if (key == "branch_threshold") {
      if (number(value, d)) {
        try {
          cfg.optimizer.policy = BranchPolicy(d);
        } catch (const InputError& e) {
          bad(e.what());
        }
      }
    }
  }
  if (!problems.empty()) {
    std::string msg = "configuration rejected:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw ConfigError(msg);
  }
  std::string canonical;
  for (const auto& [key, value] : seen) canonical += key + "=" + value + "\n";
  cfg.digest = hex64(fnv1a64(canonical));
  return cfg;
}

inline RunConfig read_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open configuration '" + path + "'");
  return parse_run_config(in);
}

}  // namespace kappa4::io
