#pragma once

// Monte Carlo comparison of quantile estimators: repeated samples from a
// known kappa distribution, every method fitted to the same sample, and the
// relative bias and relative root-mean-square error of the fitted quantiles
// at a set of probability levels.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "kappa4/distribution.hpp"
#include "kappa4/error.hpp"
#include "kappa4/estimators.hpp"
#include "kappa4/fitting.hpp"
#include "kappa4/parallel.hpp"
#include "kappa4/random.hpp"

namespace kappa4 {

struct SimConfig {
  K4Params true_params{0.0, 1.0, -0.2, -0.2};
  std::size_t n = 30;
  int reps = 1000;
  std::vector<double> quantile_levels{0.90, 0.95, 0.99, 0.995, 0.999};
  std::vector<std::string> methods{"MLE", "LME", "MPLE.MSo(k)MSo(h)"};
  std::uint64_t seed = 20240101;
  OptimizerConfig optimizer{};
  unsigned workers = 0;     // 0 = hardware concurrency; results do not depend on it
  bool keep_trials = true;  // keep the per-trial estimates in the report

  // True quantiles at each level. Throws ConfigError for an invalid setup,
  // including a true quantile of exactly zero where relative errors are undefined.
  std::vector<double> validate() const {
    if (reps < 1) throw ConfigError("SimConfig: reps must be >= 1");
    if (n < 5) throw ConfigError("SimConfig: n must be >= 5");
    if (quantile_levels.empty()) throw ConfigError("SimConfig: at least one quantile level required");
    if (methods.empty()) throw ConfigError("SimConfig: at least one method required");
    optimizer.validate();
    std::vector<double> q;
    for (double level : quantile_levels) {
      if (!(level > 0.0 && level < 1.0)) throw ConfigError("SimConfig: quantile levels must lie in (0, 1)");
      q.push_back(quantile(true_params, level, optimizer.policy));
      if (q.back() == 0.0) throw ConfigError("SimConfig: true quantile is zero at level " + std::to_string(level));
    }
    return q;
  }
};

struct SimCell {
  double level = 0.0;
  double q_true = 0.0;
  bool available = false;        // false when no replicate of this method converged
  bool ill_conditioned = false;  // |q_true| < 1e-3, relative errors blow up
  double rbias = 0.0;
  double rrmse = 0.0;
  double msre = 0.0;  // mean squared relative error, i.e. rrmse squared
};

struct MethodSummary {
  std::string method;
  int converged = 0;  // M
  int failures = 0;
  std::vector<SimCell> cells;  // one per quantile level
};

struct TrialRecord {
  int rep = 0;
  std::size_t method = 0;  // index into SimReport::methods
  bool converged = false;
  std::optional<K4Params> params;
  std::string failure;
};

struct SimReport {
  SimConfig config;
  std::vector<double> q_true;
  std::vector<MethodSummary> methods;
  std::vector<TrialRecord> trials;  // rep-major; empty unless config.keep_trials

  const MethodSummary* find(std::string_view name) const {
    for (const auto& m : methods) {
      if (m.method == name) return &m;
    }
    return nullptr;
  }

  // Estimates of one method across converged replicates, in rep order.
  std::vector<K4Params> estimates(std::size_t method) const {
    std::vector<K4Params> out;
    for (const auto& t : trials) {
      if (t.method == method && t.converged && t.params) out.push_back(*t.params);
    }
    return out;
  }
};

// Runs the study with explicitly supplied estimators (cfg.methods is ignored).
inline SimReport run_study(const SimConfig& cfg, const std::vector<Estimator>& estimators) {
  const auto q_true = cfg.validate();
  if (estimators.empty()) throw ConfigError("SimConfig: at least one method required");
  const std::size_t n_methods = estimators.size();
  const std::size_t n_levels = q_true.size();
  const auto reps = static_cast<std::size_t>(cfg.reps);

  std::vector<TrialRecord> trials(reps * n_methods);
  parallel_for(reps, cfg.workers, [&](std::size_t rep) {
    // One sample per rep, shared by every method.
    const auto x = sample(cfg.true_params, cfg.n, substream_seed(cfg.seed, rep), cfg.optimizer.policy);
    for (std::size_t m = 0; m < n_methods; ++m) {
      auto& t = trials[rep * n_methods + m];
      t.rep = static_cast<int>(rep);
      t.method = m;
      const auto est = estimators[m].run(x);
      t.converged = est.ok();
      if (est.fit) t.params = est.fit->params;
      t.failure = est.failure;
    }
  });

  SimReport report;
  report.config = cfg;
  report.q_true = q_true;
  for (std::size_t m = 0; m < n_methods; ++m) {
    MethodSummary s;
    s.method = estimators[m].name;
    std::vector<std::vector<double>> errors(n_levels);
    for (std::size_t rep = 0; rep < reps; ++rep) {
      const auto& t = trials[rep * n_methods + m];
      if (!t.converged) {
        ++s.failures;
        continue;
      }
      ++s.converged;
      for (std::size_t j = 0; j < n_levels; ++j) {
        const double q_e = quantile(*t.params, cfg.quantile_levels[j], cfg.optimizer.policy);
        errors[j].push_back((q_e - q_true[j]) / q_true[j]);
      }
    }
    for (std::size_t j = 0; j < n_levels; ++j) {
      SimCell c;
      c.level = cfg.quantile_levels[j];
      c.q_true = q_true[j];
      c.ill_conditioned = std::fabs(q_true[j]) < 1e-3;
      if (s.converged > 0) {
        const double m_count = static_cast<double>(s.converged);
        double mean = 0.0, sq = 0.0;
        for (double e : errors[j]) {
          mean += e;
          sq += e * e;
        }
        mean /= m_count;
        double var = 0.0;
        for (double e : errors[j]) var += (e - mean) * (e - mean);
        var /= m_count;
        c.available = true;
        c.rbias = mean;
        // sqrt(mean^2 + var) equals sqrt(mean of squares) and cannot drop below |rbias| through rounding.
        c.rrmse = std::sqrt(mean * mean + var);
        c.msre = sq / m_count;
      }
      s.cells.push_back(c);
    }
    report.methods.push_back(std::move(s));
  }
  if (cfg.keep_trials) report.trials = std::move(trials);
  return report;
}

inline SimReport run_study(const SimConfig& cfg) {
  cfg.validate();
  std::vector<Estimator> estimators;
  for (const auto& name : cfg.methods) estimators.push_back(make_estimator(name, cfg.optimizer));
  return run_study(cfg, estimators);
}

struct CampaignEntry {
  SimConfig config;  // with the derived seed
  std::optional<SimReport> report;
  std::string error;  // set when this configuration failed
};

// Runs every configuration; configuration i uses substream i of `seed`, which
// is distinct for distinct i. A failing configuration is recorded and skipped.
inline std::vector<CampaignEntry> campaign(const std::vector<SimConfig>& grid, std::uint64_t seed) {
  if (grid.empty()) throw InputError("campaign: grid must be nonempty");
  std::vector<CampaignEntry> out;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CampaignEntry e;
    e.config = grid[i];
    e.config.seed = substream_seed(seed, i);
    try {
      e.report = run_study(e.config);
    } catch (const std::exception& ex) {
      e.error = ex.what();
    }
    out.push_back(std::move(e));
  }
  return out;
}

namespace detail {

inline std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

}  // namespace detail

// One row per (configuration, method, level).
inline std::string campaign_csv(const std::vector<CampaignEntry>& entries) {
  std::ostringstream os;
  os << "config,mu,sigma,k,h,n,reps,seed,method,level,q_true,M,failures,rbias,rrmse,msre,available,"
        "ill_conditioned,error\n";
  auto g = [](double v) { return detail::fmt("%.17g", v); };
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    const auto& p = e.config.true_params;
    const std::string head = std::to_string(i) + "," + g(p.mu()) + "," + g(p.sigma()) + "," + g(p.k()) + "," +
                             g(p.h()) + "," + std::to_string(e.config.n) + "," + std::to_string(e.config.reps) +
                             "," + std::to_string(e.config.seed) + ",";
    if (!e.report) {
      os << head << ",,,,,,,,,,\"" << e.error << "\"\n";
      continue;
    }
    for (const auto& m : e.report->methods) {
      for (const auto& c : m.cells) {
        os << head << m.method << "," << g(c.level) << "," << g(c.q_true) << "," << m.converged << ","
           << m.failures << ",";
        if (c.available) {
          os << g(c.rbias) << "," << g(c.rrmse) << "," << g(c.msre) << ",1,";
        } else {
          os << ",,,0,";
        }
        os << (c.ill_conditioned ? 1 : 0) << ",\n";
      }
    }
  }
  return os.str();
}

// Aligned text: per configuration, an RBIAS and an RRMSE row for each method,
// one column per quantile level.
inline std::string report_table(const SimReport& r) {
  std::ostringstream os;
  const auto& p = r.config.true_params;
  os << "k = " << detail::fmt("%g", p.k()) << ", h = " << detail::fmt("%g", p.h()) << ", mu = "
     << detail::fmt("%g", p.mu()) << ", sigma = " << detail::fmt("%g", p.sigma()) << ", n = " << r.config.n
     << ", reps = " << r.config.reps << ", seed = " << r.config.seed << "\n";
  std::size_t width = 6;
  for (const auto& m : r.methods) width = std::max(width, m.method.size());
  auto pad = [](std::string s, std::size_t w) {
    s.resize(std::max(s.size(), w), ' ');
    return s;
  };
  os << pad("Method", width) << "  " << pad("M", 5) << "  " << pad("Stat", 5);
  for (const auto& c : r.methods.empty() ? std::vector<SimCell>{} : r.methods.front().cells) {
    os << "  " << detail::fmt("%9.3f", c.level);
  }
  os << "\n";
  for (const auto& m : r.methods) {
    const char* stats[] = {"RBIAS", "RRMSE", "MSRE"};
    for (int s = 0; s < 3; ++s) {
      os << pad(s == 0 ? m.method : "", width) << "  " << pad(s == 0 ? std::to_string(m.converged) : "", 5)
         << "  " << pad(stats[s], 5);
      for (const auto& c : m.cells) {
        const double v = s == 0 ? c.rbias : s == 1 ? c.rrmse : c.msre;
        os << "  " << (c.available ? detail::fmt("%9.4f", v) : std::string("       NA"))
           << (c.ill_conditioned ? "*" : "");
      }
      os << "\n";
    }
  }
  return os.str();
}

inline std::string campaign_table(const std::vector<CampaignEntry>& entries) {
  std::ostringstream os;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i > 0) os << "\n";
    if (entries[i].report) {
      os << report_table(*entries[i].report);
    } else {
      os << "configuration " << i << " failed: " << entries[i].error << "\n";
    }
  }
  return os.str();
}

}  // namespace kappa4
