#pragma once

// Goodness-of-fit statistics for a fitted kappa distribution: mean absolute
// gap between order statistics and fitted quantiles (MPAE), Anderson-Darling
// and Kolmogorov-Smirnov, with parametric-bootstrap p-values.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "kappa4/distribution.hpp"
#include "kappa4/error.hpp"
#include "kappa4/estimators.hpp"
#include "kappa4/parallel.hpp"
#include "kappa4/random.hpp"

namespace kappa4 {

struct GofReport {
  double mpae = 0.0;
  double ad = 0.0;
  double ks = 0.0;
  bool ad_clamped = false;  // some cdf value had to be clamped away from 0 or 1
  std::optional<double> ad_pvalue;
  std::optional<double> ks_pvalue;
  int bootstrap_reps = 0;
  int bootstrap_failures = 0;
  bool pvalues_unreliable = false;  // more than 20% of bootstrap refits failed
};

namespace detail {

inline std::vector<double> sorted_copy(std::span<const double> data, const char* where) {
  check_data(data, where);
  std::vector<double> x(data.begin(), data.end());
  std::sort(x.begin(), x.end());
  return x;
}

}  // namespace detail

inline double plotting_position(std::size_t i, std::size_t n) {
  return (static_cast<double>(i) - 0.35) / static_cast<double>(n);
}

// (1/n) sum |x_(i) - quantile((i - 0.35)/n)|.
inline double mpae(std::span<const double> data, const K4Params& p, const BranchPolicy& policy = {}) {
  const auto x = detail::sorted_copy(data, "mpae");
  const std::size_t n = x.size();
  double total = 0.0;
  for (std::size_t i = 1; i <= n; ++i) total += std::fabs(x[i - 1] - quantile(p, plotting_position(i, n), policy));
  return total / static_cast<double>(n);
}

struct AdStatistic {
  double value = 0.0;
  bool clamped = false;
};

inline AdStatistic ad_statistic_checked(std::span<const double> data, const K4Params& p,
                                        const BranchPolicy& policy = {}) {
  const auto x = detail::sorted_copy(data, "ad_statistic");
  if (x.size() < 2) throw InputError("ad_statistic: at least 2 observations required");
  constexpr double kClamp = 1e-12;
  const std::size_t n = x.size();
  AdStatistic out;
  std::vector<double> f(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double raw = cdf(p, x[i], policy);
    f[i] = std::clamp(raw, kClamp, 1.0 - kClamp);
    if (f[i] != raw) out.clamped = true;
  }
  double s = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    s += (2.0 * i - 1.0) * (std::log(f[i - 1]) + std::log1p(-f[n - i]));
  }
  out.value = -static_cast<double>(n) - s / static_cast<double>(n);
  return out;
}

inline double ad_statistic(std::span<const double> data, const K4Params& p, const BranchPolicy& policy = {}) {
  return ad_statistic_checked(data, p, policy).value;
}

// max_i max(i/n - F(x_(i)), F(x_(i)) - (i-1)/n).
inline double ks_statistic(std::span<const double> data, const K4Params& p, const BranchPolicy& policy = {}) {
  const auto x = detail::sorted_copy(data, "ks_statistic");
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 1; i <= x.size(); ++i) {
    const double f = cdf(p, x[i - 1], policy);
    d = std::max({d, static_cast<double>(i) / n - f, f - static_cast<double>(i - 1) / n});
  }
  return d;
}

inline GofReport gof_statistics(std::span<const double> data, const K4Params& p, const BranchPolicy& policy = {}) {
  GofReport r;
  r.mpae = mpae(data, p, policy);
  const auto ad = ad_statistic_checked(data, p, policy);
  r.ad = ad.value;
  r.ad_clamped = ad.clamped;
  r.ks = ks_statistic(data, p, policy);
  return r;
}

struct BootstrapPvalues {
  double ad_pvalue = 1.0;
  double ks_pvalue = 1.0;
  int reps = 0;
  int failures = 0;
  bool unreliable = false;
};

// (1 + #{boot >= observed}) / (B + 1), with B the number of usable replicates.
inline double bootstrap_pvalue(double observed, std::span<const double> boot) {
  std::size_t exceed = 0;
  for (double b : boot) exceed += (b >= observed) ? 1 : 0;
  return (1.0 + static_cast<double>(exceed)) / (static_cast<double>(boot.size()) + 1.0);
}

// Parametric bootstrap: each replicate draws n values from `fitted`, refits
// with `method`, and recomputes AD and KS against its own refit. Replicate b
// uses substream b of `seed`, so results do not depend on `workers`.
inline BootstrapPvalues bootstrap_pvalues(std::span<const double> data, const K4Params& fitted,
                                          const Estimator& method, int reps, std::uint64_t seed,
                                          unsigned workers = 1, const BranchPolicy& policy = {}) {
  if (reps < 99) throw InputError("bootstrap_pvalues: at least 99 replicates required");
  detail::check_data(data, "bootstrap_pvalues");
  const double ad_obs = ad_statistic(data, fitted, policy);
  const double ks_obs = ks_statistic(data, fitted, policy);
  struct Rep {
    bool ok = false;
    double ad = 0.0, ks = 0.0;
  };
  std::vector<Rep> out(static_cast<std::size_t>(reps));
  parallel_for(out.size(), workers, [&](std::size_t b) {
    const auto x = sample(fitted, data.size(), substream_seed(seed, b), policy);
    const auto est = method.run(x);
    if (!est.ok()) return;
    out[b] = {true, ad_statistic(x, est.fit->params, policy), ks_statistic(x, est.fit->params, policy)};
  });
  std::vector<double> ad, ks;
  BootstrapPvalues r;
  r.reps = reps;
  for (const auto& rep : out) {
    if (!rep.ok) {
      ++r.failures;
      continue;
    }
    ad.push_back(rep.ad);
    ks.push_back(rep.ks);
  }
  r.ad_pvalue = bootstrap_pvalue(ad_obs, ad);
  r.ks_pvalue = bootstrap_pvalue(ks_obs, ks);
  r.unreliable = r.failures * 5 > reps;
  return r;
}

}  // namespace kappa4
