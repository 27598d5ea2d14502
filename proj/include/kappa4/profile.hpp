#pragma once

// Profile-likelihood confidence interval for a T-year return level.
//
// The location is eliminated through mu = x_T - sigma * z(k, h), where z is
// the standard quantile at F = 1 - 1/T, so x_T becomes a free parameter. For
// fixed x_T the penalized NLL is minimised over (ln sigma, k, h). The interval
// is the set of x_T whose deviance 2 (profile - minimum) stays below the
// chi-square(1) cutoff. A grid of x_T around the estimate locates the
// crossings, then bisection refines each endpoint.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "kappa4/distribution.hpp"
#include "kappa4/error.hpp"
#include "kappa4/fitting.hpp"
#include "kappa4/likelihood.hpp"
#include "kappa4/numerics.hpp"
#include "kappa4/optimize.hpp"
#include "kappa4/penalties.hpp"

namespace kappa4 {

struct ProfileOptions {
  int grid_points = 101;       // over estimate +- span_se standard errors
  double span_se = 6.0;
  int max_extensions = 6;      // each adds another span on a side that has not crossed
  double cutoff_tolerance = 1e-4;
  OptimizerConfig optimizer{};

  void validate() const {
    if (grid_points < 3) throw ConfigError("ProfileOptions: grid_points must be >= 3");
    if (!(span_se > 0.0)) throw ConfigError("ProfileOptions: span_se must be > 0");
    if (max_extensions < 0) throw ConfigError("ProfileOptions: max_extensions must be >= 0");
    if (!(cutoff_tolerance > 0.0)) throw ConfigError("ProfileOptions: cutoff_tolerance must be > 0");
    optimizer.validate();
  }
};

// Minimiser of the profile at one x_T, in (ln sigma, k, h).
struct ProfilePoint {
  double x_t = 0.0;
  double objective = numerics::kInf;  // minimised penalized NLL
  double deviance = numerics::kInf;   // 2 (objective - overall minimum)
  std::array<double, 3> argmin{};
};

struct ProfileInterval {
  double estimate = 0.0;
  double lower = -numerics::kInf;
  double upper = numerics::kInf;
  bool lower_open = false;  // cutoff not bracketed below the estimate
  bool upper_open = false;
  double level = 0.95;
  double cutoff = 0.0;
  double minimum = numerics::kInf;
  double lower_deviance = numerics::kInf;
  double upper_deviance = numerics::kInf;
  // Some profile point has a lower objective than the fitted optimum, so the
  // interval is the region of the local optimum that contains the estimate.
  bool below_reference = false;
  // The tracked profile jumps across the cutoff, so no point meets it; the
  // side where that happened is reported open.
  bool discontinuous = false;
  std::vector<ProfilePoint> trace;  // sorted by x_t

  bool open() const { return lower_open || upper_open; }
};

// Evaluates the profiled penalized NLL of the return level.
class ReturnLevelProfile {
 public:
  ReturnLevelProfile(std::span<const double> data, double years, const PenaltyCombo& combo,
                     const OptimizerConfig& cfg = {})
      : data_(data), combo_(combo), cfg_(cfg) {
    if (!(years > 1.0)) throw InputError("profile: return period must be > 1");
    detail::check_data(data, "profile");
    log_f_ = std::log1p(-1.0 / years);
  }

  // Penalized NLL at (x_T, ln sigma, k, h).
  double objective(double x_t, const std::array<double, 3>& t) const {
    if (!std::isfinite(t[0]) || t[0] > 700.0) return numerics::kInf;
    const double sigma = std::exp(t[0]);
    const double z = detail::std_quantile_from_log(t[1], t[2], log_f_, cfg_.policy);
    if (!std::isfinite(z)) return numerics::kInf;
    return detail::penalized_nll_raw(x_t - sigma * z, sigma, t[1], t[2], data_, combo_, cfg_.policy);
  }

  // Minimises over (ln sigma, k, h) from each of the given starts; the best is kept.
  ProfilePoint minimize(double x_t, std::span<const std::array<double, 3>> starts) const {
    ProfilePoint best;
    best.x_t = x_t;
    auto f = [&](const optimize::Point<3>& t) { return objective(x_t, t); };
    optimize::SimplexOptions sopt;
    sopt.f_rel_tol = cfg_.rel_tolerance;
    sopt.max_iterations = cfg_.max_iterations;
    for (const auto& s : starts) {
      const auto t0 = feasible_start(x_t, s);
      if (!t0) continue;
      auto run = optimize::nelder_mead<3>(f, *t0, {0.1, 0.05, 0.1}, sopt);
      for (int r = 0; r < 2; ++r) {
        auto again = optimize::nelder_mead<3>(f, run.x, {0.02, 0.01, 0.02}, sopt);
        const bool improved = again.f < run.f - cfg_.rel_tolerance * std::max(1.0, std::fabs(run.f));
        if (again.f <= run.f) run = again;
        if (!improved) break;
      }
      const auto polish = optimize::quasi_newton<3>(f, run.x);
      if (polish.f < run.f) {
        run.x = polish.x;
        run.f = polish.f;
      }
      if (run.f < best.objective) {
        best.objective = run.f;
        best.argmin = run.x;
      }
    }
    return best;
  }

  ProfilePoint minimize(double x_t, const std::array<double, 3>& start) const {
    return minimize(x_t, std::span<const std::array<double, 3>>(&start, 1));
  }

 private:
  // Grows sigma until every observation is inside the support for this x_T.
  std::optional<std::array<double, 3>> feasible_start(double x_t, std::array<double, 3> t) const {
    for (int i = 0; i < 40; ++i) {
      if (std::isfinite(objective(x_t, t))) return t;
      t[0] += std::log(1.5);
    }
    return std::nullopt;
  }

  std::span<const double> data_;
  PenaltyCombo combo_;
  OptimizerConfig cfg_;
  double log_f_ = 0.0;
};

// `fit` must be a converged fit of `data` under `combo`. The deviance is taken
// relative to the fitted optimum (or the profile at the estimate, if lower),
// and each endpoint is the first cutoff crossing walking out from the estimate.
inline ProfileInterval profile_likelihood_ci(std::span<const double> data, double years, double level,
                                             const PenaltyCombo& combo, const FitResult& fit,
                                             const ProfileOptions& opt = {}) {
  opt.validate();
  if (!(level > 0.0 && level < 1.0)) throw InputError("profile: level must be in (0, 1)");
  if (!fit.converged) throw InputError("profile: requires a converged fit");
  const ReturnLevelProfile profile(data, years, combo, opt.optimizer);
  const BranchPolicy& policy = opt.optimizer.policy;
  const K4Params& p = fit.params;

  ProfileInterval out;
  out.level = level;
  out.cutoff = numerics::chi_square_quantile(level, 1.0);
  out.estimate = return_level(p, years, policy);

  const std::array<double, 3> fitted{std::log(p.sigma()), p.k(), p.h()};
  ProfilePoint centre = profile.minimize(out.estimate, fitted);
  out.minimum = std::min(fit.penalized_nll, centre.objective);

  double se = 0.0;
  if (const auto cov = parameter_covariance(p, data, combo, policy)) {
    if (const auto s = return_level_se(p, years, *cov, policy)) se = *s;
  }
  if (!(se > 0.0) || !std::isfinite(se)) se = 0.1 * std::max({p.sigma(), std::fabs(out.estimate), 1e-8});

  const double spacing = 2.0 * opt.span_se * se / (opt.grid_points - 1);
  const int half = (opt.grid_points - 1) / 2;

  auto dev = [&](const ProfilePoint& q) { return 2.0 * (q.objective - out.minimum); };

  // Walks outward from the estimate, warm-starting each point from its
  // neighbour, until the deviance crosses the cutoff or the range runs out.
  // A point below the reference before any crossing means the walk has left
  // the basin of the fitted optimum (the likelihood is unbounded when h > 1
  // lets the density diverge at a finite lower end); that side stays open.
  struct Walk {
    std::vector<ProfilePoint> pts;
    bool crossed = false;
    bool escaped = false;
  };
  auto walk = [&](double direction) {
    Walk w;
    ProfilePoint prev = centre;
    const int limit = half * (1 + opt.max_extensions);
    for (int i = 1; i <= limit; ++i) {
      const double x = out.estimate + direction * spacing * i;
      const std::array<std::array<double, 3>, 2> starts{prev.argmin, fitted};
      ProfilePoint q = profile.minimize(x, starts);
      w.pts.push_back(q);
      if (std::isfinite(q.objective)) prev = q;
      if (dev(q) > out.cutoff) w.crossed = true;
      if (!w.crossed && dev(q) < -2.0 * opt.cutoff_tolerance) {
        w.escaped = true;
        out.below_reference = true;
        break;
      }
      // Keep going to the end of the base grid so the trace spans the default range.
      if (w.crossed && i >= half) break;
    }
    return w;
  };
  Walk down = walk(-1.0);
  Walk up = walk(1.0);
  for (const auto* w : {&down, &up}) {
    for (const auto& q : w->pts) {
      if (dev(q) < -2.0 * opt.cutoff_tolerance) out.below_reference = true;
    }
  }

  auto refine = [&](const Walk& w, bool& open, double& bound, double& bound_dev, double direction) {
    // First crossing outward from the estimate.
    const ProfilePoint* inside = &centre;
    const ProfilePoint* outside = nullptr;
    for (const auto& q : w.pts) {
      if (dev(q) > out.cutoff) {
        outside = &q;
        break;
      }
      if (std::isfinite(q.objective)) inside = &q;
    }
    if (outside == nullptr || w.escaped) {
      open = true;
      bound = direction * numerics::kInf;
      bound_dev = w.pts.empty() ? 0.0 : dev(w.pts.back());
      return;
    }
    double a = inside->x_t, b = outside->x_t;
    ProfilePoint qa = *inside;
    ProfilePoint best = *outside;
    bool met = false;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (a + b);
      const std::array<std::array<double, 3>, 2> starts{qa.argmin, outside->argmin};
      ProfilePoint q = profile.minimize(mid, starts);
      best = q;
      const double d = dev(q);
      if (std::fabs(d - out.cutoff) <= opt.cutoff_tolerance) {
        met = true;
        break;
      }
      if (d < out.cutoff) {
        a = mid;
        qa = q;
      } else {
        b = mid;
      }
      if (std::fabs(b - a) <= 1e-14 * std::max(1.0, std::fabs(mid))) break;
    }
    out.trace.push_back(best);
    bound_dev = dev(best);
    if (!met) {
      // Bracket collapsed onto a jump: the branch followed from the estimate ends here.
      open = true;
      out.discontinuous = true;
      bound = direction * numerics::kInf;
      return;
    }
    bound = best.x_t;
  };
  refine(down, out.lower_open, out.lower, out.lower_deviance, -1.0);
  refine(up, out.upper_open, out.upper, out.upper_deviance, 1.0);

  out.trace.push_back(centre);
  for (const auto* w : {&down, &up}) out.trace.insert(out.trace.end(), w->pts.begin(), w->pts.end());
  for (auto& q : out.trace) q.deviance = dev(q);
  std::sort(out.trace.begin(), out.trace.end(),
            [](const ProfilePoint& a, const ProfilePoint& b) { return a.x_t < b.x_t; });
  return out;
}

}  // namespace kappa4
