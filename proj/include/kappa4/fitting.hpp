#pragma once

// Maximum likelihood and maximum penalized likelihood fits, observed-
// information standard errors, and return levels.
//
// The search runs in (mu, ln sigma, k, h) so the scale stays positive. Each
// start point gets a simplex search, simplex restarts from the best vertex,
// and a quasi-Newton polish; the best result over start points is kept.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kappa4/distribution.hpp"
#include "kappa4/error.hpp"
#include "kappa4/likelihood.hpp"
#include "kappa4/lmoments.hpp"
#include "kappa4/numerics.hpp"
#include "kappa4/optimize.hpp"
#include "kappa4/penalties.hpp"

namespace kappa4 {

enum class StartStrategy { LmeStart, MomentStart, GridStart };

struct OptimizerConfig {
  double rel_tolerance = 1e-10;
  int max_iterations = 2000;
  int restarts = 3;
  StartStrategy start_strategy = StartStrategy::LmeStart;
  bool compute_se = true;
  BranchPolicy policy{};

  void validate() const {
    if (!(rel_tolerance > 0.0)) throw ConfigError("OptimizerConfig: rel_tolerance must be > 0");
    if (restarts < 1) throw ConfigError("OptimizerConfig: restarts must be >= 1");
    if (max_iterations < 1) throw ConfigError("OptimizerConfig: max_iterations must be >= 1");
  }
};

namespace detail {

inline double clamp_into(double x, const ShapeRange& r) {
  const bool lo_finite = std::isfinite(r.lower), hi_finite = std::isfinite(r.upper);
  const double margin = (lo_finite && hi_finite) ? 0.05 * (r.upper - r.lower) : 0.05;
  if (lo_finite && x < r.lower + margin) x = r.lower + margin;
  if (hi_finite && x > r.upper - margin) x = r.upper - margin;
  return x;
}

// Location and scale matching the sample lambda1, lambda2 for given shapes.
inline std::optional<std::array<double, 2>> match_location_scale(const LMomentSet& lm, double k, double h,
                                                                 const BranchPolicy& policy) {
  if (!population_lmoments_exist(k, h)) return std::nullopt;
  const auto lam = std_lmoments(k, h, policy, 1.0 / 32.0);
  if (!(lam[1] > 0.0)) return std::nullopt;
  const double sigma = lm.lambda2 / lam[1];
  return std::array<double, 2>{lm.lambda1 - sigma * lam[0], sigma};
}

class FitProblem {
 public:
  FitProblem(std::span<const double> data, const PenaltyCombo& combo, const OptimizerConfig& cfg)
      : data_(data), combo_(combo), cfg_(cfg) {}

  // Objective in search coordinates (mu, ln sigma, k, h).
  double operator()(const optimize::Point<4>& t) const {
    if (!std::isfinite(t[1]) || t[1] > 700.0) return numerics::kInf;
    return penalized_nll_raw(t[0], std::exp(t[1]), t[2], t[3], data_, combo_, cfg_.policy);
  }

  std::vector<optimize::Point<4>> start_points() const {
    const LMomentSet lm = sample_lmoments(data_);
    const auto k_range = combo_.k_pen.range();
    const auto h_range = combo_.h_pen.range();
    std::vector<optimize::Point<4>> out;
    auto push = [&](double mu, double sigma, double k, double h) {
      const double kc = clamp_into(k, k_range), hc = clamp_into(h, h_range);
      if (kc != k || hc != h) {
        // Shapes moved into the penalty support; refit location and scale to match.
        if (auto ms = match_location_scale(lm, kc, hc, cfg_.policy)) {
          mu = (*ms)[0];
          sigma = (*ms)[1];
        }
      }
      if (auto p = make_feasible(mu, sigma, kc, hc)) out.push_back(*p);
    };
    auto lme_start = [&] {
      const auto lme = fit_lme_from_lmoments(lm, {}, cfg_.policy);
      if (lme.ok()) {
        const auto& p = lme.result->params;
        push(p.mu(), p.sigma(), p.k(), p.h());
      }
    };
    auto moment_start = [&] {
      const double sigma = lm.lambda2 / std::numbers::ln2;
      push(lm.lambda1 - std::numbers::egamma * sigma, sigma, 0.0, 0.0);
    };
    auto grid_start = [&] {
      std::optional<optimize::Point<4>> best;
      double best_f = numerics::kInf;
      for (double k : {-0.4, -0.2, 0.0, 0.2, 0.4}) {
        for (double h : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
          const double kc = clamp_into(k, k_range), hc = clamp_into(h, h_range);
          const auto ms = match_location_scale(lm, kc, hc, cfg_.policy);
          if (!ms) continue;
          const optimize::Point<4> t{(*ms)[0], std::log((*ms)[1]), kc, hc};
          const double f = (*this)(t);
          if (f < best_f) {
            best_f = f;
            best = t;
          }
        }
      }
      if (best) push((*best)[0], std::exp((*best)[1]), (*best)[2], (*best)[3]);
    };
    const std::array<StartStrategy, 3> cycle{StartStrategy::LmeStart, StartStrategy::MomentStart,
                                             StartStrategy::GridStart};
    const auto first = static_cast<std::size_t>(
        std::find(cycle.begin(), cycle.end(), cfg_.start_strategy) - cycle.begin());
    for (std::size_t i = 0; i < cycle.size(); ++i) {
      switch (cycle[(first + i) % cycle.size()]) {
        case StartStrategy::LmeStart: lme_start(); break;
        case StartStrategy::MomentStart: moment_start(); break;
        case StartStrategy::GridStart: grid_start(); break;
      }
    }
    return out;
  }

 private:
  // Widens the scale about the sample centre until every observation is in support.
  std::optional<optimize::Point<4>> make_feasible(double mu, double sigma, double k, double h) const {
    if (!(sigma > 0.0) || !std::isfinite(mu)) return std::nullopt;
    optimize::Point<4> t{mu, std::log(sigma), k, h};
    if (std::isfinite((*this)(t))) return t;
    const double centre = quantile_centre(mu, sigma, k, h);
    for (int i = 0; i < 40; ++i) {
      sigma *= 1.5;
      // Keep the median where it was while the scale grows.
      const double shift = centre - (mu + sigma * std_quantile_from_log(k, h, -std::numbers::ln2, cfg_.policy));
      t = {mu + shift, std::log(sigma), k, h};
      if (std::isfinite((*this)(t))) return t;
    }
    return std::nullopt;
  }

  double quantile_centre(double mu, double sigma, double k, double h) const {
    return mu + sigma * std_quantile_from_log(k, h, -std::numbers::ln2, cfg_.policy);
  }

  std::span<const double> data_;
  const PenaltyCombo& combo_;
  const OptimizerConfig& cfg_;
};

}  // namespace detail

// Covariance estimate from the inverse of a central-difference Hessian of
// `objective` at `theta`. Empty when the Hessian cannot be formed or is not
// positive definite.
template <std::size_t N, class Fn>
std::optional<Eigen::Matrix<double, int(N), int(N)>> observed_covariance(Fn&& objective,
                                                                          const std::array<double, N>& theta) {
  using Mat = Eigen::Matrix<double, int(N), int(N)>;
  std::array<double, N> step{};
  for (std::size_t i = 0; i < N; ++i) step[i] = std::max(1e-5, 1e-5 * std::fabs(theta[i]));
  auto at = [&](std::size_t i, double si, std::size_t j, double sj) {
    std::array<double, N> p = theta;
    p[i] += si * step[i];
    p[j] += sj * step[j];
    return objective(p);
  };
  const double f0 = objective(theta);
  if (!std::isfinite(f0)) return std::nullopt;
  Mat hess;
  for (std::size_t i = 0; i < N; ++i) {
    std::array<double, N> pp = theta, pm = theta;
    pp[i] += step[i];
    pm[i] -= step[i];
    const double fp = objective(pp), fm = objective(pm);
    if (!std::isfinite(fp) || !std::isfinite(fm)) return std::nullopt;
    hess(i, i) = (fp - 2.0 * f0 + fm) / (step[i] * step[i]);
    for (std::size_t j = 0; j < i; ++j) {
      const double fpp = at(i, 1, j, 1), fpm = at(i, 1, j, -1), fmp = at(i, -1, j, 1), fmm = at(i, -1, j, -1);
      if (!std::isfinite(fpp) || !std::isfinite(fpm) || !std::isfinite(fmp) || !std::isfinite(fmm)) {
        return std::nullopt;
      }
      hess(i, j) = hess(j, i) = (fpp - fpm - fmp + fmm) / (4.0 * step[i] * step[j]);
    }
  }
  Eigen::LLT<Mat> llt(hess);
  if (llt.info() != Eigen::Success) return std::nullopt;
  Mat cov = llt.solve(Mat::Identity());
  for (std::size_t i = 0; i < N; ++i) {
    if (!(cov(i, i) > 0.0) || !std::isfinite(cov(i, i))) return std::nullopt;
  }
  return cov;
}

template <std::size_t N, class Fn>
std::optional<std::array<double, N>> hessian_standard_errors(Fn&& objective, const std::array<double, N>& theta) {
  const auto cov = observed_covariance<N>(objective, theta);
  if (!cov) return std::nullopt;
  std::array<double, N> se{};
  for (std::size_t i = 0; i < N; ++i) se[i] = std::sqrt((*cov)(i, i));
  return se;
}

// Covariance of (mu, sigma, k, h) from the fitted (penalized) objective.
inline std::optional<Eigen::Matrix4d> parameter_covariance(const K4Params& p, std::span<const double> data,
                                                           const PenaltyCombo& combo,
                                                           const BranchPolicy& policy = {}) {
  auto objective = [&](const std::array<double, 4>& t) {
    return detail::penalized_nll_raw(t[0], t[1], t[2], t[3], data, combo, policy);
  };
  return observed_covariance<4>(objective, {p.mu(), p.sigma(), p.k(), p.h()});
}

inline std::optional<std::array<double, 4>> standard_errors(const FitResult& result, std::span<const double> data,
                                                            const PenaltyCombo& combo,
                                                            const BranchPolicy& policy = {}) {
  if (!result.converged) return std::nullopt;
  const auto cov = parameter_covariance(result.params, data, combo, policy);
  if (!cov) return std::nullopt;
  return std::array<double, 4>{std::sqrt((*cov)(0, 0)), std::sqrt((*cov)(1, 1)), std::sqrt((*cov)(2, 2)),
                               std::sqrt((*cov)(3, 3))};
}

inline FitResult fit_mple(std::span<const double> data, const PenaltyCombo& combo, const OptimizerConfig& cfg = {}) {
  cfg.validate();
  if (data.size() < 5) throw InputError("fit: at least 5 observations required");
  detail::check_data(data, "fit");
  const detail::FitProblem problem(data, combo, cfg);
  const auto starts = problem.start_points();
  const std::string method = combo.is_none() ? "MLE" : combo.name();
  if (starts.empty()) {
    const LMomentSet lm = sample_lmoments(data);
    const double sigma = lm.lambda2 / std::numbers::ln2;
    return FitResult{K4Params(lm.lambda1, sigma, 0.0, 0.0), std::nullopt, numerics::kInf, numerics::kInf,
                     false, 0, method};
  }

  optimize::SimplexOptions sopt;
  sopt.f_rel_tol = cfg.rel_tolerance;
  sopt.max_iterations = cfg.max_iterations;

  optimize::Minimum<4> best;
  bool best_converged = false;
  int iterations = 0;
  const std::size_t n_starts = std::min<std::size_t>(starts.size(), static_cast<std::size_t>(cfg.restarts));
  for (std::size_t s = 0; s < n_starts; ++s) {
    const auto& t0 = starts[s];
    const double sigma0 = std::exp(t0[1]);
    optimize::Point<4> step{0.1 * sigma0, 0.1, 0.05, 0.1};
    auto run = optimize::nelder_mead<4>(problem, t0, step, sopt);
    iterations += run.iterations;
    // Restart the simplex at the best vertex until it stops improving.
    for (int r = 0; r < 3; ++r) {
      const double sig = std::exp(run.x[1]);
      const optimize::Point<4> restart_step{0.02 * sig, 0.02, 0.01, 0.02};
      auto again = optimize::nelder_mead<4>(problem, run.x, restart_step, sopt);
      iterations += again.iterations;
      const bool improved = again.f < run.f - cfg.rel_tolerance * std::max(1.0, std::fabs(run.f));
      if (again.f <= run.f) {
        again.converged = again.converged || run.converged;
        run = again;
      }
      if (!improved) break;
    }
    auto polish = optimize::quasi_newton<4>(problem, run.x);
    iterations += polish.iterations;
    if (polish.f < run.f) {
      run.x = polish.x;
      run.f = polish.f;
    }
    if (run.f < best.f) {
      best = run;
      best_converged = run.converged && std::isfinite(run.f);
    }
  }

  const K4Params params(best.x[0], std::exp(best.x[1]), best.x[2], best.x[3]);
  FitResult fit{params, std::nullopt, detail::nll_raw(params.mu(), params.sigma(), params.k(), params.h(), data,
                                                      cfg.policy),
                best.f, best_converged && std::isfinite(best.f), iterations, method};
  if (fit.converged && cfg.compute_se) fit.se = standard_errors(fit, data, combo, cfg.policy);
  return fit;
}

inline FitResult fit_mle(std::span<const double> data, const OptimizerConfig& cfg = {}) {
  return fit_mple(data, PenaltyCombo::none(), cfg);
}

inline double return_level(const K4Params& p, double years, const BranchPolicy& policy = {}) {
  if (!(years > 1.0)) throw InputError("return_level: return period must be > 1");
  return quantile(p, 1.0 - 1.0 / years, policy);
}

// Delta-method standard error of the return level for a parameter covariance.
inline std::optional<double> return_level_se(const K4Params& p, double years, const Eigen::Matrix4d& cov,
                                             const BranchPolicy& policy = {}) {
  const double prob = 1.0 - 1.0 / years;
  const std::array<double, 4> theta{p.mu(), p.sigma(), p.k(), p.h()};
  Eigen::Vector4d grad;
  for (int i = 0; i < 4; ++i) {
    const double step = 1e-6 * std::max(1.0, std::fabs(theta[i]));
    auto tp = theta, tm = theta;
    tp[i] += step;
    tm[i] -= step;
    if (!(tm[1] > 0.0)) return std::nullopt;
    const double qp = quantile(K4Params(tp[0], tp[1], tp[2], tp[3]), prob, policy);
    const double qm = quantile(K4Params(tm[0], tm[1], tm[2], tm[3]), prob, policy);
    grad(i) = (qp - qm) / (2.0 * step);
  }
  const double var = grad.dot(cov * grad);
  if (!(var >= 0.0) || !std::isfinite(var)) return std::nullopt;
  return std::sqrt(var);
}

}  // namespace kappa4
