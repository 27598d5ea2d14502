#pragma once

// Sample and population L-moments and the L-moment estimator.
//
// Population L-moments are integrals of the quantile function against
// shifted Legendre polynomials, lambda_r = int_0^1 x(F) P*_{r-1}(F) dF,
// evaluated with a fixed double-exponential rule. The estimator matches
// (tau3, tau4) by a damped Newton iteration and then recovers location and
// scale from lambda1 and lambda2. Failures are reported, never papered over.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "kappa4/distribution.hpp"
#include "kappa4/error.hpp"
#include "kappa4/likelihood.hpp"
#include "kappa4/numerics.hpp"

namespace kappa4 {

struct LMomentSet {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double tau3 = 0.0;
  double tau4 = 0.0;

  // General bounds every distribution with finite mean satisfies.
  bool within_general_bounds() const {
    return lambda2 > 0.0 && std::fabs(tau3) < 1.0 && tau4 < 1.0 && tau4 >= (5.0 * tau3 * tau3 - 1.0) / 4.0;
  }
};

enum class LmeFailure { None, RootSolveDiverged, TauOutsideFeasible };

struct LmeOutcome {
  std::optional<FitResult> result;
  LmeFailure failure_reason = LmeFailure::None;

  bool ok() const { return result.has_value(); }
};

inline const char* to_string(LmeFailure f) {
  switch (f) {
    case LmeFailure::None: return "NONE";
    case LmeFailure::RootSolveDiverged: return "ROOT_SOLVE_DIVERGED";
    case LmeFailure::TauOutsideFeasible: return "TAU_OUTSIDE_FEASIBLE";
  }
  return "NONE";
}

// Unbiased probability-weighted-moment estimators b0..b3.
inline LMomentSet sample_lmoments(std::span<const double> data) {
  const std::size_t n = data.size();
  if (n < 4) throw InputError("sample_lmoments: at least 4 observations required");
  for (double x : data) {
    if (!std::isfinite(x)) throw InputError("sample_lmoments: data must be finite");
  }
  std::vector<double> xs(data.begin(), data.end());
  std::sort(xs.begin(), xs.end());
  const double nd = static_cast<double>(n);
  double b0 = 0.0, b1 = 0.0, b2 = 0.0, b3 = 0.0;
  for (std::size_t idx = 0; idx < n; ++idx) {
    const double i = static_cast<double>(idx);  // i = rank - 1
    const double w1 = i / (nd - 1.0);
    const double w2 = w1 * (i - 1.0) / (nd - 2.0);
    const double w3 = w2 * (i - 2.0) / (nd - 3.0);
    b0 += xs[idx];
    b1 += w1 * xs[idx];
    b2 += w2 * xs[idx];
    b3 += w3 * xs[idx];
  }
  b0 /= nd;
  b1 /= nd;
  b2 /= nd;
  b3 /= nd;
  LMomentSet out;
  out.lambda1 = b0;
  out.lambda2 = 2.0 * b1 - b0;
  if (!(out.lambda2 > 0.0) || xs.front() == xs.back()) {
    throw DegenerateError("sample_lmoments: data have zero dispersion");
  }
  const double l3 = 6.0 * b2 - 6.0 * b1 + b0;
  const double l4 = 20.0 * b3 - 30.0 * b2 + 12.0 * b1 - b0;
  out.tau3 = l3 / out.lambda2;
  out.tau4 = l4 / out.lambda2;
  return out;
}

// True when lambda_1..lambda_4 are finite: k > -1 and, for h < 0, k < -1/h.
inline bool population_lmoments_exist(double k, double h) {
  if (!(k > -1.0)) return false;
  if (h < 0.0 && !(k * h > -1.0)) return false;
  return true;
}

namespace detail {

struct Moments4 {
  std::array<double, 4> v{};
  friend Moments4 operator+(const Moments4& a, const Moments4& b) {
    return {{a.v[0] + b.v[0], a.v[1] + b.v[1], a.v[2] + b.v[2], a.v[3] + b.v[3]}};
  }
  friend Moments4 operator*(double w, const Moments4& a) {
    return {{w * a.v[0], w * a.v[1], w * a.v[2], w * a.v[3]}};
  }
};

// lambda_1..lambda_4 of the standardised distribution (mu = 0, sigma = 1).
inline std::array<double, 4> std_lmoments(double k, double h, const BranchPolicy& policy, double step) {
  const Moments4 m = numerics::integrate_unit_interval(
      [&](double u, double u_c) {
        const double log_u = u < 0.5 ? std::log(u) : std::log1p(-u_c);
        const double x = std_quantile_from_log(k, h, log_u, policy);
        // Shifted Legendre polynomials P*_1..P*_3 written in u and 1 - u.
        const double p1 = u - u_c;
        const double p2 = 1.0 - 6.0 * u * u_c;
        const double p3 = p1 * (1.0 - 10.0 * u * u_c);
        return Moments4{{x, x * p1, x * p2, x * p3}};
      },
      step);
  return m.v;
}

}  // namespace detail

inline LMomentSet population_lmoments(const K4Params& p, const BranchPolicy& policy = {},
                                      double step = 1.0 / 32.0) {
  if (!population_lmoments_exist(p.k(), p.h())) {
    throw NonexistentMomentError("population_lmoments: requires k > -1 and, for h < 0, k < -1/h");
  }
  const auto lam = detail::std_lmoments(p.k(), p.h(), policy, step);
  LMomentSet out;
  out.lambda1 = p.mu() + p.sigma() * lam[0];
  out.lambda2 = p.sigma() * lam[1];
  out.tau3 = lam[2] / lam[1];
  out.tau4 = lam[3] / lam[1];
  return out;
}

namespace detail {

// Region searched by the estimating equations: below the generalized
// logistic line (h > -1), finite L-moments, and a generous upper bound on h.
inline bool lme_domain(double k, double h) {
  return h > -1.0 && h < 50.0 && k < 50.0 && population_lmoments_exist(k, h);
}

inline std::array<double, 2> tau_pair(double k, double h, const BranchPolicy& policy) {
  const auto lam = std_lmoments(k, h, policy, 1.0 / 32.0);
  return {lam[2] / lam[1], lam[3] / lam[1]};
}

struct TauGridPoint {
  double k;
  double h;
  double tau3;
  double tau4;
};

// (tau3, tau4) on k in [-0.9, 0.9] x h in [-1.2, 1.2], 21 x 25 points; only
// points inside the solver domain are kept. Data independent, built once.
inline const std::vector<TauGridPoint>& tau_grid() {
  static const std::vector<TauGridPoint> grid = [] {
    std::vector<TauGridPoint> g;
    const BranchPolicy policy;
    for (int i = 0; i <= 20; ++i) {
      const double k = -0.9 + 0.09 * i;
      for (int j = 0; j <= 24; ++j) {
        const double h = -1.2 + 0.1 * j;
        if (!lme_domain(k, h)) continue;
        const auto t = tau_pair(k, h, policy);
        g.push_back({k, h, t[0], t[1]});
      }
    }
    return g;
  }();
  return grid;
}

struct NewtonResult {
  bool converged = false;
  double k = 0.0;
  double h = 0.0;
  int iterations = 0;
};

// Damped Newton on tau(k, h) = target with a central-difference Jacobian.
inline NewtonResult solve_tau_equations(double t3, double t4, double k0, double h0,
                                        const BranchPolicy& policy) {
  constexpr int kMaxIter = 100;
  constexpr double kResidualTol = 1e-11;
  constexpr double kStepFloor = 1e-13;
  constexpr double kFd = 1e-6;
  NewtonResult out{false, k0, h0, 0};
  double k = k0, h = h0;
  auto residual = [&](double kk, double hh) {
    const auto t = tau_pair(kk, hh, policy);
    return std::array<double, 2>{t[0] - t3, t[1] - t4};
  };
  auto norm = [](const std::array<double, 2>& r) { return std::max(std::fabs(r[0]), std::fabs(r[1])); };
  std::array<double, 2> r = residual(k, h);
  for (int it = 1; it <= kMaxIter; ++it) {
    out.iterations = it;
    if (norm(r) <= kResidualTol) {
      out.converged = true;
      break;
    }
    // Jacobian columns; fall back to one-sided differences near the domain edge.
    std::array<std::array<double, 2>, 2> jac{};
    const std::array<double, 2> base{k, h};
    for (int c = 0; c < 2; ++c) {
      std::array<double, 2> plus = base, minus = base;
      plus[c] += kFd;
      minus[c] -= kFd;
      const bool has_plus = lme_domain(plus[0], plus[1]);
      const bool has_minus = lme_domain(minus[0], minus[1]);
      std::array<double, 2> rp = r, rm = r;
      double span = 0.0;
      if (has_plus) {
        rp = residual(plus[0], plus[1]);
        span += kFd;
      }
      if (has_minus) {
        rm = residual(minus[0], minus[1]);
        span += kFd;
      }
      if (span == 0.0) return out;
      jac[0][c] = (rp[0] - rm[0]) / span;
      jac[1][c] = (rp[1] - rm[1]) / span;
    }
    const double det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
    if (!std::isfinite(det) || det == 0.0) return out;
    const double dk = -(jac[1][1] * r[0] - jac[0][1] * r[1]) / det;
    const double dh = -(-jac[1][0] * r[0] + jac[0][0] * r[1]) / det;
    if (!std::isfinite(dk) || !std::isfinite(dh)) return out;
    // Halve the step until it stays in the domain and reduces the residual.
    double scale = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 40; ++halving, scale *= 0.5) {
      const double kn = k + scale * dk, hn = h + scale * dh;
      if (!lme_domain(kn, hn)) continue;
      const auto rn = residual(kn, hn);
      if (norm(rn) < norm(r)) {
        k = kn;
        h = hn;
        r = rn;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    if (scale * std::hypot(dk, dh) < kStepFloor && norm(r) > kResidualTol) break;
  }
  if (!out.converged && norm(r) <= kResidualTol) out.converged = true;
  out.k = k;
  out.h = h;
  return out;
}

}  // namespace detail

// Solves the estimating equations for given L-moments. `data` is used only to
// report the likelihood at the estimate and may be empty.
inline LmeOutcome fit_lme_from_lmoments(const LMomentSet& lm, std::span<const double> data,
                                        const BranchPolicy& policy = {}) {
  LmeOutcome outcome;
  const double t3 = lm.tau3, t4 = lm.tau4;
  const double glo_line = (1.0 + 5.0 * t3 * t3) / 6.0;
  if (!lm.within_general_bounds() || !(t4 < glo_line)) {
    outcome.failure_reason = LmeFailure::TauOutsideFeasible;
    return outcome;
  }
  // Nearest grid points in tau space, tried in order.
  std::vector<std::pair<double, const detail::TauGridPoint*>> ranked;
  for (const auto& g : detail::tau_grid()) {
    const double d = (g.tau3 - t3) * (g.tau3 - t3) + (g.tau4 - t4) * (g.tau4 - t4);
    ranked.emplace_back(d, &g);
  }
  std::sort(ranked.begin(), ranked.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  constexpr std::size_t kStarts = 16;
  int total_iterations = 0;
  for (std::size_t s = 0; s < std::min(kStarts, ranked.size()); ++s) {
    const auto* g = ranked[s].second;
    const auto sol = detail::solve_tau_equations(t3, t4, g->k, g->h, policy);
    total_iterations += sol.iterations;
    if (!sol.converged) continue;
    const auto lam = detail::std_lmoments(sol.k, sol.h, policy, 1.0 / 32.0);
    const double sigma = lm.lambda2 / lam[1];
    const double mu = lm.lambda1 - sigma * lam[0];
    if (!(sigma > 0.0) || !std::isfinite(mu)) continue;
    FitResult fit{K4Params(mu, sigma, sol.k, sol.h), std::nullopt, numerics::kInf, numerics::kInf,
                  true, total_iterations, "LME"};
    if (!data.empty()) {
      fit.nll = detail::nll_raw(mu, sigma, sol.k, sol.h, data, policy);
      fit.penalized_nll = fit.nll;
    }
    outcome.result = std::move(fit);
    return outcome;
  }
  outcome.failure_reason = LmeFailure::RootSolveDiverged;
  return outcome;
}

// L-moment estimator. Sample (tau3, tau4) outside the region the kappa family
// can reach, or a Newton iteration that fails from every grid start, yields a
// failure reason instead of an estimate.
inline LmeOutcome fit_lme(std::span<const double> data, const BranchPolicy& policy = {}) {
  const LMomentSet lm = sample_lmoments(data);
  return fit_lme_from_lmoments(lm, data, policy);
}

}  // namespace kappa4
