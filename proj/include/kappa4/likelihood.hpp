#pragma once

// Negative log-likelihood and its penalized form. Infeasible parameters
// (an observation outside the support, sigma <= 0) give +infinity, which the
// optimisers treat as a barrier.

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kappa4/distribution.hpp"
#include "kappa4/error.hpp"
#include "kappa4/numerics.hpp"
#include "kappa4/penalties.hpp"

namespace kappa4 {

struct FitResult {
  K4Params params;
  std::optional<std::array<double, 4>> se;  // empty when the Hessian is not positive definite
  double nll = numerics::kInf;
  double penalized_nll = numerics::kInf;
  bool converged = false;
  int iterations = 0;
  std::string method;
};

// Per-observation quantities of the likelihood.
struct LikelihoodWorkspace {
  std::vector<double> y;  // (x_i - mu) / sigma
  std::vector<double> g;  // 1 - k y_i
  std::vector<double> f;  // F(x_i)
  // Strictly inside the support. F can round to 0 or 1 at interior points
  // while the log-density is still finite, so feasibility is decided here.
  std::vector<char> inside;

  bool feasible() const {
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (!(g[i] > 0.0) || !inside[i]) return false;
    }
    return true;
  }
};

inline LikelihoodWorkspace make_workspace(const K4Params& p, std::span<const double> data,
                                          const BranchPolicy& policy = {}) {
  LikelihoodWorkspace ws;
  ws.y.reserve(data.size());
  ws.g.reserve(data.size());
  ws.f.reserve(data.size());
  ws.inside.reserve(data.size());
  const Support s = support(p, policy);
  for (double x : data) {
    ws.inside.push_back(s.contains(x) ? 1 : 0);
    const double y = (x - p.mu()) / p.sigma();
    ws.y.push_back(y);
    ws.g.push_back(policy.k_is_zero(p.k()) ? 1.0 : 1.0 - p.k() * y);
    ws.f.push_back(cdf(p, x, policy));
  }
  return ws;
}

namespace detail {

inline void check_data(std::span<const double> data, const char* where) {
  if (data.empty()) throw InputError(std::string(where) + ": data must be nonempty");
  for (double x : data) {
    if (!std::isfinite(x)) throw InputError(std::string(where) + ": data must be finite");
  }
}

// No validation; any sigma is accepted and sigma <= 0 is a barrier.
inline double nll_raw(double mu, double sigma, double k, double h, std::span<const double> data,
                      const BranchPolicy& policy) {
  if (!(sigma > 0.0) || !std::isfinite(mu) || !std::isfinite(k) || !std::isfinite(h) ||
      !std::isfinite(sigma)) {
    return numerics::kInf;
  }
  double total = 0.0;
  for (double x : data) {
    const double lp = log_pdf_raw(mu, sigma, k, h, x, policy);
    if (lp == -numerics::kInf) return numerics::kInf;
    total -= lp;
  }
  return std::isnan(total) ? numerics::kInf : total;
}

inline double penalized_nll_raw(double mu, double sigma, double k, double h, std::span<const double> data,
                                const PenaltyCombo& combo, const BranchPolicy& policy) {
  const double lp = log_joint_penalty(k, h, combo);
  if (lp == -numerics::kInf || std::isnan(lp)) return numerics::kInf;
  const double nll = nll_raw(mu, sigma, k, h, data, policy);
  return nll == numerics::kInf ? nll : nll - lp;
}

}  // namespace detail

inline double neg_log_likelihood(const K4Params& p, std::span<const double> data,
                                 const BranchPolicy& policy = {}) {
  detail::check_data(data, "neg_log_likelihood");
  return detail::nll_raw(p.mu(), p.sigma(), p.k(), p.h(), data, policy);
}

inline double penalized_nll(const K4Params& p, std::span<const double> data, const PenaltyCombo& combo,
                            const BranchPolicy& policy = {}) {
  detail::check_data(data, "penalized_nll");
  return detail::penalized_nll_raw(p.mu(), p.sigma(), p.k(), p.h(), data, combo, policy);
}

}  // namespace kappa4
