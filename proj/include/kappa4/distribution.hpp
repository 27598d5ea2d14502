#pragma once

// Four-parameter kappa distribution.
//
//   F(x) = {1 - h [1 - k (x - mu) / sigma]^(1/k)}^(1/h)
//   x(F) = mu + sigma / k * {1 - [(1 - F^h) / h]^k}
//
// with the k -> 0 and h -> 0 limits taken as exact branches. All evaluation
// goes through logarithms (log1p/expm1) so the branches join continuously
// at the switching threshold.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "kappa4/error.hpp"
#include "kappa4/random.hpp"

namespace kappa4 {

class K4Params {
 public:
  K4Params(double mu, double sigma, double k, double h) : mu_(mu), sigma_(sigma), k_(k), h_(h) {
    if (!std::isfinite(mu) || !std::isfinite(sigma) || !std::isfinite(k) || !std::isfinite(h)) {
      throw InputError("K4Params: all parameters must be finite");
    }
    if (!(sigma > 0.0)) throw InputError("K4Params: sigma must be > 0");
  }

  double mu() const { return mu_; }
  double sigma() const { return sigma_; }
  double k() const { return k_; }
  double h() const { return h_; }

  friend bool operator==(const K4Params&, const K4Params&) = default;

 private:
  double mu_;
  double sigma_;
  double k_;
  double h_;
};

// Shapes with magnitude below the threshold use the corresponding limit branch.
class BranchPolicy {
 public:
  BranchPolicy() = default;
  explicit BranchPolicy(double shape_zero_threshold) : threshold_(shape_zero_threshold) {
    if (!(shape_zero_threshold > 0.0 && shape_zero_threshold < 1e-4)) {
      throw InputError("BranchPolicy: threshold must lie in (0, 1e-4)");
    }
  }
  double threshold() const { return threshold_; }
  bool k_is_zero(double k) const { return std::fabs(k) < threshold_; }
  bool h_is_zero(double h) const { return std::fabs(h) < threshold_; }

 private:
  double threshold_ = 1e-9;
};

// Extended-real interval; infinite ends are +/- infinity, never sentinels.
struct Support {
  double lower;
  double upper;
  bool contains(double x) const { return x > lower && x < upper; }
};

enum class SpecialCase { GPD, GEV, GLO, GeneralizedGumbel, General };

inline std::string_view to_string(SpecialCase c) {
  switch (c) {
    case SpecialCase::GPD: return "GPD";
    case SpecialCase::GEV: return "GEV";
    case SpecialCase::GLO: return "GLO";
    case SpecialCase::GeneralizedGumbel: return "GENERALIZED_GUMBEL";
    case SpecialCase::General: return "GENERAL";
  }
  return "GENERAL";
}

namespace detail {

enum class Position { Below, Inside, Above };

// Pieces of the density at one point, in log form.
struct PointEval {
  Position pos = Position::Inside;
  double log_g = 0.0;  // ln(1 - k y); 0 on the k = 0 branch
  double log_t = 0.0;  // ln of (1 - k y)^(1/k), or -y on the k = 0 branch
  double log_f = 0.0;  // ln F(x)
};

// Raw-parameter evaluation; callers guarantee sigma > 0.
inline PointEval evaluate(double mu, double sigma, double k, double h, double x,
                          const BranchPolicy& policy) {
  PointEval e;
  const double y = (x - mu) / sigma;
  if (policy.k_is_zero(k)) {
    e.log_t = -y;
  } else {
    const double ky = k * y;
    if (ky >= 1.0) {
      e.pos = k > 0.0 ? Position::Above : Position::Below;
      return e;
    }
    e.log_g = std::log1p(-ky);
    e.log_t = e.log_g / k;
  }
  const double t = std::exp(e.log_t);
  if (policy.h_is_zero(h)) {
    e.log_f = -t;
  } else {
    const double ht = h * t;
    if (ht >= 1.0) {
      e.pos = Position::Below;
      return e;
    }
    e.log_f = std::log1p(-ht) / h;
  }
  return e;
}

inline double log_pdf_raw(double mu, double sigma, double k, double h, double x,
                          const BranchPolicy& policy) {
  const PointEval e = evaluate(mu, sigma, k, h, x, policy);
  if (e.pos != Position::Inside || !std::isfinite(e.log_f) || !std::isfinite(e.log_t)) {
    return -std::numeric_limits<double>::infinity();
  }
  return -std::log(sigma) + e.log_t - e.log_g + (1.0 - h) * e.log_f;
}

// Standardised quantile (mu = 0, sigma = 1) from ln F; log_f < 0.
inline double std_quantile_from_log(double k, double h, double log_f, const BranchPolicy& policy) {
  const double w = policy.h_is_zero(h) ? -log_f : -std::expm1(h * log_f) / h;
  const double log_w = std::log(w);
  return policy.k_is_zero(k) ? -log_w : -std::expm1(k * log_w) / k;
}

inline void require_finite(double x, const char* where) {
  if (!std::isfinite(x)) throw InputError(std::string(where) + ": argument must be finite");
}

}  // namespace detail

inline double log_pdf(const K4Params& p, double x, const BranchPolicy& policy = {}) {
  detail::require_finite(x, "log_pdf");
  return detail::log_pdf_raw(p.mu(), p.sigma(), p.k(), p.h(), x, policy);
}

inline double pdf(const K4Params& p, double x, const BranchPolicy& policy = {}) {
  return std::exp(log_pdf(p, x, policy));
}

inline double cdf(const K4Params& p, double x, const BranchPolicy& policy = {}) {
  detail::require_finite(x, "cdf");
  const auto e = detail::evaluate(p.mu(), p.sigma(), p.k(), p.h(), x, policy);
  switch (e.pos) {
    case detail::Position::Below: return 0.0;
    case detail::Position::Above: return 1.0;
    case detail::Position::Inside: break;
  }
  return std::exp(e.log_f);
}

inline double quantile(const K4Params& p, double prob, const BranchPolicy& policy = {}) {
  if (!(prob > 0.0 && prob < 1.0)) throw InputError("quantile: probability must lie in (0, 1)");
  return p.mu() + p.sigma() * detail::std_quantile_from_log(p.k(), p.h(), std::log(prob), policy);
}

inline Support support(const K4Params& p, const BranchPolicy& policy = {}) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const double mu = p.mu(), sigma = p.sigma(), k = p.k(), h = p.h();
  const bool k_zero = policy.k_is_zero(k);
  Support s{-kInf, kInf};
  if (!k_zero && k > 0.0) s.upper = mu + sigma / k;
  if (!policy.h_is_zero(h) && h > 0.0) {
    // Point where 1 - h (1 - k y)^(1/k) reaches zero.
    const double log_h = std::log(h);
    s.lower = k_zero ? mu + sigma * log_h : mu - sigma * std::expm1(-k * log_h) / k;
  } else if (!k_zero && k < 0.0) {
    s.lower = mu + sigma / k;
  }
  return s;
}

// Inverse-transform sampling; deterministic given the seed.
inline std::vector<double> sample(const K4Params& p, std::size_t n, std::uint64_t seed,
                                  const BranchPolicy& policy = {}) {
  if (n == 0) throw InputError("sample: n must be >= 1");
  UniformStream uniform(seed);
  std::vector<double> out(n);
  for (auto& v : out) v = quantile(p, uniform.next(), policy);
  return out;
}

// Named sub-families the parameters fall into; h-tags first, then the k-tag.
inline std::vector<SpecialCase> classify_special_case(const K4Params& p, double tol) {
  if (!(tol >= 0.0)) throw InputError("classify_special_case: tol must be >= 0");
  std::vector<SpecialCase> tags;
  if (std::fabs(p.h() - 1.0) <= tol) tags.push_back(SpecialCase::GPD);
  if (std::fabs(p.h()) <= tol) tags.push_back(SpecialCase::GEV);
  if (std::fabs(p.h() + 1.0) <= tol) tags.push_back(SpecialCase::GLO);
  if (std::fabs(p.k()) <= tol) tags.push_back(SpecialCase::GeneralizedGumbel);
  if (tags.empty()) tags.push_back(SpecialCase::General);
  return tags;
}

}  // namespace kappa4
