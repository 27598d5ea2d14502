#pragma once

// Penalty functions on the two shape parameters and their 18 joint
// combinations. Penalties multiply the likelihood, so their logarithms are
// subtracted from the negative log-likelihood; a zero penalty is a hard
// barrier (log-penalty of -infinity).
//
// k penalties:
//   CD    exp{-lambda (1/(1+k) - 1)^alpha} on (-1, 0), 1 for k >= 0, 0 for k <= -1
//   MS    beta density on (-0.5, 0.5), p = 6, q = 9
//   PARK  beta density on (-0.5, 0.5), p = q = 2.5
// h penalties: the same three forms on the original ranges ("o") and the
// adjusted forms ("a") on (-1.2, 1.2):
//   CD_A  exp{-lambda (1/(1.5+h) - 2/3)^alpha} on (-1.2, 0), 1 for h >= 0

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kappa4/error.hpp"
#include "kappa4/numerics.hpp"

namespace kappa4 {

struct PenaltyHyperparams {
  double lambda = 1.0;
  double alpha = 1.0;
  double p = 1.0;
  double q = 1.0;
  double lo = -1.0;
  double hi = 0.0;
};

// Open interval on which a penalty is strictly positive.
struct ShapeRange {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  bool contains(double x) const { return x > lower && x < upper; }
};

namespace detail {

inline double log_beta_form(double x, const PenaltyHyperparams& hp) {
  if (!(x > hp.lo && x < hp.hi)) return -numerics::kInf;
  const double log_norm = (hp.p + hp.q - 1.0) * std::log(hp.hi - hp.lo) + numerics::log_beta(hp.p, hp.q);
  return (hp.p - 1.0) * std::log(x - hp.lo) + (hp.q - 1.0) * std::log(hp.hi - x) - log_norm;
}

// Exponential barrier exp{-lambda (1/(x + offset) - constant)^alpha} on (lo, 0).
inline double log_cd_form(double x, const PenaltyHyperparams& hp, double offset, double constant) {
  if (x >= 0.0) return 0.0;
  if (x <= hp.lo) return -numerics::kInf;
  const double base = 1.0 / (x + offset) - constant;
  return -hp.lambda * std::pow(base, hp.alpha);
}

inline PenaltyHyperparams cd_defaults(double lo) { return {1.0, 1.0, 1.0, 1.0, lo, 0.0}; }
inline PenaltyHyperparams beta_defaults(double p, double q, double half_width) {
  return {1.0, 1.0, p, q, -half_width, half_width};
}

}  // namespace detail

// (hi - lo)^(p + q - 1) B(p, q): integral of (x - lo)^(p-1) (hi - x)^(q-1) over (lo, hi).
inline double b_e_normalizer(double p, double q, double lo, double hi) {
  if (!(p > 0.0 && q > 0.0)) throw InputError("b_e_normalizer: p and q must be > 0");
  if (!(lo < hi)) throw InputError("b_e_normalizer: requires lo < hi");
  return std::exp((p + q - 1.0) * std::log(hi - lo) + numerics::log_beta(p, q));
}

struct KPenalty {
  enum class Family { None, CD, MS, Park };

  Family family = Family::None;
  PenaltyHyperparams hyper{};

  static KPenalty none() { return {Family::None, {}}; }
  static KPenalty cd() { return {Family::CD, detail::cd_defaults(-1.0)}; }
  static KPenalty ms() { return {Family::MS, detail::beta_defaults(6.0, 9.0, 0.5)}; }
  static KPenalty park() { return {Family::Park, detail::beta_defaults(2.5, 2.5, 0.5)}; }

  std::string_view name() const {
    switch (family) {
      case Family::None: return "None";
      case Family::CD: return "CDo";
      case Family::MS: return "MSo";
      case Family::Park: return "Po";
    }
    return "None";
  }

  ShapeRange range() const {
    switch (family) {
      case Family::None: return {};
      case Family::CD: return {hyper.lo, numerics::kInf};
      case Family::MS:
      case Family::Park: return {hyper.lo, hyper.hi};
    }
    return {};
  }
};

struct HPenalty {
  enum class Variant { None, CDo, MSo, Po, CDa, MSa, Pa };

  Variant variant = Variant::None;
  PenaltyHyperparams hyper{};
  // Use the printed constant 0.67 in the adjusted CD form instead of 2/3.
  bool literal_cd_constant = false;

  static HPenalty none() { return {Variant::None, {}, false}; }
  static HPenalty make(Variant v) {
    switch (v) {
      case Variant::None: return none();
      case Variant::CDo: return {v, detail::cd_defaults(-1.0), false};
      case Variant::MSo: return {v, detail::beta_defaults(6.0, 9.0, 0.5), false};
      case Variant::Po: return {v, detail::beta_defaults(2.5, 2.5, 0.5), false};
      case Variant::CDa: return {v, detail::cd_defaults(-1.2), false};
      case Variant::MSa: return {v, detail::beta_defaults(6.0, 9.0, 1.2), false};
      case Variant::Pa: return {v, detail::beta_defaults(2.5, 2.5, 1.2), false};
    }
    return none();
  }

  std::string_view name() const {
    switch (variant) {
      case Variant::None: return "None";
      case Variant::CDo: return "CDo";
      case Variant::MSo: return "MSo";
      case Variant::Po: return "Po";
      case Variant::CDa: return "CDa";
      case Variant::MSa: return "MSa";
      case Variant::Pa: return "Pa";
    }
    return "None";
  }

  ShapeRange range() const {
    switch (variant) {
      case Variant::None: return {};
      case Variant::CDo:
      case Variant::CDa: return {hyper.lo, numerics::kInf};
      default: return {hyper.lo, hyper.hi};
    }
  }
};

inline double log_penalty_k(double k, const KPenalty& pen) {
  switch (pen.family) {
    case KPenalty::Family::None: return 0.0;
    case KPenalty::Family::CD: return detail::log_cd_form(k, pen.hyper, 1.0, 1.0);
    case KPenalty::Family::MS:
    case KPenalty::Family::Park: return detail::log_beta_form(k, pen.hyper);
  }
  return 0.0;
}

inline double log_penalty_h(double h, const HPenalty& pen) {
  using V = HPenalty::Variant;
  switch (pen.variant) {
    case V::None: return 0.0;
    case V::CDo: return detail::log_cd_form(h, pen.hyper, 1.0, 1.0);
    case V::CDa: return detail::log_cd_form(h, pen.hyper, 1.5, pen.literal_cd_constant ? 0.67 : 2.0 / 3.0);
    case V::MSo:
    case V::Po:
    case V::MSa:
    case V::Pa: return detail::log_beta_form(h, pen.hyper);
  }
  return 0.0;
}

inline double penalty_k(double k, const KPenalty& pen) { return std::exp(log_penalty_k(k, pen)); }
inline double penalty_h(double h, const HPenalty& pen) { return std::exp(log_penalty_h(h, pen)); }

struct PenaltyCombo {
  KPenalty k_pen = KPenalty::none();
  HPenalty h_pen = HPenalty::none();

  static PenaltyCombo none() { return {}; }

  bool is_none() const {
    return k_pen.family == KPenalty::Family::None && h_pen.variant == HPenalty::Variant::None;
  }

  std::string name() const {
    return "MPLE." + std::string(k_pen.name()) + "(k)" + std::string(h_pen.name()) + "(h)";
  }
};

// ln p(k) + ln p(h); -infinity when either factor vanishes.
inline double log_joint_penalty(double k, double h, const PenaltyCombo& combo) {
  const double lk = log_penalty_k(k, combo.k_pen);
  if (lk == -numerics::kInf) return lk;
  return lk + log_penalty_h(h, combo.h_pen);
}

// {CD, MS, PARK} x {CDo, MSo, Po, CDa, MSa, Pa}, default hyperparameters.
inline std::vector<PenaltyCombo> enumerate_combos() {
  using V = HPenalty::Variant;
  const std::array<KPenalty, 3> ks{KPenalty::cd(), KPenalty::ms(), KPenalty::park()};
  const std::array<V, 6> hs{V::CDo, V::MSo, V::Po, V::CDa, V::MSa, V::Pa};
  std::vector<PenaltyCombo> out;
  out.reserve(ks.size() * hs.size());
  for (const auto& kp : ks) {
    for (V v : hs) out.push_back({kp, HPenalty::make(v)});
  }
  return out;
}

// Strips TeX subscript markup and whitespace: "MPLE.MS$_o$(k)MS$_a$(h)" -> "MPLE.MSo(k)MSa(h)".
inline std::string normalize_combo_name(std::string_view raw) {
  std::string out;
  for (char c : raw) {
    if (c == '$' || c == '_' || c == '{' || c == '}' || c == ' ' || c == '\t') continue;
    out.push_back(c);
  }
  return out;
}

inline std::optional<PenaltyCombo> find_combo(std::string_view name) {
  const std::string wanted = normalize_combo_name(name);
  for (const auto& c : enumerate_combos()) {
    if (c.name() == wanted) return c;
  }
  if (wanted == PenaltyCombo::none().name()) return PenaltyCombo::none();
  return std::nullopt;
}

}  // namespace kappa4
