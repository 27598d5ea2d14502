#pragma once

// Uniform handle over the estimation methods (MLE, LME and the penalized
// combos), used wherever a method is chosen by name: bootstrap refits,
// simulation studies and the command line.

#include <cctype>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kappa4/error.hpp"
#include "kappa4/fitting.hpp"
#include "kappa4/likelihood.hpp"
#include "kappa4/lmoments.hpp"
#include "kappa4/penalties.hpp"

namespace kappa4 {

struct EstimateOutcome {
  std::optional<FitResult> fit;  // may be present but not converged
  std::string failure;           // empty on success

  bool ok() const { return fit.has_value() && fit->converged; }
};

struct Estimator {
  std::string name;
  std::function<EstimateOutcome(std::span<const double>)> run;
};

// "MLE", "LME", then the 18 combo names in enumeration order.
inline std::vector<std::string> all_method_names() {
  std::vector<std::string> names{"MLE", "LME"};
  for (const auto& c : enumerate_combos()) names.push_back(c.name());
  return names;
}

namespace detail {

inline std::string upper_ascii(std::string_view s) {
  std::string out(s);
  for (char& ch : out) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  return out;
}

inline EstimateOutcome guarded(std::span<const double> data, const std::function<EstimateOutcome()>& body) {
  try {
    return body();
  } catch (const DegenerateError& e) {
    return {std::nullopt, e.what()};
  } catch (const NonexistentMomentError& e) {
    return {std::nullopt, e.what()};
  } catch (const InputError& e) {
    if (data.empty()) throw;
    return {std::nullopt, e.what()};
  }
}

}  // namespace detail

// Resolves a method name (case-insensitive "mle"/"lme", or a combo name in
// any of the accepted spellings). Unknown names throw ConfigError listing
// the valid vocabulary.
inline Estimator make_estimator(std::string_view name, const OptimizerConfig& cfg = {}) {
  cfg.validate();
  const std::string upper = detail::upper_ascii(name);
  if (upper == "LME") {
    const BranchPolicy policy = cfg.policy;
    return {"LME", [policy](std::span<const double> data) {
              return detail::guarded(data, [&]() -> EstimateOutcome {
                auto outcome = fit_lme(data, policy);
                if (!outcome.ok()) return {std::nullopt, to_string(outcome.failure_reason)};
                return {std::move(outcome.result), {}};
              });
            }};
  }
  std::optional<PenaltyCombo> combo;
  if (upper == "MLE") {
    combo = PenaltyCombo::none();
  } else {
    combo = find_combo(name);
  }
  if (!combo) {
    std::string msg = "unknown method '" + std::string(name) + "'; valid methods:";
    for (const auto& n : all_method_names()) msg += " " + n;
    throw ConfigError(msg);
  }
  const std::string label = combo->is_none() ? "MLE" : combo->name();
  return {label, [combo = *combo, cfg](std::span<const double> data) {
            return detail::guarded(data, [&]() -> EstimateOutcome {
              FitResult fit = fit_mple(data, combo, cfg);
              std::string failure = fit.converged ? "" : "optimizer did not converge";
              return {std::move(fit), std::move(failure)};
            });
          }};
}

// The penalty combo behind a method name; none() for MLE, empty for LME.
inline std::optional<PenaltyCombo> combo_for_method(std::string_view name) {
  const std::string upper = detail::upper_ascii(name);
  if (upper == "MLE") return PenaltyCombo::none();
  if (upper == "LME") return std::nullopt;
  return find_combo(name);
}

}  // namespace kappa4
