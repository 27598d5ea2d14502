#pragma once

// Data behind the usual diagnostic figures: fitted density on a grid,
// quantile-quantile pairs, and a histogram of the sample.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "kappa4/distribution.hpp"
#include "kappa4/error.hpp"
#include "kappa4/gof.hpp"

namespace kappa4 {

struct DensityPoint {
  double x = 0.0;
  double pdf = 0.0;
};

// `points` equally spaced x over [quantile(0.001), quantile(0.999)].
inline std::vector<DensityPoint> density_grid(const K4Params& p, std::size_t points = 512,
                                              const BranchPolicy& policy = {}) {
  if (points < 2) throw InputError("density_grid: at least 2 points required");
  const double lo = quantile(p, 0.001, policy), hi = quantile(p, 0.999, policy);
  std::vector<DensityPoint> out(points);
  for (std::size_t i = 0; i < points; ++i) {
    const double x = i + 1 == points ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    out[i] = {x, pdf(p, x, policy)};
  }
  return out;
}

struct QqPoint {
  double empirical = 0.0;  // x_(i)
  double fitted = 0.0;     // quantile at (i - 0.35)/n
};

inline std::vector<QqPoint> qq_points(std::span<const double> data, const K4Params& p,
                                      const BranchPolicy& policy = {}) {
  const auto x = detail::sorted_copy(data, "qq_points");
  std::vector<QqPoint> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = {x[i], quantile(p, plotting_position(i + 1, x.size()), policy)};
  return out;
}

struct HistogramBin {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t count = 0;
  double density = 0.0;  // count / (n * width), comparable with the fitted pdf
};

inline std::size_t sturges_bins(std::size_t n) {
  return static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(n)))) + 1;
}

// Equal-width bins over [min, max]; bins = 0 selects Sturges' rule. Bins are
// half-open except the last, which includes the maximum.
inline std::vector<HistogramBin> histogram(std::span<const double> data, std::size_t bins = 0) {
  const auto x = detail::sorted_copy(data, "histogram");
  if (bins == 0) bins = sturges_bins(x.size());
  const double lo = x.front(), hi = x.back();
  const double width = hi > lo ? (hi - lo) / static_cast<double>(bins) : 1.0;
  std::vector<HistogramBin> out(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    out[b].lower = lo + width * static_cast<double>(b);
    out[b].upper = b + 1 == bins ? std::max(hi, lo + width) : lo + width * static_cast<double>(b + 1);
  }
  for (double v : x) {
    auto b = static_cast<std::size_t>((v - lo) / width);
    out[std::min(b, bins - 1)].count += 1;
  }
  for (auto& bin : out) bin.density = static_cast<double>(bin.count) / (static_cast<double>(x.size()) * width);
  return out;
}

}  // namespace kappa4
