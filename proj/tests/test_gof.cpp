#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "kappa4/distribution.hpp"
#include "kappa4/estimators.hpp"
#include "kappa4/fitting.hpp"
#include "kappa4/gof.hpp"
#include "kappa4/random.hpp"
#include "support/oracles.hpp"

using kappa4::K4Params;

namespace {

std::vector<double> at_plotting_positions(const K4Params& p, std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = kappa4::quantile(p, kappa4::plotting_position(i + 1, n));
  return x;
}

}  // namespace

TEST(Mpae, PerfectMatchAndOffset) {
  const K4Params p(0, 1, -0.2, -0.2);
  auto x = at_plotting_positions(p, 25);
  EXPECT_NEAR(kappa4::mpae(x, p), 0.0, 1e-15);
  for (double& v : x) v += 0.7;
  EXPECT_NEAR(kappa4::mpae(x, p), 0.7, 1e-13);
}

TEST(Mpae, HandEvaluatedUniform) {
  const std::vector<double> x{0.9, 0.2, 0.5};
  const double expect = (std::fabs(0.2 - 0.65 / 3) + std::fabs(0.5 - 1.65 / 3) + std::fabs(0.9 - 2.65 / 3)) / 3;
  EXPECT_NEAR(kappa4::mpae(x, K4Params(0, 1, 1, 1)), expect, 1e-15);
  EXPECT_THROW(kappa4::mpae(std::vector<double>{}, K4Params(0, 1, 1, 1)), kappa4::InputError);
}

TEST(AndersonDarling, TwoPointHandEvaluation) {
  const K4Params p(0, 1, 0, 0);
  const std::vector<double> x{kappa4::quantile(p, 2.0 / 3.0), kappa4::quantile(p, 1.0 / 3.0)};
  const double expect = -2.0 - 0.5 * (1 * (std::log(1.0 / 3) + std::log(1.0 / 3)) +
                                      3 * (std::log(2.0 / 3) + std::log(2.0 / 3)));
  EXPECT_NEAR(kappa4::ad_statistic(x, p), expect, 1e-13);
  EXPECT_THROW(kappa4::ad_statistic(std::vector<double>{1.0}, p), kappa4::InputError);
}

TEST(AndersonDarling, GrossMisfitIsLargeAndFlagged) {
  const K4Params p(0, 1, -0.2, -0.2);
  const auto x = kappa4::sample(p, 200, 4);
  const auto ad = kappa4::ad_statistic_checked(x, K4Params(10, 1, -0.2, -0.2));
  EXPECT_GT(ad.value, 100.0);
  EXPECT_TRUE(ad.clamped);
  EXPECT_FALSE(kappa4::ad_statistic_checked(x, p).clamped);
}

TEST(AndersonDarling, NullDistributionUpperPercentiles) {
  // Asymptotic A^2 percentiles: 95% 2.492, 99% 3.857.
  const K4Params p(0, 1, -0.2, -0.2);
  int below_95 = 0, below_99 = 0;
  constexpr int kSeeds = 200;
  for (int s = 0; s < kSeeds; ++s) {
    const double a2 = kappa4::ad_statistic(kappa4::sample(p, 10000, kappa4::substream_seed(55, s)), p);
    below_95 += a2 < 2.492;
    below_99 += a2 < 3.857;
  }
  EXPECT_GE(below_95, 180);
  EXPECT_LE(below_95, 198);
  EXPECT_GE(below_99, 194);
}

TEST(KolmogorovSmirnov, Examples) {
  const K4Params p(0, 1, 0, 0);
  std::vector<double> x(40);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = kappa4::quantile(p, (i + 0.5) / 40.0);
  EXPECT_NEAR(kappa4::ks_statistic(x, p), 0.5 / 40.0, 1e-15);
  EXPECT_NEAR(kappa4::ks_statistic(std::vector<double>{kappa4::quantile(p, 0.5)}, p), 0.5, 1e-15);
}

TEST(KolmogorovSmirnov, BruteForceOracle) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto x = kappa4::sample(K4Params(1, 2, 0.1, -0.4), 37, s);
    const K4Params q(1.2, 1.8, 0.05, -0.3);
    const double ref = oracle::ks_brute_force(x, [&](double v) { return kappa4::cdf(q, v); });
    EXPECT_NEAR(kappa4::ks_statistic(x, q), ref, 1e-15);
  }
}

TEST(GofStatistics, BundlesAllThree) {
  const K4Params p(0, 1, -0.2, -0.2);
  const auto x = kappa4::sample(p, 30, 2);
  const auto r = kappa4::gof_statistics(x, p);
  EXPECT_EQ(r.mpae, kappa4::mpae(x, p));
  EXPECT_EQ(r.ad, kappa4::ad_statistic(x, p));
  EXPECT_EQ(r.ks, kappa4::ks_statistic(x, p));
  EXPECT_FALSE(r.ad_pvalue.has_value());
  EXPECT_EQ(r.bootstrap_reps, 0);
}

TEST(Bootstrap, CountingFormula) {
  const std::vector<double> boot{2.0, 3.0, 4.0, 5.0};
  EXPECT_DOUBLE_EQ(kappa4::bootstrap_pvalue(1.0, boot), 1.0);
  EXPECT_DOUBLE_EQ(kappa4::bootstrap_pvalue(10.0, boot), 1.0 / 5.0);
  EXPECT_DOUBLE_EQ(kappa4::bootstrap_pvalue(3.0, boot), 4.0 / 5.0);
  std::vector<double> many(999, 0.5);
  EXPECT_DOUBLE_EQ(kappa4::bootstrap_pvalue(0.6, many), 1.0 / 1000.0);
}

TEST(Bootstrap, DeterministicAndWorkerIndependent) {
  const auto est = kappa4::make_estimator("LME");
  std::vector<double> x;
  kappa4::EstimateOutcome out;
  for (std::uint64_t s = 3; !out.ok(); ++s) {
    x = kappa4::sample(K4Params(0, 1, -0.2, -0.2), 30, s);
    out = est.run(x);
  }
  const auto a = kappa4::bootstrap_pvalues(x, out.fit->params, est, 99, 11, 1);
  const auto b = kappa4::bootstrap_pvalues(x, out.fit->params, est, 99, 11, 4);
  EXPECT_EQ(a.ad_pvalue, b.ad_pvalue);
  EXPECT_EQ(a.ks_pvalue, b.ks_pvalue);
  EXPECT_EQ(a.failures, b.failures);
  EXPECT_EQ(a.reps, 99);
  EXPECT_GE(a.ad_pvalue, 1.0 / 100);
  EXPECT_LE(a.ad_pvalue, 1.0);
  EXPECT_EQ(a.unreliable, a.failures * 5 > 99);
  EXPECT_THROW(kappa4::bootstrap_pvalues(x, out.fit->params, est, 98, 11), kappa4::InputError);
}

TEST(Bootstrap, PvaluesRoughlyUniformUnderTheModel) {
  const K4Params truth(0, 1, 0.1, 0.2);
  const auto est = kappa4::make_estimator("LME");
  int above = 0, used = 0;
  for (std::uint64_t r = 0; r < 40; ++r) {
    const auto x = kappa4::sample(truth, 50, kappa4::substream_seed(77, r));
    const auto fit = est.run(x);
    if (!fit.ok()) continue;
    const auto p = kappa4::bootstrap_pvalues(x, fit.fit->params, est, 199, r);
    ++used;
    above += p.ks_pvalue > 0.05;
  }
  ASSERT_GE(used, 35);
  EXPECT_GE(static_cast<double>(above) / used, 0.85);
}

// Property suite ---------------------------------------------------------

TEST(GofProperties, MpaeTranslationCovariant) {
  const K4Params p(0, 1, -0.2, -0.2);
  auto x = kappa4::sample(p, 30, 9);
  const double base = kappa4::mpae(x, p);
  for (double& v : x) v += 12.5;
  EXPECT_NEAR(kappa4::mpae(x, K4Params(12.5, 1, -0.2, -0.2)), base, 1e-12);
}

TEST(GofProperties, RangesAndOrderInvariance) {
  const K4Params p(0, 1, -0.2, -0.2);
  for (std::uint64_t s = 0; s < 20; ++s) {
    auto x = kappa4::sample(p, 15, s);
    const K4Params q(0.3, 0.8, 0.1, 0.4);
    const double ks = kappa4::ks_statistic(x, q), ad = kappa4::ad_statistic(x, q), mp = kappa4::mpae(x, q);
    EXPECT_GE(ks, 0.0);
    EXPECT_LE(ks, 1.0);
    EXPECT_GE(ad, -15.0);
    EXPECT_TRUE(std::isfinite(ad));
    std::reverse(x.begin(), x.end());
    std::rotate(x.begin(), x.begin() + 4, x.end());
    EXPECT_EQ(kappa4::ks_statistic(x, q), ks);
    EXPECT_EQ(kappa4::ad_statistic(x, q), ad);
    EXPECT_EQ(kappa4::mpae(x, q), mp);
  }
}

TEST(GofProperties, BestPenalizedFitNoWorseThanMle) {
  const K4Params truth(0, 1, -0.2, -0.2);
  int reps = 0, mpae_ok = 0, ad_ok = 0, ks_ok = 0;
  for (std::uint64_t r = 0; r < 20; ++r) {
    const auto x = kappa4::sample(truth, 30, kappa4::substream_seed(123, r));
    const auto mle = kappa4::fit_mle(x);
    if (!mle.converged) continue;
    ++reps;
    const auto ref = kappa4::gof_statistics(x, mle.params);
    double best_mpae = kappa4::numerics::kInf, best_ad = kappa4::numerics::kInf, best_ks = kappa4::numerics::kInf;
    for (const auto& c : kappa4::enumerate_combos()) {
      const auto fit = kappa4::fit_mple(x, c);
      if (!fit.converged) continue;
      const auto g = kappa4::gof_statistics(x, fit.params);
      best_mpae = std::min(best_mpae, g.mpae);
      best_ad = std::min(best_ad, g.ad);
      best_ks = std::min(best_ks, g.ks);
    }
    mpae_ok += best_mpae <= ref.mpae;
    ad_ok += best_ad <= ref.ad;
    ks_ok += best_ks <= ref.ks;
  }
  ASSERT_GE(reps, 15);
  EXPECT_GE(mpae_ok, 0.8 * reps);
  EXPECT_GE(ad_ok, 0.8 * reps);
  EXPECT_GE(ks_ok, 0.8 * reps);
}
