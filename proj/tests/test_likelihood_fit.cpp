#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "kappa4/distribution.hpp"
#include "kappa4/fitting.hpp"
#include "kappa4/lmoments.hpp"
#include "kappa4/numerics.hpp"
#include "kappa4/profile.hpp"
#include "support/oracles.hpp"

using kappa4::K4Params;
using kappa4::PenaltyCombo;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

PenaltyCombo combo(const char* name) { return *kappa4::find_combo(name); }

std::vector<double> shifted(std::vector<double> x, double a, double b) {
  for (double& v : x) v = a * v + b;
  return x;
}

}  // namespace

TEST(NegLogLikelihood, UniformDensityGivesZero) {
  EXPECT_DOUBLE_EQ(kappa4::neg_log_likelihood(K4Params(0, 1, 1, 1), std::vector<double>{0.1, 0.5, 0.9}), 0.0);
}

TEST(NegLogLikelihood, BarrierBelowSupport) {
  EXPECT_EQ(kappa4::neg_log_likelihood(K4Params(0, 1, -0.2, -0.2), std::vector<double>{0.0, -6.0}), kInf);
}

TEST(NegLogLikelihood, MatchesExtendedPrecisionOracle) {
  const std::vector<double> x{0.1, 0.5, 1.3};
  const double ref = static_cast<double>(oracle::kappa_nll(0, 1, -0.2L, -0.2L, x));
  EXPECT_NEAR(kappa4::neg_log_likelihood(K4Params(0, 1, -0.2, -0.2), x), ref, 1e-13);
  double sum = 0.0;
  for (double v : x) sum -= kappa4::log_pdf(K4Params(0, 1, -0.2, -0.2), v);
  EXPECT_NEAR(kappa4::neg_log_likelihood(K4Params(0, 1, -0.2, -0.2), x), sum, 1e-13);
}

TEST(NegLogLikelihood, RandomDataAgainstOracle) {
  const auto x = kappa4::sample(K4Params(5, 2, 0.15, 0.4), 40, 8);
  const double ref = static_cast<double>(oracle::kappa_nll(5.1L, 2.2L, 0.12L, 0.35L, x));
  EXPECT_NEAR(kappa4::neg_log_likelihood(K4Params(5.1, 2.2, 0.12, 0.35), x) / ref, 1.0, 1e-12);
}

TEST(NegLogLikelihood, EmptyDataRejected) {
  EXPECT_THROW(kappa4::neg_log_likelihood(K4Params(0, 1, 0, 0), std::vector<double>{}), kappa4::InputError);
}

TEST(PenalizedNll, Compositions) {
  const auto x = kappa4::sample(K4Params(0, 1, -0.1, 0.1), 25, 2);
  const K4Params p(0.1, 1.1, 0.0, 0.0);
  const double nll = kappa4::neg_log_likelihood(p, x);
  EXPECT_EQ(kappa4::penalized_nll(p, x, PenaltyCombo::none()), nll);
  EXPECT_EQ(kappa4::penalized_nll(K4Params(0.1, 1.1, 0.2, 0.3), x, combo("MPLE.CDo(k)CDa(h)")),
            kappa4::neg_log_likelihood(K4Params(0.1, 1.1, 0.2, 0.3), x));
  EXPECT_NEAR(kappa4::penalized_nll(p, x, combo("MPLE.MSo(k)MSa(h)")), nll - std::log(2.1995) - std::log(0.91645),
              1e-4);
  EXPECT_EQ(kappa4::penalized_nll(K4Params(0, 1, 0.7, 0), x, combo("MPLE.MSo(k)MSa(h)")), kInf);
}

TEST(FitMle, LargeUniformSample) {
  const auto x = kappa4::sample(K4Params(0, 1, 1, 1), 100000, 21);
  kappa4::OptimizerConfig cfg;
  cfg.compute_se = false;
  const auto fit = kappa4::fit_mle(x, cfg);
  ASSERT_TRUE(fit.converged);
  EXPECT_NEAR(fit.params.mu(), 0.0, 0.05);
  EXPECT_NEAR(fit.params.sigma(), 1.0, 0.05);
  EXPECT_NEAR(fit.params.k(), 1.0, 0.05);
  EXPECT_NEAR(fit.params.h(), 1.0, 0.05);
}

TEST(FitMle, Deterministic) {
  const auto x = kappa4::sample(K4Params(0, 1, -0.2, -0.2), 30, 77);
  const auto a = kappa4::fit_mle(x), b = kappa4::fit_mle(x);
  EXPECT_EQ(a.params, b.params);
  EXPECT_EQ(a.nll, b.nll);
  EXPECT_EQ(a.se, b.se);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(FitMle, RequiresFiveObservations) {
  EXPECT_THROW(kappa4::fit_mle(std::vector<double>{1, 2, 3, 4}), kappa4::InputError);
  kappa4::OptimizerConfig bad;
  bad.restarts = 0;
  EXPECT_THROW(kappa4::fit_mle(std::vector<double>{1, 2, 3, 4, 5}, bad), kappa4::ConfigError);
}

TEST(FitMple, MsKPenaltyKeepsShapeInsideRange) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto x = kappa4::sample(K4Params(0, 1, -0.45, 0.3), 30, s);
    const auto fit = kappa4::fit_mple(x, combo("MPLE.MSo(k)MSa(h)"));
    EXPECT_GT(fit.params.k(), -0.5);
    EXPECT_LT(fit.params.k(), 0.5);
    EXPECT_GT(fit.params.h(), -1.2);
    EXPECT_LT(fit.params.h(), 1.2);
    EXPECT_TRUE(std::isfinite(fit.penalized_nll));
  }
}

TEST(FitMple, ConvergedResultsAreFiniteAndTagged) {
  const auto x = kappa4::sample(K4Params(0, 1, -0.2, -0.2), 30, 3);
  const auto fit = kappa4::fit_mple(x, combo("MPLE.Po(k)Pa(h)"));
  ASSERT_TRUE(fit.converged);
  EXPECT_EQ(fit.method, "MPLE.Po(k)Pa(h)");
  EXPECT_TRUE(std::isfinite(fit.nll));
  EXPECT_NEAR(fit.penalized_nll, fit.nll - kappa4::log_joint_penalty(fit.params.k(), fit.params.h(),
                                                                      combo("MPLE.Po(k)Pa(h)")), 1e-9);
  ASSERT_TRUE(fit.se.has_value());
  for (double s : *fit.se) EXPECT_TRUE(std::isfinite(s) && s > 0);
}

TEST(StandardErrors, QuadraticObjective) {
  const std::array<double, 4> a{4.0, 0.25, 9.0, 1.0}, c{1.0, -2.0, 0.5, 3.0};
  auto f = [&](const std::array<double, 4>& t) {
    double s = 0.0;
    for (int j = 0; j < 4; ++j) s += 0.5 * a[j] * (t[j] - c[j]) * (t[j] - c[j]);
    return s;
  };
  const auto se = kappa4::hessian_standard_errors<4>(f, c);
  ASSERT_TRUE(se.has_value());
  for (int j = 0; j < 4; ++j) EXPECT_NEAR((*se)[j], 1 / std::sqrt(a[j]), 1e-5);
}

TEST(StandardErrors, IndefiniteHessianIsUnavailable) {
  auto saddle = [](const std::array<double, 2>& t) { return t[0] * t[0] - t[1] * t[1]; };
  EXPECT_FALSE(kappa4::hessian_standard_errors<2>(saddle, {0.0, 0.0}).has_value());
}

TEST(StandardErrors, ShrinkLikeInverseRootN) {
  // Quantile-grid samples remove sampling noise from the comparison.
  auto grid = [](const K4Params& p, int n) {
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = kappa4::quantile(p, (i + 0.5) / n);
    return x;
  };
  for (const K4Params& truth : {K4Params(0, 1, -0.2, -0.2), K4Params(0, 1, 0.1, 0.1)}) {
    const auto small = kappa4::fit_mle(grid(truth, 1000));
    const auto large = kappa4::fit_mle(grid(truth, 4000));
    ASSERT_TRUE(small.se && large.se);
    for (int j = 0; j < 4; ++j) EXPECT_NEAR((*small.se)[j] / (*large.se)[j], 2.0, 0.3) << "parameter " << j;
  }
}

TEST(StandardErrors, Reproducible) {
  const auto x = kappa4::sample(K4Params(0, 1, -0.2, -0.2), 60, 8);
  const auto a = kappa4::fit_mle(x), b = kappa4::fit_mle(x);
  ASSERT_TRUE(a.se.has_value());
  EXPECT_EQ(*a.se, *b.se);
  EXPECT_EQ(kappa4::standard_errors(a, x, PenaltyCombo::none()), a.se);
}

TEST(ReturnLevel, Examples) {
  EXPECT_NEAR(kappa4::return_level(K4Params(0, 1, 1, 1), 20), 0.95, 1e-15);
  EXPECT_NEAR(kappa4::return_level(K4Params(0, 1, 0, 0), 20), -std::log(-std::log(0.95)), 1e-13);
  EXPECT_NEAR(kappa4::return_level(K4Params(0, 1, 0, 0), 20), 2.9702, 5e-5);
  const double ref = static_cast<double>(oracle::kappa_quantile(0, 1, -0.2L, -0.2L, 0.99L, -5.0L, 1e3L));
  EXPECT_NEAR(kappa4::return_level(K4Params(0, 1, -0.2, -0.2), 100), ref, 1e-11);
  EXPECT_THROW(kappa4::return_level(K4Params(0, 1, 0, 0), 1.0), kappa4::InputError);
}

TEST(ReturnLevel, DeltaMethodMatchesDirectPropagation) {
  // With a diagonal covariance, var = sum grad_i^2 var_i.
  const K4Params p(0, 1, 0, 0);
  Eigen::Matrix4d cov = Eigen::Matrix4d::Zero();
  cov(0, 0) = 0.04;
  cov(1, 1) = 0.01;
  const double z = -std::log(-std::log(0.95));
  const auto se = kappa4::return_level_se(p, 20, cov);
  ASSERT_TRUE(se.has_value());
  EXPECT_NEAR(*se, std::sqrt(0.04 + z * z * 0.01), 1e-6);
}

// Profile likelihood -------------------------------------------------------

TEST(ProfileCi, EndpointsSitOnTheCutoff) {
  const auto x = kappa4::sample(K4Params(10, 3, -0.1, -0.2), 60, 12);
  const auto pc = combo("MPLE.MSo(k)MSo(h)");
  const auto fit = kappa4::fit_mple(x, pc);
  ASSERT_TRUE(fit.converged);
  const auto ci = kappa4::profile_likelihood_ci(x, 50, 0.95, pc, fit);
  ASSERT_FALSE(ci.open());
  EXPECT_NEAR(ci.cutoff, 3.841458820694124, 1e-8);
  EXPECT_LT(ci.lower, ci.estimate);
  EXPECT_GT(ci.upper, ci.estimate);
  EXPECT_NEAR(ci.estimate, kappa4::return_level(fit.params, 50), 1e-9);
  EXPECT_NEAR(ci.lower_deviance, ci.cutoff, 0.01);
  EXPECT_NEAR(ci.upper_deviance, ci.cutoff, 0.01);
  // Re-profile the endpoints from scratch.
  const kappa4::ReturnLevelProfile prof(x, 50, pc);
  const std::array<double, 3> start{std::log(fit.params.sigma()), fit.params.k(), fit.params.h()};
  for (double end : {ci.lower, ci.upper}) {
    const auto pt = prof.minimize(end, start);
    EXPECT_NEAR(2 * (pt.objective - ci.minimum), ci.cutoff, 0.01) << end;
  }
}

TEST(ProfileCi, TraceIsSortedAndNonnegative) {
  const auto x = kappa4::sample(K4Params(0, 1, -0.2, -0.2), 40, 31);
  const auto pc = combo("MPLE.Po(k)Pa(h)");
  const auto fit = kappa4::fit_mple(x, pc);
  const auto ci = kappa4::profile_likelihood_ci(x, 20, 0.9, pc, fit);
  ASSERT_GE(ci.trace.size(), 3u);
  for (std::size_t i = 1; i < ci.trace.size(); ++i) EXPECT_LE(ci.trace[i - 1].x_t, ci.trace[i].x_t);
  EXPECT_LE(ci.lower, ci.estimate);
  EXPECT_GE(ci.upper, ci.estimate);
  EXPECT_NEAR(ci.cutoff, kappa4::numerics::chi_square_quantile(0.9), 1e-12);
}

TEST(ProfileCi, EstimateAlwaysInsideForMle) {
  for (std::uint64_t s = 0; s < 3; ++s) {
    const auto x = kappa4::sample(K4Params(0, 1, -0.2, -0.2), 40, 100 + s);
    const auto fit = kappa4::fit_mle(x);
    if (!fit.converged) continue;
    const auto ci = kappa4::profile_likelihood_ci(x, 20, 0.95, PenaltyCombo::none(), fit);
    EXPECT_LE(ci.lower, ci.estimate);
    EXPECT_GE(ci.upper, ci.estimate);
    if (!ci.lower_open) {
      EXPECT_NEAR(ci.lower_deviance, ci.cutoff, 0.01);
    }
    if (!ci.upper_open) {
      EXPECT_NEAR(ci.upper_deviance, ci.cutoff, 0.01);
    }
  }
}

// A local MLE with h > 1 on a short record: the branch followed upward ends in
// a jump across the cutoff. That side must come back open, never as a closed
// endpoint off the cutoff.
TEST(ProfileCi, JumpAcrossTheCutoffIsReportedOpen) {
  const auto x = kappa4::sample(K4Params(100, 30, -0.15, -0.2), 29, kappa4::substream_seed(7007, 1));
  const auto fit = kappa4::fit_mle(x);
  ASSERT_TRUE(fit.converged);
  ASSERT_GT(fit.params.h(), 1.0);
  const auto ci = kappa4::profile_likelihood_ci(x, 100, 0.95, PenaltyCombo::none(), fit);
  EXPECT_TRUE(ci.upper_open);
  EXPECT_TRUE(ci.discontinuous);
  EXPECT_EQ(ci.upper, std::numeric_limits<double>::infinity());
  if (!ci.lower_open) {
    EXPECT_NEAR(ci.lower_deviance, ci.cutoff, 0.01);
  }
}

TEST(ProfileCi, ClosedEndpointsAlwaysMeetTheCutoff) {
  for (std::uint64_t r = 0; r < 6; ++r) {
    const auto x = kappa4::sample(K4Params(100, 30, -0.15, -0.2), 29, kappa4::substream_seed(7007, r));
    const auto fit = kappa4::fit_mle(x);
    if (!fit.converged) continue;
    const auto ci = kappa4::profile_likelihood_ci(x, 100, 0.95, PenaltyCombo::none(), fit);
    if (!ci.lower_open) {
      EXPECT_NEAR(ci.lower_deviance, ci.cutoff, 0.01) << r;
    }
    if (!ci.upper_open) {
      EXPECT_NEAR(ci.upper_deviance, ci.cutoff, 0.01) << r;
    }
  }
}

TEST(ProfileCi, NarrowsWithSampleSize) {
  const K4Params truth(0, 1, -0.1, -0.2);
  const auto pc = combo("MPLE.MSo(k)MSo(h)");
  const auto x50 = kappa4::sample(truth, 50, 9), x500 = kappa4::sample(truth, 500, 9);
  const auto ci50 = kappa4::profile_likelihood_ci(x50, 20, 0.95, pc, kappa4::fit_mple(x50, pc));
  const auto ci500 = kappa4::profile_likelihood_ci(x500, 20, 0.95, pc, kappa4::fit_mple(x500, pc));
  ASSERT_FALSE(ci50.open());
  ASSERT_FALSE(ci500.open());
  EXPECT_LT(ci500.upper - ci500.lower, ci50.upper - ci50.lower);
}

TEST(ProfileCi, RejectsBadLevel) {
  const auto x = kappa4::sample(K4Params(0, 1, 0, 0), 20, 1);
  const auto fit = kappa4::fit_mle(x);
  EXPECT_THROW(kappa4::profile_likelihood_ci(x, 20, 1.0, PenaltyCombo::none(), fit), kappa4::InputError);
}

// Property suite ---------------------------------------------------------

TEST(FitProperties, NoneComboAgreesWithMle) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto x = kappa4::sample(K4Params(0, 1, -0.2, -0.2), 30, 500 + s);
    const auto mle = kappa4::fit_mle(x);
    const auto mple = kappa4::fit_mple(x, PenaltyCombo::none());
    EXPECT_LE(std::fabs(mle.nll - mple.nll), 1e-6);
    const double dist = std::hypot(mle.params.mu() - mple.params.mu(), mle.params.sigma() - mple.params.sigma(),
                                   mle.params.k() - mple.params.k()) +
                        std::fabs(mle.params.h() - mple.params.h());
    EXPECT_LE(dist, 1e-4);
    EXPECT_EQ(mple.penalized_nll, mple.nll);
  }
}

TEST(FitProperties, NeverWorseThanTheLmeStart) {
  for (std::uint64_t s = 0; s < 15; ++s) {
    const auto x = kappa4::sample(K4Params(0, 1, -0.2, -0.2), 30, 900 + s);
    const auto lme = kappa4::fit_lme(x);
    if (!lme.result) continue;
    for (const char* name : {"MPLE.MSo(k)MSo(h)", "MPLE.CDo(k)Pa(h)"}) {
      const auto pc = combo(name);
      const double at_start = kappa4::penalized_nll(lme.result->params, x, pc);
      const auto fit = kappa4::fit_mple(x, pc);
      EXPECT_LE(fit.penalized_nll, at_start) << name;
    }
    EXPECT_LE(kappa4::fit_mle(x).nll, lme.result->nll);
  }
}

TEST(FitProperties, BarrierMatchesFeasibleSet) {
  const auto x = kappa4::sample(K4Params(0, 1, -0.1, 0.2), 25, 4);
  for (double mu : {-0.5, 0.0, 0.8}) {
    for (double sigma : {0.3, 1.0, 2.5}) {
      for (double k : {-0.6, -0.2, 0.0, 0.3, 0.9}) {
        for (double h : {-0.8, 0.0, 0.5, 1.0, 1.5}) {
          const K4Params p(mu, sigma, k, h);
          const bool feasible = kappa4::make_workspace(p, x).feasible();
          const double v = kappa4::neg_log_likelihood(p, x);
          EXPECT_EQ(v == kInf, !feasible) << mu << " " << sigma << " " << k << " " << h;
          if (feasible) {
            EXPECT_TRUE(std::isfinite(v));
          }
        }
      }
    }
  }
}

TEST(FitProperties, TranslationAndScaleEquivariance) {
  const auto x = kappa4::sample(K4Params(0, 1, -0.1, -0.2), 80, 41);
  const auto pc = combo("MPLE.MSo(k)MSo(h)");
  const auto base = kappa4::fit_mple(x, pc);
  const auto moved = kappa4::fit_mple(shifted(x, 1.0, 25.0), pc);
  EXPECT_NEAR(moved.params.mu(), base.params.mu() + 25.0, 1e-6);
  EXPECT_NEAR(moved.params.sigma(), base.params.sigma(), 1e-6);
  EXPECT_NEAR(moved.params.k(), base.params.k(), 1e-6);
  EXPECT_NEAR(moved.params.h(), base.params.h(), 1e-6);
  const auto scaled = kappa4::fit_mple(shifted(x, 3.0, 0.0), pc);
  EXPECT_NEAR(scaled.params.mu(), 3.0 * base.params.mu(), 1e-6 * 3.0);
  EXPECT_NEAR(scaled.params.sigma(), 3.0 * base.params.sigma(), 1e-6 * 3.0);
  EXPECT_NEAR(scaled.params.k(), base.params.k(), 1e-6);
  EXPECT_NEAR(scaled.params.h(), base.params.h(), 1e-6);
  EXPECT_NEAR(scaled.nll, base.nll + 80 * std::log(3.0), 1e-7);
}

TEST(FitProperties, GradientAgreesWithHigherOrderStencil) {
  const auto x = kappa4::sample(K4Params(0, 1, -0.2, -0.2), 50, 6);
  const std::array<double, 4> theta{0.1, 1.2, -0.15, -0.25};
  for (int j = 0; j < 4; ++j) {
    auto f = [&](double v) {
      auto t = theta;
      t[j] = v;
      return kappa4::neg_log_likelihood(K4Params(t[0], t[1], t[2], t[3]), x);
    };
    const double c2 = oracle::central_difference(f, theta[j], 1e-5);
    const double s = 1e-3;
    const double c4 = (-f(theta[j] + 2 * s) + 8 * f(theta[j] + s) - 8 * f(theta[j] - s) + f(theta[j] - 2 * s)) /
                      (12 * s);
    EXPECT_NEAR(c2 / c4, 1.0, 1e-5) << "parameter " << j;
  }
}

TEST(FitProperties, LikelihoodContinuousAcrossShapeBranches) {
  const auto xk = kappa4::sample(K4Params(0, 1, 0, 0.2), 50, 13);
  const auto xh = kappa4::sample(K4Params(0, 1, 0.2, 0), 50, 14);
  for (double eps : {3e-9, -3e-9, 1e-7, -1e-7}) {
    EXPECT_NEAR(kappa4::neg_log_likelihood(K4Params(0, 1, eps, 0.2), xk),
                kappa4::neg_log_likelihood(K4Params(0, 1, 0, 0.2), xk), 1e-4);
    EXPECT_NEAR(kappa4::neg_log_likelihood(K4Params(0, 1, 0.2, eps), xh),
                kappa4::neg_log_likelihood(K4Params(0, 1, 0.2, 0), xh), 1e-4);
  }
}
