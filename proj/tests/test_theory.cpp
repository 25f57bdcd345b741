#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mmx/instances.hpp"
#include "mmx/theory.hpp"

using namespace mmx;

namespace {

SmoothnessProfile profile(int k, double lam, double mu, OrderConstants c, std::optional<double> sigma0 = std::nullopt) {
  SmoothnessProfile p;
  p.lambda = lam;
  p.mu = mu;
  p.k = k;
  p.orders[k] = c;
  p.sigma_0 = sigma0;
  return p;
}

}  // namespace

TEST(Theorem1, OrderZeroArithmetic) {
  DiameterVerdict v = check_theorem1(profile(0, 1.0, 1.0, {1.0, 10.0, 0.0}, 10.0), 0.01, 1.0, 0);
  EXPECT_DOUBLE_EQ(v.coupling_term, 0.01);
  EXPECT_NEAR(v.homogeneous_term, std::sqrt(0.01 / 50), 1e-16);
  EXPECT_DOUBLE_EQ(v.lhs, 0.01);
  EXPECT_TRUE(v.admissible);
  EXPECT_EQ(v.binding_term, "coupling");
}

TEST(Theorem1, BilinearOrderOneReduction) {
  // tau_1 = 0 and sigma_1 = mu: lhs = min{3 mu D, sqrt(lambda rho_1 D^2 / 100)}
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-3, 1);
  for (int i = 0; i < 100; ++i) {
    double lam = std::pow(10, u(rng)), mu = std::pow(10, u(rng)), rho = std::pow(10, u(rng)), D = std::pow(10, u(rng));
    double eps = std::pow(10, u(rng));
    ProblemPtr p = build_instance(HardInstanceSpec{Family::F, 1, 1, lam, mu, rho, D, -D / 2, 1.0});
    DiameterVerdict v = check_theorem1(p->profile, D, eps, 1);
    double want = std::min(3 * mu * D, std::sqrt(lam * rho * D * D / 100));
    EXPECT_NEAR(v.lhs, want, 1e-14 * want);
    EXPECT_EQ(v.admissible, want <= eps / 24);
    EXPECT_DOUBLE_EQ(v.lambda_bar, lam);
  }
}

TEST(Theorem1, LambdaBarUsesTau) {
  DiameterVerdict v = check_theorem1(profile(2, 1.0, 1.0, {1.0, 0.0, 3.0}), 0.5, 1.0, 2);
  EXPECT_DOUBLE_EQ(v.lambda_bar, 1.0 + 2 * 3.0 * 0.25 / 2);
}

TEST(Theorem1, MonotoneInDiameter) {
  SmoothnessProfile p = profile(2, 1.0, 0.7, {2.0, 0.3, 0.1}, 4.0);
  double prev = 0;
  for (double D = 1e-4; D < 10; D *= 1.5) {
    double l = check_theorem1(p, D, 0.1, 2).lhs;
    EXPECT_GE(l, prev);
    prev = l;
  }
}

TEST(Theorem1, ThresholdBrackets) {
  SmoothnessProfile p = profile(1, 1.0, 2.0, {1.0, 2.0, 0.0});
  const double eps = 0.05;
  double Dt = theorem1_threshold_D(p, eps, 1, 1.0);
  EXPECT_TRUE(check_theorem1(p, Dt, eps, 1).admissible);
  EXPECT_FALSE(check_theorem1(p, Dt * (1 + 1e-9), eps, 1).admissible);
  EXPECT_DOUBLE_EQ(theorem1_threshold_D(p, eps, 1, 1e-9), Dt);
}

TEST(Theorem1, InvalidInputs) {
  SmoothnessProfile p = profile(1, 1.0, 1.0, {1.0, 1.0, 0.0});
  EXPECT_THROW(check_theorem1(p, 1.0, 0.0, 1), Error);
  EXPECT_THROW(check_theorem1(p, -1.0, 0.1, 1), Error);
}

TEST(LeadingOrder, Arithmetic) {
  SmoothnessProfile p = profile(1, 1.0, 1.0, {1.0, 1.0, 0.0});
  EXPECT_NEAR(leading_order_diameter(p, 0.1, 1), std::sqrt(0.02), 1e-15);
  EXPECT_NEAR(leading_order_diameter(p, 0.1, 1, 3.0), 3 * std::sqrt(0.02), 1e-15);
}

TEST(LeadingOrder, LargeMuLeavesHomogeneousTerm) {
  SmoothnessProfile p = profile(2, 1.0, 1e9, {1.0, 0.0, 0.0});
  for (double eps : {1e-3, 1e-1, 1.0})
    EXPECT_DOUBLE_EQ(leading_order_diameter(p, eps, 2), std::pow(eps * eps * 6.0, 1.0 / 3));
}

TEST(EpsThreshold, Values) {
  EXPECT_TRUE(std::isinf(eps_threshold(profile(2, 1.0, 1.0, {1.0, 0.0, 0.0}), 2)));
  EXPECT_TRUE(check_eps_threshold(profile(2, 1.0, 1.0, {1.0, 0.0, 0.0}), 1e9, 2));
  EXPECT_DOUBLE_EQ(eps_threshold(profile(1, 1.0, 1.0, {1.0, 1.0, 1.0}), 1), 1.0);
  EXPECT_TRUE(check_eps_threshold(profile(1, 1.0, 1.0, {1.0, 1.0, 1.0}), 0.5, 1));
  EXPECT_FALSE(check_eps_threshold(profile(1, 1.0, 1.0, {1.0, 1.0, 1.0}), 1.5, 1));
}

TEST(HighAccuracy, HomogeneousTermBindsBelowThreshold) {
  // below the threshold the leading-order diameter is set by the homogeneous term
  SmoothnessProfile p = profile(2, 1.0, 0.5, {2.0, 0.0, 0.0});
  const double th = high_accuracy_threshold(p, 2);
  EXPECT_NEAR(th, std::pow(0.125 / 2.0, 1.0), 1e-15);
  for (double f : {1e-3, 1e-2, 0.5}) {
    double eps = f * th;
    double hom = std::pow(eps * eps * 6.0 / 2.0, 1.0 / 3);
    EXPECT_GT(hom, eps / p.mu);
    EXPECT_TRUE(check_theorem1(p, 0.01, eps, 2).high_accuracy);
  }
  EXPECT_FALSE(check_theorem1(p, 0.01, 10 * th, 2).high_accuracy);
}

TEST(Consistency, CertificatesAreNotAdmissibleAtTheirBound) {
  for (int k = 0; k <= 5; ++k)
    for (double mu : {0.1, 3.0}) {
      Certificate c = certificate(CertificateRequest{k, 1.0, mu, 1.0, 1.0, std::nullopt});
      ProblemPtr p = build_instance(c.instance);
      const double D = p->domain_y.diameter();
      EXPECT_FALSE(check_theorem1(p->profile, D, c.bound, k).admissible) << to_string(c.which);
      double Dt = theorem1_threshold_D(p->profile, c.bound, k, D);
      EXPECT_LT(Dt, D);
      EXPECT_TRUE(check_theorem1(p->profile, Dt, c.bound, k).admissible);
    }
}
