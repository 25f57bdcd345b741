#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mmx/instances.hpp"
#include "mmx/problems.hpp"

using namespace mmx;

namespace {

// max over Y of f(x, .) by dense sampling, used against the closed-form primals
double sampled_max(const ProblemInstance& p, const Vec& x, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double best = -kInf;
  for (int i = 0; i < n; ++i) best = std::max(best, p.value(x, p.domain_y.sample(rng)));
  return best;
}

}  // namespace

TEST(Intro, ValuesAndNashPoint) {
  ProblemPtr p = make_intro_example();
  EXPECT_DOUBLE_EQ(p->value(scalar_vec(0), scalar_vec(0)), 0.0);
  EXPECT_DOUBLE_EQ(p->grad_y(scalar_vec(0), scalar_vec(0))[0], 0.0);
  EXPECT_DOUBLE_EQ(p->grad_x(scalar_vec(0), scalar_vec(0))[0], 0.0);
}

TEST(Intro, PrimalAttainedAtMinusTwo) {
  ProblemPtr p = make_intro_example();
  auto [v, y] = p->primal(scalar_vec(1.0));
  EXPECT_DOUBLE_EQ(y[0], -2.0);
  EXPECT_NEAR(v, -2.0 + 8.0 / 3.0, 1e-15);
}

TEST(Intro, OneIsTheGlobalMinimizerOfPhi) {
  ProblemPtr p = make_intro_example();
  const double at1 = p->primal(scalar_vec(1.0)).first;
  for (double x = -3; x <= 5; x += 0.01)
    if (std::abs(x - 1) > 1e-9) EXPECT_GT(p->primal(scalar_vec(x)).first, at1);
}

TEST(Intro, ClosedPrimalMatchesSampling) {
  ProblemPtr p = make_intro_example(true);
  for (double x : {0.0, 0.3, 1.0, 2.5, 3.9}) {
    double exact = p->primal(scalar_vec(x)).first;
    double s = sampled_max(*p, scalar_vec(x), 20000, 4);
    EXPECT_GE(exact + 1e-12, s);
    EXPECT_LE(exact - s, 1e-3);
  }
}

TEST(Problems, OracleFiniteDifferences) {
  for (ProblemPtr p : {make_intro_example(true), make_cubic_ball(CubicBallParams{}),
                       build_instance(HardInstanceSpec{Family::F, 2, 1, 1.0, 0.5, 1.0, 1.0, -0.5, 1.0})}) {
    FdReport r = check_oracles_fd(*p, 50, 2);
    EXPECT_TRUE(r.ok(1e-5)) << p->name << " " << r.grad_x << " " << r.grad_y << " " << r.hess_yy << " " << r.cross
                            << " " << r.cross3;
  }
}

TEST(Problems, CubicBallPrimalDominatesSamples) {
  CubicBallParams cp;
  cp.dim_y = 4;
  cp.radius = 0.8;
  ProblemPtr p = make_cubic_ball(cp);
  std::mt19937_64 rng(9);
  for (int i = 0; i < 5; ++i) {
    Vec x = p->domain_x.sample(rng);
    auto [v, y] = p->primal(x);
    EXPECT_TRUE(p->domain_y.contains(y, 1e-10));
    EXPECT_NEAR(p->value(x, y), v, 1e-10);
    EXPECT_GE(v + 1e-9, sampled_max(*p, x, 20000, 10 + i));
  }
}

TEST(Problems, DeclaredProfilesHoldUnderSampling) {
  std::vector<ProblemPtr> ps = {
      make_intro_example(true),
      make_cubic_ball(CubicBallParams{}),
      build_instance(HardInstanceSpec{Family::F, 1, 1, 1.0, 1.0, 1.0, 2.0, -1.0, 1.0}),
      build_instance(HardInstanceSpec{Family::F, 3, -1, 0.7, 0.3, 2.0, 1.0, -0.5, 2.0}),
      build_instance(HardInstanceSpec{Family::S, 0, 1, 1.0, std::sqrt(2.0), 1.0, 1.0, 0.0, std::nullopt}),
  };
  for (const ProblemPtr& p : ps) {
    ProfileReport r = check_profile_by_sampling(*p, 4000, 3);
    for (const ProfileCheck& c : r.checks) EXPECT_FALSE(c.violated) << p->name << " " << c.name << " " << c.max_ratio;
    EXPECT_TRUE(r.ok);
  }
}

TEST(Problems, BilinearCouplingDetected) {
  Mat P = Mat::Identity(2, 2) * -1.0, A(2, 1), Q = Mat::Identity(1, 1) * -0.5;
  A << 0.3, -0.2;
  ProblemPtr q = make_quadratic(P, A, Q, Vec::Zero(2), Vec::Zero(1), Domain::box(Vec::Constant(2, -1), Vec::Constant(2, 1)),
                                Domain::interval(-1, 1));
  EXPECT_LE(check_bilinear_coupling(*q), 1e-12);
  EXPECT_TRUE(q->profile.bilinear);
  // S couples x and y through tanh, which is not bilinear
  ProblemPtr s = build_instance(HardInstanceSpec{Family::S, 0, 1, 1.0, 2.0, 1.0, 1.0, 0.0, std::nullopt});
  EXPECT_GT(check_bilinear_coupling(*s), 1e-6);
}

TEST(Problems, QuadraticShapeMismatchRejected) {
  Mat P = Mat::Identity(2, 2), A(2, 1), Q = Mat::Identity(1, 1);
  A.setZero();
  EXPECT_THROW(make_quadratic(P, A, Q, Vec::Zero(1), Vec::Zero(1), Domain::whole(2), Domain::interval(0, 1)), Error);
}

TEST(Problems, ProfileValidationRejectsNegatives) {
  SmoothnessProfile pr;
  pr.lambda = 1;
  pr.orders[1] = {-1.0, 1.0, 0.0};
  EXPECT_THROW(pr.validate(), Error);
  pr.orders[1] = {1.0, 1.0, 0.0};
  pr.lambda = 0;
  EXPECT_THROW(pr.validate(), Error);
}
