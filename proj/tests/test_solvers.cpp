#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "mmx/instances.hpp"
#include "mmx/solvers.hpp"
#include "mmx/surrogate.hpp"

using namespace mmx;

namespace {

ProblemPtr scalar_quadratic(double P, double A, double Q, double xlo, double xhi, double ylo, double yhi) {
  return make_quadratic(Mat::Constant(1, 1, P), Mat::Constant(1, 1, A), Mat::Constant(1, 1, Q), Vec::Zero(1), Vec::Zero(1),
                        Domain::interval(xlo, xhi), Domain::interval(ylo, yhi));
}

SolverConfig fixed_steps(Algorithm a, long T) {
  SolverConfig c;
  c.algorithm = a;
  c.T_override = T;
  return c;
}

void expect_eps_identity(const RunTrace& tr) {
  ASSERT_EQ(tr.eps.size(), tr.eps_sx.size());
  for (std::size_t t = 0; t < tr.eps.size(); ++t) EXPECT_NEAR(tr.eps[t], tr.eps_sx[t], 1e-10) << "t=" << t;
}

}  // namespace

TEST(Alg1, StartAtStationaryPointGivesZeroEps) {
  // f(x, 0) = 0 on the bounded intro problem: every x is stationary for yhat = 0
  ProblemPtr p = make_intro_example(true);
  SolverConfig c = fixed_steps(Algorithm::alg1, 5);
  c.y_hat = scalar_vec(0.0);
  c.x0 = scalar_vec(1.5);
  RunTrace tr = solve_alg1(p, c);
  EXPECT_DOUBLE_EQ(tr.eps[0], 0.0);
  EXPECT_DOUBLE_EQ(tr.x_star[0], 1.5);
  EXPECT_EQ(tr.best_index, 0);
}

TEST(Alg1, ProjectedStepsDescendOnTheFrozenObjective) {
  ProblemPtr p = scalar_quadratic(-1.0, 0.7, -1.0, -1, 1, -1, 1);
  SolverConfig c = fixed_steps(Algorithm::alg1, 40);
  c.y_hat = scalar_vec(0.3);
  c.x0 = scalar_vec(0.05);
  RunTrace tr = solve_alg1(p, c);
  for (std::size_t t = 1; t < tr.phi_hat.size(); ++t) EXPECT_LE(tr.phi_hat[t], tr.phi_hat[t - 1] + 1e-15);
  expect_eps_identity(tr);
  EXPECT_EQ(tr.counters.grad_x, 40);
  EXPECT_EQ(tr.counters.value, 40);
}

TEST(Alg1, SurrogateStationaryPointFailsTrueCertification) {
  // F_{0,0}, lambda = mu = 1, D = 2: X = [-1, 1], yhat = 1/2 makes x = 1/2 stationary
  // for f(., yhat), while the true envelope gradient there is 1.
  ProblemPtr p = build_instance(HardInstanceSpec{Family::F, 0, 0, 1.0, 1.0, 1.0, 2.0, -1.0, std::nullopt});
  SolverConfig c = fixed_steps(Algorithm::alg1, 3);
  c.epsilon = 0.05;
  c.y_hat = scalar_vec(0.5);
  c.x0 = scalar_vec(0.5);
  RunTrace tr = solve_alg1(p, c);
  EXPECT_LE(tr.best_eps, 1e-15);
  EXPECT_FALSE(tr.warnings.empty());
  StationarityReport r = verify_fosp(true_primal(p), tr.x_star, c.epsilon, 1.0);
  EXPECT_FALSE(r.certified);
  EXPECT_NEAR(r.moreau_grad_norm, 1.0, 1e-5);
}

TEST(Alg1, IterationFormula) {
  EXPECT_EQ(alg1_iterations(1.0, 0.01, 0.1), 300);
  EXPECT_EQ(alg1_iterations(2.0, 0.0, 0.1), 1);
  EXPECT_EQ(alg2_iterations(1.0, 1.0, 1.0, 0.0, 0.5), 4);
  EXPECT_EQ(alg2_iterations(1.0, 0.0, 2.0, 1e-3, 0.1), static_cast<long>(std::ceil(3.0 * (70.0 + 1.0))));
}

TEST(Alg2, CoupledOneStepClosedForm) {
  const double P = -1.0, A = 0.8, Q = -0.5;
  ProblemPtr p = scalar_quadratic(P, A, Q, -1, 1, -0.2, 0.2);
  SolverConfig c = fixed_steps(Algorithm::alg2, 1);
  c.coupled = true;
  c.x0 = scalar_vec(0.6);
  c.y_hat = scalar_vec(0.05);
  RunTrace tr = solve_alg2(p, c);
  const double rho1 = p->profile.rho1();
  const double lb = tr.lambda_bar;
  const double gx = 1.0 / (3 * lb + A * A / rho1);
  EXPECT_DOUBLE_EQ(tr.gamma_x, gx);
  double y = std::clamp(0.05 + (A * 0.6 + Q * 0.05) / rho1, -0.2, 0.2);
  double g = P * 0.6 + A * y;
  double x1 = std::clamp(0.6 - gx * g, -1.0, 1.0);
  EXPECT_NEAR(tr.y[0][0], y, 1e-15);
  EXPECT_NEAR(tr.x[1][0], x1, 1e-15);
  EXPECT_EQ(tr.counters.cross_jvp, 1);
}

TEST(Alg2, UncoupledTiePicksSmallestMaximizer) {
  // grad_y vanishes at (0, yhat): every y maximizes, the lower end is taken
  ProblemPtr p = scalar_quadratic(-1.0, 0.3, -0.2, -1, 1, -0.5, 0.5);
  SolverConfig c = fixed_steps(Algorithm::alg2, 1);
  c.coupled = false;
  c.x0 = scalar_vec(0.0);
  c.y_hat = scalar_vec(0.0);
  RunTrace tr = solve_alg2(p, c);
  EXPECT_DOUBLE_EQ(tr.y[0][0], -0.5);
  EXPECT_EQ(tr.counters.linear_max, 1);
}

TEST(Alg2, CertifiesOnFirstOrderInstance) {
  ProblemPtr p = build_instance(HardInstanceSpec{Family::F, 1, -1, 1.0, 0.5, 2.0, 0.002, -0.001, 1.0});
  SolverConfig c;
  c.algorithm = Algorithm::alg2;
  c.epsilon = 0.2;
  c.x0 = scalar_vec(0.8);
  c.brute_resolution = 401;
  RunTrace tr = solve_alg2(p, c);
  expect_eps_identity(tr);
  EXPECT_LE(tr.best_eps, c.epsilon);
  StationarityReport r = verify_fosp(true_primal(p), tr.x_star, c.epsilon, tr.lambda_bar);
  EXPECT_TRUE(r.certified) << r.moreau_grad_norm;
}

TEST(Alg2, SameSeedSameTrace) {
  ProblemPtr p = scalar_quadratic(-1.0, 0.5, -0.3, -1, 1, -0.3, 0.3);
  SolverConfig c = fixed_steps(Algorithm::alg2, 50);
  c.x0 = scalar_vec(0.9);
  RunTrace a = solve_alg2(p, c), b = solve_alg2(p, c);
  EXPECT_EQ(trace_csv(a), trace_csv(b));
}

TEST(Alg3, CountersAndTelescoping) {
  CubicBallParams cp;
  cp.dim_y = 6;
  cp.lambda = cp.mu = cp.rho = 0.05;
  cp.radius = 0.5;
  cp.x_half_width = 0.2;
  ProblemPtr p = make_cubic_ball(cp);
  SolverConfig c = fixed_steps(Algorithm::alg3, 60);
  c.epsilon = 0.2;
  c.brute_resolution = 201;
  c.seed = 4;
  RunTrace tr = solve_alg3(p, c);
  const long T = tr.T;
  EXPECT_EQ(tr.counters.value, T);
  EXPECT_EQ(tr.counters.grad_y, T);
  EXPECT_EQ(tr.counters.max_oracle, T);
  EXPECT_EQ(tr.counters.grad_x, T);
  EXPECT_EQ(tr.counters.cross_jvp, T);
  EXPECT_EQ(tr.counters.cross3_jvp, T);
  EXPECT_GE(tr.counters.hvp, 2 * T);
  EXPECT_GE(tr.output_index, 0);
  EXPECT_LT(tr.output_index, T);
  EXPECT_EQ(tr.x_out, tr.x[tr.output_index]);
  expect_eps_identity(tr);

  SurrogateModel sm(p, 2, tr.y_hat);
  ProxOptions po;
  po.method = ProxMethod::golden;
  TelescopingCheck tc = telescoping_check(dense_quadratic_surrogate_primal(sm), tr, *p->profile.sigma_0,
                                          p->profile.order(2).sigma, p->domain_y.diameter(), po);
  EXPECT_TRUE(tc.holds) << tc.lhs << " > " << tc.rhs;
}

TEST(Alg3, NaiveUsesPlainGradient) {
  CubicBallParams cp;
  cp.dim_y = 4;
  cp.lambda = cp.mu = cp.rho = 0.05;
  cp.x_half_width = 0.2;
  ProblemPtr p = make_cubic_ball(cp);
  SolverConfig c = fixed_steps(Algorithm::alg3, 10);
  c.naive = true;
  c.brute_resolution = 201;
  RunTrace tr = solve_alg3(p, c);
  EXPECT_TRUE(tr.naive);
  EXPECT_EQ(tr.counters.grad_x, 10);
  EXPECT_EQ(tr.counters.cross_jvp, 0);
  EXPECT_EQ(tr.counters.cross3_jvp, 0);
  for (std::size_t t = 0; t < tr.y.size(); ++t) {
    Vec g = p->grad_x(tr.x[t], tr.y[t]);
    Vec expect = p->domain_x.project(tr.x[t] - tr.gamma_x * g);
    EXPECT_LE((tr.x[t + 1] - expect).norm(), 1e-15);
  }
}

TEST(Alg3, SeedDeterminesTrace) {
  ProblemPtr p = make_cubic_ball(CubicBallParams{});
  SolverConfig c = fixed_steps(Algorithm::alg3, 20);
  c.brute_resolution = 101;
  c.seed = 8;
  RunTrace a = solve_alg3(p, c), b = solve_alg3(p, c);
  EXPECT_EQ(trace_csv(a), trace_csv(b));
  EXPECT_EQ(a.output_index, b.output_index);
}

TEST(Alg3, DenseOracleIsExact) {
  ProblemPtr p = make_cubic_ball(CubicBallParams{});
  SolverConfig c = fixed_steps(Algorithm::alg3, 5);
  c.brute_resolution = 101;
  DenseMaxOracle dense;
  RunTrace tr = solve_alg3(p, c, &dense);
  SurrogateModel sm(p, 2, tr.y_hat);
  PrimalOracle ph = dense_quadratic_surrogate_primal(sm);
  for (long t = 0; t < tr.T; ++t) EXPECT_NEAR(tr.phi_hat[t], ph.phi(tr.x[t]), 1e-12);
}

TEST(Solvers, BudgetCapRaises) {
  ProblemPtr p = make_intro_example(true);
  SolverConfig c = fixed_steps(Algorithm::alg1, 100);
  c.T_cap = 10;
  EXPECT_THROW(solve(p, c), BudgetError);
}

TEST(Solvers, ConfigValidation) {
  ProblemPtr p = make_intro_example(true);
  auto kind_of = [&](SolverConfig c) {
    try {
      c.validate(*p);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::numerical;
  };
  SolverConfig c;
  c.epsilon = 0;
  EXPECT_EQ(kind_of(c), ErrorKind::config);
  c = SolverConfig{};
  c.x0 = scalar_vec(5.0);
  EXPECT_EQ(kind_of(c), ErrorKind::config);
  c = SolverConfig{};
  c.p_fail = 0.6;
  c.q_fail = 0.5;
  EXPECT_EQ(kind_of(c), ErrorKind::config);
  c = SolverConfig{};
  c.y_hat = scalar_vec(3.0);
  EXPECT_EQ(kind_of(c), ErrorKind::config);
  c = SolverConfig{};
  c.T_override = 0;
  EXPECT_EQ(kind_of(c), ErrorKind::config);
}

TEST(Solvers, SeededStreamsDiffer) {
  auto a = seeded_stream(3, 1), b = seeded_stream(3, 2), a2 = seeded_stream(3, 1);
  EXPECT_NE(a(), b());
  a = seeded_stream(3, 1);
  EXPECT_EQ(a(), a2());
}

TEST(Solvers, TraceCsvHeader) {
  ProblemPtr p = make_intro_example(true);
  RunTrace tr = solve(p, fixed_steps(Algorithm::alg1, 3));
  std::string csv = trace_csv(tr);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,eps_t,phi_hat,oracle_calls");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}
