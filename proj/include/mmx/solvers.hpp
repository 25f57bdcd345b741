#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "mmx/krylov.hpp"
#include "mmx/moreau.hpp"
#include "mmx/problems.hpp"

namespace mmx {

enum class Algorithm { alg1, alg2, alg3 };

const char* to_string(Algorithm a);

struct SolverConfig {
  Algorithm algorithm = Algorithm::alg1;
  Vec x0;                     // empty: projection of 0 onto X
  std::optional<Vec> y_hat;   // default: Chebyshev center of Y
  double epsilon = 0.1;
  std::optional<bool> coupled;  // Alg 2; default mu >= sqrt(lambda_bar_1 rho_1)
  bool naive = false;           // Alg 3
  double p_fail = 0.1;          // Alg 3
  double q_fail = 0.1;          // Krylov oracle
  std::optional<long> T_override;
  long T_cap = 10'000'000;
  std::uint64_t seed = 1;
  int brute_resolution = 2001;  // grid points per axis for Delta / psi estimates over X
  bool keep_iterates = true;

  // Throws ErrorKind::config on violated invariants.
  void validate(const ProblemInstance& p) const;
};

// Streams derived from one seed: 1 draws the output index, 2 the Krylov xi.
std::mt19937_64 seeded_stream(std::uint64_t seed, std::uint64_t stream);

struct OracleCounters {
  long value = 0;
  long grad_x = 0;
  long grad_y = 0;
  long cross_jvp = 0;
  long cross3_jvp = 0;
  long hvp = 0;
  long linear_max = 0;
  long max_oracle = 0;
  long proj_x = 0;
  long proj_y = 0;

  long total() const {
    return value + grad_x + grad_y + cross_jvp + cross3_jvp + hvp + linear_max + max_oracle;
  }
};

struct RunTrace {
  Algorithm algorithm = Algorithm::alg1;
  long T = 0;
  double gamma_x = 0;
  double gamma_y = 0;
  double delta = 0;  // Alg 3 max-oracle accuracy
  double lambda_bar = 0;
  double epsilon = 0;
  bool coupled = false;
  bool naive = false;
  Vec y_hat;
  double delta_estimate = kNaN;  // primal gap used for T
  double psi_y_hat = kNaN;       // Alg 1

  std::vector<Vec> x;         // x_0 .. x_T (when kept)
  std::vector<Vec> y;         // y_t, t < T (Alg 2, 3)
  std::vector<double> eps;    // eps_t from the algorithm's own formula
  std::vector<double> eps_sx; // S_X(x_t, g_t, 1/gamma_x, X), computed separately
  std::vector<double> phi_hat;  // surrogate value at (x_t, y_t)
  std::vector<long> calls;      // cumulative oracle calls after step t

  long best_index = 0;
  double best_eps = kInf;
  Vec x_star;
  Vec y_star;
  long output_index = -1;  // Alg 3: the sampled s
  Vec x_out;               // returned point (x* for Alg 1-2, x_s for Alg 3)
  Vec x_last;              // x_T

  OracleCounters counters;
  double max_oracle_gap_bound = 0;  // Alg 3: largest predicted Krylov gap seen
  std::vector<std::string> warnings;
  double wall_ms = 0;

  static constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
};

// Estimates used by the default iteration counts.
// Delta = phi(x0) - min_X phi, psi(yhat) = min_X f(., yhat), both on a grid
// over the sampling region of X (dim X <= 2).
double estimate_primal_gap(const ProblemInstance& p, const Vec& x0, int resolution);
double estimate_dual_value(const ProblemInstance& p, const Vec& y_hat, int resolution);

// ceil(300 lambda (phi(x0) - psi(yhat)) / eps^2)
long alg1_iterations(double lambda, double gap, double epsilon);
// ceil((3 + mu^2/(lb rho1)) (700 lb Delta / eps^2 + 1))
long alg2_iterations(double lambda_bar, double mu, double rho1, double Delta, double epsilon);
// ceil(6e6/p^2 lb (Delta + rho2 D^3)(sigma0 + sigma2 D^2)^2 / eps^4)
long alg3_iterations(double lambda_bar, double Delta, double rho2, double sigma0, double sigma2, double D,
                     double epsilon, double p_fail);

RunTrace solve_alg1(const ProblemPtr& p, const SolverConfig& cfg);
RunTrace solve_alg2(const ProblemPtr& p, const SolverConfig& cfg);

// ApproxMax(Psi, ball of radius R, delta) for the displacement quadratic.
class MaxOracle {
 public:
  virtual ~MaxOracle() = default;
  virtual KrylovResult maximize(const QuadraticForm& q, double R, double delta) = 0;
  virtual const char* name() const = 0;
};

// Algorithm 4 with a fresh uniform xi per call, drawn from `rng`.
class KrylovMaxOracle : public MaxOracle {
 public:
  KrylovMaxOracle(double rho1, double q_fail, std::uint64_t seed);
  KrylovResult maximize(const QuadraticForm& q, double R, double delta) override;
  const char* name() const override { return "krylov"; }

 private:
  double rho1_, q_fail_;
  std::mt19937_64 rng_;
};

// Exact maximizer from the dense Hessian (d products) and the reduced solver.
class DenseMaxOracle : public MaxOracle {
 public:
  KrylovResult maximize(const QuadraticForm& q, double R, double delta) override;
  const char* name() const override { return "dense"; }
};

// Algorithm 3 on a ball Y. With `oracle` null a KrylovMaxOracle on stream 2 is used.
RunTrace solve_alg3(const ProblemPtr& p, const SolverConfig& cfg, MaxOracle* oracle = nullptr);

RunTrace solve(const ProblemPtr& p, const SolverConfig& cfg);

// Exact surrogate primal for the k = 2 model on a ball (dense Hessian).
PrimalOracle dense_quadratic_surrogate_primal(const SurrogateModel& s);

// The averaged descent inequality behind Algorithm 3:
//   (1/T) sum_t [phi(x_t) - phi(x_t+) - c lb |x_t+ - x_t|^2]
//     <= (env(x_0) - env(x_T)) / (2 gamma lb T) + gamma G^2 / 2 + delta + extra
// with c = 1/2, G = sigma_0 + sigma_2 D^2, extra = 0 for Naive = 0 and
// c = 1, G = sigma_0, extra = sigma_2^2 D^4 / (2 lb) for Naive = 1.
struct TelescopingCheck {
  double lhs = 0;
  double rhs = 0;
  double env0 = 0, envT = 0;
  double mean_sq_moreau_grad = 0;  // (1/T) sum |grad env(x_t)|^2
  bool holds = false;
  long prox_calls = 0;
};

TelescopingCheck telescoping_check(const PrimalOracle& phi_hat, const RunTrace& trace, double sigma0,
                                   double sigma2, double D, const ProxOptions& opt = {});

// Trace export: CSV (t, eps_t, phi_hat, calls) and a JSON summary.
std::string trace_csv(const RunTrace& trace);
std::string trace_json(const RunTrace& trace);

}  // namespace mmx
