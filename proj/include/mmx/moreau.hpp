#pragma once

#include <functional>

#include "mmx/problems.hpp"
#include "mmx/surrogate.hpp"

namespace mmx {

enum class PrimalMode { closed_form, grid, krylov };

struct PrimalEval {
  double value = 0;
  Vec subgrad;  // grad_x f(x, y*(x)) for a maximizer y*(x)
  Vec argmax;
};

// phi(x) = max_y f(x, y) together with a Danskin subgradient.
class PrimalOracle {
 public:
  using EvalFn = std::function<PrimalEval(const Vec&)>;
  using ProxFn = std::function<Vec(const Vec& x, double lambda_bar)>;

  PrimalOracle(EvalFn eval, double weak_convexity, PrimalMode mode, Domain domain_x, ProxFn closed_prox = {});

  PrimalEval eval(const Vec& x) const { return eval_(x); }
  double phi(const Vec& x) const { return eval_(x).value; }
  Vec subgrad(const Vec& x) const { return eval_(x).subgrad; }

  double weak_convexity() const { return wc_; }
  PrimalMode mode() const { return mode_; }
  const Domain& domain_x() const { return dom_; }
  bool has_closed_prox() const { return static_cast<bool>(prox_); }
  const ProxFn& closed_prox() const { return prox_; }

 private:
  EvalFn eval_;
  double wc_;
  PrimalMode mode_;
  Domain dom_;
  ProxFn prox_;
};

struct GridOptions {
  int resolution_1d = 2001;
  int resolution_2d = 201;
  bool ignore_closed_primal = false;  // grid over Y even when an exact primal exists
};

// Maximizes the true f(x, .) over Y: the instance's exact primal when it has
// one, a grid otherwise (dim Y <= 2).
PrimalOracle true_primal(const ProblemPtr& p, const GridOptions& grid = {});

// Maximizes the surrogate: k = 0 directly, k = 1 by linear maximization,
// k = 2 on a ball by the Krylov oracle, anything else on a grid.
PrimalOracle surrogate_primal(const SurrogateModel& s, const GridOptions& grid = {}, double q_fail = 0.1,
                              std::uint64_t seed = 1);

// automatic: grid for dim X <= 2, general otherwise. golden: 1-D only, golden
// section on the bracket implied by strong convexity.
enum class ProxMethod { automatic, grid, golden, general };

struct ProxOptions {
  long inner_budget = 200000;  // phi evaluations (grid, golden) or iterations (general)
  double tol = 1e-7;
  ProxMethod method = ProxMethod::automatic;
};

struct ProxResult {
  Vec point;
  double residual = 0;
  long evaluations = 0;
  int levels = 0;
  bool closed_form = false;
};

// argmin_u phi(u) + lambda_bar |u - x|^2 over X. Needs 2 lambda_bar > weak_convexity.
ProxResult prox(const PrimalOracle& p, const Vec& x, double lambda_bar, const ProxOptions& opt = {});

// 2 lambda_bar (x - prox(x)), the gradient of the 2 lambda_bar-envelope.
Vec moreau_grad(const PrimalOracle& p, const Vec& x, double lambda_bar, const ProxOptions& opt = {});

// sqrt(2 lam max_u {-<xi, u - x> - lam/2 |u - x|^2}) with u ranging over dom.
double s_x(const Vec& x, const Vec& xi, double lam, const Domain& dom);

struct StationarityReport {
  double moreau_grad_norm = 0;
  Vec prox_point;
  double s_x_residual = 0;  // S_X(x+, subgrad(x+), 2 lambda_bar)
  double prox_residual = 0;
  double epsilon = 0;
  double lambda_bar = 0;
  bool certified = false;
};

StationarityReport verify_fosp(const PrimalOracle& p, const Vec& x, double epsilon, double lambda_bar,
                               const ProxOptions& opt = {});

}  // namespace mmx
