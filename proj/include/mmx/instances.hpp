#pragma once

#include <optional>
#include <string>

#include "mmx/moreau.hpp"
#include "mmx/problems.hpp"

namespace mmx {

enum class Family { F, S };
enum class Regime { weak_coupling, strong_coupling };

// F(x,y) = -lambda x^2/2 + mu x y + s rho |y|^{k+1}/(k+1)!          (family F)
// S(x,y) = -lambda x^2/4 + (rho y/2)(tanh(sqrt(lambda/(rho D)) x) - 1)  (family S)
// with Y = [a, a + D].
struct HardInstanceSpec {
  Family family = Family::F;
  int k = 1;
  int s = 1;
  double lambda = 1.0;
  double mu = 1.0;
  double rho = 1.0;
  double D = 1.0;
  double a = 0.0;
  std::optional<double> x_half_width;  // X = [-w, w]; k = 0 and S use w = mu D / (2 lambda)
};

// sqrt(2 lambda rho / D) for k = 0, sqrt(lambda rho / 2) for k = 1,
// sqrt(lambda rho D^{k-1} / k!) for k >= 2.
double mu_critical(int k, double lambda, double rho, double D);
Regime classify(const HardInstanceSpec& spec);

// Exact oracles, closed-form primal and the smoothness profile of the family.
// Throws ErrorKind::regime when the parameters leave the validity regime.
ProblemPtr build_instance(const HardInstanceSpec& spec);

enum class CertCase {
  prop2_weak,         // F_{0,0}, yhat = R/2, x* = r/2
  prop2_strong,       // S, yhat = 2D/3
  prop3_weak,         // F_{1,-1}, yhat = 0, x* = r
  prop3_strong,       // F_{1,1} with rho/4 and sqrt(lambda rho/2), yhat = R
  prop4_weak,         // F_{k,-1} with mu/2 on [0, D], yhat = 0
  prop4_strong_even,  // F_{k,1} with mu_cr, yhat = R
  prop4_strong_odd,   // F_{k,1} with the odd-k coupling, yhat = (1 - 1/k) R
};

const char* to_string(CertCase c);

struct CertificateRequest {
  int k = 0;
  double lambda = 1.0;
  double mu = 1.0;
  double rho = 1.0;
  double D = 1.0;
  std::optional<Regime> regime;  // when set, must agree with the parameters
};

struct Certificate {
  CertCase which = CertCase::prop2_weak;
  Regime regime = Regime::weak_coupling;
  CertificateRequest request;
  HardInstanceSpec instance;  // the instance actually used (with mu-bar, rho-bar)
  double y_hat = 0;
  double x_star = 0;
  double surrogate_moreau_grad = 0;
  double true_moreau_grad = 0;
  double bound = 0;
  std::string bound_formula;
  bool surrogate_stationary = false;  // |surrogate| <= 1e-10
  bool violates = false;              // |true| >= bound (relative slack 1e-12)
};

Certificate certificate(const CertificateRequest& req);

enum class Envelope { true_primal, surrogate };

// d/dx of the 2 lambda-envelope of phi (true) or phi-hat (surrogate) for the
// construction behind `cert`, from the closed forms. Points outside the
// region where the formula is proven raise ErrorKind::invalid_argument.
double closed_form_moreau_grad(const Certificate& cert, Envelope which, double x);

// Closed-form proximal map for the same constructions (lambda_bar = lambda only).
double closed_form_prox(const Certificate& cert, Envelope which, double x);

// phi (true) or phi-hat (surrogate) of the construction as a primal oracle.
// With closed_prox the prox is the closed form; otherwise the numeric
// solvers run, on an exact phi or, with grid.ignore_closed_primal, a grid.
PrimalOracle certificate_primal(const Certificate& cert, Envelope which, bool closed_prox = true,
                                const GridOptions& grid = {});

// The positive root c of c cosh^2(c) = 2/3, by bisection.
double sigmoid_stationary_c();

// Root x+ >= 0 of x+ + (mu/lambda)(x+ mu k!/rho)^{1/k} = 2x for x >= 0.
double weak_prox_root(double x, int k, double lambda, double mu, double rho);

}  // namespace mmx
