#pragma once

#include <string>

#include "mmx/problems.hpp"

namespace mmx {

struct DiameterVerdict {
  int k = 0;
  double epsilon = 0;
  double D = 0;
  double lambda = 0, lambda_bar = 0, mu = 0, rho_k = 0, sigma_k = 0, tau_k = 0;
  double sigma_0 = kInf;
  double coupling_term = 0;     // mu D (+ 2 sigma_k D^k / k!), or min{mu D, 2 sigma_0} for k = 0
  double homogeneous_term = 0;  // the square-root term
  double lhs = 0;
  bool admissible = false;  // lhs <= epsilon / 24
  std::string binding_term;  // "coupling" or "homogeneous"
  double leading_order_D = 0;  // leading-order (constant-free)
  bool high_accuracy = false;  // leading-order (constant-free)
};

// Sufficient diameter condition for transferring stationarity from the order-k
// surrogate to the original problem, with the literal constants 24 and 50.
DiameterVerdict check_theorem1(const SmoothnessProfile& profile, double D, double epsilon, int k,
                               double multiplier = 1.0);

// multiplier * max{eps / mu, (eps^2 (k+1)! / (lambda rho_k))^{1/(k+1)}}; the
// first term is dropped when mu = 0.
double leading_order_diameter(const SmoothnessProfile& profile, double epsilon, int k, double multiplier = 1.0);

// (lambda^3 rho_1 / tau_1^2)^{1/2} for k = 1; for k > 1 the minimum of
// (mu^k / sigma_k)^{1/(k-1)} and (lambda^{2k+1} rho_k^k / tau_k^{k+1})^{1/(2k)}.
// Vanishing sigma / tau give +inf.
double eps_threshold(const SmoothnessProfile& profile, int k);
bool check_eps_threshold(const SmoothnessProfile& profile, double epsilon, int k, double multiplier = 1.0);

// (mu^{k+1} / (lambda rho_k))^{1/(k-1)} for k >= 2.
double high_accuracy_threshold(const SmoothnessProfile& profile, int k);

// Largest D (to bisection precision) at which check_theorem1 is admissible,
// with the profile constants held fixed. Starts from D_start.
double theorem1_threshold_D(const SmoothnessProfile& profile, double epsilon, int k, double D_start);

}  // namespace mmx
