#include "mmx/theory.hpp"

#include <algorithm>
#include <cmath>

#include "mmx/surrogate.hpp"

namespace mmx {

DiameterVerdict check_theorem1(const SmoothnessProfile& pr, double D, double eps, int k, double multiplier) {
  if (!(eps > 0)) throw Error(ErrorKind::invalid_argument, "check_theorem1: epsilon must be > 0");
  if (!(D >= 0)) throw Error(ErrorKind::invalid_argument, "check_theorem1: D must be >= 0");
  if (k < 0) throw Error(ErrorKind::invalid_argument, "check_theorem1: k must be >= 0");
  DiameterVerdict v;
  v.k = k;
  v.epsilon = eps;
  v.D = D;
  v.lambda = pr.lambda;
  v.mu = pr.mu;
  const OrderConstants oc = pr.has_order(k) ? pr.order(k) : OrderConstants{};
  v.rho_k = oc.rho;
  v.sigma_k = oc.sigma;
  v.tau_k = oc.tau;
  if (pr.sigma_0) v.sigma_0 = *pr.sigma_0;
  if (k == 0) {
    v.lambda_bar = pr.lambda;
    v.coupling_term = std::min(pr.mu * D, 2.0 * v.sigma_0);
    v.homogeneous_term = std::sqrt(pr.lambda * v.rho_k * D / 50.0);
  } else {
    v.lambda_bar = pr.lambda + 2.0 * v.tau_k * std::pow(D, k) / factorial(k);
    v.coupling_term = pr.mu * D + 2.0 * v.sigma_k * std::pow(D, k) / factorial(k);
    v.homogeneous_term = std::sqrt(v.lambda_bar * v.rho_k * std::pow(D, k + 1) / (50.0 * factorial(k + 1)));
  }
  // 0 * inf terms (D = 0 with an undeclared constant) count as 0
  if (std::isnan(v.coupling_term)) v.coupling_term = 0;
  if (std::isnan(v.homogeneous_term)) v.homogeneous_term = 0;
  v.lhs = std::min(v.coupling_term, v.homogeneous_term);
  v.admissible = v.lhs <= eps / 24.0;
  v.binding_term = v.coupling_term <= v.homogeneous_term ? "coupling" : "homogeneous";
  if (std::isfinite(v.rho_k) || pr.mu > 0) v.leading_order_D = leading_order_diameter(pr, eps, k, multiplier);
  if (k >= 2) v.high_accuracy = eps <= multiplier * high_accuracy_threshold(pr, k);
  return v;
}

double leading_order_diameter(const SmoothnessProfile& pr, double eps, int k, double multiplier) {
  const double rho = pr.has_order(k) ? pr.order(k).rho : kInf;
  double hom = rho > 0 ? std::pow(eps * eps * factorial(k + 1) / (pr.lambda * rho), 1.0 / (k + 1)) : kInf;
  double cpl = pr.mu > 0 ? eps / pr.mu : 0.0;
  return multiplier * std::max(cpl, hom);
}

double eps_threshold(const SmoothnessProfile& pr, int k) {
  if (k < 1) throw Error(ErrorKind::invalid_argument, "eps_threshold needs k >= 1");
  const OrderConstants& oc = pr.order(k);
  if (k == 1) return oc.tau > 0 ? std::sqrt(std::pow(pr.lambda, 3) * oc.rho / (oc.tau * oc.tau)) : kInf;
  double a = oc.sigma > 0 ? std::pow(std::pow(pr.mu, k) / oc.sigma, 1.0 / (k - 1)) : kInf;
  double b = oc.tau > 0 ? std::pow(std::pow(pr.lambda, 2 * k + 1) * std::pow(oc.rho, k) / std::pow(oc.tau, k + 1),
                                   1.0 / (2 * k))
                        : kInf;
  return std::min(a, b);
}

bool check_eps_threshold(const SmoothnessProfile& pr, double eps, int k, double multiplier) {
  return eps <= multiplier * eps_threshold(pr, k);
}

double high_accuracy_threshold(const SmoothnessProfile& pr, int k) {
  if (k < 2) throw Error(ErrorKind::invalid_argument, "high_accuracy_threshold needs k >= 2");
  const double rho = pr.order(k).rho;
  if (rho == 0) return kInf;
  return std::pow(std::pow(pr.mu, k + 1) / (pr.lambda * rho), 1.0 / (k - 1));
}

double theorem1_threshold_D(const SmoothnessProfile& pr, double eps, int k, double D_start) {
  auto ok = [&](double D) { return check_theorem1(pr, D, eps, k).admissible; };
  double lo = D_start, hi = D_start;
  if (ok(lo)) {
    for (int i = 0; i < 2000 && ok(hi); ++i) hi *= 2.0;
    if (ok(hi)) return kInf;
    lo = 0.5 * hi;
  } else {
    for (int i = 0; i < 2000 && !ok(lo); ++i) lo *= 0.5;
    if (!ok(lo)) return 0.0;
    hi = 2.0 * lo;
  }
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (ok(mid)) lo = mid;
    else hi = mid;
  }
  return lo;
}

}  // namespace mmx
