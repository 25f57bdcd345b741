#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mmx/geometry.hpp"

namespace mmx {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Constants of the order-j smoothness assumptions (rho_j, sigma_j, tau_j).
struct OrderConstants {
  double rho = kInf;
  double sigma = kInf;
  double tau = kInf;
};

struct SmoothnessProfile {
  double lambda = 1.0;
  double mu = 0.0;
  int k = 0;  // declared order
  std::map<int, OrderConstants> orders;
  std::optional<double> sigma_0;
  std::optional<double> rho_1;
  bool bilinear = false;

  bool has_order(int j) const { return orders.count(j) > 0; }
  const OrderConstants& order(int j) const;
  double rho_k() const { return order(k).rho; }
  double sigma_k() const { return order(k).sigma; }
  double tau_k() const { return order(k).tau; }
  // rho_1 if declared, else orders[1].rho.
  double rho1() const;

  // Throws ErrorKind::invalid_argument on negative / NaN constants or lambda <= 0,
  // and on BC profiles whose sigma_k / tau_k contradict the BC structure.
  void validate() const;
};

// Oracle bundle. Derivative products not provided are left empty.
struct ProblemInstance {
  using PointFn = std::function<double(const Vec&, const Vec&)>;
  using GradFn = std::function<Vec(const Vec&, const Vec&)>;
  using ProductFn = std::function<Vec(const Vec& x, const Vec& yhat, const Vec& v)>;
  using ScalarDerivFn = std::function<double(double x, double y, int j)>;
  using PrimalFn = std::function<std::pair<double, Vec>(const Vec& x)>;

  std::string name;
  PointFn value;
  GradFn grad_x;
  GradFn grad_y;
  ProductFn hess_yy_vec;  // grad^2_yy f(x, yhat) v
  ProductFn cross_jvp;    // grad^2_xy f(x, yhat) v, an x-vector
  ProductFn cross3_jvp;   // grad^3_xyy f(x, yhat)[., v, v], an x-vector
  // 1-D analytic instances: d^j/dy^j f(x,y) and d/dx d^j/dy^j f(x,y).
  ScalarDerivFn dy;
  ScalarDerivFn dxdy;
  // Exact max_y f(x, y) with a maximizer, when known in closed form.
  PrimalFn primal;

  Domain domain_x = Domain::whole(1);
  Domain domain_y = Domain::interval(0.0, 0.0);
  std::optional<Domain> probe_x;
  SmoothnessProfile profile;

  int dim_x() const { return domain_x.dim(); }
  int dim_y() const { return domain_y.dim(); }
  // Compact region used for sampling and brute force over X.
  const Domain& sampling_x() const;
};

using ProblemPtr = std::shared_ptr<const ProblemInstance>;

// f(x,y) = x y - y^3/3 on Y = [-2, 2]; X = R, or [0, 4] when bounded_x.
ProblemPtr make_intro_example(bool bounded_x = false);

// f(x,y) = x'Px/2 + x'Ay + y'Qy/2 + b'x + c'y, declared bilinearly coupled.
ProblemPtr make_quadratic(const Mat& P, const Mat& A, const Mat& Q, const Vec& b, const Vec& c, Domain X, Domain Y,
                          std::optional<Domain> probe_x = std::nullopt);

// f(x,y) = -lambda|x|^2/2 + mu x'Ay + y'By/2 + s rho |y|^3/6 on X x Ball(0, R).
// Second order is exact up to the cubic, whose Hessian is rho-Lipschitz.
struct CubicBallParams {
  int dim_x = 1;
  int dim_y = 8;
  double lambda = 1.0;
  double mu = 1.0;
  double rho = 1.0;
  int s = 1;
  double radius = 1.0;
  double x_half_width = 1.0;  // X = [-w, w]^dim_x
  double b_scale = 1.0;       // spectral scale of B
  std::uint64_t seed = 7;
};
ProblemPtr make_cubic_ball(const CubicBallParams& params);

struct ProfileCheck {
  std::string name;
  double declared = 0;
  double max_ratio = 0;  // max observed quotient (divided by declared when declared > 0)
  bool violated = false;
  Vec x1, y1, x2, y2;  // witnessing pair when violated
};

struct ProfileReport {
  std::vector<ProfileCheck> checks;
  bool ok = true;
  const ProfileCheck* find(const std::string& name) const;
};

ProfileReport check_profile_by_sampling(const ProblemInstance& p, int n_samples, std::uint64_t seed = 1);

struct FdReport {
  double grad_x = 0, grad_y = 0, hess_yy = 0, cross = 0, cross3 = 0;  // max scaled errors
  bool ok(double tol = 1e-5) const {
    return grad_x <= tol && grad_y <= tol && hess_yy <= tol && cross <= tol && cross3 <= tol;
  }
};

// Central differences with h = 1e-5 max(1, |point|). Errors are
// |oracle - fd| / max(1, |fd|).
FdReport check_oracles_fd(const ProblemInstance& p, int n_points, std::uint64_t seed = 1);

// grad_x(x,y) - grad_x(x,y') must not depend on x; returns the max deviation.
double check_bilinear_coupling(const ProblemInstance& p, std::uint64_t seed = 1);

}  // namespace mmx
