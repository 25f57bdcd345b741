#include "mmx/surrogate.hpp"

#include <cmath>
#include <sstream>

namespace mmx {

double factorial(int n) {
  double f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

SurrogateModel::SurrogateModel(ProblemPtr base, int k, Vec center)
    : base_(std::move(base)), k_(k), center_(std::move(center)) {
  if (!base_) throw Error(ErrorKind::invalid_argument, "surrogate: null problem");
  if (k_ < 0) throw Error(ErrorKind::invalid_argument, "surrogate: k must be >= 0");
  const ProblemInstance& p = *base_;
  if (center_.size() != p.dim_y()) throw Error(ErrorKind::dimension, "surrogate: center has wrong dimension");
  if (!p.domain_y.contains(center_, 1e-12 * (1 + p.domain_y.diameter())))
    throw Error(ErrorKind::invalid_argument, "surrogate: center must lie in Y");
  if (k_ == 2 && !p.hess_yy_vec) throw Error(ErrorKind::unsupported, "surrogate: order 2 needs hess_yy_vec");
  if (k_ > 2 && !(p.dy && p.dxdy && p.dim_x() == 1 && p.dim_y() == 1)) {
    std::ostringstream os;
    os << "surrogate: order " << k_ << " is only available for 1-D analytic instances";
    throw Error(ErrorKind::unsupported, os.str());
  }
  D_ = p.domain_y.diameter();
  lambda_bar_ = p.profile.lambda;
  if (k_ >= 1 && p.profile.has_order(k_))
    lambda_bar_ += 2.0 * p.profile.order(k_).tau * std::pow(D_, k_) / factorial(k_);
}

void SurrogateModel::check_y(const Vec& y) const {
  if (!base_->domain_y.contains(y, 1e-9 * (1 + D_)))
    throw Error(ErrorKind::invalid_argument, "surrogate: y must lie in Y");
}

double SurrogateModel::value(const Vec& x, const Vec& y) const {
  check_y(y);
  const ProblemInstance& p = *base_;
  if (k_ > 2) {
    const double v = y[0] - center_[0];
    double s = 0, pw = 1;
    for (int j = 0; j <= k_; ++j) {
      s += p.dy(x[0], center_[0], j) * pw / factorial(j);
      pw *= v;
    }
    return s;
  }
  double s = p.value(x, center_);
  if (k_ == 0) return s;
  Vec v = y - center_;
  s += p.grad_y(x, center_).dot(v);
  if (k_ == 2) s += 0.5 * v.dot(p.hess_yy_vec(x, center_, v));
  return s;
}

Vec SurrogateModel::grad_x(const Vec& x, const Vec& y) const {
  check_y(y);
  const ProblemInstance& p = *base_;
  if (k_ > 2) {
    const double v = y[0] - center_[0];
    double s = 0, pw = 1;
    for (int j = 0; j <= k_; ++j) {
      s += p.dxdy(x[0], center_[0], j) * pw / factorial(j);
      pw *= v;
    }
    return scalar_vec(s);
  }
  Vec g = p.grad_x(x, center_);
  if (k_ == 0) return g;
  Vec v = y - center_;
  if (!p.cross_jvp) throw Error(ErrorKind::unsupported, "surrogate: grad_x of order >= 1 needs cross_jvp");
  g += p.cross_jvp(x, center_, v);
  if (k_ == 2) {
    if (!p.cross3_jvp) throw Error(ErrorKind::unsupported, "surrogate: grad_x of order 2 needs cross3_jvp");
    g += 0.5 * p.cross3_jvp(x, center_, v);
  }
  return g;
}

Vec SurrogateModel::grad_y(const Vec& x, const Vec& y) const {
  check_y(y);
  const ProblemInstance& p = *base_;
  if (k_ > 2) {
    const double v = y[0] - center_[0];
    double s = 0, pw = 1;
    for (int j = 1; j <= k_; ++j) {
      s += p.dy(x[0], center_[0], j) * pw / factorial(j - 1);
      pw *= v;
    }
    return scalar_vec(s);
  }
  if (k_ == 0) return Vec::Zero(p.dim_y());
  Vec g = p.grad_y(x, center_);
  if (k_ == 2) g += p.hess_yy_vec(x, center_, y - center_);
  return g;
}

double SurrogateModel::value_error_bound() const {
  return base_->profile.order(k_).rho * std::pow(D_, k_ + 1) / factorial(k_ + 1);
}

double SurrogateModel::gradx_error_bound() const {
  const SmoothnessProfile& prof = base_->profile;
  if (k_ == 0) {
    double b = prof.mu * D_;
    if (prof.sigma_0) b = std::min(b, 2.0 * *prof.sigma_0);
    return b;
  }
  return 2.0 * prof.order(k_).sigma * std::pow(D_, k_) / factorial(k_);
}

QuadraticForm SurrogateModel::quadratic_at(const Vec& x, double* constant) const {
  if (k_ != 2) throw Error(ErrorKind::unsupported, "quadratic_at needs an order-2 surrogate");
  const ProblemPtr base = base_;
  const Vec c = center_;
  QuadraticForm q;
  q.g = base->grad_y(x, c);
  q.hvp = [base, x, c](const Vec& v) -> Vec { return base->hess_yy_vec(x, c, v); };
  if (constant) *constant = base->value(x, c);
  return q;
}

}  // namespace mmx
