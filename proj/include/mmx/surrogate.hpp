#pragma once

#include "mmx/krylov.hpp"
#include "mmx/problems.hpp"

namespace mmx {

// Order-k Taylor model of f(x, .) around the center yhat. Orders 0..2 use the
// generic oracles; higher orders need the 1-D derivative formulas (dy, dxdy).
class SurrogateModel {
 public:
  SurrogateModel(ProblemPtr base, int k, Vec center);

  const ProblemInstance& base() const { return *base_; }
  const ProblemPtr& base_ptr() const { return base_; }
  int k() const { return k_; }
  const Vec& center() const { return center_; }
  double D() const { return D_; }
  // lambda + 2 tau_k D^k / k! for k >= 1
  double lambda_bar() const { return lambda_bar_; }

  double value(const Vec& x, const Vec& y) const;
  Vec grad_x(const Vec& x, const Vec& y) const;
  Vec grad_y(const Vec& x, const Vec& y) const;

  // rho_k D^{k+1} / (k+1)!
  double value_error_bound() const;
  // min{mu D, 2 sigma_0} for k = 0, 2 sigma_k D^k / k! otherwise
  double gradx_error_bound() const;

  // The k = 2 model at x as Psi(w) = w'Hw/2 + g'w in the displacement
  // w = y - yhat, plus the constant f(x, yhat).
  QuadraticForm quadratic_at(const Vec& x, double* constant = nullptr) const;

 private:
  void check_y(const Vec& y) const;

  ProblemPtr base_;
  int k_;
  Vec center_;
  double D_;
  double lambda_bar_;
};

double factorial(int n);

}  // namespace mmx
