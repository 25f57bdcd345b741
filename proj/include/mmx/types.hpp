#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace mmx {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class ErrorKind {
  invalid_argument,
  dimension,
  config,
  budget,
  numerical,
  unsupported,
  regime,
  assertion,
  io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Thrown when an iterative method stops before its accuracy target. Carries
// the best point seen so callers can still report it.
class BudgetError : public Error {
 public:
  BudgetError(const std::string& what, Vec best)
      : Error(ErrorKind::budget, what), best_(std::move(best)) {}
  const Vec& best() const { return best_; }

 private:
  Vec best_;
};

inline Vec scalar_vec(double v) {
  Vec out(1);
  out[0] = v;
  return out;
}

}  // namespace mmx
