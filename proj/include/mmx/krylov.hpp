#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "mmx/types.hpp"

namespace mmx {

// Psi(y) = y'Hy/2 + g'y with H available only through products.
struct QuadraticForm {
  Vec g;
  std::function<Vec(const Vec&)> hvp;
  std::optional<Mat> dense;

  int dim() const { return static_cast<int>(g.size()); }
  double value(const Vec& y) const { return 0.5 * y.dot(hvp(y)) + g.dot(y); }

  static QuadraticForm from_dense(const Mat& H, const Vec& g);
};

struct LanczosResult {
  Mat Q;        // d x n, orthonormal columns
  Mat H_tilde;  // n x n, block tridiagonal with upper-triangular couplings
  int steps = 0;
  bool breakdown = false;
  long hvp_calls = 0;
  std::vector<int> block_sizes;
};

// Block Lanczos on span{H^j g, H^j xi : j < m} with full re-orthogonalization.
// A block whose Gram-Schmidt residual falls below 1e-12 (relative) is
// dropped; an empty block ends the iteration (invariant subspace).
LanczosResult block_lanczos(const QuadraticForm& q, const Vec& xi, int m);

enum class Branch { interior, boundary };

struct ReducedSolution {
  Vec z;
  Branch branch = Branch::interior;
  bool hard_case = false;
  int iterations = 0;
};

// argmax_{|z| <= R} z'Hz/2 + g'z for a small symmetric H.
ReducedSolution solve_reduced(const Mat& H_tilde, const Vec& g_tilde, double R);

struct KrylovResult {
  Vec y;
  double value = 0;
  Branch branch = Branch::interior;
  bool hard_case = false;
  int m_requested = 0;
  int m_used = 0;
  bool breakdown = false;
  bool full_space = false;
  double predicted_gap = 0;
  long hvp_calls = 0;
};

// m-bar = ceil(min{2R sqrt(rho1/delta (2 + log^2(2 sqrt(d)/q))), d/2}), at least 1.
int krylov_size(int d, double R, double delta, double rho1, double q_fail);

// 4 h R^2 / m^2 (2 + log^2(2 sqrt(d)/q))
double krylov_gap_bound(double h_norm, double R, int m, int d, double q_fail);

Vec random_unit(int d, std::mt19937_64& rng);

// Krylov maximizer of Psi over the ball of radius R centered at 0 with an explicit
// subspace depth m and start vector xi. hvp_calls = Lanczos products + 1.
KrylovResult krylov_max(const QuadraticForm& q, double R, int m, const Vec& xi, double rho1, double q_fail);

KrylovResult approx_max(const QuadraticForm& q, double R, double delta, double rho1, double q_fail,
                        std::mt19937_64& rng);
KrylovResult approx_max(const QuadraticForm& q, double R, double delta, double rho1, double q_fail,
                        std::uint64_t seed);

struct EigenSystem {
  Vec values;  // ascending
  Mat vectors;
  static EigenSystem of(const Mat& H);
};

// max_{|y| = t} g'y + y'Hy/2 from an eigendecomposition of H: (value, argmax).
std::pair<double, Vec> sphere_quadratic_max(const EigenSystem& eig, const Vec& g, double t);

}  // namespace mmx
