#include "mmx/krylov.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

namespace mmx {

QuadraticForm QuadraticForm::from_dense(const Mat& H, const Vec& g) {
  if (H.rows() != H.cols() || H.rows() != g.size())
    throw Error(ErrorKind::dimension, "quadratic form: H must be square and match g");
  QuadraticForm q;
  q.g = g;
  q.dense = H;
  auto Hs = std::make_shared<Mat>(H);
  q.hvp = [Hs](const Vec& v) -> Vec { return (*Hs) * v; };
  return q;
}

namespace {

constexpr double kDrop = 1e-12;

// Orthonormalizes the columns of W against Qprev and each other. Columns whose
// residual is below kDrop * ref[j] are dropped. beta holds the Gram-Schmidt
// coefficients: W ~ Qnew * beta, upper trapezoidal by construction.
void orthonormalize(const Mat& Qprev, const Mat& W, const Vec& ref, Mat& Qnew, Mat& beta) {
  const Eigen::Index d = W.rows(), b = W.cols();
  Mat Wc = W;
  for (int pass = 0; pass < 2; ++pass)
    if (Qprev.cols() > 0) Wc -= Qprev * (Qprev.transpose() * Wc);

  std::vector<Vec> kept;
  Mat coef = Mat::Zero(b, b);
  for (Eigen::Index j = 0; j < b; ++j) {
    Vec w = Wc.col(j);
    for (int pass = 0; pass < 2; ++pass) {
      for (size_t i = 0; i < kept.size(); ++i) {
        double c = kept[i].dot(w);
        coef(static_cast<Eigen::Index>(i), j) += c;
        w -= c * kept[i];
      }
      if (Qprev.cols() > 0) w -= Qprev * (Qprev.transpose() * w);
    }
    double n = w.norm();
    if (n > kDrop * ref[j] && n > 0) {
      coef(static_cast<Eigen::Index>(kept.size()), j) = n;
      kept.push_back(w / n);
    }
  }
  Qnew.resize(d, static_cast<Eigen::Index>(kept.size()));
  for (size_t i = 0; i < kept.size(); ++i) Qnew.col(static_cast<Eigen::Index>(i)) = kept[i];
  beta = coef.topRows(static_cast<Eigen::Index>(kept.size()));
}

struct SecularResult {
  Vec coeff;  // solution in the eigenbasis
  bool hard_case = false;
  int iterations = 0;
};

// Solves |coeff| = t with coeff_i = c_i / (omega - lam_i), omega >= omega_lo >= lam_max,
// falling back to the eigenvector correction when c is (numerically) orthogonal
// to the top eigenspace and the remaining part is too short.
SecularResult boundary_solve(const Vec& lam, const Vec& c, double t, double omega_lo, double top_tol) {
  const Eigen::Index n = lam.size();
  const double lmax = lam[n - 1];
  SecularResult out;
  if (t == 0) {
    out.coeff = Vec::Zero(n);
    return out;
  }
  const bool at_top = omega_lo <= lmax + top_tol;
  double lo = at_top ? lmax : omega_lo;

  auto norm_at = [&](double w, bool skip_top) {
    double s = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (skip_top && lam[i] >= lmax - top_tol) continue;
      double q = c[i] / (w - lam[i]);
      s += q * q;
    }
    return std::sqrt(s);
  };

  if (at_top) {
    double ctop = 0;
    for (Eigen::Index i = 0; i < n; ++i)
      if (lam[i] >= lmax - top_tol) ctop += c[i] * c[i];
    ctop = std::sqrt(ctop);
    const double n_ex = norm_at(lmax, true);
    if (ctop <= 1e-10 * c.norm() && n_ex <= t) {
      out.hard_case = true;
      out.coeff = Vec::Zero(n);
      for (Eigen::Index i = 0; i < n; ++i)
        if (lam[i] < lmax - top_tol) out.coeff[i] = c[i] / (lmax - lam[i]);
      out.coeff[n - 1] = std::sqrt(std::max(0.0, t * t - n_ex * n_ex));
      return out;
    }
  }

  double hi = std::max(lo, lmax) + c.norm() / t + 1e-300;
  if (norm_at(lo, false) <= t && !at_top) {
    // root sits at the lower limit up to round-off
    hi = lo;
  }
  double w = hi;
  int it = 0;
  double width = hi - lo;
  for (; it < 200; ++it) {
    double nz = norm_at(w, false);
    if (std::abs(nz - t) <= 1e-13 * t) break;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi)) ||
        hi - lo <= std::numeric_limits<double>::min())
      break;
    double psi = 1.0 / nz - 1.0 / t;
    if (psi < 0) lo = w;
    else hi = w;
    double s3 = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      double q = w - lam[i];
      s3 += c[i] * c[i] / (q * q * q);
    }
    double dpsi = s3 / (nz * nz * nz);
    double next = w - psi / dpsi;
    // bisect when Newton leaves the bracket or the bracket stops shrinking
    if (!(next > lo && next < hi) || !std::isfinite(next) || (it % 3 == 2 && hi - lo > 0.5 * width))
      next = 0.5 * (lo + hi);
    if (it % 3 == 2) width = hi - lo;
    if (next == w) break;
    w = next;
  }
  if (it == 200) throw Error(ErrorKind::numerical, "trust-region root finder did not converge in 200 iterations");
  out.iterations = it;
  out.coeff.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) out.coeff[i] = c[i] / (w - lam[i]);
  double nz = out.coeff.norm();
  if (nz > 0) out.coeff *= t / nz;
  return out;
}

}  // namespace

LanczosResult block_lanczos(const QuadraticForm& q, const Vec& xi, int m) {
  const int d = q.dim();
  if (xi.size() != d) throw Error(ErrorKind::dimension, "block_lanczos: xi has wrong dimension");
  if (m < 1) throw Error(ErrorKind::invalid_argument, "block_lanczos: m must be >= 1");

  LanczosResult r;
  std::vector<Mat> qs, alphas, betas;  // betas[t] couples block t+1 to block t

  Mat W0(d, 2);
  W0.col(0) = q.g;
  W0.col(1) = xi;
  Vec ref0(2);
  ref0 << q.g.norm(), xi.norm();
  Mat Q0, B0;
  orthonormalize(Mat(d, 0), W0, ref0, Q0, B0);
  if (Q0.cols() == 0) throw Error(ErrorKind::invalid_argument, "block_lanczos: g and xi are both zero");
  qs.push_back(Q0);
  Mat Qall = Q0;

  for (int t = 0; t < m; ++t) {
    const Mat& qt = qs[t];
    Mat Hq(d, qt.cols());
    for (Eigen::Index j = 0; j < qt.cols(); ++j) {
      Hq.col(j) = q.hvp(qt.col(j));
      ++r.hvp_calls;
    }
    Mat a = qt.transpose() * Hq;
    alphas.push_back(0.5 * (a + a.transpose()));
    if (t == m - 1) break;

    Mat W = Hq - qt * alphas[t];
    if (t > 0) W -= qs[t - 1] * betas[t - 1].transpose();
    Vec ref(Hq.cols());
    for (Eigen::Index j = 0; j < Hq.cols(); ++j) ref[j] = std::max(Hq.col(j).norm(), 1e-300);
    Mat Qn, Bn;
    orthonormalize(Qall, W, ref, Qn, Bn);
    if (Qn.cols() == 0) {
      r.breakdown = true;
      break;
    }
    betas.push_back(Bn);
    qs.push_back(Qn);
    Mat grown(d, Qall.cols() + Qn.cols());
    grown << Qall, Qn;
    Qall = std::move(grown);
  }

  r.steps = static_cast<int>(alphas.size());
  // a breakdown leaves one extra block allocated only if it had columns; trim to alphas
  qs.resize(alphas.size());
  Eigen::Index n = 0;
  for (const auto& b : qs) {
    r.block_sizes.push_back(static_cast<int>(b.cols()));
    n += b.cols();
  }
  r.Q = Qall.leftCols(n);
  r.H_tilde = Mat::Zero(n, n);
  Eigen::Index off = 0;
  for (size_t t = 0; t < qs.size(); ++t) {
    const Eigen::Index b = qs[t].cols();
    r.H_tilde.block(off, off, b, b) = alphas[t];
    if (t + 1 < qs.size()) {
      const Mat& B = betas[t];
      r.H_tilde.block(off + b, off, B.rows(), B.cols()) = B;
      r.H_tilde.block(off, off + b, B.cols(), B.rows()) = B.transpose();
    }
    off += b;
  }
  return r;
}

ReducedSolution solve_reduced(const Mat& Ht, const Vec& gt, double R) {
  if (Ht.rows() != Ht.cols() || Ht.rows() != gt.size())
    throw Error(ErrorKind::dimension, "solve_reduced: shape mismatch");
  if (!(R >= 0)) throw Error(ErrorKind::invalid_argument, "solve_reduced: R must be >= 0");
  const Eigen::Index n = Ht.rows();
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (Ht + Ht.transpose()));
  const Vec& lam = es.eigenvalues();
  const Mat& V = es.eigenvectors();
  Vec c = V.transpose() * gt;
  const double tol0 = 1e-10 * (1.0 + Ht.cwiseAbs().rowwise().sum().maxCoeff());
  const double w0 = lam[n - 1];

  ReducedSolution out;
  if (w0 < -tol0) {
    Vec z0 = -(c.array() / lam.array()).matrix();
    if (z0.norm() <= R) {
      out.z = V * z0;
      out.branch = Branch::interior;
      return out;
    }
  } else if (std::abs(w0) <= tol0) {
    double resid = 0;
    Vec z0 = Vec::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(lam[i]) <= tol0) resid += c[i] * c[i];
      else z0[i] = -c[i] / lam[i];
    }
    if (std::sqrt(resid) <= 1e-8 * gt.norm() && z0.norm() <= R) {
      out.z = V * z0;
      out.branch = Branch::interior;
      return out;
    }
  }
  SecularResult s = boundary_solve(lam, c, R, std::max(w0, 0.0), tol0);
  out.z = V * s.coeff;
  out.branch = Branch::boundary;
  out.hard_case = s.hard_case;
  out.iterations = s.iterations;
  return out;
}

int krylov_size(int d, double R, double delta, double rho1, double q_fail) {
  if (!(delta > 0)) throw Error(ErrorKind::invalid_argument, "krylov_size: delta must be > 0");
  if (!(q_fail > 0 && q_fail < 1)) throw Error(ErrorKind::invalid_argument, "krylov_size: q must be in (0,1)");
  const double L = std::log(2.0 * std::sqrt(static_cast<double>(d)) / q_fail);
  const double M = 2.0 * R * std::sqrt(rho1 / delta * (2.0 + L * L));
  const double m = std::ceil(std::min(M, d / 2.0));
  return std::max(1, static_cast<int>(m));
}

double krylov_gap_bound(double h_norm, double R, int m, int d, double q_fail) {
  const double L = std::log(2.0 * std::sqrt(static_cast<double>(d)) / q_fail);
  return 4.0 * h_norm * R * R / (static_cast<double>(m) * m) * (2.0 + L * L);
}

Vec random_unit(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Vec v(d);
  double n = 0;
  while (n == 0) {
    for (int i = 0; i < d; ++i) v[i] = gauss(rng);
    n = v.norm();
  }
  return v / n;
}

KrylovResult krylov_max(const QuadraticForm& q, double R, int m, const Vec& xi, double rho1, double q_fail) {
  LanczosResult lz = block_lanczos(q, xi, m);
  Vec gt = lz.Q.transpose() * q.g;
  ReducedSolution sol = solve_reduced(lz.H_tilde, gt, R);
  KrylovResult r;
  r.y = lz.Q * sol.z;
  double n = r.y.norm();
  if (n > R) r.y *= R / n;
  r.value = q.value(r.y);
  r.branch = sol.branch;
  r.hard_case = sol.hard_case;
  r.m_requested = m;
  r.m_used = lz.steps;
  r.breakdown = lz.breakdown;
  r.full_space = lz.Q.cols() >= q.dim();
  r.predicted_gap = r.full_space ? 0.0 : krylov_gap_bound(rho1, R, m, q.dim(), q_fail);
  r.hvp_calls = lz.hvp_calls + 1;
  return r;
}

KrylovResult approx_max(const QuadraticForm& q, double R, double delta, double rho1, double q_fail,
                        std::mt19937_64& rng) {
  const int m = krylov_size(q.dim(), R, delta, rho1, q_fail);
  Vec xi = random_unit(q.dim(), rng);
  return krylov_max(q, R, m, xi, rho1, q_fail);
}

KrylovResult approx_max(const QuadraticForm& q, double R, double delta, double rho1, double q_fail,
                        std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return approx_max(q, R, delta, rho1, q_fail, rng);
}

EigenSystem EigenSystem::of(const Mat& H) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (H + H.transpose()));
  return EigenSystem{es.eigenvalues(), es.eigenvectors()};
}

std::pair<double, Vec> sphere_quadratic_max(const EigenSystem& eig, const Vec& g, double t) {
  const Eigen::Index n = eig.values.size();
  if (t == 0) return {0.0, Vec::Zero(n)};
  Vec c = eig.vectors.transpose() * g;
  const double tol = 1e-12 * (1.0 + eig.values.cwiseAbs().maxCoeff());
  SecularResult s = boundary_solve(eig.values, c, t, eig.values[n - 1], tol);
  double value = c.dot(s.coeff) + 0.5 * (eig.values.array() * s.coeff.array().square()).sum();
  return {value, eig.vectors * s.coeff};
}

}  // namespace mmx
