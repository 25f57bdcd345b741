#include <cmath>

#include "mmx/krylov.hpp"
#include "mmx/problems.hpp"

namespace mmx {
namespace {

double sup_norm(const Domain& d) {
  if (!d.bounded()) return kInf;
  Vec lo, hi;
  d.bounds(lo, hi);
  if (d.is_ball()) return d.chebyshev_center().norm() + 0.5 * d.diameter();
  return lo.cwiseAbs().cwiseMax(hi.cwiseAbs()).norm();
}

double spectral_norm(const Mat& M) {
  if (M.size() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(M);
  return svd.singularValues()(0);
}

// Golden-section maximization of a function on [a, b].
template <class F>
double golden_max(F&& f, double a, double b, int iters = 120) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iters && b - a > 1e-15 * (1 + std::abs(a) + std::abs(b)); ++i) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? c : d;
}

}  // namespace

ProblemPtr make_intro_example(bool bounded_x) {
  auto p = std::make_shared<ProblemInstance>();
  p->name = "intro";
  p->value = [](const Vec& x, const Vec& y) { return x[0] * y[0] - y[0] * y[0] * y[0] / 3.0; };
  p->grad_x = [](const Vec&, const Vec& y) { return scalar_vec(y[0]); };
  p->grad_y = [](const Vec& x, const Vec& y) { return scalar_vec(x[0] - y[0] * y[0]); };
  p->hess_yy_vec = [](const Vec&, const Vec& yh, const Vec& v) { return scalar_vec(-2.0 * yh[0] * v[0]); };
  p->cross_jvp = [](const Vec&, const Vec&, const Vec& v) { return scalar_vec(v[0]); };
  p->cross3_jvp = [](const Vec&, const Vec&, const Vec&) { return scalar_vec(0.0); };
  p->dy = [](double x, double y, int j) {
    switch (j) {
      case 0: return x * y - y * y * y / 3.0;
      case 1: return x - y * y;
      case 2: return -2.0 * y;
      case 3: return -2.0;
      default: return 0.0;
    }
  };
  p->dxdy = [](double, double y, int j) { return j == 0 ? y : (j == 1 ? 1.0 : 0.0); };
  // Candidates: both endpoints and the interior critical point y = sqrt(x).
  p->primal = [](const Vec& x) {
    const double xv = x[0];
    double best_y = -2.0, best = -2.0 * xv + 8.0 / 3.0;
    auto consider = [&](double y) {
      double v = xv * y - y * y * y / 3.0;
      if (v > best + 1e-14 * (1 + std::abs(best))) {
        best = v;
        best_y = y;
      }
    };
    if (xv > 0 && xv < 4) consider(std::sqrt(xv));
    consider(2.0);
    return std::make_pair(best, scalar_vec(best_y));
  };
  p->domain_x = bounded_x ? Domain::interval(0.0, 4.0) : Domain::whole(1);
  p->probe_x = Domain::interval(0.0, 4.0);
  p->domain_y = Domain::interval(-2.0, 2.0);

  SmoothnessProfile& s = p->profile;
  s.lambda = 1.0;  // phi is convex here; any lambda > 0 is admissible
  s.mu = 1.0;
  s.k = 2;
  s.bilinear = true;
  s.orders[0] = {bounded_x ? 4.0 : kInf, 2.0, 0.0};
  s.orders[1] = {4.0, 1.0, 0.0};
  s.orders[2] = {2.0, 0.0, 0.0};
  s.sigma_0 = 2.0;
  s.rho_1 = 4.0;
  s.validate();
  return p;
}

ProblemPtr make_quadratic(const Mat& P, const Mat& A, const Mat& Q, const Vec& b, const Vec& c, Domain X, Domain Y,
                          std::optional<Domain> probe_x) {
  const Eigen::Index n = P.rows(), m = Q.rows();
  if (P.cols() != n || Q.cols() != m || A.rows() != n || A.cols() != m || b.size() != n || c.size() != m)
    throw Error(ErrorKind::dimension, "quadratic: inconsistent matrix shapes");
  if (X.dim() != n || Y.dim() != m) throw Error(ErrorKind::dimension, "quadratic: domain dimensions do not match");
  auto Ps = std::make_shared<Mat>(0.5 * (P + P.transpose()));
  auto Qs = std::make_shared<Mat>(0.5 * (Q + Q.transpose()));
  auto As = std::make_shared<Mat>(A);
  auto bs = std::make_shared<Vec>(b), cs = std::make_shared<Vec>(c);

  auto p = std::make_shared<ProblemInstance>();
  p->name = "quadratic";
  p->value = [=](const Vec& x, const Vec& y) {
    return 0.5 * x.dot(*Ps * x) + x.dot(*As * y) + 0.5 * y.dot(*Qs * y) + bs->dot(x) + cs->dot(y);
  };
  p->grad_x = [=](const Vec& x, const Vec& y) -> Vec { return *Ps * x + *As * y + *bs; };
  p->grad_y = [=](const Vec& x, const Vec& y) -> Vec { return As->transpose() * x + *Qs * y + *cs; };
  p->hess_yy_vec = [=](const Vec&, const Vec&, const Vec& v) -> Vec { return *Qs * v; };
  p->cross_jvp = [=](const Vec&, const Vec&, const Vec& v) -> Vec { return *As * v; };
  p->cross3_jvp = [n](const Vec&, const Vec&, const Vec&) -> Vec { return Vec::Zero(n); };
  p->domain_x = std::move(X);
  p->domain_y = std::move(Y);
  p->probe_x = std::move(probe_x);

  const double nP = spectral_norm(*Ps), nA = spectral_norm(A), nQ = spectral_norm(*Qs);
  SmoothnessProfile& s = p->profile;
  s.lambda = std::max(nP, 1e-12);
  s.mu = nA;
  s.k = 1;
  s.bilinear = true;
  s.orders[1] = {nQ, nA, 0.0};
  s.orders[2] = {0.0, 0.0, 0.0};
  s.rho_1 = nQ;
  const double xs = (p->domain_x.bounded() || p->probe_x) ? sup_norm(p->sampling_x()) : kInf;
  const double ys = sup_norm(p->domain_y);
  if (std::isfinite(xs) && std::isfinite(ys)) {
    const double sig0 = nP * xs + nA * ys + b.norm();
    s.orders[0] = {nA * xs + nQ * ys + c.norm(), sig0, 0.0};
    s.sigma_0 = sig0;
  }
  s.validate();
  return p;
}

ProblemPtr make_cubic_ball(const CubicBallParams& cp) {
  if (cp.dim_x < 1 || cp.dim_y < 1) throw Error(ErrorKind::dimension, "cubic_ball: dimensions must be >= 1");
  if (!(cp.radius > 0) || !(cp.rho >= 0) || !(cp.lambda > 0) || !(cp.mu >= 0) || !(cp.x_half_width > 0))
    throw Error(ErrorKind::invalid_argument, "cubic_ball: needs lambda, radius, x_half_width > 0 and mu, rho >= 0");
  if (cp.s < -1 || cp.s > 1) throw Error(ErrorKind::invalid_argument, "cubic_ball: s must be -1, 0 or 1");

  std::mt19937_64 rng(cp.seed);
  std::normal_distribution<double> gauss;
  Mat A(cp.dim_x, cp.dim_y), G(cp.dim_y, cp.dim_y);
  for (Eigen::Index i = 0; i < A.size(); ++i) A.data()[i] = gauss(rng);
  for (Eigen::Index i = 0; i < G.size(); ++i) G.data()[i] = gauss(rng);
  A /= spectral_norm(A);
  Mat B = 0.5 * (G + G.transpose());
  const double nb = EigenSystem::of(B).values.cwiseAbs().maxCoeff();
  if (nb > 0) B *= cp.b_scale / nb;

  auto As = std::make_shared<Mat>(A);
  auto Bs = std::make_shared<Mat>(B);
  auto eig = std::make_shared<EigenSystem>(EigenSystem::of(B));
  const double lam = cp.lambda, mu = cp.mu, rho = cp.rho, R = cp.radius;
  const double s = cp.s;

  auto p = std::make_shared<ProblemInstance>();
  p->name = "cubic_ball";
  p->value = [=](const Vec& x, const Vec& y) {
    double ny = y.norm();
    return -0.5 * lam * x.squaredNorm() + mu * x.dot(*As * y) + 0.5 * y.dot(*Bs * y) + s * rho * ny * ny * ny / 6.0;
  };
  p->grad_x = [=](const Vec& x, const Vec& y) -> Vec { return -lam * x + mu * (*As * y); };
  p->grad_y = [=](const Vec& x, const Vec& y) -> Vec {
    return mu * (As->transpose() * x) + *Bs * y + (0.5 * s * rho * y.norm()) * y;
  };
  p->hess_yy_vec = [=](const Vec&, const Vec& yh, const Vec& v) -> Vec {
    Vec out = *Bs * v;
    double n = yh.norm();
    if (n > 0) out += (0.5 * s * rho) * (n * v + yh * (yh.dot(v) / n));
    return out;
  };
  p->cross_jvp = [=](const Vec&, const Vec&, const Vec& v) -> Vec { return mu * (*As * v); };
  const int nx = cp.dim_x;
  p->cross3_jvp = [nx](const Vec&, const Vec&, const Vec&) -> Vec { return Vec::Zero(nx); };
  // max over shells |y| = t: the quadratic part is a sphere-constrained
  // quadratic, the cubic depends on t only.
  p->primal = [=](const Vec& x) {
    Vec g = mu * (As->transpose() * x);
    auto shell = [&](double t) { return sphere_quadratic_max(*eig, g, t).first + s * rho * t * t * t / 6.0; };
    const int n = 400;
    int bi = 0;
    double bv = shell(0.0);
    for (int i = 1; i <= n; ++i) {
      double v = shell(R * i / n);
      if (v > bv) {
        bv = v;
        bi = i;
      }
    }
    double a = R * std::max(0, bi - 1) / n, b = R * std::min(n, bi + 1) / n;
    double t = golden_max(shell, a, b);
    double tv = shell(t);
    if (tv < bv) t = R * bi / n;
    auto [qv, y] = sphere_quadratic_max(*eig, g, t);
    return std::make_pair(-0.5 * lam * x.squaredNorm() + qv + s * rho * t * t * t / 6.0, y);
  };
  p->domain_x = Domain::box(Vec::Constant(cp.dim_x, -cp.x_half_width), Vec::Constant(cp.dim_x, cp.x_half_width));
  p->domain_y = Domain::ball(Vec::Zero(cp.dim_y), R);

  const double nB = eig->values.cwiseAbs().maxCoeff();
  const double xs = cp.x_half_width * std::sqrt(static_cast<double>(cp.dim_x));
  SmoothnessProfile& prof = p->profile;
  prof.lambda = lam;
  prof.mu = mu;
  prof.k = 2;
  prof.bilinear = true;
  const double sig0 = lam * xs + mu * R;
  prof.orders[0] = {mu * xs + nB * R + std::abs(s) * rho * R * R / 2.0, sig0, 0.0};
  prof.orders[1] = {nB + std::abs(s) * rho * R, mu, 0.0};
  prof.orders[2] = {std::abs(s) * rho, 0.0, 0.0};
  prof.sigma_0 = sig0;
  prof.rho_1 = nB + std::abs(s) * rho * R;
  prof.validate();
  return p;
}

}  // namespace mmx
