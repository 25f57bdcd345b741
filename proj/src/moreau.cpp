#include "mmx/moreau.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mmx/gridsearch.hpp"
#include "mmx/krylov.hpp"

namespace mmx {

PrimalOracle::PrimalOracle(EvalFn eval, double weak_convexity, PrimalMode mode, Domain domain_x, ProxFn closed_prox)
    : eval_(std::move(eval)), wc_(weak_convexity), mode_(mode), dom_(std::move(domain_x)), prox_(std::move(closed_prox)) {
  if (!eval_) throw Error(ErrorKind::invalid_argument, "primal oracle: empty evaluator");
  if (!(wc_ >= 0) || !std::isfinite(wc_)) throw Error(ErrorKind::invalid_argument, "primal oracle: bad weak convexity");
}

PrimalOracle true_primal(const ProblemPtr& p, const GridOptions& grid) {
  if (!p) throw Error(ErrorKind::invalid_argument, "true_primal: null problem");
  if (p->primal && !grid.ignore_closed_primal) {
    auto eval = [p](const Vec& x) {
      auto [v, y] = p->primal(x);
      return PrimalEval{v, p->grad_x(x, y), y};
    };
    return PrimalOracle(eval, p->profile.lambda, PrimalMode::closed_form, p->domain_x);
  }
  const int dy = p->dim_y();
  if (dy > 2) throw Error(ErrorKind::unsupported, "true_primal: grid maximization needs dim(Y) <= 2");
  const int res = dy == 1 ? grid.resolution_1d : grid.resolution_2d;
  auto eval = [p, res](const Vec& x) {
    GridOptimum o = grid_maximize([&](const Vec& y) { return p->value(x, y); }, p->domain_y, res);
    return PrimalEval{o.value, p->grad_x(x, o.point), o.point};
  };
  return PrimalOracle(eval, p->profile.lambda, PrimalMode::grid, p->domain_x);
}

PrimalOracle surrogate_primal(const SurrogateModel& s, const GridOptions& grid, double q_fail, std::uint64_t seed) {
  auto sm = std::make_shared<const SurrogateModel>(s);
  const ProblemInstance& base = sm->base();
  const double wc = sm->lambda_bar();
  if (sm->k() == 0) {
    auto eval = [sm](const Vec& x) {
      const Vec& c = sm->center();
      return PrimalEval{sm->base().value(x, c), sm->base().grad_x(x, c), c};
    };
    return PrimalOracle(eval, wc, PrimalMode::closed_form, base.domain_x);
  }
  if (sm->k() == 1) {
    auto eval = [sm](const Vec& x) {
      const Vec& c = sm->center();
      Vec y = linear_argmax(sm->base().domain_y, sm->base().grad_y(x, c), c);
      return PrimalEval{sm->value(x, y), sm->grad_x(x, y), y};
    };
    return PrimalOracle(eval, wc, PrimalMode::closed_form, base.domain_x);
  }
  if (sm->k() == 2 && base.domain_y.is_ball()) {
    const auto& ball = std::get<Ball>(base.domain_y.shape());
    const double R = ball.radius;
    const Vec shift = ball.center - sm->center();
    const double rho1 = std::isfinite(base.profile.rho1()) ? base.profile.rho1() : 1.0;
    auto eval = [sm, R, shift, rho1, q_fail, seed](const Vec& x) {
      double c0 = 0;
      QuadraticForm q = sm->quadratic_at(x, &c0);
      // displacement w = shift + v with |v| <= R
      if (shift.norm() > 0) q.g += q.hvp(shift);
      const double scale = std::max({1.0, std::abs(c0), q.g.norm() * R});
      KrylovResult kr = approx_max(q, R, 1e-10 * scale, rho1, q_fail, seed);
      Vec y = sm->center() + shift + kr.y;
      y = sm->base().domain_y.project(y);
      return PrimalEval{sm->value(x, y), sm->grad_x(x, y), y};
    };
    return PrimalOracle(eval, wc, PrimalMode::krylov, base.domain_x);
  }
  const int dy = base.dim_y();
  if (dy > 2) throw Error(ErrorKind::unsupported, "surrogate_primal: grid maximization needs dim(Y) <= 2");
  const int res = dy == 1 ? grid.resolution_1d : grid.resolution_2d;
  auto eval = [sm, res](const Vec& x) {
    GridOptimum o = grid_maximize([&](const Vec& y) { return sm->value(x, y); }, sm->base().domain_y, res);
    return PrimalEval{o.value, sm->grad_x(x, o.point), o.point};
  };
  return PrimalOracle(eval, wc, PrimalMode::grid, base.domain_x);
}

double s_x(const Vec& x, const Vec& xi, double lam, const Domain& dom) {
  if (!(lam > 0)) throw Error(ErrorKind::invalid_argument, "s_x needs lam > 0");
  Vec u = dom.project(x - xi / lam);
  Vec d = u - x;
  double inner = -xi.dot(d) - 0.5 * lam * d.squaredNorm();
  return std::sqrt(std::max(0.0, 2.0 * lam * inner));
}

namespace {

void x_bounds(const Domain& d, Vec& lo, Vec& hi) {
  if (d.bounded()) {
    d.bounds(lo, hi);
  } else {
    lo = Vec::Constant(d.dim(), -kInf);
    hi = Vec::Constant(d.dim(), kInf);
  }
}

// Multi-resolution grid on the strongly convex objective. Each level lays a
// grid on the current bracket and recenters on the best point; a best point
// on an unclipped bracket edge widens the bracket instead of shrinking it.
ProxResult grid_prox(const PrimalOracle& p, const Vec& x, double lambda_bar, const ProxOptions& opt) {
  const Domain& X = p.domain_x();
  const int n = X.dim();
  const int pts = 201;
  const double span = n == 1 ? 2.0 : 3.0;
  ProxResult out;
  auto F = [&](const Vec& u) {
    ++out.evaluations;
    return p.phi(u) + lambda_bar * (u - x).squaredNorm();
  };
  Vec lo, hi;
  x_bounds(X, lo, hi);

  Vec c = X.project(x);
  PrimalEval e0 = p.eval(c);
  ++out.evaluations;
  const double m = 2.0 * lambda_bar - p.weak_convexity();
  const double scale = std::max(1.0, x.norm());
  double r = 2.0 * (e0.subgrad + 2.0 * lambda_bar * (c - x)).norm() / m + 1e-6 * scale;
  double best = F(c);

  for (;;) {
    if (out.evaluations > opt.inner_budget) {
      std::ostringstream os;
      os << "prox: budget of " << opt.inner_budget << " evaluations exhausted at bracket radius " << r;
      throw BudgetError(os.str(), c);
    }
    Vec a = (c.array() - r).max(lo.array()).matrix();
    Vec b = (c.array() + r).min(hi.array()).matrix();
    Vec h = (b - a) / (pts - 1);
    Vec arg = c;
    bool edge = false;
    if (n == 1) {
      for (int i = 0; i < pts; ++i) {
        Vec u = scalar_vec(i == pts - 1 ? b[0] : a[0] + h[0] * i);
        double v = F(u);
        if (v < best) {
          best = v;
          arg = u;
          edge = (i == 0 && a[0] > lo[0]) || (i == pts - 1 && b[0] < hi[0]);
        }
      }
    } else {
      for (int i = 0; i < pts; ++i) {
        for (int j = 0; j < pts; ++j) {
          Vec u(2);
          u << (i == pts - 1 ? b[0] : a[0] + h[0] * i), (j == pts - 1 ? b[1] : a[1] + h[1] * j);
          Vec pu = X.project(u);
          double v = F(pu);
          if (v < best) {
            best = v;
            arg = pu;
            edge = (i == 0 && a[0] > lo[0]) || (i == pts - 1 && b[0] < hi[0]) || (j == 0 && a[1] > lo[1]) ||
                   (j == pts - 1 && b[1] < hi[1]);
          }
        }
      }
    }
    c = arg;
    ++out.levels;
    if (edge) {
      r *= 4.0;
      continue;
    }
    r = span * h.maxCoeff();
    if (out.levels >= 3 && r <= opt.tol * scale) break;
    if (r == 0) break;
  }
  out.point = c;
  out.residual = r;
  return out;
}

// Projected subgradient with step 2/(m(t+2)), then projected gradient with
// backtracking until the S_X residual of the full objective is small.
ProxResult general_prox(const PrimalOracle& p, const Vec& x, double lambda_bar, const ProxOptions& opt) {
  const Domain& X = p.domain_x();
  const double m = 2.0 * lambda_bar - p.weak_convexity();
  const double L = 2.0 * lambda_bar + p.weak_convexity();
  ProxResult out;
  auto FG = [&](const Vec& u, Vec& g) {
    ++out.evaluations;
    PrimalEval e = p.eval(u);
    g = e.subgrad + 2.0 * lambda_bar * (u - x);
    return e.value + lambda_bar * (u - x).squaredNorm();
  };
  Vec u = X.project(x), g;
  double fu = FG(u, g);
  const double tol = opt.tol * std::max(1.0, g.norm());
  Vec best = u;
  double fbest = fu;
  const long n1 = std::min<long>(opt.inner_budget / 2, 2000);
  for (long t = 0; t < n1; ++t) {
    u = X.project(u - (2.0 / (m * (t + 2.0))) * g);
    fu = FG(u, g);
    if (fu < fbest) {
      fbest = fu;
      best = u;
    }
  }
  u = best;
  fu = FG(u, g);
  double eta = 1.0 / L;
  while (out.evaluations < opt.inner_budget) {
    double res = s_x(u, g, L, X);
    if (res <= tol) {
      out.point = u;
      out.residual = res;
      return out;
    }
    Vec g2;
    Vec v = X.project(u - eta * g);
    double fv = FG(v, g2);
    Vec d = v - u;
    if (fv <= fu + g.dot(d) + d.squaredNorm() / (2.0 * eta) + 1e-15 * std::abs(fu)) {
      u = v;
      fu = fv;
      g = g2;
      eta = std::min(eta * 1.5, 1.0 / m);
    } else {
      eta *= 0.5;
      if (eta < 1e-16 / L) break;
    }
  }
  std::ostringstream os;
  os << "prox: projected gradient stalled, S_X residual " << s_x(u, g, L, X) << " above " << tol;
  throw BudgetError(os.str(), u);
}

// F is (2 lb - wc)-strongly convex, so |u* - c| <= |dF(c)| / m; golden section
// on that bracket.
ProxResult golden_prox(const PrimalOracle& p, const Vec& x, double lambda_bar, const ProxOptions& opt) {
  const Domain& X = p.domain_x();
  ProxResult out;
  auto F = [&](double u) {
    ++out.evaluations;
    Vec v = scalar_vec(u);
    return p.phi(v) + lambda_bar * (v - x).squaredNorm();
  };
  Vec lo, hi;
  x_bounds(X, lo, hi);
  Vec c = X.project(x);
  PrimalEval e0 = p.eval(c);
  ++out.evaluations;
  const double m = 2.0 * lambda_bar - p.weak_convexity();
  const double scale = std::max(1.0, x.norm());
  const double r = 2.0 * (e0.subgrad + 2.0 * lambda_bar * (c - x)).norm() / m + 1e-6 * scale;
  double a = std::max(lo[0], c[0] - r), b = std::min(hi[0], c[0] + r);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double u1 = b - g * (b - a), u2 = a + g * (b - a);
  double f1 = F(u1), f2 = F(u2);
  while (b - a > opt.tol * scale) {
    if (out.evaluations > opt.inner_budget) throw BudgetError("prox: golden section budget exhausted", c);
    ++out.levels;
    if (f1 <= f2) {
      b = u2;
      u2 = u1;
      f2 = f1;
      u1 = b - g * (b - a);
      f1 = F(u1);
    } else {
      a = u1;
      u1 = u2;
      f1 = f2;
      u2 = a + g * (b - a);
      f2 = F(u2);
    }
  }
  // endpoints matter when the minimizer sits on the boundary of X
  double best = f1 <= f2 ? u1 : u2, fb = std::min(f1, f2);
  for (double e : {a, b}) {
    double fe = F(e);
    if (fe < fb) {
      fb = fe;
      best = e;
    }
  }
  out.point = scalar_vec(best);
  out.residual = b - a;
  return out;
}

}  // namespace

ProxResult prox(const PrimalOracle& p, const Vec& x, double lambda_bar, const ProxOptions& opt) {
  if (x.size() != p.domain_x().dim()) throw Error(ErrorKind::dimension, "prox: point has wrong dimension");
  if (!(2.0 * lambda_bar > p.weak_convexity())) {
    std::ostringstream os;
    os << "prox: need 2*lambda_bar > weak convexity (" << 2.0 * lambda_bar << " vs " << p.weak_convexity() << ")";
    throw Error(ErrorKind::invalid_argument, os.str());
  }
  if (p.has_closed_prox()) {
    ProxResult r;
    r.point = p.closed_prox()(x, lambda_bar);
    r.closed_form = true;
    return r;
  }
  const int n = p.domain_x().dim();
  switch (opt.method) {
    case ProxMethod::grid:
      if (n > 2) throw Error(ErrorKind::unsupported, "prox: grid method needs dim X <= 2");
      return grid_prox(p, x, lambda_bar, opt);
    case ProxMethod::golden:
      if (n != 1) throw Error(ErrorKind::unsupported, "prox: golden method needs dim X = 1");
      return golden_prox(p, x, lambda_bar, opt);
    case ProxMethod::general:
      return general_prox(p, x, lambda_bar, opt);
    case ProxMethod::automatic:
      break;
  }
  if (n <= 2) return grid_prox(p, x, lambda_bar, opt);
  return general_prox(p, x, lambda_bar, opt);
}

Vec moreau_grad(const PrimalOracle& p, const Vec& x, double lambda_bar, const ProxOptions& opt) {
  return 2.0 * lambda_bar * (x - prox(p, x, lambda_bar, opt).point);
}

StationarityReport verify_fosp(const PrimalOracle& p, const Vec& x, double epsilon, double lambda_bar,
                               const ProxOptions& opt) {
  ProxResult r = prox(p, x, lambda_bar, opt);
  StationarityReport rep;
  rep.prox_point = r.point;
  rep.prox_residual = r.residual;
  rep.moreau_grad_norm = 2.0 * lambda_bar * (x - r.point).norm();
  rep.s_x_residual = s_x(r.point, p.subgrad(r.point), 2.0 * lambda_bar, p.domain_x());
  rep.epsilon = epsilon;
  rep.lambda_bar = lambda_bar;
  rep.certified = rep.moreau_grad_norm <= epsilon;
  return rep;
}

}  // namespace mmx
