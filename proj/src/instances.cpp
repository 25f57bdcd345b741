#include "mmx/instances.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "mmx/surrogate.hpp"

namespace mmx {
namespace {

constexpr double kRel = 1e-12;

// Root of an increasing g on [lo, hi] with g(lo) <= 0 <= g(hi), to machine precision.
template <class G>
double bisect(G&& g, double lo, double hi) {
  for (int i = 0; i < 2000; ++i) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (g(mid) <= 0) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

// sign(y)^j, with the even powers extended continuously through y = 0.
double sign_pow(double y, int j) {
  if (j % 2 == 0) return 1.0;
  return y > 0 ? 1.0 : (y < 0 ? -1.0 : 0.0);
}

// j-th derivative of g(y) = |y|^{k+1}/(k+1)!.
double g_deriv(int k, double y, int j) {
  if (j > k + 1) return 0.0;
  return std::pow(std::abs(y), k + 1 - j) * sign_pow(y, j) / factorial(k + 1 - j);
}

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::regime, what);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

ProblemPtr build_f(const HardInstanceSpec& sp) {
  const int k = sp.k, s = sp.s;
  const double lam = sp.lambda, mu = sp.mu, rho = sp.rho, D = sp.D, a = sp.a;
  const double lo = a, hi = a + D;
  auto p = std::make_shared<ProblemInstance>();
  std::ostringstream nm;
  nm << "F_{" << k << "," << s << "}";
  p->name = nm.str();
  p->value = [=](const Vec& x, const Vec& y) {
    return -0.5 * lam * x[0] * x[0] + mu * x[0] * y[0] + s * rho * g_deriv(k, y[0], 0);
  };
  p->grad_x = [=](const Vec& x, const Vec& y) { return scalar_vec(-lam * x[0] + mu * y[0]); };
  p->grad_y = [=](const Vec& x, const Vec& y) { return scalar_vec(mu * x[0] + s * rho * g_deriv(k, y[0], 1)); };
  p->hess_yy_vec = [=](const Vec&, const Vec& yh, const Vec& v) {
    return scalar_vec(s * rho * g_deriv(k, yh[0], 2) * v[0]);
  };
  p->cross_jvp = [=](const Vec&, const Vec&, const Vec& v) { return scalar_vec(mu * v[0]); };
  p->cross3_jvp = [](const Vec&, const Vec&, const Vec&) { return scalar_vec(0.0); };
  p->dy = [=](double x, double y, int j) {
    if (j == 0) return -0.5 * lam * x * x + mu * x * y + s * rho * g_deriv(k, y, 0);
    if (j == 1) return mu * x + s * rho * g_deriv(k, y, 1);
    return s * rho * g_deriv(k, y, j);
  };
  p->dxdy = [=](double x, double y, int j) {
    if (j == 0) return -lam * x + mu * y;
    return j == 1 ? mu : 0.0;
  };
  // Endpoints, plus the clamped unconstrained maximizer when f(x, .) is concave.
  p->primal = [=](const Vec& x) {
    const double c = mu * x[0];
    std::vector<double> cand{lo, hi};
    if (s < 0 && rho > 0 && k >= 1) {
      double yb = std::pow(std::abs(c) * factorial(k) / rho, 1.0 / k);
      cand.push_back(std::clamp(c < 0 ? -yb : yb, lo, hi));
    }
    std::sort(cand.begin(), cand.end());
    double by = cand[0], bv = -kInf;
    for (double y : cand) {
      double v = -0.5 * lam * x[0] * x[0] + c * y + s * rho * g_deriv(k, y, 0);
      if (v > bv) {
        bv = v;
        by = y;
      }
    }
    return std::make_pair(bv, scalar_vec(by));
  };
  p->domain_y = Domain::interval(lo, hi);

  SmoothnessProfile& pr = p->profile;
  pr.lambda = lam;
  pr.mu = mu;
  pr.k = k;
  pr.bilinear = true;
  if (k == 0) {
    require(s == 0, "order-0 F instances are F_{0,0}: s must be 0");
    require(std::abs(a + 0.5 * D) <= kRel * (1 + D), "order-0 F instances use Y = [-D/2, D/2]");
    require(mu <= mu_critical(0, lam, rho, D) * (1 + kRel),
            "F_{0,0} needs mu <= sqrt(2 lambda rho / D) (mu = " + fmt(mu) + ", bound " +
                fmt(mu_critical(0, lam, rho, D)) + ")");
    const double r = mu * D / (2.0 * lam);
    p->domain_x = Domain::interval(-r, r);
    pr.orders[0] = OrderConstants{rho, mu * D, 0.0};
    pr.orders[1] = OrderConstants{0.0, mu, 0.0};
    pr.sigma_0 = mu * D;
  } else {
    const double M = std::max(std::abs(lo), std::abs(hi));
    for (int j = 1; j <= k; ++j)
      pr.orders[j] = OrderConstants{rho * std::pow(M, k - j) / factorial(k - j), j == 1 ? mu : 0.0, 0.0};
    if (sp.x_half_width) {
      p->domain_x = Domain::interval(-*sp.x_half_width, *sp.x_half_width);
    } else {
      const double P = std::max(1.0, 2.0 * mu * D / lam);
      p->probe_x = Domain::interval(-P, P);
    }
  }
  pr.rho_1 = pr.orders[1].rho;
  pr.validate();
  return p;
}

ProblemPtr build_s(const HardInstanceSpec& sp) {
  const double lam = sp.lambda, mu = sp.mu, rho = sp.rho, D = sp.D;
  require(rho > 0, "S instances need rho > 0");
  require(std::abs(sp.a) <= kRel * (1 + D), "S instances use Y = [0, D]");
  require(mu >= mu_critical(0, lam, rho, D) * (1 - kRel),
          "S needs mu >= sqrt(2 lambda rho / D) (mu = " + fmt(mu) + ", bound " + fmt(mu_critical(0, lam, rho, D)) +
              ")");
  const double kap = std::sqrt(lam / (rho * D));
  auto sech2 = [](double t) {
    double c = std::cosh(t);
    return 1.0 / (c * c);
  };
  auto p = std::make_shared<ProblemInstance>();
  p->name = "S";
  p->value = [=](const Vec& x, const Vec& y) {
    return -0.25 * lam * x[0] * x[0] + 0.5 * rho * y[0] * (std::tanh(kap * x[0]) - 1.0);
  };
  p->grad_x = [=](const Vec& x, const Vec& y) {
    return scalar_vec(-0.5 * lam * x[0] + 0.5 * rho * y[0] * kap * sech2(kap * x[0]));
  };
  p->grad_y = [=](const Vec& x, const Vec&) { return scalar_vec(0.5 * rho * (std::tanh(kap * x[0]) - 1.0)); };
  p->hess_yy_vec = [](const Vec&, const Vec&, const Vec&) { return scalar_vec(0.0); };
  p->cross_jvp = [=](const Vec& x, const Vec&, const Vec& v) {
    return scalar_vec(0.5 * rho * kap * sech2(kap * x[0]) * v[0]);
  };
  p->cross3_jvp = [](const Vec&, const Vec&, const Vec&) { return scalar_vec(0.0); };
  p->dy = [=](double x, double y, int j) {
    if (j == 0) return -0.25 * lam * x * x + 0.5 * rho * y * (std::tanh(kap * x) - 1.0);
    return j == 1 ? 0.5 * rho * (std::tanh(kap * x) - 1.0) : 0.0;
  };
  p->dxdy = [=](double x, double y, int j) {
    if (j == 0) return -0.5 * lam * x + 0.5 * rho * y * kap * sech2(kap * x);
    return j == 1 ? 0.5 * rho * kap * sech2(kap * x) : 0.0;
  };
  // d/dy f <= 0, so the maximum sits at y = 0.
  p->primal = [=](const Vec& x) { return std::make_pair(-0.25 * lam * x[0] * x[0], scalar_vec(0.0)); };
  const double r = mu * D / (2.0 * lam);
  p->domain_x = Domain::interval(-r, r);
  p->domain_y = Domain::interval(0.0, D);
  SmoothnessProfile& pr = p->profile;
  pr.lambda = lam;
  pr.mu = mu;
  pr.k = 0;
  pr.orders[0] = OrderConstants{rho, mu * D, 0.0};
  pr.sigma_0 = mu * D;
  pr.validate();
  return p;
}

}  // namespace

double mu_critical(int k, double lambda, double rho, double D) {
  if (k == 0) return std::sqrt(2.0 * lambda * rho / D);
  if (k == 1) return std::sqrt(lambda * rho / 2.0);
  return std::sqrt(lambda * rho * std::pow(D, k - 1) / factorial(k));
}

Regime classify(const HardInstanceSpec& spec) {
  if (spec.family == Family::S) return Regime::strong_coupling;
  return spec.mu <= mu_critical(spec.k, spec.lambda, spec.rho, spec.D) ? Regime::weak_coupling
                                                                         : Regime::strong_coupling;
}

ProblemPtr build_instance(const HardInstanceSpec& spec) {
  if (!(spec.lambda > 0) || !std::isfinite(spec.lambda)) throw Error(ErrorKind::invalid_argument, "lambda must be > 0");
  if (!(spec.mu >= 0) || !std::isfinite(spec.mu)) throw Error(ErrorKind::invalid_argument, "mu must be >= 0");
  if (!(spec.rho >= 0) || !std::isfinite(spec.rho)) throw Error(ErrorKind::invalid_argument, "rho must be >= 0");
  if (!(spec.D > 0) || !std::isfinite(spec.D)) throw Error(ErrorKind::invalid_argument, "D must be > 0");
  if (spec.k < 0) throw Error(ErrorKind::invalid_argument, "k must be >= 0");
  if (spec.s < -1 || spec.s > 1) throw Error(ErrorKind::invalid_argument, "s must be -1, 0 or 1");
  return spec.family == Family::F ? build_f(spec) : build_s(spec);
}

const char* to_string(CertCase c) {
  switch (c) {
    case CertCase::prop2_weak: return "prop2_weak";
    case CertCase::prop2_strong: return "prop2_strong";
    case CertCase::prop3_weak: return "prop3_weak";
    case CertCase::prop3_strong: return "prop3_strong";
    case CertCase::prop4_weak: return "prop4_weak";
    case CertCase::prop4_strong_even: return "prop4_strong_even";
    case CertCase::prop4_strong_odd: return "prop4_strong_odd";
  }
  return "?";
}

double sigmoid_stationary_c() {
  return bisect([](double c) { return c * std::cosh(c) * std::cosh(c) - 2.0 / 3.0; }, 0.0, 1.0);
}

double weak_prox_root(double x, int k, double lambda, double mu, double rho) {
  if (x < 0) throw Error(ErrorKind::invalid_argument, "weak_prox_root needs x >= 0");
  if (x == 0 || mu == 0) return 2.0 * x;
  const double kf = factorial(k);
  auto G = [&](double u) { return u + (mu / lambda) * std::pow(u * mu * kf / rho, 1.0 / k) - 2.0 * x; };
  return bisect(G, 0.0, 2.0 * x);
}

namespace {

void in_region(bool ok, const char* what) {
  if (!ok) throw Error(ErrorKind::invalid_argument, std::string("closed form not valid here: ") + what);
}

struct Params {
  double lam, mu, rho, D, R;
  int k;
};

Params params_of(const Certificate& c) {
  const HardInstanceSpec& s = c.instance;
  return Params{s.lambda, s.mu, s.rho, s.D, 0.5 * s.D, s.k};
}

// Danskin derivative of phi-hat at x* for the odd-k construction, after
// confirming that z* = -(1 - 1/k) maximizes h(x*, .) over [-1, 1].
double odd_surrogate_derivative(const Certificate& c) {
  const Params P = params_of(c);
  const int k = P.k;
  const double xs = c.x_star, zs = -(1.0 - 1.0 / k), sh = 1.0 - 1.0 / k;
  auto h = [&](double z) {
    double q = (std::pow(z, k + 1) - std::pow(z - sh, k + 1)) / factorial(k + 1);
    return -0.5 * P.lam * xs * xs + P.mu * P.R * xs * z + P.rho * std::pow(P.R, k + 1) * q;
  };
  const double hs = h(zs);
  for (int i = 0; i <= 2000; ++i) {
    double z = -1.0 + 2.0 * i / 2000.0;
    if (h(z) > hs + 1e-12 * (1 + std::abs(hs)))
      throw Error(ErrorKind::numerical, "odd-k construction: z* is not the maximizer of h(x*, .)");
  }
  return -P.lam * xs + P.mu * P.R * zs;
}

}  // namespace

double closed_form_prox(const Certificate& c, Envelope which, double x) {
  const Params P = params_of(c);
  const bool tr = which == Envelope::true_primal;
  switch (c.which) {
    case CertCase::prop2_weak: {
      const double r = P.mu * P.R / P.lam;
      in_region(std::abs(x) <= r * (1 + kRel), "|x| <= r");
      if (tr) return soft_threshold(2.0 * x, r);
      return std::clamp(2.0 * x - P.mu * c.y_hat / P.lam, -r, r);
    }
    case CertCase::prop2_strong: {
      const double r = P.mu * P.D / (2.0 * P.lam);
      if (tr) {
        in_region(std::abs(x) <= 0.75 * r * (1 + kRel), "|x| <= 3r/4");
        return 4.0 * x / 3.0;
      }
      in_region(std::abs(x) <= r * (1 + kRel), "|x| <= r");
      const double kap = std::sqrt(P.lam / (P.rho * P.D));
      auto d = [&](double u) {
        double ch = std::cosh(kap * u);
        return -0.5 * P.lam * u + 0.5 * P.rho * c.y_hat * kap / (ch * ch) + 2.0 * P.lam * (u - x);
      };
      if (d(-r) >= 0) return -r;
      if (d(r) <= 0) return r;
      return bisect(d, -r, r);
    }
    case CertCase::prop3_weak: {
      if (tr) {
        const double xp = 2.0 * P.lam * P.rho * x / (P.lam * P.rho + P.mu * P.mu);
        in_region(P.mu == 0 || std::abs(xp) <= P.rho * P.R / P.mu * (1 + kRel), "|x+| <= rho R / mu");
        return xp;
      }
      return soft_threshold(2.0 * x, P.mu * P.R / P.lam);
    }
    case CertCase::prop3_strong: {
      const double rb = P.mu * P.R / P.lam, sh = P.rho * P.R / P.mu;
      if (tr) return soft_threshold(2.0 * x, rb);
      return soft_threshold(2.0 * x + sh, rb) - sh;
    }
    case CertCase::prop4_weak: {
      if (tr) {
        if (x < 0) return 2.0 * x;
        const double xp = weak_prox_root(x, P.k, P.lam, P.mu, P.rho);
        in_region(P.mu * xp <= P.rho * std::pow(P.D, P.k) / factorial(P.k) * (1 + kRel),
                  "mu x+ <= rho D^k / k!");
        return xp;
      }
      const double rp = P.mu * P.D / P.lam;
      if (2.0 * x > rp) return 2.0 * x - rp;
      if (x < 0) return 2.0 * x;
      return 0.0;
    }
    case CertCase::prop4_strong_even: {
      const double rb = P.mu * P.R / P.lam;
      if (tr) return soft_threshold(2.0 * x, rb);
      const double sh = (std::pow(2.0, P.k) - 1.0) * P.rho * std::pow(P.R, P.k) / (P.mu * factorial(P.k + 1));
      return soft_threshold(2.0 * x - sh, rb) + sh;
    }
    case CertCase::prop4_strong_odd: {
      const double rb = P.mu * P.R / P.lam;
      if (tr) return soft_threshold(2.0 * x, rb);
      in_region(std::abs(x - c.x_star) <= kRel * (1 + std::abs(c.x_star)), "x = x* (odd k)");
      if (odd_surrogate_derivative(c) != 0.0)
        throw Error(ErrorKind::numerical, "odd-k construction: x* is not stationary for phi-hat");
      return x;
    }
  }
  throw Error(ErrorKind::invalid_argument, "unknown certificate case");
}

double closed_form_moreau_grad(const Certificate& c, Envelope which, double x) {
  // At the stationary point of the odd-k surrogate the envelope derivative
  // is reported as the Danskin derivative, which is what vanishes there.
  if (c.which == CertCase::prop4_strong_odd && which == Envelope::surrogate) {
    in_region(std::abs(x - c.x_star) <= kRel * (1 + std::abs(c.x_star)), "x = x* (odd k)");
    return odd_surrogate_derivative(c);
  }
  return 2.0 * c.instance.lambda * (x - closed_form_prox(c, which, x));
}

Certificate certificate(const CertificateRequest& req) {
  if (!(req.lambda > 0) || !(req.mu > 0) || !(req.rho > 0) || !(req.D > 0))
    throw Error(ErrorKind::invalid_argument, "certificate: lambda, mu, rho, D must be > 0");
  if (req.k < 0) throw Error(ErrorKind::invalid_argument, "certificate: k must be >= 0");
  const int k = req.k;
  const double lam = req.lambda, mu = req.mu, rho = req.rho, D = req.D, R = 0.5 * D;
  const double mcr = mu_critical(k, lam, rho, D);

  Certificate c;
  c.request = req;
  c.regime = mu <= mcr ? Regime::weak_coupling : Regime::strong_coupling;
  if (req.regime && *req.regime != c.regime) {
    const char* cond = k == 0 ? "sqrt(2 lambda rho / D)" : (k == 1 ? "sqrt(lambda rho / 2)" : "mu_cr");
    std::ostringstream os;
    os << "certificate: " << (*req.regime == Regime::weak_coupling ? "weak" : "strong")
       << "-coupling construction for k = " << k << " needs mu " << (*req.regime == Regime::weak_coupling ? "<=" : ">=")
       << " " << cond << " = " << mcr << ", got mu = " << mu;
    throw Error(ErrorKind::regime, os.str());
  }
  HardInstanceSpec& in = c.instance;
  in.k = k;
  in.lambda = lam;
  in.rho = rho;
  in.D = D;
  const bool weak = c.regime == Regime::weak_coupling;

  if (k == 0) {
    if (weak) {
      c.which = CertCase::prop2_weak;
      in.family = Family::F;
      in.s = 0;
      in.mu = mu;
      in.a = -R;
      c.y_hat = R / 2.0;
      c.x_star = mu * R / lam / 2.0;
      c.bound = mu * D / 2.0;
      c.bound_formula = "mu D / 2";
    } else {
      c.which = CertCase::prop2_strong;
      in.family = Family::S;
      in.mu = mu;
      in.a = 0.0;
      c.y_hat = 2.0 * D / 3.0;
      c.x_star = sigmoid_stationary_c() * std::sqrt(rho * D / lam);
      c.bound = std::sqrt(lam * rho * D) / 3.0;
      c.bound_formula = "sqrt(lambda rho D) / 3";
    }
  } else if (k == 1) {
    in.family = Family::F;
    in.a = -R;
    if (weak) {
      c.which = CertCase::prop3_weak;
      in.s = -1;
      in.mu = mu;
      c.y_hat = 0.0;
      c.x_star = mu * R / lam;
      c.bound = mu * D / 3.0;
      c.bound_formula = "mu D / 3";
    } else {
      c.which = CertCase::prop3_strong;
      in.s = 1;
      in.rho = rho / 4.0;
      in.mu = std::sqrt(2.0 * lam * in.rho);
      c.y_hat = R;
      c.x_star = -in.rho * R / in.mu;
      c.bound = std::sqrt(lam * rho * D * D / 8.0);
      c.bound_formula = "sqrt(lambda rho D^2 / 8)";
    }
  } else {
    in.family = Family::F;
    if (weak) {
      c.which = CertCase::prop4_weak;
      in.s = -1;
      in.mu = mu / 2.0;
      in.a = 0.0;
      c.y_hat = 0.0;
      c.x_star = in.mu * D / lam;
      c.bound = mu * D / (2.0 * k);
      c.bound_formula = "mu D / (2k)";
    } else {
      in.s = 1;
      in.a = -R;
      c.bound = mcr * D / (2.0 * k);
      c.bound_formula = "mu_cr D / (2k)";
      if (k % 2 == 0) {
        c.which = CertCase::prop4_strong_even;
        in.mu = mcr;
        c.y_hat = R;
        c.x_star = (std::pow(2.0, k) - 1.0) * rho * std::pow(R, k) / (in.mu * factorial(k + 1));
      } else {
        c.which = CertCase::prop4_strong_odd;
        const double sh = 1.0 - 1.0 / k;
        in.mu = std::sqrt(2.0 * lam * rho * std::pow(D, k - 1) / factorial(k) * (1.0 - std::pow(2.0, -k)) *
                          std::pow(sh, k - 1));
        c.y_hat = sh * R;
        c.x_star = -sh * in.mu * R / lam;
      }
    }
  }
  c.surrogate_moreau_grad = closed_form_moreau_grad(c, Envelope::surrogate, c.x_star);
  c.true_moreau_grad = closed_form_moreau_grad(c, Envelope::true_primal, c.x_star);
  c.surrogate_stationary = std::abs(c.surrogate_moreau_grad) <= 1e-10;
  c.violates = std::abs(c.true_moreau_grad) >= c.bound * (1 - kRel);
  return c;
}

PrimalOracle certificate_primal(const Certificate& cert, Envelope which, bool closed_prox, const GridOptions& grid) {
  ProblemPtr p = build_instance(cert.instance);
  PrimalOracle base = which == Envelope::true_primal
                          ? true_primal(p, grid)
                          : surrogate_primal(SurrogateModel(p, cert.instance.k, scalar_vec(cert.y_hat)), grid);
  if (!closed_prox) return base;
  const double lam = cert.instance.lambda;
  auto prox_fn = [cert, which, lam](const Vec& x, double lambda_bar) {
    if (std::abs(lambda_bar - lam) > kRel * lam)
      throw Error(ErrorKind::unsupported, "closed-form prox is only known for lambda_bar = lambda");
    return scalar_vec(closed_form_prox(cert, which, x[0]));
  };
  auto eval = [base](const Vec& x) { return base.eval(x); };
  return PrimalOracle(eval, base.weak_convexity(), PrimalMode::closed_form, base.domain_x(), prox_fn);
}

}  // namespace mmx
