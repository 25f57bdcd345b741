#include "mmx/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "mmx/gridsearch.hpp"
#include "mmx/surrogate.hpp"

namespace mmx {

const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::alg1: return "alg1";
    case Algorithm::alg2: return "alg2";
    case Algorithm::alg3: return "alg3";
  }
  return "?";
}

void SolverConfig::validate(const ProblemInstance& p) const {
  auto fail = [](const std::string& m) { throw Error(ErrorKind::config, "solver config: " + m); };
  if (!(epsilon > 0) || !std::isfinite(epsilon)) fail("epsilon must be > 0");
  if (x0.size() > 0) {
    if (x0.size() != p.dim_x()) fail("x0 has wrong dimension");
    if (!p.domain_x.contains(x0, 1e-12)) fail("x0 must lie in X");
  }
  if (y_hat) {
    if (y_hat->size() != p.dim_y()) fail("y_hat has wrong dimension");
    if (!p.domain_y.contains(*y_hat, 1e-12)) fail("y_hat must lie in Y");
  }
  if (!(p_fail > 0 && p_fail < 1)) fail("p_fail must be in (0, 1)");
  if (!(q_fail > 0 && q_fail < 1)) fail("q_fail must be in (0, 1)");
  if (!(p_fail + q_fail < 1)) fail("p_fail + q_fail must be < 1");
  if (T_override && *T_override < 1) fail("T_override must be >= 1");
  if (T_cap < 1) fail("T_cap must be >= 1");
  if (brute_resolution < 2) fail("brute_resolution must be >= 2");
}

std::mt19937_64 seeded_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

int resolution_for(const Domain& d, int res) { return d.dim() == 1 ? res : std::min(res, 201); }

long checked_iterations(double T, const char* what) {
  if (!(T >= 0) || !std::isfinite(T)) throw Error(ErrorKind::numerical, std::string(what) + ": iteration count is not finite");
  if (T > 9e18) return std::numeric_limits<long>::max();
  return std::max(1L, static_cast<long>(std::ceil(T)));
}

Vec start_point(const ProblemInstance& p, const SolverConfig& cfg) {
  if (cfg.x0.size() > 0) return cfg.x0;
  return p.domain_x.project(Vec::Zero(p.dim_x()));
}

Vec center_point(const ProblemInstance& p, const SolverConfig& cfg) {
  return cfg.y_hat ? *cfg.y_hat : p.domain_y.chebyshev_center();
}

long resolve_T(const SolverConfig& cfg, long formula, RunTrace& tr) {
  long T = cfg.T_override ? *cfg.T_override : formula;
  if (T > cfg.T_cap) {
    std::ostringstream os;
    os << to_string(tr.algorithm) << ": T = " << T << " exceeds the iteration cap " << cfg.T_cap;
    throw BudgetError(os.str(), tr.x_star);
  }
  return T;
}

// One projected step from x along g. Records eps_t by the algorithm's own
// formula (form 0: |g|^2 - |xt - x+|^2/gamma^2, form 1: (|xt - x|^2 -
// |xt - x+|^2)/gamma^2) and the S_X value computed independently.
Vec projected_step(RunTrace& tr, const Domain& X, const Vec& x, const Vec& g, double gamma, int form) {
  Vec xt = x - gamma * g;
  Vec xn = X.project(xt);
  ++tr.counters.proj_x;
  double e2 = form == 0 ? g.squaredNorm() - (xt - xn).squaredNorm() / (gamma * gamma)
                        : ((xt - x).squaredNorm() - (xt - xn).squaredNorm()) / (gamma * gamma);
  double e = std::sqrt(std::max(0.0, e2));
  tr.eps.push_back(e);
  tr.eps_sx.push_back(s_x(x, g, 1.0 / gamma, X));
  return xn;
}

void keep_best(RunTrace& tr, long t, const Vec& x, const Vec* y) {
  double e = tr.eps.back();
  if (e < tr.best_eps) {
    tr.best_eps = e;
    tr.best_index = t;
    tr.x_star = x;
    if (y) tr.y_star = *y;
  }
}

void finish(RunTrace& tr, const Vec& x_last, Clock::time_point t0) {
  tr.x_last = x_last;
  if (tr.x_out.size() == 0) tr.x_out = tr.x_star;
  tr.wall_ms = elapsed_ms(t0);
}

}  // namespace

double estimate_primal_gap(const ProblemInstance& p, const Vec& x0, int resolution) {
  auto ptr = std::shared_ptr<const ProblemInstance>(&p, [](const ProblemInstance*) {});
  PrimalOracle phi = true_primal(ptr);
  const Domain& X = p.sampling_x();
  if (X.dim() > 2) throw Error(ErrorKind::unsupported, "primal gap estimate needs dim X <= 2; set T_override");
  GridOptimum lo = grid_minimize([&](const Vec& x) { return phi.phi(p.domain_x.project(x)); }, X,
                                 resolution_for(X, resolution));
  return std::max(0.0, phi.phi(x0) - lo.value);
}

double estimate_dual_value(const ProblemInstance& p, const Vec& y_hat, int resolution) {
  const Domain& X = p.sampling_x();
  if (X.dim() > 2) throw Error(ErrorKind::unsupported, "dual value estimate needs dim X <= 2; set T_override");
  return grid_minimize([&](const Vec& x) { return p.value(p.domain_x.project(x), y_hat); }, X,
                       resolution_for(X, resolution))
      .value;
}

long alg1_iterations(double lambda, double gap, double epsilon) {
  return checked_iterations(300.0 * lambda * std::max(0.0, gap) / (epsilon * epsilon), "alg1");
}

long alg2_iterations(double lambda_bar, double mu, double rho1, double Delta, double epsilon) {
  double T = (3.0 + mu * mu / (lambda_bar * rho1)) * (700.0 * lambda_bar * std::max(0.0, Delta) / (epsilon * epsilon) + 1.0);
  return checked_iterations(T, "alg2");
}

long alg3_iterations(double lambda_bar, double Delta, double rho2, double sigma0, double sigma2, double D,
                     double epsilon, double p_fail) {
  double G = sigma0 + sigma2 * D * D;
  double T = 6e6 / (p_fail * p_fail) * lambda_bar * (std::max(0.0, Delta) + rho2 * D * D * D) * G * G /
             std::pow(epsilon, 4);
  return checked_iterations(T, "alg3");
}

RunTrace solve_alg1(const ProblemPtr& p, const SolverConfig& cfg) {
  cfg.validate(*p);
  const auto t0 = Clock::now();
  const ProblemInstance& P = *p;
  RunTrace tr;
  tr.algorithm = Algorithm::alg1;
  tr.epsilon = cfg.epsilon;
  const double lam = P.profile.lambda;
  tr.lambda_bar = lam;
  tr.gamma_x = 1.0 / lam;
  tr.y_hat = center_point(P, cfg);
  Vec x = start_point(P, cfg);
  tr.x_star = x;
  tr.y_star = tr.y_hat;

  long formula = 0;
  if (!cfg.T_override) {
    tr.psi_y_hat = estimate_dual_value(P, tr.y_hat, cfg.brute_resolution);
    double phi0 = true_primal(p).phi(x);
    tr.delta_estimate = phi0 - tr.psi_y_hat;
    formula = alg1_iterations(lam, tr.delta_estimate, cfg.epsilon);
  }
  tr.T = resolve_T(cfg, formula, tr);
  const double D = P.domain_y.diameter();
  if (24.0 * P.profile.mu * D > cfg.epsilon)
    tr.warnings.push_back("24 mu D > eps: stationarity need not transfer to the original problem");

  const Domain& X = P.domain_x;
  if (cfg.keep_iterates) tr.x.push_back(x);
  for (long t = 0; t < tr.T; ++t) {
    Vec g = P.grad_x(x, tr.y_hat);
    ++tr.counters.grad_x;
    tr.phi_hat.push_back(P.value(x, tr.y_hat));
    ++tr.counters.value;
    Vec xn = projected_step(tr, X, x, g, tr.gamma_x, 0);
    keep_best(tr, t, x, nullptr);
    tr.calls.push_back(tr.counters.total());
    x = std::move(xn);
    if (cfg.keep_iterates) tr.x.push_back(x);
  }
  finish(tr, x, t0);
  return tr;
}

RunTrace solve_alg2(const ProblemPtr& p, const SolverConfig& cfg) {
  cfg.validate(*p);
  const auto t0 = Clock::now();
  const ProblemInstance& P = *p;
  RunTrace tr;
  tr.algorithm = Algorithm::alg2;
  tr.epsilon = cfg.epsilon;
  tr.y_hat = center_point(P, cfg);
  SurrogateModel sm(p, 1, tr.y_hat);
  const double lb = sm.lambda_bar();
  const double rho1 = P.profile.rho1();
  const double mu = P.profile.mu;
  if (!(rho1 > 0) || !std::isfinite(rho1))
    throw Error(ErrorKind::config, "alg2: needs a finite rho_1 > 0 in the smoothness profile");
  tr.lambda_bar = lb;
  tr.coupled = cfg.coupled.value_or(mu >= std::sqrt(lb * rho1));
  tr.gamma_x = 1.0 / (3.0 * lb + mu * mu / rho1);
  tr.gamma_y = 1.0 / rho1;
  if (tr.coupled && !P.cross_jvp) throw Error(ErrorKind::unsupported, "alg2: coupled mode needs cross_jvp");
  Vec x = start_point(P, cfg);
  tr.x_star = x;
  tr.y_star = tr.y_hat;

  long formula = 0;
  if (!cfg.T_override) {
    tr.delta_estimate = estimate_primal_gap(P, x, cfg.brute_resolution);
    formula = alg2_iterations(lb, mu, rho1, tr.delta_estimate, cfg.epsilon);
  }
  tr.T = resolve_T(cfg, formula, tr);
  const double D = P.domain_y.diameter();
  if (200.0 * std::min(mu, std::sqrt(lb * rho1)) * D > cfg.epsilon)
    tr.warnings.push_back("200 min{mu, sqrt(lambda_bar rho_1)} D > eps: certification may fail");

  const Domain& X = P.domain_x;
  const Domain& Y = P.domain_y;
  const Vec& yh = tr.y_hat;
  if (cfg.keep_iterates) tr.x.push_back(x);
  for (long t = 0; t < tr.T; ++t) {
    Vec gy = P.grad_y(x, yh);
    ++tr.counters.grad_y;
    Vec y, g;
    if (tr.coupled) {
      y = Y.project(yh + tr.gamma_y * gy);
      ++tr.counters.proj_y;
      g = P.grad_x(x, yh) + P.cross_jvp(x, yh, y - yh);
      ++tr.counters.grad_x;
      ++tr.counters.cross_jvp;
    } else {
      y = linear_argmax(Y, gy, yh);
      ++tr.counters.linear_max;
      g = P.grad_x(x, y);
      ++tr.counters.grad_x;
    }
    tr.phi_hat.push_back(sm.value(x, y));
    ++tr.counters.value;
    Vec xn = projected_step(tr, X, x, g, tr.gamma_x, 1);
    keep_best(tr, t, x, &y);
    tr.calls.push_back(tr.counters.total());
    if (cfg.keep_iterates) tr.y.push_back(y);
    x = std::move(xn);
    if (cfg.keep_iterates) tr.x.push_back(x);
  }
  finish(tr, x, t0);
  return tr;
}

KrylovMaxOracle::KrylovMaxOracle(double rho1, double q_fail, std::uint64_t seed)
    : rho1_(rho1), q_fail_(q_fail), rng_(seeded_stream(seed, 2)) {}

KrylovResult KrylovMaxOracle::maximize(const QuadraticForm& q, double R, double delta) {
  return approx_max(q, R, delta, rho1_, q_fail_, rng_);
}

KrylovResult DenseMaxOracle::maximize(const QuadraticForm& q, double R, double) {
  const int d = q.dim();
  Mat H(d, d);
  for (int i = 0; i < d; ++i) H.col(i) = q.hvp(Vec::Unit(d, i));
  ReducedSolution sol = solve_reduced(0.5 * (H + H.transpose()), q.g, R);
  KrylovResult r;
  r.y = sol.z;
  double n = r.y.norm();
  if (n > R) r.y *= R / n;
  r.value = q.value(r.y);
  r.branch = sol.branch;
  r.hard_case = sol.hard_case;
  r.m_requested = r.m_used = d;
  r.full_space = true;
  r.hvp_calls = d + 1;
  return r;
}

namespace {

// Psi in the displacement from the ball center, given the model in w = y - yhat.
struct CenteredModel {
  QuadraticForm q;
  double constant = 0;
};

CenteredModel centered_model(const SurrogateModel& sm, const Vec& x, const Vec& shift, long* hvp_counter) {
  CenteredModel cm;
  cm.q = sm.quadratic_at(x, &cm.constant);
  if (hvp_counter) {
    auto inner = cm.q.hvp;
    cm.q.hvp = [inner, hvp_counter](const Vec& v) {
      ++*hvp_counter;
      return inner(v);
    };
  }
  if (shift.norm() > 0) {
    // Psi(shift + v) = Psi(shift) + (g + H shift)'v + v'Hv/2
    Vec Hs = cm.q.hvp(shift);
    cm.constant += cm.q.g.dot(shift) + 0.5 * shift.dot(Hs);
    cm.q.g += Hs;
  }
  return cm;
}

}  // namespace

RunTrace solve_alg3(const ProblemPtr& p, const SolverConfig& cfg, MaxOracle* oracle) {
  cfg.validate(*p);
  const auto t0 = Clock::now();
  const ProblemInstance& P = *p;
  if (!P.domain_y.is_ball()) throw Error(ErrorKind::unsupported, "alg3: Y must be a Euclidean ball");
  if (!cfg.naive && (!P.cross_jvp || !P.cross3_jvp))
    throw Error(ErrorKind::unsupported, "alg3: Naive = 0 needs cross_jvp and cross3_jvp");
  if (!P.hess_yy_vec) throw Error(ErrorKind::unsupported, "alg3: needs hess_yy_vec");
  const SmoothnessProfile& prof = P.profile;
  if (!prof.sigma_0) throw Error(ErrorKind::config, "alg3: smoothness profile must declare sigma_0");
  if (!prof.has_order(2)) throw Error(ErrorKind::config, "alg3: smoothness profile must declare order-2 constants");

  RunTrace tr;
  tr.algorithm = Algorithm::alg3;
  tr.epsilon = cfg.epsilon;
  tr.naive = cfg.naive;
  tr.y_hat = center_point(P, cfg);
  SurrogateModel sm(p, 2, tr.y_hat);
  const double lb = sm.lambda_bar();
  const double D = P.domain_y.diameter();
  const double sigma0 = *prof.sigma_0;
  const double sigma2 = prof.order(2).sigma;
  const double rho2 = prof.order(2).rho;
  const auto& ball = std::get<Ball>(P.domain_y.shape());
  const double R = ball.radius;
  const Vec shift = ball.center - tr.y_hat;
  tr.lambda_bar = lb;
  Vec x = start_point(P, cfg);
  tr.x_star = x;
  tr.y_star = tr.y_hat;

  // gamma_x needs Delta even when T is overridden
  try {
    tr.delta_estimate = estimate_primal_gap(P, x, cfg.brute_resolution);
  } catch (const Error& e) {
    if (!cfg.T_override || e.kind() != ErrorKind::unsupported) throw;
    tr.delta_estimate = 0.0;
    tr.warnings.push_back("primal gap not estimable; Delta = 0 in the step size");
  }
  long formula = 0;
  if (!cfg.T_override)
    formula = alg3_iterations(lb, tr.delta_estimate, rho2, sigma0, sigma2, D, cfg.epsilon, cfg.p_fail);
  tr.T = resolve_T(cfg, formula, tr);
  const double G = sigma0 + sigma2 * D * D;
  tr.gamma_x = std::sqrt((tr.delta_estimate + rho2 * D * D * D) / (lb * static_cast<double>(tr.T))) / G;
  tr.delta = 4.0 * cfg.p_fail * 1e-4 * cfg.epsilon * cfg.epsilon / lb;
  if (!(tr.gamma_x > 0) || !std::isfinite(tr.gamma_x))
    throw Error(ErrorKind::numerical, "alg3: step size is not a positive finite number");
  if (24.0 * std::min(prof.mu * D + sigma2 * D * D, std::sqrt(lb * rho2 * D * D * D / 300.0)) > cfg.epsilon)
    tr.warnings.push_back("diameter condition for the order-2 surrogate fails: certification may fail");
  if (cfg.naive && 24.0 * sigma2 * D * D > cfg.epsilon * std::sqrt(cfg.p_fail))
    tr.warnings.push_back("Naive = 1 with 24 sigma_2 D^2 > eps sqrt(p)");

  std::unique_ptr<MaxOracle> own;
  if (!oracle) {
    double rho1 = prof.rho1();
    if (!std::isfinite(rho1)) rho1 = 1.0;
    own = std::make_unique<KrylovMaxOracle>(rho1, cfg.q_fail, cfg.seed);
    oracle = own.get();
  }
  std::mt19937_64 pick = seeded_stream(cfg.seed, 1);
  tr.output_index = std::uniform_int_distribution<long>(0, tr.T - 1)(pick);

  const Domain& X = P.domain_x;
  const Domain& Y = P.domain_y;
  if (cfg.keep_iterates) tr.x.push_back(x);
  for (long t = 0; t < tr.T; ++t) {
    CenteredModel cm = centered_model(sm, x, shift, &tr.counters.hvp);
    ++tr.counters.value;
    ++tr.counters.grad_y;
    long before = tr.counters.hvp;
    KrylovResult kr = oracle->maximize(cm.q, R, tr.delta);
    ++tr.counters.max_oracle;
    // the oracle's own count must agree with what the wrapper saw
    if (tr.counters.hvp - before != kr.hvp_calls)
      throw Error(ErrorKind::numerical, "alg3: max oracle reported an inconsistent product count");
    tr.max_oracle_gap_bound = std::max(tr.max_oracle_gap_bound, kr.predicted_gap);
    Vec y = Y.project(ball.center + kr.y);
    ++tr.counters.proj_y;
    Vec g;
    if (cfg.naive) {
      g = P.grad_x(x, y);
      ++tr.counters.grad_x;
    } else {
      g = sm.grad_x(x, y);
      ++tr.counters.grad_x;
      ++tr.counters.cross_jvp;
      ++tr.counters.cross3_jvp;
    }
    tr.phi_hat.push_back(cm.constant + kr.value);
    if (t == tr.output_index) tr.x_out = x;
    Vec xn = projected_step(tr, X, x, g, tr.gamma_x, 1);
    keep_best(tr, t, x, &y);
    tr.calls.push_back(tr.counters.total());
    if (cfg.keep_iterates) tr.y.push_back(y);
    x = std::move(xn);
    if (cfg.keep_iterates) tr.x.push_back(x);
  }
  finish(tr, x, t0);
  return tr;
}

RunTrace solve(const ProblemPtr& p, const SolverConfig& cfg) {
  switch (cfg.algorithm) {
    case Algorithm::alg1: return solve_alg1(p, cfg);
    case Algorithm::alg2: return solve_alg2(p, cfg);
    case Algorithm::alg3: return solve_alg3(p, cfg);
  }
  throw Error(ErrorKind::invalid_argument, "unknown algorithm");
}

PrimalOracle dense_quadratic_surrogate_primal(const SurrogateModel& s) {
  if (s.k() != 2 || !s.base().domain_y.is_ball())
    throw Error(ErrorKind::unsupported, "dense surrogate primal needs k = 2 and a ball Y");
  auto sm = std::make_shared<const SurrogateModel>(s);
  const auto& ball = std::get<Ball>(sm->base().domain_y.shape());
  const Vec shift = ball.center - sm->center();
  const Vec center = ball.center;
  const double R = ball.radius;
  auto eval = [sm, shift, center, R](const Vec& x) {
    CenteredModel cm = centered_model(*sm, x, shift, nullptr);
    DenseMaxOracle dense;
    KrylovResult kr = dense.maximize(cm.q, R, 0.0);
    Vec y = sm->base().domain_y.project(center + kr.y);
    return PrimalEval{cm.constant + kr.value, sm->grad_x(x, y), y};
  };
  return PrimalOracle(eval, sm->lambda_bar(), PrimalMode::closed_form, sm->base().domain_x);
}

TelescopingCheck telescoping_check(const PrimalOracle& phi_hat, const RunTrace& tr, double sigma0, double sigma2,
                                   double D, const ProxOptions& opt) {
  if (tr.algorithm != Algorithm::alg3) throw Error(ErrorKind::invalid_argument, "telescoping check is for alg3 traces");
  if (static_cast<long>(tr.x.size()) != tr.T + 1)
    throw Error(ErrorKind::invalid_argument, "telescoping check needs the kept iterates x_0 .. x_T");
  const double lb = tr.lambda_bar;
  const double c = tr.naive ? 1.0 : 0.5;
  const double G = tr.naive ? sigma0 : sigma0 + sigma2 * D * D;
  const double extra = tr.naive ? sigma2 * sigma2 * std::pow(D, 4) / (2.0 * lb) : 0.0;
  TelescopingCheck out;
  auto env = [&](const Vec& x, Vec* xp) {
    ProxResult r = prox(phi_hat, x, lb, opt);
    ++out.prox_calls;
    if (xp) *xp = r.point;
    return phi_hat.phi(r.point) + lb * (r.point - x).squaredNorm();
  };
  double sum = 0, sum_g = 0;
  Vec xp;
  for (long t = 0; t < tr.T; ++t) {
    const Vec& xt = tr.x[t];
    double e = env(xt, &xp);
    if (t == 0) out.env0 = e;
    double d2 = (xp - xt).squaredNorm();
    sum += phi_hat.phi(xt) - phi_hat.phi(xp) - c * lb * d2;
    sum_g += 4.0 * lb * lb * d2;
  }
  out.envT = env(tr.x[tr.T], nullptr);
  const double T = static_cast<double>(tr.T);
  out.lhs = sum / T;
  out.mean_sq_moreau_grad = sum_g / T;
  out.rhs = (out.env0 - out.envT) / (2.0 * tr.gamma_x * lb * T) + tr.gamma_x * G * G / 2.0 + tr.delta + extra;
  out.holds = out.lhs <= out.rhs + 1e-9 * (1.0 + std::abs(out.lhs) + std::abs(out.rhs));
  return out;
}

std::string trace_csv(const RunTrace& tr) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "t,eps_t,phi_hat,oracle_calls\n";
  for (std::size_t t = 0; t < tr.eps.size(); ++t)
    os << t << ',' << tr.eps[t] << ',' << (t < tr.phi_hat.size() ? tr.phi_hat[t] : 0.0) << ','
       << (t < tr.calls.size() ? tr.calls[t] : 0) << '\n';
  return os.str();
}

namespace {

nlohmann::json vec_json(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

double finite_or_zero(double v) { return std::isfinite(v) ? v : 0.0; }

}  // namespace

std::string trace_json(const RunTrace& tr) {
  nlohmann::ordered_json j;
  j["algorithm"] = to_string(tr.algorithm);
  j["T"] = tr.T;
  j["epsilon"] = tr.epsilon;
  j["gamma_x"] = tr.gamma_x;
  j["gamma_y"] = tr.gamma_y;
  j["delta"] = tr.delta;
  j["lambda_bar"] = tr.lambda_bar;
  j["coupled"] = tr.coupled;
  j["naive"] = tr.naive;
  j["y_hat"] = vec_json(tr.y_hat);
  j["primal_gap_estimate"] = finite_or_zero(tr.delta_estimate);
  j["best_index"] = tr.best_index;
  j["eps_star"] = finite_or_zero(tr.best_eps);
  j["x_star"] = vec_json(tr.x_star);
  j["x_out"] = vec_json(tr.x_out);
  j["x_last"] = vec_json(tr.x_last);
  j["output_index"] = tr.output_index;
  const OracleCounters& c = tr.counters;
  j["oracle_calls"] = {{"value", c.value},         {"grad_x", c.grad_x},         {"grad_y", c.grad_y},
                       {"cross_jvp", c.cross_jvp}, {"cross3_jvp", c.cross3_jvp}, {"hvp", c.hvp},
                       {"linear_max", c.linear_max}, {"max_oracle", c.max_oracle}, {"proj_x", c.proj_x},
                       {"proj_y", c.proj_y}};
  j["warnings"] = tr.warnings;
  return j.dump(2);
}

}  // namespace mmx
