#include "mmx/mmx.h"

#include <cstring>
#include <string>

#include "mmx/experiment.hpp"
#include "mmx/instances.hpp"
#include "mmx/solvers.hpp"
#include "mmx/surrogate.hpp"
#include "mmx/theory.hpp"

struct mmx_problem {
  mmx::ProblemPtr p;
};

struct mmx_run {
  mmx::RunTrace trace;
  std::string csv;
};

struct mmx_experiment {
  mmx::ExperimentResult result;
};

namespace {

thread_local std::string g_error;

mmx_status code_of(mmx::ErrorKind k) {
  using mmx::ErrorKind;
  switch (k) {
    case ErrorKind::assertion: return MMX_ASSERTION;
    case ErrorKind::config: return MMX_CONFIG;
    case ErrorKind::budget: return MMX_BUDGET;
    case ErrorKind::numerical: return MMX_NUMERICAL;
    case ErrorKind::invalid_argument:
    case ErrorKind::dimension: return MMX_INVALID_ARGUMENT;
    case ErrorKind::unsupported: return MMX_UNSUPPORTED;
    case ErrorKind::regime: return MMX_REGIME;
    case ErrorKind::io: return MMX_IO;
  }
  return MMX_NUMERICAL;
}

template <class F>
mmx_status guard(F&& f) {
  try {
    f();
    g_error.clear();
    return MMX_OK;
  } catch (const mmx::Error& e) {
    g_error = e.what();
    return code_of(e.kind());
  } catch (const std::exception& e) {
    g_error = e.what();
    return MMX_NUMERICAL;
  } catch (...) {
    g_error = "unknown error";
    return MMX_NUMERICAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) throw mmx::Error(mmx::ErrorKind::invalid_argument, std::string(what) + " is NULL");
}

mmx::Vec vec_of(const double* v, int n) {
  mmx::Vec out(n);
  for (int i = 0; i < n; ++i) out[i] = v[i];
  return out;
}

void copy_out(const mmx::Vec& v, double* out) {
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = v[i];
}

mmx_status give_problem(mmx::ProblemPtr p, mmx_problem** out) {
  *out = new mmx_problem{std::move(p)};
  return MMX_OK;
}

}  // namespace

extern "C" {

const char* mmx_version(void) { return MMX_VERSION_STRING; }
const char* mmx_last_error(void) { return g_error.c_str(); }

const char* mmx_status_name(mmx_status s) {
  switch (s) {
    case MMX_OK: return "ok";
    case MMX_ASSERTION: return "assertion";
    case MMX_CONFIG: return "config";
    case MMX_BUDGET: return "budget";
    case MMX_NUMERICAL: return "numerical";
    case MMX_INVALID_ARGUMENT: return "invalid_argument";
    case MMX_UNSUPPORTED: return "unsupported";
    case MMX_REGIME: return "regime";
    case MMX_IO: return "io";
  }
  return "unknown";
}

void mmx_hard_spec_init(mmx_hard_spec* s) {
  if (!s) return;
  *s = mmx_hard_spec{};
  s->family = MMX_FAMILY_F;
  s->k = 1;
  s->s = 1;
  s->lambda = s->mu = s->rho = s->D = 1.0;
}

void mmx_cubic_ball_params_init(mmx_cubic_ball_params* c) {
  if (!c) return;
  mmx::CubicBallParams d;
  c->dim_x = d.dim_x;
  c->dim_y = d.dim_y;
  c->lambda = d.lambda;
  c->mu = d.mu;
  c->rho = d.rho;
  c->s = d.s;
  c->radius = d.radius;
  c->x_half_width = d.x_half_width;
  c->b_scale = d.b_scale;
  c->seed = d.seed;
}

mmx_status mmx_problem_hard(const mmx_hard_spec* spec, mmx_problem** out) {
  return guard([&] {
    need(spec, "spec");
    need(out, "out");
    mmx::HardInstanceSpec sp;
    sp.family = spec->family == MMX_FAMILY_S ? mmx::Family::S : mmx::Family::F;
    sp.k = spec->k;
    sp.s = spec->s;
    sp.lambda = spec->lambda;
    sp.mu = spec->mu;
    sp.rho = spec->rho;
    sp.D = spec->D;
    sp.a = spec->has_a ? spec->a : (sp.family == mmx::Family::S ? 0.0 : -spec->D / 2.0);
    if (spec->x_half_width > 0) sp.x_half_width = spec->x_half_width;
    give_problem(mmx::build_instance(sp), out);
  });
}

mmx_status mmx_problem_cubic_ball(const mmx_cubic_ball_params* c, mmx_problem** out) {
  return guard([&] {
    need(c, "params");
    need(out, "out");
    mmx::CubicBallParams cp;
    cp.dim_x = c->dim_x;
    cp.dim_y = c->dim_y;
    cp.lambda = c->lambda;
    cp.mu = c->mu;
    cp.rho = c->rho;
    cp.s = c->s;
    cp.radius = c->radius;
    cp.x_half_width = c->x_half_width;
    cp.b_scale = c->b_scale;
    cp.seed = c->seed;
    give_problem(mmx::make_cubic_ball(cp), out);
  });
}

mmx_status mmx_problem_intro(int bounded_x, mmx_problem** out) {
  return guard([&] {
    need(out, "out");
    give_problem(mmx::make_intro_example(bounded_x != 0), out);
  });
}

void mmx_problem_destroy(mmx_problem* p) { delete p; }

int mmx_problem_dim_x(const mmx_problem* p) { return p ? p->p->dim_x() : 0; }
int mmx_problem_dim_y(const mmx_problem* p) { return p ? p->p->dim_y() : 0; }

mmx_status mmx_problem_value(const mmx_problem* p, const double* x, const double* y, double* out) {
  return guard([&] {
    need(p, "problem");
    need(x, "x");
    need(y, "y");
    need(out, "out");
    *out = p->p->value(vec_of(x, p->p->dim_x()), vec_of(y, p->p->dim_y()));
  });
}

mmx_status mmx_problem_grad_x(const mmx_problem* p, const double* x, const double* y, double* out) {
  return guard([&] {
    need(p, "problem");
    need(x, "x");
    need(y, "y");
    need(out, "out");
    copy_out(p->p->grad_x(vec_of(x, p->p->dim_x()), vec_of(y, p->p->dim_y())), out);
  });
}

mmx_status mmx_problem_grad_y(const mmx_problem* p, const double* x, const double* y, double* out) {
  return guard([&] {
    need(p, "problem");
    need(x, "x");
    need(y, "y");
    need(out, "out");
    copy_out(p->p->grad_y(vec_of(x, p->p->dim_x()), vec_of(y, p->p->dim_y())), out);
  });
}

mmx_status mmx_problem_primal(const mmx_problem* p, const double* x, double* value, double* argmax) {
  return guard([&] {
    need(p, "problem");
    need(x, "x");
    need(value, "value");
    mmx::PrimalEval e = mmx::true_primal(p->p).eval(vec_of(x, p->p->dim_x()));
    *value = e.value;
    if (argmax) copy_out(e.argmax, argmax);
  });
}

void mmx_solver_config_init(mmx_solver_config* c) {
  if (!c) return;
  mmx::SolverConfig d;
  *c = mmx_solver_config{};
  c->algorithm = 1;
  c->epsilon = d.epsilon;
  c->coupled = -1;
  c->naive = 0;
  c->p_fail = d.p_fail;
  c->q_fail = d.q_fail;
  c->T_override = 0;
  c->T_cap = d.T_cap;
  c->seed = d.seed;
}

mmx_status mmx_solve(const mmx_problem* p, const mmx_solver_config* c, mmx_run** out) {
  return guard([&] {
    need(p, "problem");
    need(c, "config");
    need(out, "out");
    mmx::SolverConfig sc;
    if (c->algorithm < 1 || c->algorithm > 3)
      throw mmx::Error(mmx::ErrorKind::config, "algorithm must be 1, 2 or 3");
    sc.algorithm = static_cast<mmx::Algorithm>(c->algorithm - 1);
    sc.epsilon = c->epsilon;
    if (c->x0) sc.x0 = vec_of(c->x0, p->p->dim_x());
    if (c->y_hat) sc.y_hat = vec_of(c->y_hat, p->p->dim_y());
    if (c->coupled >= 0) sc.coupled = c->coupled != 0;
    sc.naive = c->naive != 0;
    sc.p_fail = c->p_fail;
    sc.q_fail = c->q_fail;
    if (c->T_override > 0) sc.T_override = static_cast<long>(c->T_override);
    sc.T_cap = static_cast<long>(c->T_cap);
    sc.seed = c->seed;
    auto* r = new mmx_run{mmx::solve(p->p, sc), {}};
    r->csv = mmx::trace_csv(r->trace);
    *out = r;
  });
}

void mmx_run_destroy(mmx_run* r) { delete r; }
long long mmx_run_iterations(const mmx_run* r) { return r ? r->trace.T : 0; }
double mmx_run_eps_star(const mmx_run* r) { return r ? r->trace.best_eps : 0.0; }
double mmx_run_lambda_bar(const mmx_run* r) { return r ? r->trace.lambda_bar : 0.0; }
double mmx_run_gamma_x(const mmx_run* r) { return r ? r->trace.gamma_x : 0.0; }

mmx_status mmx_run_point(const mmx_run* r, double* x_out) {
  return guard([&] {
    need(r, "run");
    need(x_out, "x_out");
    copy_out(r->trace.x_out, x_out);
  });
}

mmx_status mmx_run_trace_eps(const mmx_run* r, double* out, long long cap, long long* n) {
  return guard([&] {
    need(r, "run");
    const auto& e = r->trace.eps;
    if (n) *n = static_cast<long long>(e.size());
    if (out)
      for (long long i = 0; i < cap && i < static_cast<long long>(e.size()); ++i) out[i] = e[static_cast<size_t>(i)];
  });
}

mmx_status mmx_run_counters(const mmx_run* r, mmx_oracle_counters* out) {
  return guard([&] {
    need(r, "run");
    need(out, "out");
    const auto& c = r->trace.counters;
    *out = mmx_oracle_counters{c.value, c.grad_x, c.grad_y, c.cross_jvp, c.cross3_jvp, c.hvp, c.linear_max, c.max_oracle};
  });
}

mmx_status mmx_run_trace_csv(const mmx_run* r, char* buf, size_t cap, size_t* needed) {
  return guard([&] {
    need(r, "run");
    if (needed) *needed = r->csv.size() + 1;
    if (buf && cap > 0) {
      size_t n = std::min(cap - 1, r->csv.size());
      std::memcpy(buf, r->csv.data(), n);
      buf[n] = '\0';
    }
  });
}

mmx_status mmx_moreau_grad_norm(const mmx_problem* p, int order, const double* y_hat, const double* x,
                                double lambda_bar, double* out) {
  return guard([&] {
    need(p, "problem");
    need(x, "x");
    need(out, "out");
    const mmx::ProblemPtr& P = p->p;
    mmx::Vec xv = vec_of(x, P->dim_x());
    if (order < 0) {
      *out = mmx::moreau_grad(mmx::true_primal(P), xv, lambda_bar).norm();
      return;
    }
    if (order > 2) throw mmx::Error(mmx::ErrorKind::unsupported, "surrogate order must be 0, 1 or 2");
    mmx::Vec c = y_hat ? vec_of(y_hat, P->dim_y()) : P->domain_y.chebyshev_center();
    mmx::SurrogateModel sm(P, order, c);
    mmx::PrimalOracle o = order == 2 && P->domain_y.is_ball() ? mmx::dense_quadratic_surrogate_primal(sm)
                                                             : mmx::surrogate_primal(sm);
    *out = mmx::moreau_grad(o, xv, lambda_bar).norm();
  });
}

mmx_status mmx_certify(const mmx_cert_request* req, mmx_certificate* out) {
  return guard([&] {
    need(req, "request");
    need(out, "out");
    mmx::CertificateRequest r{req->k, req->lambda, req->mu, req->rho, req->D, std::nullopt};
    if (req->regime == 0) r.regime = mmx::Regime::weak_coupling;
    if (req->regime == 1) r.regime = mmx::Regime::strong_coupling;
    mmx::Certificate c = mmx::certificate(r);
    *out = mmx_certificate{};
    std::strncpy(out->case_name, mmx::to_string(c.which), sizeof out->case_name - 1);
    out->regime = c.regime == mmx::Regime::weak_coupling ? 0 : 1;
    out->y_hat = c.y_hat;
    out->x_star = c.x_star;
    out->surrogate_moreau_grad = c.surrogate_moreau_grad;
    out->true_moreau_grad = c.true_moreau_grad;
    out->bound = c.bound;
    out->surrogate_stationary = c.surrogate_stationary;
    out->violates = c.violates;
  });
}

mmx_status mmx_check_theorem1(const mmx_problem* p, double D, double epsilon, int k, mmx_diameter_verdict* out) {
  return guard([&] {
    need(p, "problem");
    need(out, "out");
    mmx::DiameterVerdict v = mmx::check_theorem1(p->p->profile, D, epsilon, k);
    *out = mmx_diameter_verdict{v.lhs, v.coupling_term, v.homogeneous_term, v.lambda_bar, v.admissible ? 1 : 0};
  });
}

mmx_status mmx_theorem1_threshold_D(const mmx_problem* p, double epsilon, int k, double* out) {
  return guard([&] {
    need(p, "problem");
    need(out, "out");
    *out = mmx::theorem1_threshold_D(p->p->profile, epsilon, k, p->p->domain_y.diameter());
  });
}

mmx_status mmx_krylov_approx_max(int d, const double* H, const double* g, double R, double delta, double rho1,
                                 double q_fail, uint64_t seed, double* y_out, double* value) {
  return guard([&] {
    need(H, "H");
    need(g, "g");
    if (d < 1) throw mmx::Error(mmx::ErrorKind::invalid_argument, "d must be >= 1");
    mmx::Mat Hm(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) Hm(i, j) = H[i * d + j];
    mmx::QuadraticForm q = mmx::QuadraticForm::from_dense(Hm, vec_of(g, d));
    mmx::KrylovResult r = mmx::approx_max(q, R, delta, rho1, q_fail, seed);
    if (y_out) copy_out(r.y, y_out);
    if (value) *value = r.value;
  });
}

void mmx_run_options_init(mmx_run_options* o) {
  if (!o) return;
  *o = mmx_run_options{};
  o->jobs = 1;
}

mmx_status mmx_experiment_run(const char* config_path, const char* command, const mmx_run_options* opt,
                              mmx_experiment** out) {
  return guard([&] {
    need(config_path, "config_path");
    need(out, "out");
    mmx::ExperimentConfig cfg = mmx::load_config(config_path);
    if (command) {
      mmx::Command c = mmx::command_from_string(command);
      if (cfg.command_given && c != cfg.command)
        throw mmx::Error(mmx::ErrorKind::config, std::string("config declares command '") + mmx::to_string(cfg.command) +
                                                     "' but '" + command + "' was requested");
      mmx::apply_command(cfg, c);
    }
    mmx::RunOptions ro;
    if (opt) {
      if (opt->has_seed) ro.seed = opt->seed;
      if (opt->out_dir) ro.out_dir = opt->out_dir;
      ro.jobs = opt->jobs > 0 ? opt->jobs : 1;
      ro.timing = opt->timing != 0;
    }
    *out = new mmx_experiment{mmx::run_experiment(cfg, ro)};
  });
}

void mmx_experiment_destroy(mmx_experiment* e) { delete e; }
int mmx_experiment_exit_code(const mmx_experiment* e) { return e ? e->result.exit_code : 2; }
const char* mmx_experiment_message(const mmx_experiment* e) { return e ? e->result.message.c_str() : ""; }
int mmx_experiment_file_count(const mmx_experiment* e) { return e ? static_cast<int>(e->result.written.size()) : 0; }

const char* mmx_experiment_file(const mmx_experiment* e, int i) {
  if (!e || i < 0 || i >= static_cast<int>(e->result.written.size())) return nullptr;
  return e->result.written[static_cast<size_t>(i)].c_str();
}

long long mmx_experiment_rows(const mmx_experiment* e) {
  if (!e) return 0;
  return static_cast<long long>(e->result.rows.size() + e->result.krylov_rows.size());
}

}  // extern "C"
