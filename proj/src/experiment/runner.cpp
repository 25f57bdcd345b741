#include <atomic>
#include <cstdlib>
#include <iomanip>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "mmx/experiment.hpp"
#include "mmx/gridsearch.hpp"
#include "mmx/surrogate.hpp"
#include "mmx/theory.hpp"

namespace mmx {

std::pair<Vec, double> brute_force_max(const ProblemInstance& p, const Vec& x, int resolution) {
  if (p.dim_y() > 2) throw Error(ErrorKind::unsupported, "brute_force_max needs dim(Y) <= 2");
  GridOptimum o = grid_maximize([&](const Vec& y) { return p.value(x, y); }, p.domain_y, resolution);
  return {o.point, o.value};
}

std::pair<Vec, double> dense_trust_region_max(const Mat& H, const Vec& g, double R) {
  EigenSystem eig = EigenSystem::of(H);
  const Eigen::Index n = eig.values.size();
  if (eig.values[n - 1] < 0) {
    Vec y = -eig.vectors * ((eig.vectors.transpose() * g).array() / eig.values.array()).matrix();
    if (y.norm() <= R) return {y, 0.5 * y.dot(H * y) + g.dot(y)};
  }
  auto [v, y] = sphere_quadratic_max(eig, g, R);
  return {y, v};
}

namespace {

using json = nlohmann::ordered_json;

struct Point {
  long index = 0;
  int k = 0;
  double lambda = 0, mu = 0, rho = 0, D = 0, eps = 0;
  std::uint64_t seed = 0;
};

std::vector<Point> expand(const ExperimentConfig& cfg, std::uint64_t seed) {
  auto values = [&](const char* key, double base) {
    auto it = cfg.sweep.find(key);
    return it == cfg.sweep.end() ? std::vector<double>{base} : it->second;
  };
  const InstanceSection& in = cfg.instance;
  auto ks = values("k", in.k);
  auto ls = values("lambda", in.lambda);
  auto ms = values("mu", in.mu);
  auto rs = values("rho", in.rho);
  auto ds = values("D", in.D);
  auto es = values("eps", cfg.solver.epsilon);
  std::vector<Point> pts;
  for (double k : ks)
    for (double l : ls)
      for (double m : ms)
        for (double r : rs)
          for (double d : ds)
            for (double e : es) {
              if (k != std::floor(k) || k < 0) throw Error(ErrorKind::config, "sweep.k entries must be integers >= 0");
              Point p;
              p.index = static_cast<long>(pts.size());
              p.k = static_cast<int>(k);
              p.lambda = l;
              p.mu = m;
              p.rho = r;
              p.D = d;
              p.eps = e;
              p.seed = seed + static_cast<std::uint64_t>(p.index);
              pts.push_back(p);
            }
  return pts;
}

std::string run_id(long i) {
  std::ostringstream os;
  os << 'r' << std::setw(5) << std::setfill('0') << i;
  return os.str();
}

Vec fit(const Vec& v, int dim, const char* what) {
  if (v.size() == dim) return v;
  if (v.size() == 1) return Vec::Constant(dim, v[0]);
  throw Error(ErrorKind::config, std::string(what) + " has wrong dimension");
}

HardInstanceSpec hard_spec(const InstanceSection& in, const Point& pt) {
  HardInstanceSpec sp;
  sp.family = in.name == "S" ? Family::S : Family::F;
  sp.k = in.name == "S" ? 0 : pt.k;
  sp.s = in.s;
  sp.lambda = pt.lambda;
  sp.mu = pt.mu;
  sp.rho = pt.rho;
  sp.D = pt.D;
  sp.a = in.a ? *in.a : (sp.family == Family::S ? 0.0 : -pt.D / 2.0);
  sp.x_half_width = in.x_half_width;
  return sp;
}

ProblemPtr make_problem(const InstanceSection& in, const Point& pt) {
  if (in.name == "F" || in.name == "S") return build_instance(hard_spec(in, pt));
  if (in.name == "cubic_ball") {
    CubicBallParams cp;
    cp.dim_x = in.dim_x;
    cp.dim_y = in.dim_y;
    cp.lambda = pt.lambda;
    cp.mu = pt.mu;
    cp.rho = pt.rho;
    cp.s = in.s;
    cp.radius = pt.D / 2.0;
    cp.x_half_width = in.x_half_width.value_or(1.0);
    cp.b_scale = in.b_scale;
    cp.seed = in.instance_seed;
    return make_cubic_ball(cp);
  }
  if (in.name == "intro") return make_intro_example(in.bounded_x);
  // quadratic
  const Eigen::Index nx = in.A.rows(), ny = in.A.cols();
  Mat P = in.P.size() ? in.P : Mat::Zero(nx, nx);
  Mat Q = in.Q.size() ? in.Q : Mat::Zero(ny, ny);
  Vec b = in.b.size() ? in.b : Vec::Zero(nx);
  Vec c = in.c.size() ? in.c : Vec::Zero(ny);
  Domain X = Domain::box(fit(in.x_lo, static_cast<int>(nx), "x_lo"), fit(in.x_hi, static_cast<int>(nx), "x_hi"));
  if (nx == 1) X = Domain::interval(in.x_lo[0], in.x_hi[0]);
  Domain Y = Domain::whole(1);
  if (in.y_radius) {
    Vec ctr = in.y_center.size() ? fit(in.y_center, static_cast<int>(ny), "y_center") : Vec::Zero(ny);
    Y = Domain::ball(ctr, *in.y_radius);
  } else if (ny == 1) {
    Y = Domain::interval(in.y_lo[0], in.y_hi[0]);
  } else {
    Y = Domain::box(fit(in.y_lo, static_cast<int>(ny), "y_lo"), fit(in.y_hi, static_cast<int>(ny), "y_hi"));
  }
  return make_quadratic(P, in.A, Q, b, c, X, Y);
}

const char* regime_name(Regime r) { return r == Regime::weak_coupling ? "weak" : "strong"; }

double num(double v) { return std::isfinite(v) ? v : 0.0; }

void fill_common(ResultRow& row, const Point& pt) {
  row.run_id = run_id(pt.index);
  row.k = pt.k;
  row.lambda = pt.lambda;
  row.mu = pt.mu;
  row.rho = pt.rho;
  row.D = pt.D;
  row.eps = pt.eps;
  row.seed = pt.seed;
}

void do_run(const ExperimentConfig& cfg, const Point& pt, ResultRow& row) {
  const InstanceSection& in = cfg.instance;
  fill_common(row, pt);
  row.family = in.name;
  ProblemPtr p = make_problem(in, pt);
  if (in.name == "S") row.k = 0;
  if (in.name == "F" || in.name == "S") row.regime = regime_name(classify(hard_spec(in, pt)));

  SolverConfig sc = cfg.solver;
  sc.epsilon = pt.eps;
  sc.seed = pt.seed;
  if (sc.x0.size() > 0) sc.x0 = fit(sc.x0, p->dim_x(), "solver.x0");
  if (sc.y_hat) sc.y_hat = fit(*sc.y_hat, p->dim_y(), "solver.y_hat");
  RunTrace tr = solve(p, sc);
  row.algorithm = to_string(tr.algorithm);
  row.T = tr.T;
  row.eps_star = tr.best_eps;
  row.warnings = static_cast<int>(tr.warnings.size());
  if (row.regime.empty()) row.regime = tr.algorithm == Algorithm::alg2 ? (tr.coupled ? "coupled" : "uncoupled") : "-";

  const int korder = tr.algorithm == Algorithm::alg1 ? 0 : tr.algorithm == Algorithm::alg2 ? 1 : 2;
  if (in.name == "cubic_ball") row.k = korder;
  if (in.name == "intro" || in.name == "quadratic") {
    // no swept parameters: report the instance's own constants
    row.k = korder;
    row.lambda = p->profile.lambda;
    row.mu = p->profile.mu;
    row.rho = p->profile.rho_1 || p->profile.has_order(1) ? num(p->profile.rho1()) : 0.0;
    row.D = p->domain_y.diameter();
  }
  SurrogateModel sm(p, korder, tr.y_hat);
  PrimalOracle sur = korder == 2 && p->domain_y.is_ball() ? dense_quadratic_surrogate_primal(sm)
                                                          : surrogate_primal(sm, cfg.verify.grid, sc.q_fail, sc.seed);
  GridOptions tg = cfg.verify.grid;
  tg.ignore_closed_primal = cfg.verify.true_grid;
  PrimalOracle tru = true_primal(p, tg);
  const double lb = tr.lambda_bar;
  StationarityReport rs = verify_fosp(sur, tr.x_out, pt.eps, lb, cfg.verify.prox);
  StationarityReport rt = verify_fosp(tru, tr.x_out, pt.eps, lb, cfg.verify.prox);
  row.moreau_grad_surrogate = rs.moreau_grad_norm;
  row.moreau_grad_true = rt.moreau_grad_norm;
  row.certified = rt.certified;
  row.surrogate_stationary = tr.algorithm == Algorithm::alg1 ? rs.moreau_grad_norm <= pt.eps / 6.0 : rs.certified;
  row.wall_ms = tr.wall_ms;
  row.trace_csv = trace_csv(tr);

  json j;
  j["run_id"] = row.run_id;
  j["instance"] = p->name;
  j["seed"] = pt.seed;
  j["trace"] = json::parse(trace_json(tr));
  j["verification"] = {{"lambda_bar", lb},
                       {"surrogate_moreau_grad", rs.moreau_grad_norm},
                       {"surrogate_prox_residual", rs.prox_residual},
                       {"true_moreau_grad", rt.moreau_grad_norm},
                       {"true_prox_residual", rt.prox_residual},
                       {"true_mode", tru.mode() == PrimalMode::grid ? "grid" : "closed_form"},
                       {"two_s_x_bound", 2.0 * num(tr.best_eps)},
                       {"certified", rt.certified}};
  row.detail_json = j.dump(2);
}

void do_certify(const ExperimentConfig& cfg, const Point& pt, ResultRow& row) {
  fill_common(row, pt);
  CertificateRequest req{pt.k, pt.lambda, pt.mu, pt.rho, pt.D, cfg.regime};
  Certificate c = certificate(req);
  row.family = c.instance.family == Family::S ? "S" : "F";
  row.algorithm = to_string(c.which);
  row.eps_star = c.bound;
  row.moreau_grad_surrogate = c.surrogate_moreau_grad;
  row.moreau_grad_true = c.true_moreau_grad;
  row.surrogate_stationary = c.surrogate_stationary;
  row.violates = c.violates;
  row.certified = c.surrogate_stationary && c.violates;
  row.regime = regime_name(c.regime);
  json j;
  j["run_id"] = row.run_id;
  j["case"] = to_string(c.which);
  j["y_hat"] = c.y_hat;
  j["x_star"] = c.x_star;
  j["instance"] = {{"family", row.family}, {"k", c.instance.k},     {"s", c.instance.s},
                   {"lambda", c.instance.lambda}, {"mu", c.instance.mu}, {"rho", c.instance.rho},
                   {"D", c.instance.D},       {"a", c.instance.a}};
  j["surrogate_moreau_grad"] = c.surrogate_moreau_grad;
  j["true_moreau_grad"] = c.true_moreau_grad;
  j["bound"] = c.bound;
  j["bound_formula"] = c.bound_formula;
  j["surrogate_stationary"] = c.surrogate_stationary;
  j["violates"] = c.violates;
  if (cfg.verify.numeric_check) {
    GridOptions g = cfg.verify.grid;
    g.ignore_closed_primal = true;
    const double lam = c.instance.lambda;
    const Vec xs = scalar_vec(c.x_star);
    double nt = moreau_grad(certificate_primal(c, Envelope::true_primal, false, g), xs, lam, cfg.verify.prox)[0];
    j["numeric_true_moreau_grad"] = nt;
    j["numeric_true_abs_diff"] = std::abs(nt - c.true_moreau_grad);
    if (c.which != CertCase::prop4_strong_odd) {
      double ns = moreau_grad(certificate_primal(c, Envelope::surrogate, false, g), xs, lam, cfg.verify.prox)[0];
      j["numeric_surrogate_moreau_grad"] = ns;
      j["numeric_surrogate_abs_diff"] = std::abs(ns - c.surrogate_moreau_grad);
    }
  }
  row.detail_json = j.dump(2);
}

void do_check(const ExperimentConfig& cfg, const Point& pt, ResultRow& row) {
  fill_common(row, pt);
  const InstanceSection& in = cfg.instance;
  ProblemPtr p = make_problem(in, pt);
  row.family = in.name;
  const int k = in.name == "S" ? 0 : pt.k;
  row.k = k;
  const double D = p->domain_y.diameter();
  row.D = D;
  DiameterVerdict v = check_theorem1(p->profile, D, pt.eps, k);
  row.algorithm = "theorem1";
  row.eps_star = v.lhs;
  row.moreau_grad_surrogate = v.coupling_term;
  row.moreau_grad_true = v.homogeneous_term;
  row.certified = v.admissible;
  row.regime = v.binding_term;
  json j;
  j["run_id"] = row.run_id;
  j["instance"] = p->name;
  j["k"] = k;
  j["D"] = D;
  j["epsilon"] = pt.eps;
  j["lambda_bar"] = v.lambda_bar;
  j["coupling_term"] = v.coupling_term;
  j["homogeneous_term"] = v.homogeneous_term;
  j["lhs"] = v.lhs;
  j["rhs"] = pt.eps / 24.0;
  j["admissible"] = v.admissible;
  j["binding_term"] = v.binding_term;
  j["leading_order_D"] = num(v.leading_order_D);
  if (k >= 2) j["high_accuracy"] = v.high_accuracy;
  if (cfg.threshold) j["threshold_D"] = num(theorem1_threshold_D(p->profile, pt.eps, k, D));
  row.detail_json = j.dump(2);
}

std::vector<KrylovRow> do_krylov(const ExperimentConfig& cfg, long r, std::uint64_t seed) {
  const KrylovBenchSection& kb = cfg.krylov;
  const int d = kb.d;
  std::mt19937_64 gen = seeded_stream(seed, 1);
  std::mt19937_64 xi_rng = seeded_stream(seed, 2);
  std::normal_distribution<double> gauss;
  Mat G(d, d);
  for (Eigen::Index i = 0; i < G.size(); ++i) G.data()[i] = gauss(gen);
  Mat H = 0.5 * (G + G.transpose());
  double hn = EigenSystem::of(H).values.cwiseAbs().maxCoeff();
  if (hn > 0) H /= hn;
  hn = 1.0;
  Vec g(d);
  for (int i = 0; i < d; ++i) g[i] = gauss(gen);
  g /= std::sqrt(static_cast<double>(d));
  const double opt = dense_trust_region_max(H, g, kb.R).second;
  QuadraticForm q = QuadraticForm::from_dense(H, g);
  Vec xi = random_unit(d, xi_rng);
  std::vector<int> ms = kb.m;
  if (ms.empty()) ms.push_back(krylov_size(d, kb.R, kb.delta, hn, kb.q));
  std::vector<KrylovRow> out;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    KrylovResult kr = krylov_max(q, kb.R, ms[i], xi, hn, kb.q);
    KrylovRow row;
    std::ostringstream id;
    id << run_id(r) << "-m" << ms[i];
    row.run_id = id.str();
    row.d = d;
    row.m = ms[i];
    row.R = kb.R;
    row.q = kb.q;
    row.gap = std::max(0.0, opt - kr.value);
    row.bound = krylov_gap_bound(hn, kb.R, ms[i], d, kb.q);
    row.within_bound = row.gap <= row.bound;
    row.m_used = kr.m_used;
    row.hvp_calls = kr.hvp_calls;
    row.seed = seed;
    out.push_back(row);
  }
  return out;
}

int exit_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::config:
    case ErrorKind::regime:
    case ErrorKind::invalid_argument:
    case ErrorKind::dimension:
    case ErrorKind::unsupported:
      return 2;
    case ErrorKind::assertion:
      return 1;
    default:
      return 3;
  }
}

template <class F>
void parallel_for(long n, int jobs, F&& body) {
  jobs = std::max(1, std::min<int>(jobs, static_cast<int>(std::max(1L, n))));
  if (jobs == 1) {
    for (long i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<long> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < jobs; ++w)
    pool.emplace_back([&] {
      for (long i = next++; i < n; i = next++) body(i);
    });
  for (auto& t : pool) t.join();
}

std::string resolve_out_dir(const ExperimentConfig& cfg, const RunOptions& opt) {
  if (!opt.out_dir.empty()) return opt.out_dir;
  if (!cfg.out_dir.empty()) return cfg.out_dir;
  if (const char* env = std::getenv("MMX_OUT_DIR"); env && *env) return env;
  return "out";
}

void check_assertions(const ExperimentConfig& cfg, ExperimentResult& res) {
  auto all = [&](auto pred) {
    for (const auto& r : res.rows)
      if (!pred(r)) return false;
    return !res.rows.empty();
  };
  auto frac = [&](auto pred, const auto& rows) {
    if (rows.empty()) return 0.0;
    long n = 0;
    for (const auto& r : rows) n += pred(r) ? 1 : 0;
    return static_cast<double>(n) / static_cast<double>(rows.size());
  };
  for (const Assertion& a : cfg.asserts) {
    bool ok = true;
    if (a.name == "all_certified") ok = all([](const ResultRow& r) { return r.certified; });
    else if (a.name == "all_surrogate_stationary") ok = all([](const ResultRow& r) { return r.surrogate_stationary; });
    else if (a.name == "all_violate") ok = all([](const ResultRow& r) { return r.violates; });
    else if (a.name == "all_admissible") ok = all([](const ResultRow& r) { return r.certified; });
    else if (a.name == "none_admissible") ok = all([](const ResultRow& r) { return !r.certified; });
    else if (a.name == "no_warnings") ok = all([](const ResultRow& r) { return r.warnings == 0; });
    else if (a.name == "min_fraction_certified")
      ok = frac([](const ResultRow& r) { return r.certified; }, res.rows) >= a.value;
    else if (a.name == "all_within_bound")
      ok = !res.krylov_rows.empty() && frac([](const KrylovRow& r) { return r.within_bound; }, res.krylov_rows) == 1.0;
    else if (a.name == "min_fraction_within_bound")
      ok = frac([](const KrylovRow& r) { return r.within_bound; }, res.krylov_rows) >= a.value;
    if (!ok) {
      std::ostringstream os;
      os << a.name << " (config line " << a.line << ")";
      res.failed_assertions.push_back(os.str());
    }
  }
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opt) {
  ExperimentResult res;
  const std::uint64_t seed = opt.seed.value_or(cfg.seed);
  const std::string dir = resolve_out_dir(cfg, opt);
  const std::string base = dir + "/" + cfg.name;

  if (cfg.command == Command::krylov_bench) {
    const long n = cfg.krylov.runs;
    std::vector<std::vector<KrylovRow>> parts(static_cast<std::size_t>(n));
    parallel_for(n, opt.jobs, [&](long r) { parts[static_cast<std::size_t>(r)] = do_krylov(cfg, r, seed + r); });
    std::string csv = krylov_csv_header();
    for (auto& p : parts)
      for (auto& row : p) {
        csv += krylov_csv_line(row, cfg.hash);
        res.krylov_rows.push_back(std::move(row));
      }
    res.csv = csv;
  } else {
    std::vector<Point> pts = expand(cfg, seed);
    res.rows.resize(pts.size());
    parallel_for(static_cast<long>(pts.size()), opt.jobs, [&](long i) {
      ResultRow& row = res.rows[static_cast<std::size_t>(i)];
      const Point& pt = pts[static_cast<std::size_t>(i)];
      try {
        switch (cfg.command) {
          case Command::run: do_run(cfg, pt, row); break;
          case Command::certify: do_certify(cfg, pt, row); break;
          case Command::check_diameter: do_check(cfg, pt, row); break;
          case Command::krylov_bench: break;
        }
      } catch (const Error& e) {
        fill_common(row, pt);
        row.error = e.what();
        row.error_kind = e.kind();
      } catch (const std::exception& e) {
        fill_common(row, pt);
        row.error = e.what();
        row.error_kind = ErrorKind::numerical;
      }
    });
    std::string csv = csv_header();
    for (const auto& row : res.rows)
      if (row.error.empty()) csv += csv_line(row, cfg.hash, opt.timing);
    res.csv = csv;
  }

  check_assertions(cfg, res);

  for (const auto& row : res.rows)
    if (!row.error.empty()) {
      res.exit_code = exit_for(row.error_kind);
      res.message = row.run_id + ": " + row.error;
      break;
    }
  if (res.exit_code == 0 && !res.failed_assertions.empty()) {
    res.exit_code = 1;
    res.message = "assertion failed: " + res.failed_assertions.front();
  }

  if (opt.write_files) {
    write_file(base + ".csv", res.csv);
    res.written.push_back(base + ".csv");
    for (const auto& row : res.rows) {
      std::string detail = row.detail_json;
      if (!row.error.empty()) {
        json j;
        j["run_id"] = row.run_id;
        j["error"] = row.error;
        detail = j.dump(2);
      }
      write_file(base + "/runs/" + row.run_id + ".json", detail + "\n");
      if (!row.trace_csv.empty()) write_file(base + "/traces/" + row.run_id + ".csv", row.trace_csv);
    }
    json s;
    s["name"] = cfg.name;
    s["command"] = to_string(cfg.command);
    s["seed"] = seed;
    std::ostringstream h;
    h << std::hex << std::setw(16) << std::setfill('0') << cfg.hash;
    s["config_hash"] = h.str();
    s["schema_version"] = kSchemaVersion;
    s["lib_version"] = MMX_VERSION_STRING;
    s["rows"] = cfg.command == Command::krylov_bench ? res.krylov_rows.size() : res.rows.size();
    s["failed_assertions"] = res.failed_assertions;
    s["exit_code"] = res.exit_code;
    s["message"] = res.message;
    write_file(base + "/summary.json", s.dump(2) + "\n");
    res.written.push_back(base + "/summary.json");
  }
  return res;
}

}  // namespace mmx
