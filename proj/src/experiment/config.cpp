#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "mmx/experiment.hpp"

namespace mmx {

const char* to_string(Command c) {
  switch (c) {
    case Command::run: return "run";
    case Command::certify: return "certify";
    case Command::check_diameter: return "check-diameter";
    case Command::krylov_bench: return "krylov-bench";
  }
  return "?";
}

Command command_from_string(const std::string& s) {
  if (s == "run") return Command::run;
  if (s == "certify") return Command::certify;
  if (s == "check-diameter") return Command::check_diameter;
  if (s == "krylov-bench") return Command::krylov_bench;
  throw Error(ErrorKind::config, "unknown command '" + s + "'");
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

namespace {

[[noreturn]] void fail_at(const YAML::Node& n, const std::string& msg) {
  std::ostringstream os;
  os << "config";
  if (n.Mark().line >= 0) os << " line " << n.Mark().line + 1;
  os << ": " << msg;
  throw Error(ErrorKind::config, os.str());
}

// A mapping whose keys are checked against an allow-list.
class Section {
 public:
  Section(const YAML::Node& node, std::string where, std::set<std::string> allowed)
      : node_(node), where_(std::move(where)) {
    if (!node_.IsMap()) fail_at(node_, where_ + " must be a mapping");
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      std::string key = it->first.as<std::string>();
      if (!allowed.count(key)) fail_at(it->first, "unknown key '" + key + "' in " + where_);
    }
  }

  bool has(const std::string& k) const { return static_cast<bool>(node_[k]); }
  YAML::Node at(const std::string& k) const { return node_[k]; }

  template <class T>
  T get(const std::string& k, T fallback) const {
    YAML::Node n = node_[k];
    if (!n) return fallback;
    return convert<T>(n, k);
  }

  template <class T>
  std::optional<T> opt(const std::string& k) const {
    YAML::Node n = node_[k];
    if (!n) return std::nullopt;
    return convert<T>(n, k);
  }

  Vec vec(const std::string& k) const {
    YAML::Node n = node_[k];
    if (!n) return Vec();
    return to_vec(n, where_ + "." + k);
  }

  Mat mat(const std::string& k) const {
    YAML::Node n = node_[k];
    if (!n) return Mat();
    if (!n.IsSequence() || n.size() == 0) fail_at(n, where_ + "." + k + " must be a non-empty list of rows");
    const auto rows = static_cast<Eigen::Index>(n.size());
    Eigen::Index cols = -1;
    Mat M;
    for (Eigen::Index i = 0; i < rows; ++i) {
      Vec r = to_vec(n[i], where_ + "." + k);
      if (cols < 0) {
        cols = r.size();
        M.resize(rows, cols);
      } else if (r.size() != cols) {
        fail_at(n[i], where_ + "." + k + " rows differ in length");
      }
      M.row(i) = r.transpose();
    }
    return M;
  }

  static Vec to_vec(const YAML::Node& n, const std::string& what) {
    if (n.IsScalar()) return scalar_vec(scalar<double>(n, what));
    if (!n.IsSequence() || n.size() == 0) fail_at(n, what + " must be a number or a non-empty list");
    Vec v(static_cast<Eigen::Index>(n.size()));
    for (std::size_t i = 0; i < n.size(); ++i) v[static_cast<Eigen::Index>(i)] = scalar<double>(n[i], what);
    return v;
  }

  template <class T>
  static T scalar(const YAML::Node& n, const std::string& what) {
    if (!n.IsScalar()) fail_at(n, what + " must be a scalar");
    try {
      return n.as<T>();
    } catch (const YAML::Exception&) {
      fail_at(n, what + ": cannot read '" + n.Scalar() + "'");
    }
  }

 private:
  template <class T>
  T convert(const YAML::Node& n, const std::string& k) const {
    return scalar<T>(n, where_ + "." + k);
  }

  YAML::Node node_;
  std::string where_;
};

void read_instance(const Section& s, InstanceSection& in) {
  in.name = s.get<std::string>("name", in.name);
  static const std::set<std::string> names = {"F", "S", "cubic_ball", "intro", "quadratic"};
  if (!names.count(in.name)) fail_at(s.at("name"), "unknown instance '" + in.name + "'");
  in.lambda = s.get("lambda", in.lambda);
  in.mu = s.get("mu", in.mu);
  in.rho = s.get("rho", in.rho);
  in.D = s.get("D", in.D);
  in.k = s.get("k", in.k);
  in.s = s.get("s", in.s);
  in.a = s.opt<double>("a");
  in.x_half_width = s.opt<double>("x_half_width");
  in.dim_x = s.get("dim_x", in.dim_x);
  in.dim_y = s.get("dim_y", in.dim_y);
  in.b_scale = s.get("b_scale", in.b_scale);
  in.instance_seed = s.get<std::uint64_t>("instance_seed", in.instance_seed);
  in.bounded_x = s.get("bounded_x", in.bounded_x);
  in.P = s.mat("P");
  in.A = s.mat("A");
  in.Q = s.mat("Q");
  in.b = s.vec("b");
  in.c = s.vec("c");
  in.x_lo = s.vec("x_lo");
  in.x_hi = s.vec("x_hi");
  in.y_lo = s.vec("y_lo");
  in.y_hi = s.vec("y_hi");
  in.y_radius = s.opt<double>("y_radius");
  in.y_center = s.vec("y_center");
  if (in.name == "quadratic") {
    if (in.A.size() == 0) fail_at(s.at("name"), "quadratic instance needs A");
    if (in.x_lo.size() == 0 || in.x_hi.size() == 0) fail_at(s.at("name"), "quadratic instance needs x_lo and x_hi");
    if (!in.y_radius && (in.y_lo.size() == 0 || in.y_hi.size() == 0))
      fail_at(s.at("name"), "quadratic instance needs y_lo/y_hi or y_radius");
  }
}

void read_solver(const Section& s, SolverConfig& sc) {
  std::string alg = s.get<std::string>("algorithm", "alg1");
  if (alg.size() == 1) alg = "alg" + alg;
  if (alg == "alg1") sc.algorithm = Algorithm::alg1;
  else if (alg == "alg2") sc.algorithm = Algorithm::alg2;
  else if (alg == "alg3") sc.algorithm = Algorithm::alg3;
  else fail_at(s.at("algorithm"), "unknown algorithm '" + alg + "'");
  sc.epsilon = s.get("epsilon", sc.epsilon);
  sc.x0 = s.vec("x0");
  if (s.has("y_hat")) sc.y_hat = s.vec("y_hat");
  sc.coupled = s.opt<bool>("coupled");
  sc.naive = s.get("naive", sc.naive);
  sc.p_fail = s.get("p_fail", sc.p_fail);
  sc.q_fail = s.get("q_fail", sc.q_fail);
  sc.T_override = s.opt<long>("T_override");
  sc.T_cap = s.get("T_cap", sc.T_cap);
  sc.brute_resolution = s.get("brute_resolution", sc.brute_resolution);
  sc.keep_iterates = s.get("keep_iterates", sc.keep_iterates);
}

const std::set<std::string> kSweepKeys = {"lambda", "mu", "rho", "D", "eps", "k"};

const std::set<std::string> kAssertions = {
    "all_certified",      "all_surrogate_stationary", "all_violate",    "all_admissible", "none_admissible",
    "all_within_bound",   "min_fraction_certified",   "min_fraction_within_bound",        "no_warnings",
};

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    std::ostringstream os;
    os << "config line " << e.mark.line + 1 << ": " << e.msg;
    throw Error(ErrorKind::config, os.str());
  }
  if (!root || root.IsNull()) throw Error(ErrorKind::config, "config is empty");
  ExperimentConfig cfg;
  cfg.raw = text;
  cfg.hash = fnv1a64(text);
  Section top(root, "config",
              {"command", "name", "seed", "output_dir", "instance", "solver", "certify", "check_diameter", "sweep",
               "verify", "krylov", "assert"});
  if (!top.has("seed")) fail_at(root, "seed is required");
  cfg.seed = top.get<std::uint64_t>("seed", 1);
  cfg.command = command_from_string(top.get<std::string>("command", "run"));
  cfg.name = top.get<std::string>("name", cfg.name);
  if (cfg.name.empty() || cfg.name.find('/') != std::string::npos) fail_at(top.at("name"), "name must be a plain file stem");
  cfg.out_dir = top.get<std::string>("output_dir", "");

  if (top.has("instance")) {
    Section s(top.at("instance"), "instance",
              {"name", "lambda", "mu", "rho", "D", "k", "s", "a", "x_half_width", "dim_x", "dim_y", "b_scale",
               "instance_seed", "bounded_x", "P", "A", "Q", "b", "c", "x_lo", "x_hi", "y_lo", "y_hi", "y_radius",
               "y_center"});
    read_instance(s, cfg.instance);
    cfg.has_instance = true;
  }
  if (top.has("solver")) {
    Section s(top.at("solver"), "solver",
              {"algorithm", "epsilon", "x0", "y_hat", "coupled", "naive", "p_fail", "q_fail", "T_override", "T_cap",
               "brute_resolution", "keep_iterates"});
    read_solver(s, cfg.solver);
    cfg.has_solver = true;
  }
  if (top.has("certify")) {
    Section s(top.at("certify"), "certify", {"regime", "numeric_check"});
    if (s.has("regime")) {
      std::string r = s.get<std::string>("regime", "");
      if (r == "weak") cfg.regime = Regime::weak_coupling;
      else if (r == "strong") cfg.regime = Regime::strong_coupling;
      else fail_at(s.at("regime"), "regime must be weak or strong");
    }
    cfg.verify.numeric_check = s.get("numeric_check", false);
  }
  if (top.has("check_diameter")) {
    Section s(top.at("check_diameter"), "check_diameter", {"threshold"});
    cfg.threshold = s.get("threshold", false);
  }
  if (top.has("sweep")) {
    YAML::Node sw = top.at("sweep");
    Section s(sw, "sweep", kSweepKeys);
    for (auto it = sw.begin(); it != sw.end(); ++it) {
      std::string key = it->first.as<std::string>();
      const YAML::Node& v = it->second;
      std::vector<double> vals;
      if (v.IsScalar()) {
        vals.push_back(Section::scalar<double>(v, "sweep." + key));
      } else if (v.IsSequence()) {
        for (const auto& e : v) vals.push_back(Section::scalar<double>(e, "sweep." + key));
      } else {
        fail_at(v, "sweep." + key + " must be a number or a list");
      }
      if (vals.empty()) fail_at(v, "sweep." + key + " is empty");
      cfg.sweep[key] = vals;
    }
  }
  if (top.has("verify")) {
    Section s(top.at("verify"), "verify", {"resolution_1d", "resolution_2d", "prox_tol", "inner_budget", "true_grid"});
    cfg.verify.grid.resolution_1d = s.get("resolution_1d", cfg.verify.grid.resolution_1d);
    cfg.verify.grid.resolution_2d = s.get("resolution_2d", cfg.verify.grid.resolution_2d);
    cfg.verify.prox.tol = s.get("prox_tol", cfg.verify.prox.tol);
    cfg.verify.prox.inner_budget = s.get("inner_budget", cfg.verify.prox.inner_budget);
    cfg.verify.true_grid = s.get("true_grid", false);
    if (cfg.verify.grid.resolution_1d < 2 || cfg.verify.grid.resolution_2d < 2)
      fail_at(top.at("verify"), "grid resolutions must be >= 2");
    if (!(cfg.verify.prox.tol > 0)) fail_at(top.at("verify"), "prox_tol must be > 0");
  }
  if (top.has("krylov")) {
    Section s(top.at("krylov"), "krylov", {"d", "R", "q", "runs", "m", "delta"});
    KrylovBenchSection& kb = cfg.krylov;
    kb.d = s.get("d", kb.d);
    kb.R = s.get("R", kb.R);
    kb.q = s.get("q", kb.q);
    kb.runs = s.get("runs", kb.runs);
    kb.delta = s.get("delta", kb.delta);
    if (s.has("m")) {
      YAML::Node m = s.at("m");
      if (m.IsScalar()) kb.m.push_back(Section::scalar<int>(m, "krylov.m"));
      else if (m.IsSequence() && m.size() > 0)
        for (const auto& e : m) kb.m.push_back(Section::scalar<int>(e, "krylov.m"));
      else fail_at(m, "krylov.m must be an integer or a non-empty list");
      for (int v : kb.m)
        if (v < 1) fail_at(m, "krylov.m entries must be >= 1");
    }
    if (kb.d < 1 || kb.runs < 1 || !(kb.R > 0) || !(kb.q > 0 && kb.q < 1) || !(kb.delta > 0))
      fail_at(top.at("krylov"), "krylov: need d >= 1, runs >= 1, R > 0, q in (0,1), delta > 0");
  }
  if (top.has("assert")) {
    YAML::Node as = top.at("assert");
    if (!as.IsSequence()) fail_at(as, "assert must be a list");
    for (const auto& e : as) {
      Assertion a;
      a.line = e.Mark().line + 1;
      if (e.IsScalar()) {
        a.name = e.as<std::string>();
      } else if (e.IsMap() && e.size() == 1) {
        a.name = e.begin()->first.as<std::string>();
        a.value = Section::scalar<double>(e.begin()->second, "assert." + a.name);
      } else {
        fail_at(e, "assert entries are names or single-key mappings");
      }
      if (!kAssertions.count(a.name)) fail_at(e, "unknown assertion '" + a.name + "'");
      cfg.asserts.push_back(a);
    }
  }

  if (top.has("command")) {
    cfg.command_given = true;
    apply_command(cfg, cfg.command);
  }
  if (cfg.has_instance && cfg.instance.name != "F" && cfg.instance.name != "S" && cfg.instance.name != "cubic_ball") {
    for (const auto& [k, v] : cfg.sweep)
      if (k != "eps") fail_at(top.at("sweep"), "instance '" + cfg.instance.name + "' only sweeps eps, not " + k);
  }
  return cfg;
}

void apply_command(ExperimentConfig& cfg, Command c) {
  switch (c) {
    case Command::run:
      if (!cfg.has_instance) throw Error(ErrorKind::config, "config: run needs an instance section");
      if (!cfg.has_solver) throw Error(ErrorKind::config, "config: run needs a solver section");
      break;
    case Command::check_diameter:
      if (!cfg.has_instance) throw Error(ErrorKind::config, "config: check-diameter needs an instance section");
      break;
    case Command::certify:
    case Command::krylov_bench:
      break;
  }
  cfg.command = c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::config, "cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace mmx
