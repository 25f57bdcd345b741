#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mmx/instances.hpp"
#include "mmx/moreau.hpp"
#include "mmx/solvers.hpp"

namespace mmx {

enum class Command { run, certify, check_diameter, krylov_bench };

const char* to_string(Command c);
Command command_from_string(const std::string& s);

// Instance section. `name` is one of F, S, cubic_ball, intro, quadratic.
struct InstanceSection {
  std::string name = "F";
  double lambda = 1.0, mu = 1.0, rho = 1.0, D = 1.0;
  int k = 1;
  int s = 1;
  std::optional<double> a;  // F/S: Y = [a, a + D]; default -D/2 for F, 0 for S
  std::optional<double> x_half_width;
  // cubic_ball
  int dim_x = 1, dim_y = 8;
  double b_scale = 1.0;
  std::uint64_t instance_seed = 7;
  // intro
  bool bounded_x = false;
  // quadratic: f = x'Px/2 + x'Ay + y'Qy/2 + b'x + c'y on boxes / a ball
  Mat P, A, Q;
  Vec b, c;
  Vec x_lo, x_hi;
  Vec y_lo, y_hi;
  std::optional<double> y_radius;  // ball centered at y_center
  Vec y_center;
};

struct VerifySection {
  GridOptions grid;
  ProxOptions prox;
  bool true_grid = false;  // grid phi over Y for the true problem even with an exact primal
  bool numeric_check = false;  // certify: also run the grid-mode numeric Moreau gradients
};

struct KrylovBenchSection {
  int d = 32;
  double R = 1.0;
  double q = 0.1;
  int runs = 100;
  std::vector<int> m;  // subspace depths; empty: the predicted size for delta
  double delta = 1e-3;
};

struct Assertion {
  std::string name;
  double value = 1.0;  // threshold for fraction assertions; 1 for boolean ones
  int line = 0;
};

struct ExperimentConfig {
  Command command = Command::run;
  bool command_given = false;  // the config names its command
  std::string name = "experiment";
  std::uint64_t seed = 1;
  std::string out_dir;  // empty: --out-dir, then MMX_OUT_DIR, then "out"
  InstanceSection instance;
  bool has_instance = false;
  SolverConfig solver;
  bool has_solver = false;
  std::optional<Regime> regime;  // certify
  bool threshold = false;        // check-diameter: also report the largest admissible D
  std::map<std::string, std::vector<double>> sweep;
  VerifySection verify;
  KrylovBenchSection krylov;
  std::vector<Assertion> asserts;
  std::string raw;
  std::uint64_t hash = 0;
};

// Parses YAML text. Unknown keys, wrong types and empty sweeps raise
// ErrorKind::config with the line number.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Switches the command, checking the sections it needs.
void apply_command(ExperimentConfig& cfg, Command c);

std::uint64_t fnv1a64(const std::string& bytes);

struct ResultRow {
  std::string run_id;
  std::string family;
  int k = 0;
  double lambda = 0, mu = 0, rho = 0, D = 0, eps = 0;
  std::string algorithm;
  long T = 0;
  double eps_star = 0;
  double moreau_grad_surrogate = 0;
  double moreau_grad_true = 0;
  bool certified = false;
  std::string regime;
  double wall_ms = 0;
  std::uint64_t seed = 0;
  std::string detail_json;  // per-run JSON
  std::string trace_csv;    // t vs eps_t (solver runs)
  std::string error;        // non-empty when the run raised
  ErrorKind error_kind = ErrorKind::numerical;
  // assertion inputs
  bool surrogate_stationary = false;
  bool violates = false;
  int warnings = 0;
};

// krylov-bench rows use their own columns.
struct KrylovRow {
  std::string run_id;
  int d = 0, m = 0;
  double R = 0, q = 0, gap = 0, bound = 0;
  bool within_bound = false;
  int m_used = 0;
  long hvp_calls = 0;
  std::uint64_t seed = 0;
};

struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  int jobs = 1;
  bool timing = false;
  bool write_files = true;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::vector<KrylovRow> krylov_rows;
  std::vector<std::string> failed_assertions;
  std::vector<std::string> written;
  std::string csv;
  int exit_code = 0;  // 0 ok, 1 assertion, 3 budget / numerical
  std::string message;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opt);

// Grid maximum of f(x, .) over Y (dim Y <= 2) with one local refinement.
std::pair<Vec, double> brute_force_max(const ProblemInstance& p, const Vec& x, int resolution);

// Exact maximum of y'Hy/2 + g'y over |y| <= R from a dense eigendecomposition.
std::pair<Vec, double> dense_trust_region_max(const Mat& H, const Vec& g, double R);

// Report writers.
inline constexpr int kSchemaVersion = 1;
std::string csv_header();
std::string csv_line(const ResultRow& r, std::uint64_t config_hash, bool timing);
std::string krylov_csv_header();
std::string krylov_csv_line(const KrylovRow& r, std::uint64_t config_hash);
std::string format_double(double v);
void write_file(const std::string& path, const std::string& content);

}  // namespace mmx
