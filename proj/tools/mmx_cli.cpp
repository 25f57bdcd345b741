// Command-line front end. Talks to the library only through mmx.h.
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "mmx/mmx.h"

namespace {

struct Flags {
  std::string config;
  long long seed = -1;
  std::string out_dir;
  int jobs = 1;
  bool timing = false;
};

int exit_for(mmx_status s) {
  switch (s) {
    case MMX_OK: return 0;
    case MMX_ASSERTION: return 1;
    case MMX_CONFIG:
    case MMX_INVALID_ARGUMENT:
    case MMX_UNSUPPORTED:
    case MMX_REGIME:
    case MMX_IO: return 2;
    default: return 3;
  }
}

int execute(const char* command, const Flags& f) {
  mmx_run_options opt;
  mmx_run_options_init(&opt);
  if (f.seed >= 0) {
    opt.has_seed = 1;
    opt.seed = static_cast<uint64_t>(f.seed);
  }
  opt.out_dir = f.out_dir.empty() ? nullptr : f.out_dir.c_str();
  opt.jobs = f.jobs;
  opt.timing = f.timing ? 1 : 0;

  mmx_experiment* e = nullptr;
  mmx_status s = mmx_experiment_run(f.config.c_str(), command, &opt, &e);
  if (s != MMX_OK) {
    std::fprintf(stderr, "error (%s): %s\n", mmx_status_name(s), mmx_last_error());
    return exit_for(s);
  }
  for (int i = 0; i < mmx_experiment_file_count(e); ++i) {
    const char* path = mmx_experiment_file(e, i);
    // per-run files are numerous; list the summary artifacts only
    std::string p = path ? path : "";
    if (p.size() >= 4 && (p.ends_with(".csv") || p.ends_with("summary.json")) &&
        p.find("/traces/") == std::string::npos)
      std::printf("wrote %s\n", p.c_str());
  }
  int code = mmx_experiment_exit_code(e);
  const char* msg = mmx_experiment_message(e);
  if (msg && *msg) std::fprintf(code == 0 ? stdout : stderr, "%s\n", msg);
  std::printf("%lld rows\n", mmx_experiment_rows(e));
  mmx_experiment_destroy(e);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stationary points of min-max problems with a small maximization domain"};
  app.set_version_flag("--version", std::string(mmx_version()));
  app.require_subcommand(1);

  Flags f;
  struct Sub {
    const char* name;
    const char* help;
  };
  const Sub subs[] = {
      {"run", "run solvers over the sweep and verify the returned points"},
      {"certify", "evaluate the lower-bound certificates on the hard instances"},
      {"check-diameter", "evaluate the diameter condition of the upper bound"},
      {"krylov-bench", "benchmark the Krylov maximization oracle against a dense solver"},
  };
  for (const Sub& s : subs) {
    CLI::App* sc = app.add_subcommand(s.name, s.help);
    sc->add_option("config", f.config, "experiment config (YAML)")->required()->check(CLI::ExistingFile);
    sc->add_option("--seed", f.seed, "override the global seed")->check(CLI::NonNegativeNumber);
    sc->add_option("--out-dir", f.out_dir, "output directory (default: config, then $MMX_OUT_DIR, then ./out)");
    sc->add_option("--jobs", f.jobs, "parallel runs")->check(CLI::PositiveNumber);
    sc->add_flag("--timing", f.timing, "record wall time in the CSV (breaks byte-identical reruns)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  for (const Sub& s : subs)
    if (app.got_subcommand(s.name)) return execute(s.name, f);
  return 2;
}
