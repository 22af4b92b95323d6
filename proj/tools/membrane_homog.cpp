// Command-line driver: membrane_homog <mesh|corrector|effective|homogenize|verify> [flags]

#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "mhom/config.hpp"
#include "mhom/errors.hpp"
#include "mhom/pipeline.hpp"

namespace {

int env_jobs() {
  const char *v = std::getenv("MEMBRANE_HOMOG_JOBS");
  if (!v || !*v) return 0;
  char *end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n < 1 || n > 1024) {
    std::cerr << "error: MEMBRANE_HOMOG_JOBS must be a positive integer, got '" << v << "'\n";
    std::exit(2);
  }
  return static_cast<int>(n);
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Stochastic homogenization of membrane conductivity problems"};
  app.require_subcommand(1, 1);

  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed;
  int jobs = 0;
  bool dry_run = false;

  for (const char *name : {"mesh", "corrector", "effective", "homogenize", "verify"}) {
    CLI::App *sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "experiment config (INI-style or JSON)")->required();
    sub->add_option("--out", out_dir, "output directory (overrides output.dir)");
    sub->add_option("--seed", seed, "master seed (overrides monte_carlo.master_seed)");
    sub->add_option("--jobs", jobs, "worker threads")->check(CLI::Range(1, 1024));
    sub->add_flag("--dry-run", dry_run, "print the resolved plan and exit");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    return app.exit(e);
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    mhom::ExperimentConfig cfg = mhom::load_config(config_path);
    if (seed) {
      cfg.master_seed = *seed;
      cfg.seeds.clear();
    }
    cfg.validate();

    mhom::RunOptions opts;
    opts.out_dir = out_dir.empty() ? cfg.output_dir : out_dir;
    opts.jobs = jobs > 0 ? jobs : (env_jobs() > 0 ? env_jobs() : 1);
    opts.dry_run = dry_run;
    opts.log = &std::cerr;

    if (dry_run) {
      std::cout << mhom::describe_plan(cfg, command, opts);
      return 0;
    }
    if (command == "mesh") return mhom::cmd_mesh(cfg, opts);
    if (command == "corrector") return mhom::cmd_corrector(cfg, opts);
    if (command == "effective") return mhom::cmd_effective(cfg, opts);
    if (command == "homogenize") return mhom::cmd_homogenize(cfg, opts);
    return mhom::cmd_verify(cfg, opts);
  } catch (const mhom::ConfigError &e) {
    std::cerr << "config error";
    if (e.line() > 0) std::cerr << " (line " << e.line() << ")";
    std::cerr << ": " << e.key() << ": " << e.what() << '\n';
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
