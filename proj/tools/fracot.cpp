#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>

#include "commands.hpp"
#include "fracot/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

int main(int argc, char** argv) {
  using namespace fracot;
  CLI::App app{"fracot: fractional optical tomography experiments"};
  app.require_subcommand(1, 1);
  std::string config_path;
  std::string out_dir;
  int threads = 0;
  bool verbose = false;
  app.add_option("--config", config_path, "INI experiment file (defaults apply when omitted)");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--threads", threads, "OpenMP threads");
  app.add_flag("--verbose", verbose, "echo the run log");
  for (const auto& [name, fn] : cli::commands()) app.add_subcommand(name, "")->fallthrough();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : cli::kError;
  }
  const std::string sub = app.get_subcommands().front()->get_name();

  cli::Context ctx;
  ctx.verbose = verbose;
  try {
    ctx.cfg = config_path.empty() ? parse_config("", "<defaults>") : load_config(config_path);
    if (const char* env = std::getenv("FRACOT_OUT_DIR"); env && *env) ctx.cfg.out_dir = env;
    if (!out_dir.empty()) ctx.cfg.out_dir = out_dir;
    if (threads > 0) ctx.cfg.threads = threads;
#ifdef _OPENMP
    if (ctx.cfg.threads > 0) omp_set_num_threads(ctx.cfg.threads);
#endif
    ctx.out = ctx.cfg.out_dir;
    std::filesystem::create_directories(ctx.out);
    ctx.log.open(ctx.out / "run.log");
    ctx.note("command " + sub);
    if (!config_path.empty()) ctx.note("config " + config_path);
    return cli::commands().at(sub)(ctx);
  } catch (const Error& e) {
    std::cerr << "fracot " << sub << ": " << e.what() << "\n";
    if (ctx.log.is_open()) ctx.log << "error " << e.what() << "\n";
    return e.code() == Errc::ConfigError ? cli::kConfig : cli::kError;
  } catch (const std::exception& e) {
    std::cerr << "fracot " << sub << ": " << e.what() << "\n";
    return cli::kError;
  }
}
