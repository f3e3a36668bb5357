#include <cstdlib>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "commands.hpp"
#include "nvnmr/core/error.hpp"

namespace nvnmr::cli {

namespace {

void init_logging() {
  static const bool done = [] {
    auto logger = spdlog::stderr_logger_mt("nvnmr");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    spdlog::level::level_enum level = spdlog::level::warn;
    if (const char* env = std::getenv("NVNMR_LOG")) {
      level = spdlog::level::from_str(env);
    }
    spdlog::set_level(level);
    return true;
  }();
  (void)done;
}

}  // namespace

int run(const std::vector<std::string>& args, const Console& io) {
  init_logging();

  CLI::App app{"NV-center nanoscale NMR depth toolkit", "nvnmr"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::optional<std::string> t2n_mode;
  std::optional<std::string> convention;
  std::optional<std::string> output;
  std::vector<std::string> inputs;

  app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "random seed (overrides the config)");
  app.add_option("--jobs", jobs, "worker threads (overrides the config)")->check(CLI::PositiveNumber);
  app.add_option("--t2n-mode", t2n_mode, "finite, infinite or auto")
      ->check(CLI::IsMember({"finite", "infinite", "auto"}));
  app.add_option("--linewidth-convention", convention, "paper or angular")
      ->check(CLI::IsMember({"paper", "angular"}));
  app.add_option("-o,--output", output, "output file (directory for fit and normalize)");

  auto* simulate = app.add_subcommand("simulate", "forward-model a contrast trace to CSV");
  auto* fit = app.add_subcommand("fit", "normalize (if needed) and fit NV depths");
  auto* normalize = app.add_subcommand("normalize", "divide out the stretched-exponential background");
  auto* oracle = app.add_subcommand("oracle", "compare the analytic model with the spin-bath oracles");
  auto* linewidth = app.add_subcommand("linewidth", "diffusion-limited linewidth against depth");
  auto* stats = app.add_subcommand("stats", "cohort statistics of fitted depths");
  for (auto* sub : {fit, normalize, stats}) sub->add_option("inputs", inputs, "input files");
  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp&) {
    io.out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    io.out << kToolVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    io.err << "nvnmr: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (jobs) cfg.jobs = *jobs;
    if (t2n_mode) cfg.fit.t2n_mode = *t2n_mode;
    if (convention) cfg.linewidth.convention = *convention;
    // Re-validate so overrides obey the same rules as the file.
    cfg = config_from_json(config_to_json(cfg));

    if (simulate->parsed()) {
      if (output) cfg.simulate.output = *output;
      return cmd_simulate(cfg, cfg.simulate.output, io);
    }
    if (fit->parsed()) {
      if (output) cfg.fit.output_dir = *output;
      if (!inputs.empty()) cfg.fit.inputs = inputs;
      return cmd_fit(cfg, cfg.fit.inputs, cfg.fit.output_dir, io);
    }
    if (normalize->parsed()) {
      if (output) cfg.normalize.output_dir = *output;
      if (!inputs.empty()) cfg.normalize.inputs = inputs;
      return cmd_normalize(cfg, cfg.normalize.inputs, cfg.normalize.output_dir, io);
    }
    if (oracle->parsed()) {
      if (output) cfg.oracle.output = *output;
      return cmd_oracle(cfg, cfg.oracle.output, io);
    }
    if (linewidth->parsed()) {
      if (output) cfg.linewidth.output = *output;
      return cmd_linewidth(cfg, cfg.linewidth.output, io);
    }
    if (stats->parsed()) {
      if (output) cfg.stats.output = *output;
      if (!inputs.empty()) cfg.stats.inputs = inputs;
      return cmd_stats(cfg, cfg.stats.inputs, cfg.stats.output, io);
    }
  } catch (const ConfigError& e) {
    io.err << "nvnmr: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ParseError& e) {
    io.err << "nvnmr: " << e.what() << '\n';
    return kExitParse;
  } catch (const FitError& e) {
    io.err << "nvnmr: " << e.what() << '\n';
    return kExitFit;
  } catch (const TruncationError& e) {
    io.err << "nvnmr: " << e.what() << '\n';
    return kExitOracle;
  } catch (const std::exception& e) {
    io.err << "nvnmr: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace nvnmr::cli
