#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "config.hpp"
#include "nvnmr/pipeline/trace.hpp"

namespace nvnmr::cli {

inline constexpr const char* kToolVersion = "0.1.0";

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitParse = 3,
  kExitFit = 4,
  kExitOracle = 5,
};

/// Stamped into every output so a file can be traced to its inputs.
struct Provenance {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string tool_version = kToolVersion;
};

Provenance provenance_for(const RunConfig& config);

/// Streams for human-readable progress and diagnostics.
struct Console {
  std::ostream& out;
  std::ostream& err;
};

/// Noiseless or noisy normalized trace from the forward model.
pipeline::ContrastTrace simulate_trace(const RunConfig& config);

/// Fluorescence pair counts F0/F1 whose signal contrast is
/// amplitude * exp[-(N tau / T2)^p] * C(tau), with Poisson counting noise.
pipeline::RawTrace simulate_raw(const RunConfig& config);

int cmd_simulate(const RunConfig& config, const std::filesystem::path& output, const Console& io);
int cmd_normalize(const RunConfig& config, const std::vector<std::string>& inputs,
                  const std::filesystem::path& output_dir, const Console& io);
int cmd_fit(const RunConfig& config, const std::vector<std::string>& inputs,
            const std::filesystem::path& output_dir, const Console& io);
int cmd_oracle(const RunConfig& config, const std::filesystem::path& output, const Console& io);
int cmd_linewidth(const RunConfig& config, const std::filesystem::path& output, const Console& io);
int cmd_stats(const RunConfig& config, const std::vector<std::string>& inputs,
              const std::filesystem::path& output, const Console& io);

/// Parses argv, applies flag overrides to the config and dispatches. Errors
/// are reported on `io.err` and mapped to an ExitCode.
int run(const std::vector<std::string>& args, const Console& io);

}  // namespace nvnmr::cli
