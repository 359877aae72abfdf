#pragma once
#include <iosfwd>
#include <string>
#include <vector>

#include "susylab/config.hpp"

namespace susylab {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitInconsistent = 2;
inline constexpr int kExitInconclusive = 3;

const std::vector<std::string>& subcommands();

// Runs cfg.op() and writes <op csv>, report.json and config.resolved into
// out_dir. Returns the exit code; throws on invalid input.
int run_experiment(const ExperimentConfig& cfg, const std::string& out_dir, unsigned workers, std::ostream& log);

// Full command line: susylab <subcommand> [--config PATH] [--seed U64]
// [--workers K] [--out DIR] [--set key=value]...
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace susylab
