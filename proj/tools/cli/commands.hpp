#pragma once

#include <iosfwd>
#include <string>

#include "cli/config.hpp"

namespace aslb::cli {

enum ExitCode : int { exit_ok = 0, exit_check_failed = 1, exit_usage = 2, exit_runtime = 3 };

/// Runs the pipeline named by cfg.command and writes report.json, curves.csv,
/// points.csv (where meaningful) and run_record.json into --out.
int dispatch(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Full command line entry point; usable in-process.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

std::string version();

}  // namespace aslb::cli
