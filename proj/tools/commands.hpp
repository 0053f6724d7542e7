#pragma once

#include <string>
#include <vector>

#include "run_config.hpp"

namespace rfim::cli {

/// One result file, held in memory until the whole run has succeeded.
struct Artifact {
  std::string name;
  std::string content;
};

struct CommandOutput {
  std::vector<Artifact> files;
  /// Human-readable report, also written as summary.txt.
  std::string summary;
  /// Set by verify when any check failed; the artifacts are still written.
  bool verification_failed = false;
};

/// Run a validated config. Results never depend on `threads`.
CommandOutput execute(const RunConfig& config, int threads);

/// %.17g formatting used for every floating-point CSV field.
std::string format_double(double x);

}  // namespace rfim::cli
