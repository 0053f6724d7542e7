#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rfim/disagreement.hpp"
#include "rfim/estimators.hpp"
#include "rfim/model.hpp"
#include "rfim/sampler.hpp"

namespace rfim::cli {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

enum class Command { verify, estimate_m, crossing, goodbox, sweep, xi, surface };

const char* command_name(Command c);
/// Throws std::invalid_argument for an unknown name.
Command parse_command(const std::string& name);

/// A fully validated run. `normalized` holds every key with its effective
/// value, so writing it back and reading it again gives the same run.
struct RunConfig {
  Command command = Command::verify;
  std::uint64_t seed = 1;
  double T = kTc;
  std::vector<int> ns;
  std::vector<double> eps;
  int replicas = 1;
  UpdateSchedule schedule;
  int batches = 32;
  std::string level = "full";

  // crossing
  Region region = Region::box(1);
  PairEvent event;
  int plus_sign = 1;
  int minus_sign = -1;

  // goodbox
  int m = 1;
  Coord u{};
  GoodBoxThresholds thresholds;

  // xi
  XiMode mode = XiMode::half_zero_field;
  double target = 0.0;
  XiSearch search;

  // surface
  int annulus_m = -1;
  int annulus_n = 2;
  int fields = 5;

  nlohmann::json normalized;
};

/// Parse a config object (or a run manifest, whose "config" entry is used).
/// Unknown keys, wrong types and out-of-range values raise
/// std::invalid_argument naming the offending key.
RunConfig parse_config(const nlohmann::json& j, Command command);

/// Signals a failed verification (the run itself completed).
class VerificationFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Signals an unreadable config or an unwritable output location.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rfim::cli
