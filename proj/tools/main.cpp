#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unistd.h>

#include <CLI11.hpp>

#include "commands.hpp"

namespace fs = std::filesystem;
using namespace rfim::cli;

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kBadConfig = 2, kVerifyFailed = 3, kIo = 4, kBudget = 5 };

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

nlohmann::json read_config(const std::string& path) {
  if (path.empty()) return nlohmann::json::object();
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path);
  // Parse errors surface as nlohmann::json::parse_error and map to a config error.
  return nlohmann::json::parse(in, nullptr, true, true);
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  out.close();
  if (!out) throw IoError("cannot write " + path.string());
}

/// Write every artifact into a staging directory next to `out`, then move it
/// into place, so a failed run never leaves partial results behind.
void publish(const fs::path& out, const CommandOutput& result, const std::string& manifest) {
  const fs::path target = fs::absolute(out).lexically_normal();
  const fs::path parent = target.parent_path();
  std::error_code ec;
  fs::create_directories(parent, ec);
  if (ec) throw IoError("cannot create " + parent.string() + ": " + ec.message());
  if (fs::exists(target)) {
    if (!fs::is_directory(target)) throw IoError(target.string() + " exists and is not a directory");
    if (!fs::is_empty(target) && !fs::exists(target / "manifest.json"))
      throw IoError(target.string() + " is not empty and does not hold an earlier run");
  }
  const fs::path staging = parent / ("." + target.filename().string() + ".staging-" + std::to_string(::getpid()));
  fs::remove_all(staging, ec);
  fs::create_directory(staging, ec);
  if (ec) throw IoError("cannot create " + staging.string() + ": " + ec.message());
  try {
    for (const Artifact& a : result.files) write_file(staging / a.name, a.content);
    write_file(staging / "summary.txt", result.summary);
    write_file(staging / "manifest.json", manifest);
    if (fs::exists(target)) fs::remove_all(target);
    fs::rename(staging, target);
  } catch (const fs::filesystem_error& e) {
    fs::remove_all(staging, ec);
    throw IoError(e.what());
  } catch (...) {
    fs::remove_all(staging, ec);
    throw;
  }
}

int run(Command command, const std::string& config_path, std::optional<std::uint64_t> seed,
        std::optional<std::string> level, const std::string& out, int threads) {
  nlohmann::json j = read_config(config_path);
  if (j.is_object() && j.contains("tool_version") && j.contains("config")) j = j.at("config");
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  if (seed) j["seed"] = *seed;
  if (level) {
    if (command != Command::verify) throw std::invalid_argument("--level applies to verify only");
    j["level"] = *level;
  }
  const RunConfig config = parse_config(j, command);
  const std::string started = utc_now();
  const CommandOutput result = execute(config, threads);
  nlohmann::json manifest = {{"command", command_name(command)},
                             {"config", config.normalized},
                             {"seed", config.seed},
                             {"started", started},
                             {"ended", utc_now()},
                             {"tool_version", kToolVersion}};
  publish(out, result, manifest.dump(2) + "\n");
  std::cout << result.summary;
  if (result.verification_failed) {
    std::cerr << "error: verification failed\n";
    return kVerifyFailed;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Disagreement-percolation toolkit for the two-dimensional random-field Ising model"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> level;
  std::string out = "out";
  int threads = 1;

  const Command all[] = {Command::verify, Command::estimate_m, Command::crossing, Command::goodbox,
                         Command::sweep,  Command::xi,         Command::surface};
  for (Command c : all) {
    CLI::App* sub = app.add_subcommand(command_name(c));
    sub->add_option("--config", config_path, "JSON config or an earlier run's manifest.json");
    sub->add_option("--seed", seed, "Master seed (overrides the config)");
    sub->add_option("--out", out, "Output directory")->capture_default_str();
    sub->add_option("--threads", threads, "Worker threads (results do not depend on it)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    if (c == Command::verify) sub->add_option("--level", level, "fast or full")->check(CLI::IsMember({"fast", "full"}));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kBadConfig;
  }

  Command command = Command::verify;
  for (Command c : all)
    if (app.got_subcommand(command_name(c))) command = c;

  try {
    return run(command, config_path, seed, level, out, threads);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: invalid config: " << e.what() << '\n';
    return kBadConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: invalid config: " << e.what() << '\n';
    return kBadConfig;
  } catch (const std::length_error& e) {
    std::cerr << "error: budget exceeded: " << e.what() << '\n';
    return kBudget;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
}
