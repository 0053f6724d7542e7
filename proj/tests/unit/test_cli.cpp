// Unit tests for config parsing and the rfim command-line tool.

#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include "run_config.hpp"

using namespace rfim;
using namespace rfim::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

/// Fresh scratch directory under the system temp dir.
fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("rfim_cli_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(RFIM_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void write_json(const fs::path& p, const json& j) { std::ofstream(p) << j.dump(2); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

const json kSmallSchedule = {{"burn_in_cluster", 20}, {"burn_in_sweeps", 5}, {"measurement_updates", 400},
                             {"batches", 8}};

}  // namespace

TEST_CASE("config rejections", "[cli]") {
  CHECK_THROWS_AS(parse_config({{"bogus", 1}}, Command::verify), std::invalid_argument);
  CHECK_THROWS_AS(parse_config({{"seed", -1}}, Command::verify), std::invalid_argument);
  CHECK_THROWS_AS(parse_config({{"seed", "one"}}, Command::verify), std::invalid_argument);
  CHECK_THROWS_AS(parse_config({{"level", "medium"}}, Command::verify), std::invalid_argument);
  CHECK_THROWS_AS(parse_config({{"T", 0.0}, {"N", {2}}, {"eps", {0.1}}}, Command::estimate_m),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_config({{"N", json::array()}, {"eps", {0.1}}}, Command::estimate_m), std::invalid_argument);
  CHECK_THROWS_AS(parse_config({{"N", {2}}, {"eps", {-0.1}}}, Command::estimate_m), std::invalid_argument);
  CHECK_THROWS_AS(parse_config({{"N", {2}}, {"eps", {0.1}}, {"schedule", {{"cluster", "metropolis"}}}},
                               Command::estimate_m),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_config({{"N", {2}}, {"eps", {0.1}}, {"schedule", {{"thinning", 0}}}}, Command::estimate_m),
                  std::invalid_argument);
  // Fewer snapshots than batches.
  CHECK_THROWS_AS(parse_config({{"N", {2}}, {"eps", {0.1}}, {"schedule", {{"measurement_updates", 4}}}},
                               Command::estimate_m),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_config({{"annulus", {2, 2}}}, Command::surface), std::invalid_argument);
  CHECK_THROWS_AS(parse_config({{"annulus", {1, 5}}}, Command::surface), std::length_error);
  CHECK_THROWS_AS(parse_config({{"region", {{"kind", "box"}, {"params", {3}}}},
                                {"event", {{"kind", "hcross"}, {"a", 5}, {"b", 1}}}},
                               Command::crossing),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_command("crossings"), std::invalid_argument);
}

TEST_CASE("config defaults", "[cli]") {
  const RunConfig v = parse_config(json::object(), Command::verify);
  CHECK(v.level == "full");
  CHECK(v.seed == 1);
  CHECK(v.T == kTc);
  const RunConfig s = parse_config({{"annulus", {-1, 2}}}, Command::surface);
  CHECK(s.eps == std::vector<double>{1.0});
  const RunConfig e = parse_config({{"N", {4}}, {"eps", {0.5}}, {"T", "Tc"}}, Command::estimate_m);
  CHECK(e.schedule.cluster == ClusterMove::swendsen_wang);
  CHECK(e.schedule.measurement_updates == 4000);
  CHECK(e.batches == 32);
  CHECK(e.replicas == 64);
  CHECK(e.normalized.at("T") == "Tc");
}

TEST_CASE("normalized configs round trip", "[cli]") {
  const std::vector<std::pair<Command, json>> cases = {
      {Command::verify, {{"level", "fast"}, {"seed", 7}}},
      {Command::estimate_m, {{"N", {2, 4}}, {"eps", {0.0, 0.3}}, {"replicas", 3}, {"schedule", kSmallSchedule}}},
      {Command::sweep, {{"N", {8, 2, 4}}, {"eps", {0.5, 0.1}}, {"T", 2.0}}},
      {Command::crossing,
       {{"region", {{"kind", "rect"}, {"params", {4, 2}}}},
        {"event", {{"kind", "hcross"}, {"a", 4}, {"b", 2}}},
        {"boundary", {{"plus", "+"}, {"minus", "+"}}},
        {"eps", 0.2}}},
      {Command::goodbox, {{"M", 2}, {"u", {1, -1}}, {"eps", 0.1}}},
      {Command::xi, {{"mode", "target"}, {"target", 0.3}, {"eps", {0.5}}}},
      {Command::surface, {{"annulus", {0, 3}}, {"fields", 3}}},
  };
  for (const auto& [command, j] : cases) {
    INFO(command_name(command) << " " << j.dump());
    const RunConfig a = parse_config(j, command);
    const RunConfig b = parse_config(a.normalized, command);
    CHECK(a.normalized == b.normalized);
    CHECK(a.normalized.contains("seed"));
    // A manifest is accepted through its config entry.
    const json manifest = {{"command", command_name(command)}, {"config", a.normalized}, {"tool_version", kToolVersion}};
    CHECK(parse_config(manifest, command).normalized == a.normalized);
  }
  const RunConfig sweep = parse_config(cases[2].second, Command::sweep);
  CHECK(sweep.ns == std::vector<int>{2, 4, 8});
}

TEST_CASE("command line exit codes", "[cli]") {
  const fs::path dir = scratch("codes");
  write_json(dir / "unknown.json", {{"N", {1}}, {"eps", {0.1}}, {"colour", "red"}});
  CHECK(run_cli("estimate-m --config " + (dir / "unknown.json").string() + " --out " + (dir / "a").string()) == 2);
  CHECK_FALSE(fs::exists(dir / "a"));

  std::ofstream(dir / "broken.json") << "{\"N\": [1,";
  CHECK(run_cli("estimate-m --config " + (dir / "broken.json").string() + " --out " + (dir / "b").string()) == 2);
  CHECK(run_cli("estimate-m --config " + (dir / "missing.json").string() + " --out " + (dir / "c").string()) == 4);
  CHECK(run_cli("no-such-command") == 2);

  write_json(dir / "big.json", {{"annulus", {1, 5}}});
  CHECK(run_cli("surface --config " + (dir / "big.json").string() + " --out " + (dir / "d").string()) == 5);

  // An unrelated non-empty directory is never replaced.
  fs::create_directories(dir / "keep");
  std::ofstream(dir / "keep" / "notes.txt") << "mine";
  write_json(dir / "ok.json", {{"annulus", {-1, 2}}, {"fields", 1}});
  CHECK(run_cli("surface --config " + (dir / "ok.json").string() + " --out " + (dir / "keep").string()) == 4);
  CHECK(slurp(dir / "keep" / "notes.txt") == "mine");
  CHECK_FALSE(fs::exists(dir / "keep" / "surface.csv"));
  for (const auto& entry : fs::directory_iterator(dir))
    CHECK(entry.path().filename().string().find("staging") == std::string::npos);

  // A previous run directory is replaced.
  CHECK(run_cli("surface --config " + (dir / "ok.json").string() + " --out " + (dir / "e").string()) == 0);
  CHECK(run_cli("surface --config " + (dir / "ok.json").string() + " --out " + (dir / "e").string()) == 0);
  CHECK(fs::exists(dir / "e" / "surface.csv"));
  fs::remove_all(dir);
}

TEST_CASE("runs are reproducible across thread counts and from the manifest", "[cli]") {
  const fs::path dir = scratch("repro");
  write_json(dir / "run.json",
             {{"N", {1, 2}}, {"eps", {0.5}}, {"replicas", 3}, {"seed", 11}, {"schedule", kSmallSchedule}});
  const std::string config = " --config " + (dir / "run.json").string();
  REQUIRE(run_cli("estimate-m" + config + " --threads 1 --out " + (dir / "one").string()) == 0);
  REQUIRE(run_cli("estimate-m" + config + " --threads 3 --out " + (dir / "three").string()) == 0);
  for (const char* name : {"estimate_m.csv", "quenched.csv"}) {
    const std::string a = slurp(dir / "one" / name);
    CHECK_FALSE(a.empty());
    CHECK(a == slurp(dir / "three" / name));
  }
  const json manifest = json::parse(slurp(dir / "one" / "manifest.json"));
  CHECK(manifest.at("command") == "estimate-m");
  CHECK(manifest.at("seed") == 11);
  CHECK(manifest.at("tool_version") == kToolVersion);
  CHECK(manifest.contains("started"));
  CHECK(manifest.contains("ended"));
  REQUIRE(run_cli("estimate-m --config " + (dir / "one" / "manifest.json").string() + " --out " +
                  (dir / "again").string()) == 0);
  CHECK(slurp(dir / "one" / "estimate_m.csv") == slurp(dir / "again" / "estimate_m.csv"));

  // The --seed flag overrides the config and changes the numbers.
  REQUIRE(run_cli("estimate-m" + config + " --seed 12 --out " + (dir / "other").string()) == 0);
  CHECK(slurp(dir / "one" / "quenched.csv") != slurp(dir / "other" / "quenched.csv"));
  fs::remove_all(dir);
}

TEST_CASE("verify command", "[cli]") {
  const fs::path dir = scratch("verify");
  const auto start = std::chrono::steady_clock::now();
  REQUIRE(run_cli("verify --level fast --out " + (dir / "v").string()) == 0);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CHECK(seconds < 10.0);
  std::ifstream in(dir / "v" / "verify.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "check,passed,value,tolerance,cases,detail");
  int rows = 0, passed = 0;
  for (std::string line; std::getline(in, line);) {
    ++rows;
    passed += line.find(",1,") != std::string::npos || line.find(",true,") != std::string::npos;
  }
  CHECK(rows >= 12);
  CHECK(passed == rows);
  fs::remove_all(dir);
}
