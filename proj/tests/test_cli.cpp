#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <string>

#include "test_util.hpp"

namespace {

const std::string kBin = RATELQR_BIN;
const std::string kConfigs = RATELQR_CONFIG_DIR;

int run(const std::string& args) {
  const std::string cmd = kBin + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::string shell_quote(const std::filesystem::path& p) {
  return "\"" + p.string() + "\"";
}

}  // namespace

TEST_CASE("version and usage errors") {
  CHECK(run("--version") == 0);
  CHECK(run("--help") == 0);
  CHECK(run("") == 2);                      // a subcommand is required
  CHECK(run("frobnicate") == 2);            // unknown subcommand
  CHECK(run("cost-sweep") == 2);            // --config is required
  CHECK(run("validate --config /no/such/file.json") == 2);
  CHECK(run("validate --config " + shell_quote(kConfigs + "/validate.json") +
            " --threads 0") == 2);
}

TEST_CASE("malformed configs exit with the config error code") {
  const std::filesystem::path dir = testutil::fresh_dir("cli-bad");
  std::ofstream(dir / "broken.json", std::ios::binary) << "{ not json";
  CHECK(run("rate-profile --config " + shell_quote(dir / "broken.json")) == 2);
  std::ofstream(dir / "unknown.json", std::ios::binary) << R"({
    "schema_version": 1, "surprise": true,
    "system": {"a": 1.0, "b": 1.0, "q": 2.0, "d": 5.0, "x0": 0.0,
               "horizon": 2, "sigma_z2": 0.0, "c2": 1.0},
    "budget": 2.0, "allocation_modes": ["optimal"],
    "mc": {"replications": 10, "master_seed": 1}
  })";
  CHECK(run("rate-profile --config " + shell_quote(dir / "unknown.json")) == 2);
  // Config is fine, but the subcommand needs a sweep block.
  std::ofstream(dir / "nosweep.json", std::ios::binary) << R"({
    "schema_version": 1,
    "system": {"a": 1.0, "b": 1.0, "q": 2.0, "d": 5.0, "x0": 0.0,
               "horizon": 2, "sigma_z2": 0.0, "c2": 1.0},
    "budget": 2.0, "allocation_modes": ["optimal", "uniform"],
    "mc": {"replications": 10, "master_seed": 1}
  })";
  CHECK(run("cost-sweep --config " + shell_quote(dir / "nosweep.json") + " --out " +
            shell_quote(dir / "out")) == 2);
}

TEST_CASE("every subcommand runs the shipped configs") {
  const std::filesystem::path dir = testutil::fresh_dir("cli-run");
  CHECK(run("rate-profile --config " + shell_quote(kConfigs + "/rate_profile.json") +
            " --out " + shell_quote(dir / "profile")) == 0);
  CHECK(std::filesystem::exists(dir / "profile" / "rate-profile.csv"));
  CHECK(std::filesystem::exists(dir / "profile" / "manifest.txt"));

  CHECK(run("time-variant --config " +
            shell_quote(kConfigs + "/time_variant.json") + " --out " +
            shell_quote(dir / "jump")) == 0);
  CHECK(std::filesystem::exists(dir / "jump" / "time-variant.csv"));

  CHECK(run("validate --config " + shell_quote(kConfigs + "/validate.json") +
            " --out " + shell_quote(dir / "check") + " --replications 20000") == 0);
  CHECK(std::filesystem::exists(dir / "check" / "validate.csv"));

  CHECK(run("cost-sweep --config " + shell_quote(kConfigs + "/cost_sweep.json") +
            " --out " + shell_quote(dir / "sweep") +
            " --replications 2000 --threads 2") == 0);
  CHECK(std::filesystem::exists(dir / "sweep" / "cost-sweep.csv"));
}

TEST_CASE("identical invocations produce byte-identical outputs") {
  const std::filesystem::path dir = testutil::fresh_dir("cli-repeat");
  const std::string invocation =
      "cost-sweep --config " + shell_quote(kConfigs + "/cost_sweep.json") +
      " --replications 3000 --seed 5 --out ";
  CHECK(run(invocation + shell_quote(dir / "one")) == 0);
  CHECK(run(invocation + shell_quote(dir / "two") + " --threads 4") == 0);
  CHECK(testutil::read_bytes(dir / "one" / "cost-sweep.csv") ==
        testutil::read_bytes(dir / "two" / "cost-sweep.csv"));
}
