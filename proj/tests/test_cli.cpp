#include <doctest.h>

#include <cstdlib>
#include <string>
#include <sys/wait.h>

#include "ctqw/errors.hpp"
#include "test_util.hpp"

namespace {

int run_cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + "\"" CTQW_CLI_PATH "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kSmall =
    "dims = [9]\nm = 2\nR = 4\nsteps = 20\npost_rate = 5\nseed = 1\nnoise_amplitude = 0.3\nswitch_rate = 0.5\n";

}  // namespace

TEST_CASE("simulate succeeds and reruns are byte-identical") {
  const test_util::TempDir dir;
  const auto cfg = dir.path() / "c.toml";
  test_util::write_file(cfg, kSmall);
  const std::string base = "simulate --config " + cfg.string() + " --out ";
  REQUIRE(run_cli(base + (dir.path() / "a").string()) == 0);
  REQUIRE(run_cli(base + (dir.path() / "b").string() + " --workers 2") == 0);
  CHECK(test_util::slurp(dir.path() / "a" / "observables.csv") ==
        test_util::slurp(dir.path() / "b" / "observables.csv"));
  REQUIRE(run_cli(base + (dir.path() / "c").string() + " --seed 2") == 0);
  CHECK(test_util::slurp(dir.path() / "a" / "observables.csv") !=
        test_util::slurp(dir.path() / "c" / "observables.csv"));
}

TEST_CASE("exit codes") {
  using namespace ctqw::exit_codes;
  const test_util::TempDir dir;
  const auto out = (dir.path() / "out").string();
  auto with = [&](const std::string& name, const std::string& text) {
    const auto p = dir.path() / name;
    test_util::write_file(p, text);
    return "simulate --config " + p.string() + " --out " + out;
  };
  CHECK(run_cli(with("bad.toml", "dims = [9]\nbogus = 1\n")) == kConfig);
  CHECK(run_cli(with("zero.toml", "dims = [9]\npost_rate = 0\n")) == kConfig);
  CHECK(run_cli("simulate --config " + (dir.path() / "missing.toml").string() + " --out " + out) == kIo);
  CHECK(run_cli(with("dt.toml", std::string(kSmall) + "dt = 1.0\n")) == kNumeric);
  CHECK(run_cli(with("mem2.toml", "dims = [60]\nm = 2\nR = 200\nsteps = 2\nmemory_budget_mb = 10\n")) == kCapacity);
  CHECK(run_cli(with("ok.toml", kSmall) + " --precision quad") == kConfig);
  CHECK(run_cli("") == kConfig);
}

TEST_CASE("worker count: flag beats environment beats config") {
  const test_util::TempDir dir;
  const auto cfg = dir.path() / "c.toml";
  test_util::write_file(cfg, std::string(kSmall) + "workers = 1\n");
  auto workers_in = [&](const std::string& sub) {
    const auto json = test_util::slurp(dir.path() / sub / "profile.json");
    const auto at = json.find("\"workers\": ");
    return std::stoi(json.substr(at + 11));
  };
  const std::string base = "simulate --config " + cfg.string() + " --out ";
  REQUIRE(run_cli(base + (dir.path() / "cfg").string()) == 0);
  REQUIRE(run_cli(base + (dir.path() / "env").string(), "CTQW_WORKERS=2") == 0);
  REQUIRE(run_cli(base + (dir.path() / "flag").string() + " --workers 3", "CTQW_WORKERS=2") == 0);
  CHECK(workers_in("cfg") == 1);
  CHECK(workers_in("env") == 2);
  CHECK(workers_in("flag") == 3);
  CHECK(run_cli(base + (dir.path() / "x").string(), "CTQW_WORKERS=lots") == ctqw::exit_codes::kConfig);
}

TEST_CASE("benchmark and validate subcommands") {
  const test_util::TempDir dir;
  const auto cfg = dir.path() / "c.toml";
  test_util::write_file(cfg, kSmall);
  CHECK(run_cli("benchmark --config " + cfg.string() + " --out " + (dir.path() / "b").string() +
                " --meshes 49,64 --post-rates 5,20 --realizations 2 --repetitions 1") == 0);
  const auto csv = test_util::slurp(dir.path() / "b" / "benchmark.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
  CHECK(run_cli("validate") == 0);
}
