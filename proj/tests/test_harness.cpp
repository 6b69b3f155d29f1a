#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "iabsim/cli.hpp"
#include "iabsim/experiments.hpp"
#include "iabsim/trace_io.hpp"

using namespace iabsim;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args, const std::map<std::string, std::string>& env = {}) {
  args.insert(args.begin(), "iabsim");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err, env);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

// Drops the wall-clock column and summary from an evaluation report.
std::string without_timing(const std::string& csv) {
  std::istringstream is(csv);
  std::ostringstream os;
  std::string line;
  while (std::getline(is, line)) {
    if (line.rfind("#summary", 0) == 0) {
      line = line.substr(0, line.find(" mean_infer_s="));
    } else if (line.rfind('#', 0) != 0) {
      line = line.substr(0, line.rfind(','));
    }
    os << line << '\n';
  }
  return os.str();
}

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("iabsim_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

const std::vector<std::string> kSmallAllocator = {
    "--episodes", "1", "--set", "allocator.hidden_units=8", "--set", "allocator.updates_per_step=1"};

}  // namespace

TEST_CASE("throughput_metrics examples") {
  const std::vector<std::pair<double, double>> example = {{0.75, 0.81}, {0.52, 0.54}, {0.37, 0.22}};
  std::vector<AllocationDecision> ds;
  for (const auto& [s, r] : example) {
    AllocationDecision d;
    d.granted = s;
    d.demand = r;
    d.reward = allocation_reward(s, r);
    ds.push_back(d);
  }
  const auto row = throughput_metrics(ds);
  CHECK(row.allocated_total == doctest::Approx(1.64).epsilon(1e-12));
  CHECK(row.demand_total == doctest::Approx(1.57).epsilon(1e-12));
  CHECK(row.waste == doctest::Approx(0.07).epsilon(1e-9));
  CHECK(row.waste == row.allocated_total - row.demand_total);
  CHECK(row.reward == doctest::Approx(2.9735).epsilon(1e-9));

  for (auto& d : ds) d.granted = 0.0;
  const auto zero = throughput_metrics(ds);
  CHECK(zero.allocated_total == 0.0);
  CHECK(zero.waste == -zero.demand_total);

  for (auto& d : ds) d.granted = d.demand;
  CHECK(throughput_metrics(ds).waste == 0.0);
}

TEST_CASE("csv banner") {
  CHECK(csv_banner(7) == "#iabsim v0.1.0 seed=7");
}

TEST_CASE("run_comparison rejects models that do not fit the scenario") {
  ExperimentConfig cfg;
  cfg.eval_days = 1;
  DrlPolicy p;
  p.label = "bad";
  p.agents.bandwidth = QNetwork({12, 4, 5});
  p.agents.antenna = QNetwork({12, 4, 5});
  try {
    run_comparison(cfg, {p});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Consistency);
  }
}

TEST_CASE("oracle bounds every policy on every interval") {
  ExperimentConfig cfg;
  cfg.eval_days = 2;
  RandomStream init(12);
  DrlPolicy p;
  p.label = "drl_random";
  p.agents.bandwidth = QNetwork::glorot({16, 8, 7}, init);
  p.agents.antenna = QNetwork::glorot({16, 8, 7}, init);
  const auto result = run_comparison(cfg, {p});
  CHECK(result.labels == std::vector<std::string>{"drl_random", "baseline", "oracle"});
  REQUIRE(result.days.size() == 2);
  for (const auto& day : result.days) {
    std::map<std::tuple<int, Resource, std::string>, double> reward;
    for (const auto& row : day.rows) reward[{row.interval, row.resource, row.label}] = row.reward;
    CHECK(day.rows.size() == 96 * 2 * 3);
    for (int t = 0; t < 96; ++t) {
      for (const Resource res : {Resource::Bandwidth, Resource::Antenna}) {
        const double oracle = reward.at({t, res, "oracle"});
        CHECK(oracle >= reward.at({t, res, "drl_random"}) - 1e-12);
        CHECK(oracle >= reward.at({t, res, "baseline"}) - 1e-12);
      }
    }
    CHECK(day.decisions.size() == 96 * 6 * 3);
  }
  CHECK(result.mean_total("oracle") >= result.mean_total("baseline"));
}

TEST_CASE("cli usage and config errors") {
  CHECK(cli({}).code == kExitUsage);
  CHECK(cli({"frobnicate"}).code == kExitUsage);
  CHECK(cli({"generate", "--bogus"}).code == kExitUsage);
  CHECK(cli({"generate"}).code == kExitUsage);
  CHECK(cli({"--help"}).code == kExitOk);
  const auto dir = fresh_dir("cli_errors");
  CHECK(cli({"generate", "--seed", "1", "--out", (dir / "t").string(), "--config", "/nonexistent.conf"}).code ==
        kExitConfig);
  CHECK(cli({"generate", "--seed", "1", "--out", (dir / "t").string(), "--set", "scheduler.alpha=abc"}).code ==
        kExitConfig);
  CHECK(cli({"generate", "--out", (dir / "t").string()}, {{"IABSIM_SCENARIO_ANTENNAS_PER_BS", "0"}}).code ==
        kExitConfig);
}

TEST_CASE("cli generate writes a valid, reproducible trace") {
  const auto dir = fresh_dir("cli_generate");
  const auto r = cli({"generate", "--seed", "42", "--out", (dir / "day.trace").string()});
  CHECK(r.code == kExitOk);
  const auto trace = read_trace(dir / "day.trace");
  CHECK(trace.day.snapshots.size() == 96);
  CHECK(trace.day == generate_day(42, ScenarioConfig{}));
  for (const auto& s : trace.day.snapshots) CHECK(validate_snapshot(s).empty());
  CHECK(cli({"generate", "--seed", "42", "--out", (dir / "again.trace").string()}).code == kExitOk);
  CHECK(slurp(dir / "day.trace") == slurp(dir / "again.trace"));
}

TEST_CASE("cli evaluate without a model is an explicit error") {
  const auto dir = fresh_dir("cli_missing");
  const auto r = cli({"evaluate", "--out-dir", dir.string()});
  CHECK(r.code == kExitData);
  CHECK(r.err.find("missing scheduler model") != std::string::npos);
  const auto c = cli({"compare", "--out-dir", dir.string()});
  CHECK(c.code == kExitData);
  CHECK(c.err.find("missing allocator model") != std::string::npos);
}

TEST_CASE("every cli subcommand is deterministic under a fixed seed") {
  std::vector<fs::path> dirs = {fresh_dir("det_a"), fresh_dir("det_b")};
  for (const auto& dir : dirs) {
    const auto d = dir.string();
    REQUIRE(cli({"generate", "--seed", "7", "--out", (dir / "day.trace").string()}).code == kExitOk);
    REQUIRE(cli({"train-scheduler", "--seed", "7", "--episodes", "3", "--out-dir", d}).code == kExitOk);
    REQUIRE(cli({"evaluate", "--seed", "7", "--out-dir", d, "--threads", "2"}).code == kExitOk);
    auto ta = std::vector<std::string>{"train-allocator", "--preset", "c2", "--seed", "7", "--out-dir", d,
                                       "--decision-log"};
    ta.insert(ta.end(), kSmallAllocator.begin(), kSmallAllocator.end());
    const auto trained = cli(ta);
    REQUIRE_MESSAGE(trained.code == kExitOk, trained.err);
    const auto cmp = cli({"compare", "--seed", "7", "--days", "1", "--out-dir", d});
    REQUIRE_MESSAGE(cmp.code == kExitOk, cmp.err);
  }
  for (const char* name : {"day.trace", "scheduler.ckpt", "scheduler_rewards.csv", "allocator_c2_band.ckpt",
                           "allocator_c2_antenna.ckpt", "allocator_c2_rewards.csv",
                           "allocator_c2_decisions.csv", "comparison_rewards.csv",
                           "comparison_throughput.csv", "comparison_decisions.csv"}) {
    CAPTURE(name);
    const auto a = slurp(dirs[0] / name);
    CHECK_FALSE(a.empty());
    CHECK(a == slurp(dirs[1] / name));
  }
  const auto eval_a = slurp(dirs[0] / "scheduler_eval.csv");
  CHECK(without_timing(eval_a) == without_timing(slurp(dirs[1] / "scheduler_eval.csv")));
  CHECK(eval_a.rfind("#iabsim v0.1.0 seed=7\nsnapshot,links,activated_agent,activated_oracle,matches,", 0) == 0);

  for (const char* name : {"scheduler_rewards.csv", "allocator_c2_rewards.csv", "comparison_rewards.csv",
                           "comparison_throughput.csv", "comparison_decisions.csv"}) {
    CAPTURE(name);
    CHECK(slurp(dirs[0] / name).rfind("#iabsim v0.1.0 seed=7\n", 0) == 0);
  }
  const auto rewards = slurp(dirs[0] / "comparison_rewards.csv");
  CHECK(rewards.find(",drl,drl_c2,") != std::string::npos);
  CHECK(rewards.find(",baseline,baseline,") != std::string::npos);
  CHECK(rewards.find(",oracle,oracle,") != std::string::npos);
}

TEST_CASE("cli compare refuses a checkpoint built for another scenario") {
  const auto dir = fresh_dir("cli_mismatch");
  auto ta = std::vector<std::string>{"train-allocator", "--preset", "c2", "--out-dir", dir.string(), "--set",
                                     "scenario.base_stations=5"};
  ta.insert(ta.end(), kSmallAllocator.begin(), kSmallAllocator.end());
  REQUIRE(cli(ta).code == kExitOk);
  const auto r = cli({"compare", "--days", "1", "--out-dir", dir.string()});
  CHECK(r.code == kExitData);
}
