#include "iabsim/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <regex>

#include "iabsim/config.hpp"
#include "iabsim/experiments.hpp"
#include "iabsim/trace_io.hpp"

namespace fs = std::filesystem;

namespace iabsim {

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Usage: return kExitUsage;
    case ErrorKind::Config: return kExitConfig;
    case ErrorKind::Numeric: return kExitNumeric;
    default: return kExitData;
  }
}

namespace {

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::string> out_dir;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "key = value configuration file");
  cmd->add_option("--set", opts.overrides, "override a config key (key=value), repeatable");
  cmd->add_option("--out-dir", opts.out_dir, "output directory");
}

ExperimentConfig resolve(const CommonOptions& opts, const std::map<std::string, std::string>& env) {
  ExperimentConfig cfg;
  if (!opts.config_path.empty()) cfg = load_config_file(opts.config_path, cfg);
  apply_env_overrides(cfg, env);
  for (const auto& kv : opts.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::Usage, "--set expects key=value, got '" + kv + "'");
    set_key(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (opts.out_dir) cfg.output_dir = *opts.out_dir;
  return cfg;
}

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream os(p, std::ios::binary);
  if (!os) throw Error(ErrorKind::Io, "cannot open " + p.string() + " for writing");
  return os;
}

fs::path band_ckpt(const fs::path& dir, const std::string& label) {
  return dir / ("allocator_" + label + "_band.ckpt");
}
fs::path antenna_ckpt(const fs::path& dir, const std::string& label) {
  return dir / ("allocator_" + label + "_antenna.ckpt");
}

void require_file(const fs::path& p, const std::string& what) {
  if (!fs::exists(p))
    throw Error(ErrorKind::Consistency, "missing " + what + ": " + p.string() + " does not exist");
}

// Labels with both allocator checkpoints present in dir, sorted.
std::vector<std::string> discover_labels(const fs::path& dir) {
  std::vector<std::string> labels;
  if (!fs::is_directory(dir)) return labels;
  const std::regex pattern("allocator_(.+)_band\\.ckpt");
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::smatch m;
    const auto name = entry.path().filename().string();
    if (std::regex_match(name, m, pattern) && fs::exists(antenna_ckpt(dir, m[1].str())))
      labels.push_back(m[1].str());
  }
  std::sort(labels.begin(), labels.end());
  return labels;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const std::map<std::string, std::string>& env) {
  CLI::App app{"iabsim: IAB link scheduling and slice allocation experiments"};
  app.require_subcommand(1);

  CommonOptions gen_opts, ts_opts, ta_opts, ev_opts, cmp_opts;
  std::optional<std::uint64_t> seed;
  std::optional<int> episodes;
  std::string out_path;

  auto* gen = app.add_subcommand("generate", "write a day trace");
  add_common(gen, gen_opts);
  gen->add_option("--seed", seed, "trace seed (default: seeds.train)");
  gen->add_option("--out", out_path, "trace file")->required();

  auto* ts = app.add_subcommand("train-scheduler", "train the link-scheduling agent");
  add_common(ts, ts_opts);
  ts->add_option("--seed", seed, "training seed");
  ts->add_option("--episodes", episodes, "episode count");

  auto* ta = app.add_subcommand("train-allocator", "train the bandwidth and antenna agents");
  add_common(ta, ta_opts);
  std::string preset;
  std::string label;
  bool decision_log = false;
  ta->add_option("--seed", seed, "training seed");
  ta->add_option("--episodes", episodes, "episode count");
  ta->add_option("--preset", preset, "c1 (2 layers, 500 episodes, decay 0.99) or c2 (1 layer, 21 episodes, decay 0.01)")
      ->check(CLI::IsMember({"c1", "c2"}));
  ta->add_option("--label", label, "model label used in file names (default: preset or 'drl')");
  ta->add_flag("--decision-log", decision_log, "also write every allocation decision");

  auto* ev = app.add_subcommand("evaluate", "score a scheduler checkpoint on fresh snapshots");
  add_common(ev, ev_opts);
  std::string model_path;
  std::optional<int> threads;
  ev->add_option("--seed", seed, "evaluation seed (default: seeds.eval)");
  ev->add_option("--model", model_path, "scheduler checkpoint (default: <out-dir>/scheduler.ckpt)");
  ev->add_option("--out", out_path, "report CSV (default: <out-dir>/scheduler_eval.csv)");
  ev->add_option("--threads", threads, "evaluation worker threads");

  auto* cmp = app.add_subcommand("compare", "compare allocators against the baseline and oracle");
  add_common(cmp, cmp_opts);
  std::vector<std::string> labels;
  std::optional<int> days;
  std::string models_dir;
  cmp->add_option("--seed", seed, "evaluation seed (default: seeds.eval)");
  cmp->add_option("--days", days, "evaluation days");
  cmp->add_option("--models", labels, "allocator labels to compare (default: all found)");
  cmp->add_option("--models-dir", models_dir, "directory holding allocator checkpoints (default: <out-dir>)");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (gen->parsed()) {
      auto cfg = resolve(gen_opts, env);
      cfg.validate();
      const auto s = seed.value_or(cfg.train_seed);
      const auto day = generate_day(s, cfg.scenario);
      auto os = open_out(out_path);
      write_trace(os, day, cfg.scenario);
      out << "wrote " << out_path << " (" << day.snapshots.size() << " snapshots)\n";
    } else if (ts->parsed()) {
      auto cfg = resolve(ts_opts, env);
      if (seed) cfg.train_seed = *seed;
      if (episodes) cfg.scheduler.episodes = *episodes;
      cfg.validate();
      const fs::path dir = cfg.output_dir;
      const auto run = train_scheduler(cfg.scheduler_train(), cfg.scheduler_eps, cfg.scenario, cfg.max_links);
      fs::create_directories(dir);
      checkpoint_save(run.net, run.adam, dir / "scheduler.ckpt");
      auto os = open_out(dir / "scheduler_rewards.csv");
      write_scheduler_curve(os, cfg.train_seed, run);
      out << "trained scheduler for " << run.episode_rewards.size() << " episodes -> "
          << (dir / "scheduler.ckpt").string() << '\n';
    } else if (ta->parsed()) {
      auto cfg = resolve(ta_opts, env);
      if (preset == "c1") {
        cfg.allocator_hidden_layers = 2;
        cfg.allocator.episodes = 500;
        cfg.allocator_eps.decay = 0.99;
      } else if (preset == "c2") {
        cfg.allocator_hidden_layers = 1;
        cfg.allocator.episodes = 21;
        cfg.allocator_eps.decay = 0.01;
      }
      if (seed) cfg.train_seed = *seed;
      if (episodes) cfg.allocator.episodes = *episodes;
      cfg.validate();
      if (label.empty()) label = preset.empty() ? "drl" : preset;
      const fs::path dir = cfg.output_dir;
      fs::create_directories(dir);

      std::optional<std::ofstream> log;
      DecisionSink sink;
      if (decision_log) {
        log.emplace(open_out(dir / ("allocator_" + label + "_decisions.csv")));
        write_decision_header(*log, cfg.train_seed, false);
        sink = [&log](int ep, const AllocationDecision& d) { write_decision(*log, ep, d); };
      }
      const auto run = train_allocator(cfg.allocator_train(), cfg.allocator_eps, cfg.scenario,
                                       cfg.allocator_hidden_layers, sink);
      checkpoint_save(run.agents.bandwidth, run.band_adam, band_ckpt(dir, label));
      checkpoint_save(run.agents.antenna, run.antenna_adam, antenna_ckpt(dir, label));
      auto os = open_out(dir / ("allocator_" + label + "_rewards.csv"));
      write_allocator_curve(os, cfg.train_seed, run);
      out << "trained allocator '" << label << "' for " << run.band_rewards.size()
          << " episodes; final rewards band=" << fixed6(run.band_rewards.back())
          << " antenna=" << fixed6(run.antenna_rewards.back()) << '\n';
    } else if (ev->parsed()) {
      auto cfg = resolve(ev_opts, env);
      if (seed) cfg.eval_seed = *seed;
      if (threads) cfg.threads = *threads;
      cfg.validate();
      const fs::path dir = cfg.output_dir;
      const fs::path model = model_path.empty() ? dir / "scheduler.ckpt" : fs::path(model_path);
      require_file(model, "scheduler model");
      const auto [net, adam] = checkpoint_load(model);
      if (net.output_dim() != cfg.max_links || net.input_dim() != 2 * cfg.max_links)
        throw Error(ErrorKind::Consistency, "scheduler model does not match scheduler.max_links");
      const auto day = generate_day(cfg.eval_seed, cfg.scenario);
      const auto report = accuracy(net, day.snapshots, cfg.threads);
      const fs::path report_path = out_path.empty() ? dir / "scheduler_eval.csv" : fs::path(out_path);
      auto os = open_out(report_path);
      write_scheduler_report(os, cfg.eval_seed, report);
      out << "accuracy=" << fixed6(report.accuracy) << " mean_infer_s=" << fixed6(report.mean_infer_seconds)
          << " -> " << report_path.string() << '\n';
    } else if (cmp->parsed()) {
      auto cfg = resolve(cmp_opts, env);
      if (seed) cfg.eval_seed = *seed;
      if (days) cfg.eval_days = *days;
      cfg.validate();
      const fs::path dir = cfg.output_dir;
      const fs::path mdir = models_dir.empty() ? dir : fs::path(models_dir);
      if (labels.empty()) labels = discover_labels(mdir);
      if (labels.empty())
        throw Error(ErrorKind::Consistency, "missing allocator model: no allocator_<label>_band.ckpt in " + mdir.string());
      std::vector<DrlPolicy> policies;
      for (const auto& l : labels) {
        require_file(band_ckpt(mdir, l), "allocator model");
        require_file(antenna_ckpt(mdir, l), "allocator model");
        DrlPolicy p;
        p.label = "drl_" + l;
        p.agents.bandwidth = checkpoint_load(band_ckpt(mdir, l)).first;
        p.agents.antenna = checkpoint_load(antenna_ckpt(mdir, l)).first;
        policies.push_back(std::move(p));
      }
      const auto result = run_comparison(cfg, policies);
      fs::create_directories(dir);
      {
        auto os = open_out(dir / "comparison_rewards.csv");
        write_comparison_rewards(os, cfg.eval_seed, result);
      }
      {
        auto os = open_out(dir / "comparison_throughput.csv");
        write_comparison_throughput(os, cfg.eval_seed, result);
      }
      {
        auto os = open_out(dir / "comparison_decisions.csv");
        write_comparison_decisions(os, cfg.eval_seed, result);
      }
      for (const auto& l : result.labels)
        out << l << " mean_day_reward=" << fixed6(result.mean_total(l)) << '\n';
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

}  // namespace iabsim
