#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>

#include "iabsim/net_model.hpp"
#include "iabsim/rl_engine.hpp"

namespace iabsim {

inline constexpr const char* kVersion = "0.1.0";

struct ExperimentConfig {
  ScenarioConfig scenario;

  TrainConfig scheduler{0.001, 0.99, 32, 2, 1000, 1, 10000, 32};
  EpsilonSchedule scheduler_eps{0.9, 0.995, 0.01};
  int max_links = 32;

  TrainConfig allocator{0.0001, 0.99, 64, 2, 500, 1, 10000, 64, 8};
  EpsilonSchedule allocator_eps{0.99, 0.99, 0.01};
  int allocator_hidden_layers = 2;

  std::uint64_t train_seed = 1;
  std::uint64_t eval_seed = 1001;
  int eval_days = 5;
  int threads = 1;
  std::string output_dir = "out";

  // Throws Error(Config) when any section is unusable.
  void validate() const;

  // Training configs with the shared train seed applied.
  TrainConfig scheduler_train() const;
  TrainConfig allocator_train() const;

  bool operator==(const ExperimentConfig&) const = default;
};

// Dotted key -> textual value, in the fixed order used by serialize().
std::map<std::string, std::string> to_key_values(const ExperimentConfig& cfg);

// Throws Error(Config) for unknown keys or unparsable values.
void set_key(ExperimentConfig& cfg, const std::string& key, const std::string& value);

// `key = value` lines; `#` starts a comment. Throws Error(Config).
ExperimentConfig parse_config(std::istream& is, ExperimentConfig base = {});
ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base = {});

std::string serialize_config(const ExperimentConfig& cfg);

// IABSIM_SCHEDULER_ALPHA=0.01 overrides scheduler.alpha, and so on. `env`
// holds the variables to consider (usually the process environment).
void apply_env_overrides(ExperimentConfig& cfg, const std::map<std::string, std::string>& env);
std::map<std::string, std::string> process_environment();

}  // namespace iabsim
