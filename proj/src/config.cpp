#include "iabsim/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

#include "iabsim/error.hpp"

extern char** environ;

namespace iabsim {
namespace {

std::string fmt_real(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  throw Error(ErrorKind::Config, "invalid value '" + value + "' for " + key);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T v{};
  auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || p != value.data() + value.size()) bad_value(key, value);
  return v;
}

struct Field {
  std::string key;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&, const std::string&)> set;
};

template <typename T>
Field field(std::string key, T ExperimentConfig::*member) {
  return Field{
      key,
      [member](const ExperimentConfig& c) {
        if constexpr (std::is_same_v<T, std::string>) return c.*member;
        else if constexpr (std::is_floating_point_v<T>) return fmt_real(c.*member);
        else return std::to_string(c.*member);
      },
      [member](ExperimentConfig& c, const std::string& k, const std::string& v) {
        if constexpr (std::is_same_v<T, std::string>) c.*member = v;
        else c.*member = parse_number<T>(k, v);
      }};
}

template <typename S, typename T>
Field nested(std::string key, S ExperimentConfig::*section, T S::*member) {
  return Field{
      key,
      [section, member](const ExperimentConfig& c) {
        if constexpr (std::is_floating_point_v<T>) return fmt_real(c.*section.*member);
        else return std::to_string(c.*section.*member);
      },
      [section, member](ExperimentConfig& c, const std::string& k, const std::string& v) {
        c.*section.*member = parse_number<T>(k, v);
      }};
}

Field slice_range(std::string key, std::size_t slice, bool hi) {
  return Field{
      key,
      [slice, hi](const ExperimentConfig& c) {
        const auto& r = c.scenario.slice_band_mb[slice];
        return fmt_real(hi ? r.hi_mb : r.lo_mb);
      },
      [slice, hi](ExperimentConfig& c, const std::string& k, const std::string& v) {
        auto& r = c.scenario.slice_band_mb[slice];
        (hi ? r.hi_mb : r.lo_mb) = parse_number<double>(k, v);
      }};
}

const std::vector<Field>& fields() {
  using C = ExperimentConfig;
  static const std::vector<Field> table = {
      nested("scenario.base_stations", &C::scenario, &ScenarioConfig::base_stations),
      nested("scenario.user_equipment", &C::scenario, &ScenarioConfig::user_equipment),
      nested("scenario.antennas_per_bs", &C::scenario, &ScenarioConfig::antennas_per_bs),
      nested("scenario.bandwidth_cap_mb", &C::scenario, &ScenarioConfig::bandwidth_cap_mb),
      slice_range("scenario.embb_min_mb", 0, false),
      slice_range("scenario.embb_max_mb", 0, true),
      slice_range("scenario.urllc_min_mb", 1, false),
      slice_range("scenario.urllc_max_mb", 1, true),
      slice_range("scenario.emtc_min_mb", 2, false),
      slice_range("scenario.emtc_max_mb", 2, true),
      nested("scenario.antenna_demand_min", &C::scenario, &ScenarioConfig::antenna_demand_min),
      nested("scenario.antenna_demand_max", &C::scenario, &ScenarioConfig::antenna_demand_max),

      nested("scheduler.alpha", &C::scheduler, &TrainConfig::learning_rate),
      nested("scheduler.gamma", &C::scheduler, &TrainConfig::gamma),
      nested("scheduler.batch_size", &C::scheduler, &TrainConfig::batch_size),
      nested("scheduler.target_sync", &C::scheduler, &TrainConfig::target_sync_interval),
      nested("scheduler.episodes", &C::scheduler, &TrainConfig::episodes),
      nested("scheduler.replay_capacity", &C::scheduler, &TrainConfig::replay_capacity),
      nested("scheduler.hidden_units", &C::scheduler, &TrainConfig::hidden_units),
      nested("scheduler.epsilon0", &C::scheduler_eps, &EpsilonSchedule::epsilon0),
      nested("scheduler.epsilon_decay", &C::scheduler_eps, &EpsilonSchedule::decay),
      nested("scheduler.epsilon_min", &C::scheduler_eps, &EpsilonSchedule::epsilon_min),
      field("scheduler.max_links", &C::max_links),

      nested("allocator.alpha", &C::allocator, &TrainConfig::learning_rate),
      nested("allocator.gamma", &C::allocator, &TrainConfig::gamma),
      nested("allocator.batch_size", &C::allocator, &TrainConfig::batch_size),
      nested("allocator.target_sync", &C::allocator, &TrainConfig::target_sync_interval),
      nested("allocator.episodes", &C::allocator, &TrainConfig::episodes),
      nested("allocator.replay_capacity", &C::allocator, &TrainConfig::replay_capacity),
      nested("allocator.hidden_units", &C::allocator, &TrainConfig::hidden_units),
      nested("allocator.updates_per_step", &C::allocator, &TrainConfig::updates_per_step),
      nested("allocator.epsilon0", &C::allocator_eps, &EpsilonSchedule::epsilon0),
      nested("allocator.epsilon_decay", &C::allocator_eps, &EpsilonSchedule::decay),
      nested("allocator.epsilon_min", &C::allocator_eps, &EpsilonSchedule::epsilon_min),
      field("allocator.hidden_layers", &C::allocator_hidden_layers),

      field("seeds.train", &C::train_seed),
      field("seeds.eval", &C::eval_seed),
      field("eval.days", &C::eval_days),
      field("run.threads", &C::threads),
      field("output.dir", &C::output_dir),
  };
  return table;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// scheduler.batch_size -> SCHEDULER_BATCH_SIZE
std::string env_name(const std::string& key) {
  std::string out;
  for (char c : key) out.push_back(c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  return out;
}

}  // namespace

void ExperimentConfig::validate() const {
  scenario.validate();
  scheduler.validate();
  scheduler_eps.validate();
  allocator.validate();
  allocator_eps.validate();
  if (max_links < scenario.user_equipment + scenario.base_stations)
    throw Error(ErrorKind::Config, "scheduler.max_links is smaller than the candidate link count");
  if (allocator_hidden_layers < 1 || allocator_hidden_layers > 2)
    throw Error(ErrorKind::Config, "allocator.hidden_layers must be 1 or 2");
  if (eval_days < 1) throw Error(ErrorKind::Config, "eval.days must be positive");
  if (threads < 1) throw Error(ErrorKind::Config, "run.threads must be positive");
}

TrainConfig ExperimentConfig::scheduler_train() const {
  TrainConfig c = scheduler;
  c.seed = train_seed;
  return c;
}

TrainConfig ExperimentConfig::allocator_train() const {
  TrainConfig c = allocator;
  c.seed = train_seed;
  return c;
}

std::map<std::string, std::string> to_key_values(const ExperimentConfig& cfg) {
  std::map<std::string, std::string> out;
  for (const auto& f : fields()) out[f.key] = f.get(cfg);
  return out;
}

void set_key(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  for (const auto& f : fields()) {
    if (f.key == key) {
      f.set(cfg, key, value);
      return;
    }
  }
  throw Error(ErrorKind::Config, "unknown config key '" + key + "'");
}

ExperimentConfig parse_config(std::istream& is, ExperimentConfig base) {
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::Config, "config line " + std::to_string(line_no) + ": expected key = value");
    set_key(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return base;
}

ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorKind::Config, "cannot read config file " + path);
  return parse_config(is, std::move(base));
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream os;
  std::string section;
  for (const auto& f : fields()) {
    const auto s = f.key.substr(0, f.key.find('.'));
    if (s != section) {
      if (!section.empty()) os << '\n';
      os << "# " << s << '\n';
      section = s;
    }
    os << f.key << " = " << f.get(cfg) << '\n';
  }
  return os.str();
}

void apply_env_overrides(ExperimentConfig& cfg, const std::map<std::string, std::string>& env) {
  for (const auto& f : fields()) {
    const auto it = env.find("IABSIM_" + env_name(f.key));
    if (it != env.end()) f.set(cfg, f.key, it->second);
  }
}

std::map<std::string, std::string> process_environment() {
  std::map<std::string, std::string> env;
  for (char** e = environ; e && *e; ++e) {
    const std::string kv(*e);
    if (kv.rfind("IABSIM_", 0) != 0) continue;
    const auto eq = kv.find('=');
    if (eq != std::string::npos) env[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  return env;
}

}  // namespace iabsim
