#include "iabsim/experiments.hpp"

#include <cstdio>
#include <ostream>

#include "iabsim/error.hpp"

namespace iabsim {

std::string csv_banner(std::uint64_t seed) {
  return std::string("#iabsim v") + kVersion + " seed=" + std::to_string(seed);
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::Drl: return "drl";
    case Method::Baseline: return "baseline";
    case Method::Oracle: return "oracle";
  }
  return "?";
}

MetricsRow throughput_metrics(std::span<const AllocationDecision> decisions) {
  MetricsRow row;
  if (!decisions.empty()) {
    row.interval = decisions.front().interval;
    row.resource = decisions.front().resource;
  }
  for (const auto& d : decisions) {
    row.allocated_total += d.granted;
    row.demand_total += d.demand;
    row.reward += d.reward;
  }
  row.waste = row.allocated_total - row.demand_total;
  return row;
}

void write_scheduler_curve(std::ostream& os, std::uint64_t seed, const SchedulerTraining& run) {
  os << csv_banner(seed) << '\n' << "episode,reward,links\n";
  for (std::size_t e = 0; e < run.episode_rewards.size(); ++e)
    os << e << ',' << fixed6(run.episode_rewards[e]) << ',' << run.episode_links[e] << '\n';
}

void write_scheduler_report(std::ostream& os, std::uint64_t seed, const AccuracyReport& report) {
  os << csv_banner(seed) << '\n'
     << "snapshot,links,activated_agent,activated_oracle,matches,reward_agent,reward_oracle,"
        "infer_seconds\n";
  for (const auto& r : report.rows) {
    os << r.snapshot << ',' << r.links << ',' << r.activated_agent << ',' << r.activated_oracle
       << ',' << r.matches << ',' << fixed6(r.reward_agent) << ',' << fixed6(r.reward_oracle) << ','
       << fixed6(r.infer_seconds) << '\n';
  }
  os << "#summary accuracy=" << fixed6(report.accuracy)
     << " mean_infer_s=" << fixed6(report.mean_infer_seconds) << '\n';
}

void write_allocator_curve(std::ostream& os, std::uint64_t seed, const AllocatorTraining& run) {
  os << csv_banner(seed) << '\n' << "episode,band_reward,antenna_reward\n";
  for (std::size_t e = 0; e < run.band_rewards.size(); ++e)
    os << e << ',' << fixed6(run.band_rewards[e]) << ',' << fixed6(run.antenna_rewards[e]) << '\n';
}

void write_decision_header(std::ostream& os, std::uint64_t seed, bool with_method) {
  os << csv_banner(seed) << '\n';
  if (with_method) os << "method,";
  os << "episode,interval,slice,resource,chosen_bs,demand,granted,reward\n";
}

void write_decision(std::ostream& os, int episode, const AllocationDecision& d,
                    const std::string& method) {
  if (!method.empty()) os << method << ',';
  os << episode << ',' << d.interval << ',' << to_string(d.slice_id) << ',' << to_string(d.resource)
     << ',' << d.chosen_bs << ',' << fixed6(d.demand) << ',' << fixed6(d.granted) << ','
     << fixed6(d.reward) << '\n';
}

double ComparisonResult::mean_total(const std::string& label) const {
  if (days.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& d : days) {
    const auto b = d.band_reward.find(label);
    const auto a = d.antenna_reward.find(label);
    if (b != d.band_reward.end()) sum += b->second;
    if (a != d.antenna_reward.end()) sum += a->second;
  }
  return sum / static_cast<double>(days.size());
}

namespace {

std::vector<AllocationDecision> scored(const std::vector<int>& choices, std::span<const double> demands,
                                       std::span<const double> residuals, Resource res, int interval) {
  std::vector<double> left(residuals.begin(), residuals.end());
  std::vector<AllocationDecision> out;
  for (std::size_t i = 0; i < choices.size(); ++i) {
    AllocationDecision d;
    d.interval = interval;
    d.slice_id = kSliceOrder[i];
    d.resource = res;
    d.chosen_bs = choices[i];
    d.demand = demands[i];
    auto& slot = left[static_cast<std::size_t>(choices[i] - 1)];
    d.granted = slot;
    slot = 0.0;
    d.reward = allocation_reward(d.granted, d.demand);
    out.push_back(d);
  }
  return out;
}

}  // namespace

ComparisonResult run_comparison(const ExperimentConfig& cfg, const std::vector<DrlPolicy>& policies) {
  cfg.validate();
  const int bs = cfg.scenario.base_stations;
  for (const auto& p : policies) {
    for (const auto* net : {&p.agents.bandwidth, &p.agents.antenna}) {
      if (net->input_dim() != 2 + 2 * bs || net->output_dim() != bs) {
        throw Error(ErrorKind::Consistency,
                    "allocator model '" + p.label + "' expects " +
                        std::to_string(net->output_dim()) + " base stations, scenario has " +
                        std::to_string(bs));
      }
    }
  }

  ComparisonResult result;
  for (const auto& p : policies) result.labels.push_back(p.label);
  result.labels.push_back("baseline");
  result.labels.push_back("oracle");

  RandomStream day_seeds(cfg.eval_seed);
  RandomStream unused(0);
  for (int d = 0; d < cfg.eval_days; ++d) {
    DayComparison dc;
    dc.day = d;
    dc.day_seed = day_seeds.next_u64();
    const auto day = generate_day(dc.day_seed, cfg.scenario);
    const auto loads = day_loads(day);

    auto record = [&dc](Method m, const std::string& label, std::span<const AllocationDecision> ds) {
      auto row = throughput_metrics(ds);
      row.method = m;
      row.label = label;
      row.day = dc.day;
      (row.resource == Resource::Bandwidth ? dc.band_reward : dc.antenna_reward)[label] += row.reward;
      dc.rows.push_back(row);
      for (const auto& dec : ds) dc.decisions.emplace_back(label, dec);
    };

    for (std::size_t t = 0; t < day.snapshots.size(); ++t) {
      const auto& slices = day.slice_profiles[t];
      const auto& load = loads[t];
      const int interval = load.interval_index;

      for (const auto& p : policies) {
        const auto outcome = run_interval(p.agents, slices, load, 0.0, unused);
        for (const Resource res : {Resource::Bandwidth, Resource::Antenna}) {
          std::vector<AllocationDecision> ds;
          for (const auto& dec : outcome.decisions)
            if (dec.resource == res) ds.push_back(dec);
          record(Method::Drl, p.label, ds);
        }
      }

      for (const Resource res : {Resource::Bandwidth, Resource::Antenna}) {
        std::vector<double> demands;
        for (const auto& s : slices)
          demands.push_back(res == Resource::Bandwidth ? s.band_demand : s.antenna_demand);
        const auto residuals = residual_vector(load, res, bs);

        const auto base = baseline_select(demands, residuals);
        std::vector<int> base_choices;
        for (const auto& bd : base.decisions) base_choices.push_back(bd.chosen_bs);
        record(Method::Baseline, "baseline", scored(base_choices, demands, residuals, res, interval));

        const auto oracle = greedy_oracle_allocation(demands, residuals);
        record(Method::Oracle, "oracle", scored(oracle.choices, demands, residuals, res, interval));
      }
    }
    result.days.push_back(std::move(dc));
  }
  return result;
}

void write_comparison_rewards(std::ostream& os, std::uint64_t seed, const ComparisonResult& r) {
  os << csv_banner(seed) << '\n'
     << "day,interval,method,label,band_reward,antenna_reward,cumulative_reward\n";
  for (const auto& day : r.days) {
    std::map<std::string, double> cumulative;
    std::map<std::pair<int, std::string>, std::pair<double, double>> per_interval;
    std::vector<std::pair<int, std::string>> order;
    std::map<std::string, Method> methods;
    for (const auto& row : day.rows) {
      const auto key = std::make_pair(row.interval, row.label);
      if (!per_interval.count(key)) order.push_back(key);
      auto& slot = per_interval[key];
      (row.resource == Resource::Bandwidth ? slot.first : slot.second) += row.reward;
      methods[row.label] = row.method;
    }
    for (const auto& key : order) {
      const auto& [band, antenna] = per_interval[key];
      cumulative[key.second] += band + antenna;
      os << day.day << ',' << key.first << ',' << to_string(methods[key.second]) << ','
         << key.second << ',' << fixed6(band) << ',' << fixed6(antenna) << ','
         << fixed6(cumulative[key.second]) << '\n';
    }
  }
  for (const auto& label : r.labels)
    os << "#summary label=" << label << " mean_day_reward=" << fixed6(r.mean_total(label)) << '\n';
}

void write_comparison_throughput(std::ostream& os, std::uint64_t seed, const ComparisonResult& r) {
  os << csv_banner(seed) << '\n'
     << "day,interval,method,label,resource,allocated_total,demand_total,waste,reward\n";
  for (const auto& day : r.days) {
    for (const auto& row : day.rows) {
      os << row.day << ',' << row.interval << ',' << to_string(row.method) << ',' << row.label
         << ',' << to_string(row.resource) << ',' << fixed6(row.allocated_total) << ','
         << fixed6(row.demand_total) << ',' << fixed6(row.waste) << ',' << fixed6(row.reward)
         << '\n';
    }
  }
}

void write_comparison_decisions(std::ostream& os, std::uint64_t seed, const ComparisonResult& r) {
  write_decision_header(os, seed, true);
  for (const auto& day : r.days)
    for (const auto& [label, d] : day.decisions) write_decision(os, day.day, d, label);
}

}  // namespace iabsim
