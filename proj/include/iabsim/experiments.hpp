#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "iabsim/allocator.hpp"
#include "iabsim/baseline.hpp"
#include "iabsim/config.hpp"
#include "iabsim/scheduler.hpp"

namespace iabsim {

// First line of every CSV the harness writes.
std::string csv_banner(std::uint64_t seed);

std::string fixed6(double v);

enum class Method { Drl, Baseline, Oracle };

std::string_view to_string(Method m);

struct MetricsRow {
  Method method = Method::Drl;
  std::string label;  // e.g. drl_c1, baseline, oracle
  int day = 0;
  int interval = 0;
  Resource resource = Resource::Bandwidth;
  double reward = 0.0;  // quadratic scoring
  double allocated_total = 0.0;
  double demand_total = 0.0;
  double waste = 0.0;  // allocated_total - demand_total
};

// Totals over the decisions of one interval for one resource.
MetricsRow throughput_metrics(std::span<const AllocationDecision> decisions);

void write_scheduler_curve(std::ostream& os, std::uint64_t seed, const SchedulerTraining& run);
void write_scheduler_report(std::ostream& os, std::uint64_t seed, const AccuracyReport& report);
void write_allocator_curve(std::ostream& os, std::uint64_t seed, const AllocatorTraining& run);
void write_decision_header(std::ostream& os, std::uint64_t seed, bool with_method);
void write_decision(std::ostream& os, int episode, const AllocationDecision& d,
                    const std::string& method = {});

struct DrlPolicy {
  std::string label;
  AllocatorAgents agents;
};

struct DayComparison {
  int day = 0;
  std::uint64_t day_seed = 0;
  // label -> cumulative quadratic reward (bandwidth + antenna) for the day
  std::map<std::string, double> band_reward;
  std::map<std::string, double> antenna_reward;
  std::vector<MetricsRow> rows;
  std::vector<std::pair<std::string, AllocationDecision>> decisions;  // (label, decision)
};

struct ComparisonResult {
  std::vector<DayComparison> days;
  std::vector<std::string> labels;  // drl labels, then baseline, oracle

  double mean_total(const std::string& label) const;
};

// Scores each policy, the largest-residual baseline, and the exhaustive oracle
// on common quadratic footing over cfg.eval_days days generated from
// cfg.eval_seed. Throws Error(Consistency) if a policy does not fit the
// scenario.
ComparisonResult run_comparison(const ExperimentConfig& cfg, const std::vector<DrlPolicy>& policies);

void write_comparison_rewards(std::ostream& os, std::uint64_t seed, const ComparisonResult& r);
void write_comparison_throughput(std::ostream& os, std::uint64_t seed, const ComparisonResult& r);
// Decision log with a leading method column; the episode column holds the day.
void write_comparison_decisions(std::ostream& os, std::uint64_t seed, const ComparisonResult& r);

}  // namespace iabsim
