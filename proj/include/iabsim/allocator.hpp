#pragma once

#include <array>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "iabsim/net_model.hpp"
#include "iabsim/rl_engine.hpp"

namespace iabsim {

enum class Resource { Bandwidth = 0, Antenna = 1 };

std::string_view to_string(Resource r);

// [slice band demand, slice antenna demand, residual band BS1..BSn,
//  residual antennas BS1..BSn]; length 16 for the default seven BSs.
using Observation = std::vector<double>;

struct AllocationDecision {
  int interval = 0;
  SliceId slice_id = SliceId::eMBB;
  Resource resource = Resource::Bandwidth;
  int chosen_bs = 1;  // 1-based
  double demand = 0.0;
  double granted = 0.0;
  double reward = 0.0;
};

// Throws Error(Consistency) if the load is missing any of BS1..BSn.
Observation build_observation(const SliceProfile& slice, const LoadProfile& load,
                              int base_stations = 7);

struct Grant {
  double granted = 0.0;
  LoadProfile load;
};

// The chosen BS grants its whole current residual of the resource, which is
// then consumed. Throws Error(Action) when bs is outside [1, base_stations].
Grant apply_action(const LoadProfile& load, int bs, Resource resource, int base_stations = 7);

// 1 - (granted - demand)^2
double allocation_reward(double granted, double demand);

struct AllocatorAgents {
  QNetwork bandwidth;
  QNetwork antenna;
};

struct IntervalOutcome {
  std::vector<AllocationDecision> decisions;  // eMBB band, eMBB antenna, uRLLC band, ...
  std::vector<Transition> band_transitions;
  std::vector<Transition> antenna_transitions;
  LoadProfile final_load;
};

// Slices in fixed order (eMBB, uRLLC, eMTC); per slice the bandwidth agent
// acts, then the antenna agent, each on a fresh observation.
IntervalOutcome run_interval(const AllocatorAgents& agents,
                             std::span<const SliceProfile> slices, const LoadProfile& load,
                             double epsilon, RandomStream& rng);

struct OracleAllocation {
  std::vector<int> choices;  // 1-based BS per slice
  double total_reward = 0.0;
  double granted_total = 0.0;
};

// Exhaustive search over every per-slice BS assignment with consumption
// semantics. Ties resolve to the lexicographically smallest choice tuple.
OracleAllocation greedy_oracle_allocation(std::span<const double> demands,
                                          std::span<const double> residuals);

// Residual vector (BS1..BSn) for one resource.
std::vector<double> residual_vector(const LoadProfile& load, Resource resource,
                                    int base_stations = 7);

struct AllocatorTraining {
  AllocatorAgents agents;
  AdamState band_adam;
  AdamState antenna_adam;
  std::vector<double> band_rewards;
  std::vector<double> antenna_rewards;
};

using DecisionSink = std::function<void(int episode, const AllocationDecision&)>;

// The day for episode e is generated from a seed drawn from the training
// stream; residuals come from the oracle schedule of each snapshot. Both
// agents learn concurrently from separate replay buffers. Throws NumericError
// carrying the episode index on divergence.
AllocatorTraining train_allocator(const TrainConfig& cfg, const EpsilonSchedule& sched,
                                  const ScenarioConfig& scenario, int hidden_layers,
                                  const DecisionSink& sink = {});

// Residual load of every interval of a day under the rank-oracle schedule.
std::vector<LoadProfile> day_loads(const DayTrace& day);

}  // namespace iabsim
