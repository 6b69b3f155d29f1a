#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "iabsim/random.hpp"

namespace iabsim {

inline constexpr int kIntervalsPerDay = 96;
inline constexpr int kSliceCount = 3;

// Index into a snapshot's node table: 0 is the donor, 1..B are base
// stations, B+1..B+U are user equipment.
struct NodeId {
  std::size_t index = 0;

  auto operator<=>(const NodeId&) const = default;
};

enum class NodeKind { Donor, BaseStation, UserEquipment };

struct Node {
  NodeId id;
  NodeKind kind = NodeKind::BaseStation;
  int antenna_budget = 1;

  bool operator==(const Node&) const = default;
};

// link_type 0 = infrastructure (BS-BS, BS-donor), 1 = access (UE-BS).
struct LinkCandidate {
  int link_id = 0;
  NodeId src;
  NodeId dst;
  double weight = 0.0;
  int link_type = 0;

  bool operator==(const LinkCandidate&) const = default;
};

struct TopologySnapshot {
  int interval_index = 0;
  std::vector<Node> nodes;
  std::vector<LinkCandidate> links;

  bool operator==(const TopologySnapshot&) const = default;
};

enum class SliceId { eMBB = 0, uRLLC = 1, eMTC = 2 };

inline constexpr std::array<SliceId, kSliceCount> kSliceOrder = {
    SliceId::eMBB, SliceId::uRLLC, SliceId::eMTC};

std::string_view to_string(SliceId id);
SliceId slice_from_string(std::string_view name);

struct SliceProfile {
  int interval_index = 0;
  NodeId bs;
  SliceId slice_id = SliceId::eMBB;
  double band_demand = 0.0;     // fraction of the bandwidth cap
  double antenna_demand = 0.0;  // fraction of K

  bool operator==(const SliceProfile&) const = default;
};

// Residual resources per base station, keyed by NodeId of the BS.
struct LoadProfile {
  int interval_index = 0;
  std::map<NodeId, double> residual_band;
  std::map<NodeId, double> residual_antennas;

  bool operator==(const LoadProfile&) const = default;
};

// Output of link scheduling.
struct ScheduleResult {
  int interval_index = 0;
  std::vector<int> activated;                // sorted link ids
  std::map<int, double> assigned_weight;     // link id -> w_hat
  std::map<NodeId, int> antenna_usage;

  bool is_active(int link_id) const;
};

// Raw (pre-normalization) demand range of a slice in MB.
struct DemandRange {
  double lo_mb = 0.0;
  double hi_mb = 0.0;

  bool operator==(const DemandRange&) const = default;
};

struct ScenarioConfig {
  int base_stations = 7;
  int user_equipment = 10;
  int antennas_per_bs = 14;  // K
  double bandwidth_cap_mb = 25000.0;
  std::array<DemandRange, kSliceCount> slice_band_mb = {
      DemandRange{8000.0, 20000.0},  // eMBB
      DemandRange{500.0, 3000.0},    // uRLLC
      DemandRange{500.0, 2500.0},    // eMTC
  };
  int antenna_demand_min = 1;
  int antenna_demand_max = 10;

  int node_count() const { return 1 + base_stations + user_equipment; }
  NodeId donor() const { return NodeId{0}; }
  NodeId bs(int k) const { return NodeId{static_cast<std::size_t>(k)}; }  // 1-based
  NodeId ue(int u) const {  // 1-based
    return NodeId{static_cast<std::size_t>(base_stations + u)};
  }

  // Throws Error(Config) on an unusable configuration.
  void validate() const;

  bool operator==(const ScenarioConfig&) const = default;
};

struct DayTrace {
  std::uint64_t seed = 0;
  std::vector<TopologySnapshot> snapshots;
  // slice_profiles[t] holds the eMBB, uRLLC, eMTC entries for BS1.
  std::vector<std::array<SliceProfile, kSliceCount>> slice_profiles;

  bool operator==(const DayTrace&) const = default;
};

// Rounds to six decimals, the precision of the trace format. Generated
// weights and demands pass through it.
double quantize6(double x);

DayTrace generate_day(std::uint64_t seed, const ScenarioConfig& config);

TopologySnapshot generate_snapshot(RandomStream& rng, const ScenarioConfig& config, int t);

std::array<SliceProfile, kSliceCount> sample_slice_profiles(RandomStream& rng,
                                                            const ScenarioConfig& config,
                                                            int t);

// Residuals per BS after scheduling. Throws Error(Consistency) when the
// schedule does not belong to the snapshot.
LoadProfile residual_load(const TopologySnapshot& snapshot, const ScheduleResult& schedule);

std::vector<std::string> validate_snapshot(const TopologySnapshot& snapshot);

}  // namespace iabsim
