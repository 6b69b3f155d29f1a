#pragma once

#include <compare>
#include <span>
#include <vector>

#include "iabsim/net_model.hpp"
#include "iabsim/rl_engine.hpp"

namespace iabsim {

inline constexpr int kDefaultMaxLinks = 32;

// N_max rows of (weight, link_type), flattened row-major. Rows past the real
// links hold the padding pair (0, 1).
struct ScheduleState {
  int max_links = kDefaultMaxLinks;
  int link_count = 0;
  std::vector<double> flat;

  double weight(int row) const { return flat[static_cast<std::size_t>(2 * row)]; }
  double type(int row) const { return flat[static_cast<std::size_t>(2 * row + 1)]; }
  void zero_row(int row) {
    flat[static_cast<std::size_t>(2 * row)] = 0.0;
    flat[static_cast<std::size_t>(2 * row + 1)] = 0.0;
  }
};

// Throws Error(Capacity) when the snapshot has more than max_links links.
ScheduleState encode_state(const TopologySnapshot& snapshot, int max_links = kDefaultMaxLinks);

// (-weight, link_type); ascending order is scheduling priority.
struct RankKey {
  double neg_weight = 0.0;
  int link_type = 0;

  auto operator<=>(const RankKey&) const = default;
};

RankKey rank_key(const LinkCandidate& link);

// Full priority order: rank_key, then lower link_id.
bool ranks_before(const LinkCandidate& a, const LinkCandidate& b);

// Link positions of the snapshot sorted by priority.
std::vector<int> rank_order(const TopologySnapshot& snapshot);

// Per-node antenna bookkeeping for one scheduling pass.
class AntennaLedger {
 public:
  explicit AntennaLedger(const TopologySnapshot& snapshot);

  bool feasible(const LinkCandidate& link) const;
  void activate(const LinkCandidate& link);
  int used(NodeId node) const { return used_[node.index]; }
  int budget(NodeId node) const { return budget_[node.index]; }

 private:
  std::vector<int> budget_;
  std::vector<int> used_;
};

// Activates links in rank order while both endpoints have spare antennas.
ScheduleResult oracle_schedule(const TopologySnapshot& snapshot);

// Builds a ScheduleResult from an explicit activation set, without checking
// feasibility.
ScheduleResult make_schedule(const TopologySnapshot& snapshot, std::span<const int> activated);

struct AgentEpisode {
  ScheduleResult result;
  std::vector<Transition> transitions;
};

// Epsilon-greedy link selection over feasible, unprocessed links. Each step
// activates one link and zeroes its row. The step reward is the sum of
// 1 - (w - w_hat)^2 over every link whose outcome the step settles: the
// activated link (1.0) plus links it made infeasible (1 - w^2), so the rewards
// of an episode add up to schedule_reward.
AgentEpisode agent_schedule(const QNetwork& net, const TopologySnapshot& snapshot, double epsilon,
                            RandomStream& rng);

// Sum over real links of 1 - (w - w_hat)^2.
double schedule_reward(const TopologySnapshot& snapshot, const ScheduleResult& result);

// Number of links whose activation status agrees between two schedules.
int activation_matches(const TopologySnapshot& snapshot, const ScheduleResult& a,
                       const ScheduleResult& b);

struct SchedulerTraining {
  QNetwork net;
  AdamState adam;
  std::vector<double> episode_rewards;
  std::vector<int> episode_links;
};

// One episode per freshly generated snapshot; epsilon decays per episode.
// Throws NumericError carrying the episode index on divergence.
SchedulerTraining train_scheduler(const TrainConfig& cfg, const EpsilonSchedule& sched,
                                  const ScenarioConfig& scenario,
                                  int max_links = kDefaultMaxLinks);

struct SnapshotEval {
  int snapshot = 0;
  int links = 0;
  int activated_agent = 0;
  int activated_oracle = 0;
  int matches = 0;
  double reward_agent = 0.0;
  double reward_oracle = 0.0;
  double infer_seconds = 0.0;
};

struct AccuracyReport {
  double accuracy = 0.0;
  double mean_infer_seconds = 0.0;
  double median_infer_seconds = 0.0;
  std::vector<SnapshotEval> rows;
};

// Per-link activation agreement between the greedy (epsilon = 0) agent and the
// rank oracle. Snapshots may be sharded across threads.
AccuracyReport accuracy(const QNetwork& net, std::span<const TopologySnapshot> snapshots,
                        int threads = 1);

}  // namespace iabsim
