#pragma once

#include <vector>

#include "iabsim/net_model.hpp"
#include "iabsim/scheduler.hpp"

namespace iabsim::testing {

struct ToyLink {
  std::size_t a;
  std::size_t b;
  double w;
  int type;
};

// Nodes get the given budgets; node 0 is the donor, the rest are base
// stations unless listed as UEs.
inline TopologySnapshot toy_snapshot(const std::vector<int>& budgets, const std::vector<ToyLink>& links,
                                     const std::vector<std::size_t>& ues = {}) {
  TopologySnapshot s;
  for (std::size_t i = 0; i < budgets.size(); ++i) {
    NodeKind kind = i == 0 ? NodeKind::Donor : NodeKind::BaseStation;
    for (auto u : ues)
      if (u == i) kind = NodeKind::UserEquipment;
    s.nodes.push_back(Node{NodeId{i}, kind, budgets[i]});
  }
  for (const auto& l : links)
    s.links.push_back(LinkCandidate{static_cast<int>(s.links.size()), NodeId{l.a}, NodeId{l.b}, l.w, l.type});
  return s;
}

// Scheduler-shaped net whose Q-value for link row i is -(rank position of i).
inline QNetwork rank_net(const TopologySnapshot& snapshot, int max_links = kDefaultMaxLinks) {
  QNetwork net({2 * max_links, 1, max_links});
  auto& bias = net.layers().back().biases;
  for (int i = 0; i < max_links; ++i) bias[static_cast<std::size_t>(i)] = -1e6;
  const auto order = rank_order(snapshot);
  for (std::size_t r = 0; r < order.size(); ++r)
    bias[static_cast<std::size_t>(order[r])] = -static_cast<double>(r);
  return net;
}

// Best schedule_reward over every antenna-feasible activation subset.
inline double exhaustive_best_reward(const TopologySnapshot& snapshot) {
  const std::size_t n = snapshot.links.size();
  double best = -1.0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    std::vector<int> used(snapshot.nodes.size(), 0);
    std::vector<int> active;
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      if (!(mask >> i & 1u)) continue;
      const auto& l = snapshot.links[i];
      ok = ++used[l.src.index] <= snapshot.nodes[l.src.index].antenna_budget &&
           ++used[l.dst.index] <= snapshot.nodes[l.dst.index].antenna_budget;
      active.push_back(l.link_id);
    }
    if (!ok) continue;
    best = std::max(best, schedule_reward(snapshot, make_schedule(snapshot, active)));
  }
  return best;
}

inline bool within_budgets(const TopologySnapshot& snapshot, const ScheduleResult& r) {
  for (const auto& node : snapshot.nodes) {
    const auto it = r.antenna_usage.find(node.id);
    if (it != r.antenna_usage.end() && it->second > node.antenna_budget) return false;
  }
  return true;
}

}  // namespace iabsim::testing
