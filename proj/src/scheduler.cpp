#include "iabsim/scheduler.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <string>
#include <thread>

#include "iabsim/error.hpp"

namespace iabsim {

ScheduleState encode_state(const TopologySnapshot& snapshot, int max_links) {
  const int n = static_cast<int>(snapshot.links.size());
  if (n > max_links) {
    throw Error(ErrorKind::Capacity, "snapshot has " + std::to_string(n) +
                                         " links, state capacity N_max is " +
                                         std::to_string(max_links));
  }
  ScheduleState s;
  s.max_links = max_links;
  s.link_count = n;
  s.flat.resize(static_cast<std::size_t>(2 * max_links));
  for (int i = 0; i < max_links; ++i) {
    const bool real = i < n;
    s.flat[static_cast<std::size_t>(2 * i)] = real ? snapshot.links[static_cast<std::size_t>(i)].weight : 0.0;
    s.flat[static_cast<std::size_t>(2 * i + 1)] =
        real ? snapshot.links[static_cast<std::size_t>(i)].link_type : 1.0;
  }
  return s;
}

RankKey rank_key(const LinkCandidate& link) { return RankKey{-link.weight, link.link_type}; }

bool ranks_before(const LinkCandidate& a, const LinkCandidate& b) {
  const auto ka = rank_key(a);
  const auto kb = rank_key(b);
  if (ka != kb) return ka < kb;
  return a.link_id < b.link_id;
}

std::vector<int> rank_order(const TopologySnapshot& snapshot) {
  std::vector<int> order(snapshot.links.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return ranks_before(snapshot.links[static_cast<std::size_t>(a)],
                        snapshot.links[static_cast<std::size_t>(b)]);
  });
  return order;
}

AntennaLedger::AntennaLedger(const TopologySnapshot& snapshot)
    : budget_(snapshot.nodes.size()), used_(snapshot.nodes.size(), 0) {
  for (const auto& node : snapshot.nodes) budget_[node.id.index] = node.antenna_budget;
}

bool AntennaLedger::feasible(const LinkCandidate& link) const {
  return used_[link.src.index] < budget_[link.src.index] &&
         used_[link.dst.index] < budget_[link.dst.index];
}

void AntennaLedger::activate(const LinkCandidate& link) {
  ++used_[link.src.index];
  ++used_[link.dst.index];
}

ScheduleResult make_schedule(const TopologySnapshot& snapshot, std::span<const int> activated) {
  ScheduleResult r;
  r.interval_index = snapshot.interval_index;
  r.activated.assign(activated.begin(), activated.end());
  std::sort(r.activated.begin(), r.activated.end());
  for (const auto& link : snapshot.links) {
    const bool on = r.is_active(link.link_id);
    r.assigned_weight[link.link_id] = on ? link.weight : 0.0;
    if (on) {
      ++r.antenna_usage[link.src];
      ++r.antenna_usage[link.dst];
    }
  }
  return r;
}

ScheduleResult oracle_schedule(const TopologySnapshot& snapshot) {
  AntennaLedger ledger(snapshot);
  std::vector<int> activated;
  for (int pos : rank_order(snapshot)) {
    const auto& link = snapshot.links[static_cast<std::size_t>(pos)];
    if (!ledger.feasible(link)) continue;
    ledger.activate(link);
    activated.push_back(link.link_id);
  }
  return make_schedule(snapshot, activated);
}

AgentEpisode agent_schedule(const QNetwork& net, const TopologySnapshot& snapshot, double epsilon,
                            RandomStream& rng) {
  const int max_links = net.output_dim();
  if (net.input_dim() != 2 * max_links) {
    throw Error(ErrorKind::Shape, "scheduler network must map 2*N_max inputs to N_max outputs, got " +
                                      std::to_string(net.input_dim()) + " -> " +
                                      std::to_string(max_links));
  }
  ScheduleState state = encode_state(snapshot, max_links);
  const int n = state.link_count;
  const auto& links = snapshot.links;

  AntennaLedger ledger(snapshot);
  // A link is settled once activated or once an endpoint runs out of antennas.
  std::vector<std::uint8_t> settled(static_cast<std::size_t>(n), 0);
  std::vector<std::uint8_t> legal(static_cast<std::size_t>(max_links), 0);
  auto refresh_legal = [&] {
    bool any = false;
    for (int i = 0; i < n; ++i) {
      const bool ok = !settled[static_cast<std::size_t>(i)] && ledger.feasible(links[static_cast<std::size_t>(i)]);
      legal[static_cast<std::size_t>(i)] = ok ? 1 : 0;
      any = any || ok;
    }
    return any;
  };

  AgentEpisode episode;
  std::vector<int> activated;
  bool any = refresh_legal();
  while (any) {
    int action = -1;
    if (epsilon > 0.0 && rng.bernoulli(epsilon)) {
      std::vector<int> choices;
      for (int i = 0; i < n; ++i)
        if (legal[static_cast<std::size_t>(i)]) choices.push_back(i);
      action = choices[rng.index(choices.size())];
    } else {
      const auto q = net.forward(state.flat);
      action = argmax_legal(q, legal);
    }

    Transition tr;
    tr.state = state.flat;
    tr.action = action;

    const auto& link = links[static_cast<std::size_t>(action)];
    ledger.activate(link);
    settled[static_cast<std::size_t>(action)] = 1;
    activated.push_back(link.link_id);
    state.zero_row(action);

    double reward = 1.0;
    for (int i = 0; i < n; ++i) {
      const auto& other = links[static_cast<std::size_t>(i)];
      if (settled[static_cast<std::size_t>(i)] || ledger.feasible(other)) continue;
      settled[static_cast<std::size_t>(i)] = 1;
      reward += 1.0 - other.weight * other.weight;
    }

    any = refresh_legal();
    tr.reward = reward;
    tr.next_state = state.flat;
    tr.terminal = !any;
    tr.next_legal = legal;
    episode.transitions.push_back(std::move(tr));
  }
  episode.result = make_schedule(snapshot, activated);
  return episode;
}

double schedule_reward(const TopologySnapshot& snapshot, const ScheduleResult& result) {
  double total = 0.0;
  for (const auto& link : snapshot.links) {
    const auto it = result.assigned_weight.find(link.link_id);
    const double w_hat = it == result.assigned_weight.end() ? 0.0 : it->second;
    const double d = link.weight - w_hat;
    total += 1.0 - d * d;
  }
  return total;
}

int activation_matches(const TopologySnapshot& snapshot, const ScheduleResult& a,
                       const ScheduleResult& b) {
  int m = 0;
  for (const auto& link : snapshot.links)
    if (a.is_active(link.link_id) == b.is_active(link.link_id)) ++m;
  return m;
}

SchedulerTraining train_scheduler(const TrainConfig& cfg, const EpsilonSchedule& sched,
                                  const ScenarioConfig& scenario, int max_links) {
  cfg.validate();
  sched.validate();
  scenario.validate();

  RandomStream root(cfg.seed);
  RandomStream init_rng = root.split();
  RandomStream env_rng = root.split();
  RandomStream policy_rng = root.split();
  RandomStream replay_rng = root.split();

  SchedulerTraining out;
  const int h = cfg.hidden_units;
  out.net = QNetwork::glorot({2 * max_links, h, h, max_links}, init_rng);
  out.adam = AdamState::for_network(out.net);
  QNetwork target = out.net;
  ReplayBuffer replay(static_cast<std::size_t>(cfg.replay_capacity));
  const auto batch_size = static_cast<std::size_t>(cfg.batch_size);

  std::int64_t env_steps = 0;
  for (int ep = 0; ep < cfg.episodes; ++ep) {
    const auto snapshot = generate_snapshot(env_rng, scenario, ep % kIntervalsPerDay);
    const double eps = epsilon_at(sched, ep);
    auto episode = agent_schedule(out.net, snapshot, eps, policy_rng);
    try {
      for (auto& tr : episode.transitions) {
        replay.push(std::move(tr));
        ++env_steps;
        if (replay.size() >= batch_size) {
          const auto batch = replay.sample(batch_size, replay_rng);
          train_on_batch(out.net, target, batch, cfg, out.adam);
        }
        if (env_steps % cfg.target_sync_interval == 0) sync_target(out.net, target);
      }
    } catch (const NumericError& e) {
      throw NumericError("scheduler training diverged in episode " + std::to_string(ep) + ": " +
                             e.what(),
                         ep);
    }
    out.episode_rewards.push_back(schedule_reward(snapshot, episode.result));
    out.episode_links.push_back(static_cast<int>(snapshot.links.size()));
  }
  return out;
}

namespace {

SnapshotEval evaluate_one(const QNetwork& net, const TopologySnapshot& snap, int index) {
  RandomStream unused(0);
  const auto t0 = std::chrono::steady_clock::now();
  const auto episode = agent_schedule(net, snap, 0.0, unused);
  const auto t1 = std::chrono::steady_clock::now();
  const auto oracle = oracle_schedule(snap);

  SnapshotEval row;
  row.snapshot = index;
  row.links = static_cast<int>(snap.links.size());
  row.activated_agent = static_cast<int>(episode.result.activated.size());
  row.activated_oracle = static_cast<int>(oracle.activated.size());
  row.matches = activation_matches(snap, episode.result, oracle);
  row.reward_agent = schedule_reward(snap, episode.result);
  row.reward_oracle = schedule_reward(snap, oracle);
  row.infer_seconds = std::chrono::duration<double>(t1 - t0).count();
  return row;
}

}  // namespace

AccuracyReport accuracy(const QNetwork& net, std::span<const TopologySnapshot> snapshots,
                        int threads) {
  AccuracyReport report;
  report.rows.resize(snapshots.size());
  const std::size_t workers =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), 1, std::max<std::size_t>(snapshots.size(), 1));

  if (workers == 1) {
    for (std::size_t i = 0; i < snapshots.size(); ++i)
      report.rows[i] = evaluate_one(net, snapshots[i], static_cast<int>(i));
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w, local = net] {
        for (std::size_t i = w; i < snapshots.size(); i += workers)
          report.rows[i] = evaluate_one(local, snapshots[i], static_cast<int>(i));
      });
    }
    for (auto& t : pool) t.join();
  }

  long long links = 0;
  long long matches = 0;
  std::vector<double> times;
  for (const auto& row : report.rows) {
    links += row.links;
    matches += row.matches;
    times.push_back(row.infer_seconds);
  }
  report.accuracy = links == 0 ? 1.0 : static_cast<double>(matches) / static_cast<double>(links);
  if (!times.empty()) {
    report.mean_infer_seconds = std::accumulate(times.begin(), times.end(), 0.0) / times.size();
    std::sort(times.begin(), times.end());
    const auto mid = times.size() / 2;
    report.median_infer_seconds =
        times.size() % 2 ? times[mid] : 0.5 * (times[mid - 1] + times[mid]);
  }
  return report;
}

}  // namespace iabsim
