#include "iabsim/allocator.hpp"

#include <string>

#include "iabsim/error.hpp"
#include "iabsim/scheduler.hpp"

namespace iabsim {
namespace {

const std::map<NodeId, double>& table(const LoadProfile& load, Resource r) {
  return r == Resource::Bandwidth ? load.residual_band : load.residual_antennas;
}

std::map<NodeId, double>& table(LoadProfile& load, Resource r) {
  return r == Resource::Bandwidth ? load.residual_band : load.residual_antennas;
}

double residual_of(const LoadProfile& load, Resource r, int bs) {
  const auto& t = table(load, r);
  const auto it = t.find(NodeId{static_cast<std::size_t>(bs)});
  if (it == t.end()) {
    throw Error(ErrorKind::Consistency, "load profile for interval " +
                                            std::to_string(load.interval_index) + " has no " +
                                            std::string(to_string(r)) + " entry for BS" +
                                            std::to_string(bs));
  }
  return it->second;
}

int select_action(const QNetwork& net, const Observation& obs, double epsilon, RandomStream& rng) {
  if (epsilon > 0.0 && rng.bernoulli(epsilon))
    return static_cast<int>(rng.index(static_cast<std::size_t>(net.output_dim())));
  const auto q = net.forward(obs);
  return argmax_legal(q, {});
}

void search(std::span<const double> demands, std::vector<double>& residuals, std::size_t slice,
            std::vector<int>& current, double score, double granted, OracleAllocation& best,
            bool& have_best) {
  if (slice == demands.size()) {
    if (!have_best || score > best.total_reward) {
      best.choices = current;
      best.total_reward = score;
      best.granted_total = granted;
      have_best = true;
    }
    return;
  }
  for (std::size_t j = 0; j < residuals.size(); ++j) {
    const double s = residuals[j];
    residuals[j] = 0.0;
    current.push_back(static_cast<int>(j) + 1);
    search(demands, residuals, slice + 1, current, score + allocation_reward(s, demands[slice]),
           granted + s, best, have_best);
    current.pop_back();
    residuals[j] = s;
  }
}

}  // namespace

std::string_view to_string(Resource r) {
  return r == Resource::Bandwidth ? "bandwidth" : "antenna";
}

Observation build_observation(const SliceProfile& slice, const LoadProfile& load,
                              int base_stations) {
  Observation obs;
  obs.reserve(static_cast<std::size_t>(2 + 2 * base_stations));
  obs.push_back(slice.band_demand);
  obs.push_back(slice.antenna_demand);
  for (int b = 1; b <= base_stations; ++b) obs.push_back(residual_of(load, Resource::Bandwidth, b));
  for (int b = 1; b <= base_stations; ++b) obs.push_back(residual_of(load, Resource::Antenna, b));
  return obs;
}

Grant apply_action(const LoadProfile& load, int bs, Resource resource, int base_stations) {
  if (bs < 1 || bs > base_stations) {
    throw Error(ErrorKind::Action, "action selects BS" + std::to_string(bs) + ", valid range is 1.." +
                                       std::to_string(base_stations));
  }
  Grant g;
  g.granted = residual_of(load, resource, bs);
  g.load = load;
  table(g.load, resource)[NodeId{static_cast<std::size_t>(bs)}] = 0.0;
  return g;
}

double allocation_reward(double granted, double demand) {
  const double d = granted - demand;
  return 1.0 - d * d;
}

std::vector<double> residual_vector(const LoadProfile& load, Resource resource, int base_stations) {
  std::vector<double> out;
  for (int b = 1; b <= base_stations; ++b) out.push_back(residual_of(load, resource, b));
  return out;
}

IntervalOutcome run_interval(const AllocatorAgents& agents,
                             std::span<const SliceProfile> slices, const LoadProfile& load,
                             double epsilon, RandomStream& rng) {
  const int bs_count = agents.bandwidth.output_dim();
  const int obs_dim = 2 + 2 * bs_count;
  for (const auto* net : {&agents.bandwidth, &agents.antenna}) {
    if (net->input_dim() != obs_dim || net->output_dim() != bs_count)
      throw Error(ErrorKind::Shape, "allocator networks must map " + std::to_string(obs_dim) +
                                        " inputs to " + std::to_string(bs_count) + " outputs");
  }

  IntervalOutcome out;
  out.final_load = load;
  std::vector<Observation> band_obs;
  std::vector<Observation> ant_obs;
  std::vector<AllocationDecision> band_dec;
  std::vector<AllocationDecision> ant_dec;

  for (const auto& slice : slices) {
    for (const Resource res : {Resource::Bandwidth, Resource::Antenna}) {
      const bool band = res == Resource::Bandwidth;
      const auto& net = band ? agents.bandwidth : agents.antenna;
      auto obs = build_observation(slice, out.final_load, bs_count);
      const int action = select_action(net, obs, epsilon, rng);
      const double demand = band ? slice.band_demand : slice.antenna_demand;
      auto grant = apply_action(out.final_load, action + 1, res, bs_count);
      out.final_load = std::move(grant.load);

      AllocationDecision d;
      d.interval = load.interval_index;
      d.slice_id = slice.slice_id;
      d.resource = res;
      d.chosen_bs = action + 1;
      d.demand = demand;
      d.granted = grant.granted;
      d.reward = allocation_reward(grant.granted, demand);
      out.decisions.push_back(d);
      (band ? band_obs : ant_obs).push_back(std::move(obs));
      (band ? band_dec : ant_dec).push_back(d);
    }
  }

  // next_state is the agent's own next observation within the interval; every
  // decision is stored as terminal.
  auto build = [](const std::vector<Observation>& obs, const std::vector<AllocationDecision>& dec,
                  std::vector<Transition>& dst) {
    for (std::size_t k = 0; k < obs.size(); ++k) {
      Transition tr;
      tr.state = obs[k];
      tr.action = dec[k].chosen_bs - 1;
      tr.reward = dec[k].reward;
      tr.terminal = true;
      tr.next_state = k + 1 == obs.size() ? obs[k] : obs[k + 1];
      dst.push_back(std::move(tr));
    }
  };
  build(band_obs, band_dec, out.band_transitions);
  build(ant_obs, ant_dec, out.antenna_transitions);
  return out;
}

OracleAllocation greedy_oracle_allocation(std::span<const double> demands,
                                          std::span<const double> residuals) {
  OracleAllocation best;
  std::vector<double> res(residuals.begin(), residuals.end());
  std::vector<int> current;
  bool have_best = false;
  search(demands, res, 0, current, 0.0, 0.0, best, have_best);
  return best;
}

std::vector<LoadProfile> day_loads(const DayTrace& day) {
  std::vector<LoadProfile> loads;
  loads.reserve(day.snapshots.size());
  for (const auto& snap : day.snapshots) loads.push_back(residual_load(snap, oracle_schedule(snap)));
  return loads;
}

AllocatorTraining train_allocator(const TrainConfig& cfg, const EpsilonSchedule& sched,
                                  const ScenarioConfig& scenario, int hidden_layers,
                                  const DecisionSink& sink) {
  cfg.validate();
  sched.validate();
  scenario.validate();
  if (hidden_layers < 1 || hidden_layers > 2)
    throw Error(ErrorKind::Config, "allocator supports 1 or 2 hidden layers");

  RandomStream root(cfg.seed);
  RandomStream init_rng = root.split();
  RandomStream env_rng = root.split();
  RandomStream policy_rng = root.split();
  RandomStream replay_rng = root.split();

  const int bs = scenario.base_stations;
  std::vector<int> dims{2 + 2 * bs};
  for (int l = 0; l < hidden_layers; ++l) dims.push_back(cfg.hidden_units);
  dims.push_back(bs);

  AllocatorTraining out;
  out.agents.bandwidth = QNetwork::glorot(dims, init_rng);
  out.agents.antenna = QNetwork::glorot(dims, init_rng);
  out.band_adam = AdamState::for_network(out.agents.bandwidth);
  out.antenna_adam = AdamState::for_network(out.agents.antenna);
  AllocatorAgents target = out.agents;

  struct Learner {
    QNetwork* online;
    QNetwork* target;
    AdamState* adam;
    ReplayBuffer replay;
    std::int64_t steps = 0;
  };
  Learner band{&out.agents.bandwidth, &target.bandwidth, &out.band_adam,
               ReplayBuffer(static_cast<std::size_t>(cfg.replay_capacity))};
  Learner ant{&out.agents.antenna, &target.antenna, &out.antenna_adam,
              ReplayBuffer(static_cast<std::size_t>(cfg.replay_capacity))};
  const auto batch_size = static_cast<std::size_t>(cfg.batch_size);

  auto learn = [&](Learner& L, Transition tr) {
    L.replay.push(std::move(tr));
    ++L.steps;
    if (L.replay.size() >= batch_size) {
      for (int u = 0; u < cfg.updates_per_step; ++u) {
        const auto batch = L.replay.sample(batch_size, replay_rng);
        train_on_batch(*L.online, *L.target, batch, cfg, *L.adam);
      }
    }
    if (L.steps % cfg.target_sync_interval == 0) sync_target(*L.online, *L.target);
  };

  for (int ep = 0; ep < cfg.episodes; ++ep) {
    const auto day = generate_day(env_rng.next_u64(), scenario);
    const double eps = epsilon_at(sched, ep);
    double band_total = 0.0;
    double ant_total = 0.0;
    try {
      for (std::size_t t = 0; t < day.snapshots.size(); ++t) {
        const auto load = residual_load(day.snapshots[t], oracle_schedule(day.snapshots[t]));
        auto outcome = run_interval(out.agents, day.slice_profiles[t], load, eps, policy_rng);
        for (const auto& d : outcome.decisions) {
          (d.resource == Resource::Bandwidth ? band_total : ant_total) += d.reward;
          if (sink) sink(ep, d);
        }
        for (std::size_t k = 0; k < outcome.band_transitions.size(); ++k) {
          learn(band, std::move(outcome.band_transitions[k]));
          learn(ant, std::move(outcome.antenna_transitions[k]));
        }
      }
    } catch (const NumericError& e) {
      throw NumericError("allocator training diverged in episode " + std::to_string(ep) + ": " +
                             e.what(),
                         ep);
    }
    out.band_rewards.push_back(band_total);
    out.antenna_rewards.push_back(ant_total);
  }
  return out;
}

}  // namespace iabsim
