#include <doctest.h>

#include <numeric>
#include <set>

#include "iabsim/error.hpp"
#include "iabsim/scheduler.hpp"
#include "support.hpp"

using namespace iabsim;
using iabsim::testing::rank_net;
using iabsim::testing::toy_snapshot;

TEST_CASE("encode_state layout") {
  const ScenarioConfig cfg;
  RandomStream rng(1);
  const auto snap = generate_snapshot(rng, cfg, 0);
  const auto st = encode_state(snap, 32);
  CHECK(st.flat.size() == 64);
  CHECK(st.link_count == 17);
  int padding = 0;
  for (int r = 17; r < 32; ++r) padding += (st.weight(r) == 0.0 && st.type(r) == 1.0);
  CHECK(padding == 15);
  for (int r = 0; r < 17; ++r) {
    CHECK(st.weight(r) == snap.links[static_cast<std::size_t>(r)].weight);
    CHECK(st.type(r) == snap.links[static_cast<std::size_t>(r)].link_type);
  }

  const TopologySnapshot empty;
  const auto e = encode_state(empty, 4);
  CHECK(e.flat == std::vector<double>{0, 1, 0, 1, 0, 1, 0, 1});

  const auto two = toy_snapshot({1, 1, 1}, {{0, 1, 0.3, 0}, {1, 2, 0.8, 0}});
  CHECK(encode_state(two, 3).flat == std::vector<double>{0.3, 0, 0.8, 0, 0, 1});

  try {
    encode_state(snap, 16);
    FAIL("expected an error");
  } catch (const Error& err) {
    CHECK(err.kind() == ErrorKind::Capacity);
    CHECK(std::string(err.what()).find("16") != std::string::npos);
  }
}

TEST_CASE("rank_key ordering examples") {
  const LinkCandidate a{0, NodeId{1}, NodeId{2}, 0.9, 1};
  const LinkCandidate b{1, NodeId{1}, NodeId{3}, 0.7, 0};
  CHECK(ranks_before(a, b));
  CHECK(rank_key(a) < rank_key(b));

  const LinkCandidate infra{5, NodeId{1}, NodeId{2}, 0.5, 0};
  const LinkCandidate access{2, NodeId{8}, NodeId{2}, 0.5, 1};
  CHECK(ranks_before(infra, access));

  const LinkCandidate lo{3, NodeId{1}, NodeId{2}, 0.5, 1};
  const LinkCandidate hi{4, NodeId{1}, NodeId{3}, 0.5, 1};
  CHECK(ranks_before(lo, hi));
  CHECK_FALSE(ranks_before(hi, lo));
}

TEST_CASE("padding rows sort after every real link") {
  const LinkCandidate pad{31, NodeId{0}, NodeId{0}, 0.0, 1};
  const LinkCandidate weakest{0, NodeId{1}, NodeId{2}, 0.0, 0};
  CHECK(ranks_before(weakest, pad));
}

TEST_CASE("oracle_schedule examples") {
  SUBCASE("disjoint pairs all activate") {
    const auto s = toy_snapshot({1, 1, 1, 1, 1, 1}, {{0, 1, 0.2, 0}, {2, 3, 0.5, 0}, {4, 5, 0.9, 0}});
    CHECK(oracle_schedule(s).activated == std::vector<int>{0, 1, 2});
  }
  SUBCASE("budget 1 keeps only the heavier link") {
    const auto s = toy_snapshot({2, 2, 1}, {{2, 0, 0.5, 0}, {2, 1, 0.9, 0}});
    CHECK(oracle_schedule(s).activated == std::vector<int>{1});
  }
  SUBCASE("hub with 17 candidates and K=14 keeps the 14 best") {
    std::vector<int> budgets = {17, 14};
    std::vector<iabsim::testing::ToyLink> links;
    for (std::size_t k = 0; k < 17; ++k) {
      budgets.push_back(1);
      links.push_back({1, 2 + k, 0.01 + 0.05 * static_cast<double>((k * 7) % 17), 0});
    }
    const auto s = toy_snapshot(budgets, links);
    const auto r = oracle_schedule(s);
    REQUIRE(r.activated.size() == 14);
    CHECK(r.antenna_usage.at(NodeId{1}) == 14);
    const auto order = rank_order(s);
    std::vector<int> best(order.begin(), order.begin() + 14);
    std::sort(best.begin(), best.end());
    CHECK(r.activated == best);
  }
}

TEST_CASE("assigned weights follow the activation") {
  const ScenarioConfig cfg;
  RandomStream rng(12);
  const auto s = generate_snapshot(rng, cfg, 0);
  const auto r = oracle_schedule(s);
  for (const auto& l : s.links)
    CHECK(r.assigned_weight.at(l.link_id) == (r.is_active(l.link_id) ? l.weight : 0.0));
}

TEST_CASE("antenna budgets hold for oracle and agent over 1000 snapshots") {
  ScenarioConfig cfg;
  RandomStream rng(777);
  RandomStream policy(778);
  RandomStream init(779);
  const auto net = QNetwork::glorot({64, 32, 32, 32}, init);
  int violations = 0;
  for (int i = 0; i < 1000; ++i) {
    cfg.antennas_per_bs = 1 + i % 5;
    cfg.antenna_demand_max = cfg.antennas_per_bs;
    const auto s = generate_snapshot(rng, cfg, i % 96);
    const auto o = oracle_schedule(s);
    const auto a = agent_schedule(net, s, (i % 3) * 0.5, policy).result;
    violations += !iabsim::testing::within_budgets(s, o);
    violations += !iabsim::testing::within_budgets(s, a);
  }
  CHECK(violations == 0);
}

TEST_CASE("agent with Q = -rank index reproduces the oracle") {
  ScenarioConfig cfg;
  RandomStream rng(31337);
  RandomStream policy(1);
  for (int i = 0; i < 300; ++i) {
    cfg.antennas_per_bs = 1 + i % 4;
    cfg.antenna_demand_max = cfg.antennas_per_bs;
    const auto s = generate_snapshot(rng, cfg, i % 96);
    const auto agent = agent_schedule(rank_net(s), s, 0.0, policy);
    CHECK(agent.result.activated == oracle_schedule(s).activated);
  }
}

TEST_CASE("episode step rewards add up to schedule_reward") {
  const ScenarioConfig cfg;
  RandomStream rng(4);
  RandomStream policy(5);
  RandomStream init(6);
  const auto net = QNetwork::glorot({64, 32, 32, 32}, init);
  for (int i = 0; i < 50; ++i) {
    ScenarioConfig small = cfg;
    small.antennas_per_bs = 1 + i % 3;
    small.antenna_demand_max = small.antennas_per_bs;
    const auto s = generate_snapshot(rng, small, 0);
    const auto ep = agent_schedule(net, s, 0.3, policy);
    double sum = 0.0;
    for (const auto& tr : ep.transitions) {
      CHECK(tr.reward >= 1.0);
      sum += tr.reward;
    }
    CHECK(sum == doctest::Approx(schedule_reward(s, ep.result)).epsilon(1e-12));
    REQUIRE_FALSE(ep.transitions.empty());
    CHECK(ep.transitions.back().terminal);
    for (std::size_t k = 0; k + 1 < ep.transitions.size(); ++k) CHECK_FALSE(ep.transitions[k].terminal);
  }
}

TEST_CASE("fully random agent still produces a maximal feasible schedule") {
  // 4-link toy: BS1 (budget 2) with three candidates plus one disjoint pair.
  const auto s = toy_snapshot({1, 2, 1, 1, 1, 1, 1},
                              {{1, 2, 0.4, 0}, {1, 3, 0.6, 0}, {1, 4, 0.8, 0}, {5, 6, 0.3, 0}});
  const QNetwork net({64, 1, 32});
  RandomStream policy(10);
  std::set<std::vector<int>> seen;
  for (int trial = 0; trial < 200; ++trial) {
    const auto r = agent_schedule(net, s, 1.0, policy).result;
    CHECK(iabsim::testing::within_budgets(s, r));
    CHECK(r.activated.size() == 3);
    CHECK(r.is_active(3));
    seen.insert(r.activated);
  }
  // Any two of the three BS1 links, plus the disjoint pair.
  CHECK(seen.size() == 3);
}

TEST_CASE("schedule_reward examples and bounds") {
  const auto s = toy_snapshot({2, 2, 2}, {{0, 1, 0.6, 0}, {1, 2, 0.8, 0}, {0, 2, 0.5, 0}});
  const std::vector<int> all = {0, 1, 2};
  CHECK(schedule_reward(s, make_schedule(s, all)) == 3.0);
  const std::vector<int> two = {0, 1};
  CHECK(schedule_reward(s, make_schedule(s, two)) == doctest::Approx(2.75));
  const auto pair = toy_snapshot({1, 1, 1}, {{0, 1, 0.6, 0}, {1, 2, 0.8, 0}});
  CHECK(schedule_reward(pair, make_schedule(pair, {})) == doctest::Approx(1.0));

  const ScenarioConfig cfg;
  RandomStream rng(21);
  for (int i = 0; i < 200; ++i) {
    const auto snap = generate_snapshot(rng, cfg, 0);
    const auto r = oracle_schedule(snap);
    const double reward = schedule_reward(snap, r);
    const double n = static_cast<double>(snap.links.size());
    CHECK(reward >= 0.0);
    CHECK(reward <= n);
    CHECK((reward == n) == (r.activated.size() == snap.links.size()));
  }
}

TEST_CASE("scaling weights keeps the oracle activation order") {
  ScenarioConfig cfg;
  cfg.antennas_per_bs = 2;
  cfg.antenna_demand_max = 2;
  RandomStream rng(8);
  for (int i = 0; i < 100; ++i) {
    const auto s = generate_snapshot(rng, cfg, 0);
    for (double c : {1.0, 0.5, 0.013}) {
      auto scaled = s;
      for (auto& l : scaled.links) l.weight *= c;
      CHECK(rank_order(scaled) == rank_order(s));
      CHECK(oracle_schedule(scaled).activated == oracle_schedule(s).activated);
    }
  }
}

TEST_CASE("oracle agrees with itself") {
  const ScenarioConfig cfg;
  RandomStream rng(2);
  const auto s = generate_snapshot(rng, cfg, 0);
  const auto o = oracle_schedule(s);
  CHECK(activation_matches(s, o, o) == static_cast<int>(s.links.size()));
}

TEST_CASE("agent rejects a mis-shaped network") {
  const ScenarioConfig cfg;
  RandomStream rng(2);
  const auto s = generate_snapshot(rng, cfg, 0);
  try {
    agent_schedule(QNetwork({10, 4, 32}), s, 0.0, rng);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Shape);
  }
}

TEST_CASE("train_scheduler bookkeeping and determinism") {
  TrainConfig cfg;
  cfg.episodes = 1;
  const EpsilonSchedule sched{0.9, 0.995, 0.01};
  const ScenarioConfig scenario;
  const auto one = train_scheduler(cfg, sched, scenario);
  CHECK(one.episode_rewards.size() == 1);
  CHECK(one.episode_links == std::vector<int>{17});

  cfg.episodes = 12;
  cfg.seed = 5;
  const auto a = train_scheduler(cfg, sched, scenario);
  const auto b = train_scheduler(cfg, sched, scenario);
  CHECK(a.episode_rewards == b.episode_rewards);
  CHECK(a.net == b.net);
  CHECK(a.adam == b.adam);
  CHECK(a.adam.step_count > 0);
}

TEST_CASE("accuracy report is consistent across thread counts") {
  RandomStream init(3);
  const auto net = QNetwork::glorot({64, 32, 32, 32}, init);
  const auto day = generate_day(99, ScenarioConfig{});
  const auto r1 = accuracy(net, day.snapshots, 1);
  const auto r3 = accuracy(net, day.snapshots, 3);
  CHECK(r1.accuracy == r3.accuracy);
  CHECK(r1.rows.size() == 96);
  CHECK(r1.accuracy >= 0.0);
  CHECK(r1.accuracy <= 1.0);
  for (std::size_t i = 0; i < r1.rows.size(); ++i) {
    CHECK(r1.rows[i].matches == r3.rows[i].matches);
    CHECK(r1.rows[i].reward_agent <= r1.rows[i].links);
  }
}
