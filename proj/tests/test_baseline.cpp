#include <doctest.h>

#include "iabsim/allocator.hpp"
#include "iabsim/baseline.hpp"

using namespace iabsim;

TEST_CASE("baseline on the worked example") {
  const std::vector<double> d = {0.81, 0.54, 0.22};
  const std::vector<double> r = {0.50, 0.39, 0.65, 0.75, 0.41, 0.37, 0.52};
  const auto out = baseline_select(d, r);
  REQUIRE(out.decisions.size() == 3);
  CHECK(out.decisions[0].chosen_bs == 4);
  CHECK(out.decisions[1].chosen_bs == 3);
  CHECK(out.decisions[2].chosen_bs == 7);
  CHECK(out.decisions[0].reward == doctest::Approx(0.9964).epsilon(1e-12));
  CHECK(out.decisions[1].reward == 1.0);
  CHECK(out.decisions[2].reward == 1.0);
  CHECK(out.total_reward == doctest::Approx(2.9964).epsilon(1e-12));
  CHECK(out.decisions[0].slice_id == SliceId::eMBB);
  CHECK(out.decisions[2].slice_id == SliceId::eMTC);
}

TEST_CASE("baseline edge cases") {
  const std::vector<double> d = {0.3, 0.2, 0.1};
  CHECK(baseline_select(d, std::vector<double>(7, 0.9)).total_reward == 3.0);

  const auto empty = baseline_select(d, std::vector<double>(7, 0.0));
  CHECK(empty.total_reward == doctest::Approx(3.0 - 0.09 - 0.04 - 0.01));
  for (const auto& dec : empty.decisions) {
    CHECK(dec.granted == 0.0);
    CHECK(dec.chosen_bs == 1);
  }

  const auto ties = baseline_select(d, std::vector<double>{0.2, 0.5, 0.5, 0.1, 0.5, 0, 0});
  CHECK(ties.decisions[0].chosen_bs == 2);
  CHECK(ties.decisions[1].chosen_bs == 3);
  CHECK(ties.decisions[2].chosen_bs == 5);
}

TEST_CASE("baseline reward rule") {
  CHECK(baseline_reward(0.9, 0.5) == 1.0);
  CHECK(baseline_reward(0.5, 0.5) == 1.0);
  CHECK(baseline_reward(0.3, 0.5) == doctest::Approx(0.96));
}

TEST_CASE("oracle dominates the baseline under quadratic scoring") {
  RandomStream rng(44);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> d(3), r(7);
    for (auto& x : d) x = rng.uniform01();
    for (auto& x : r) x = rng.uniform01();
    const auto base = baseline_select(d, r);
    double quadratic = 0.0;
    for (const auto& dec : base.decisions) {
      CHECK(dec.reward >= 0.0);
      CHECK(dec.reward <= 1.0);
      quadratic += allocation_reward(dec.granted, dec.demand);
    }
    CHECK(base.total_reward >= 0.0);
    CHECK(base.total_reward <= 3.0);
    CHECK(greedy_oracle_allocation(d, r).total_reward >= quadratic - 1e-12);
  }
}
