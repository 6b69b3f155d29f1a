#pragma once

#include <span>
#include <vector>

#include "iabsim/net_model.hpp"

namespace iabsim {

struct BaselineDecision {
  SliceId slice_id = SliceId::eMBB;
  int chosen_bs = 1;  // 1-based
  double demand = 0.0;
  double granted = 0.0;
  double reward = 0.0;  // 1 when granted >= demand, else 1 - (granted - demand)^2
};

struct BaselineOutcome {
  std::vector<BaselineDecision> decisions;
  double total_reward = 0.0;
};

// Meets-or-exceeds scoring.
double baseline_reward(double granted, double demand);

// Demand-agnostic benchmark: each slice in order takes the BS with the largest
// current residual (ties to the lowest index), consuming it fully.
BaselineOutcome baseline_select(std::span<const double> demands,
                                std::span<const double> residuals);

}  // namespace iabsim
