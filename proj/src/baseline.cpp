#include "iabsim/baseline.hpp"

namespace iabsim {

double baseline_reward(double granted, double demand) {
  if (granted >= demand) return 1.0;
  const double d = granted - demand;
  return 1.0 - d * d;
}

BaselineOutcome baseline_select(std::span<const double> demands,
                                std::span<const double> residuals) {
  std::vector<double> res(residuals.begin(), residuals.end());
  BaselineOutcome out;
  for (std::size_t i = 0; i < demands.size(); ++i) {
    BaselineDecision d;
    d.slice_id = i < kSliceOrder.size() ? kSliceOrder[i] : SliceId::eMBB;
    d.demand = demands[i];
    std::size_t best = 0;
    for (std::size_t j = 1; j < res.size(); ++j)
      if (res[j] > res[best]) best = j;
    d.chosen_bs = static_cast<int>(best) + 1;
    d.granted = res.empty() ? 0.0 : res[best];
    if (!res.empty()) res[best] = 0.0;
    d.reward = baseline_reward(d.granted, d.demand);
    out.total_reward += d.reward;
    out.decisions.push_back(d);
  }
  return out;
}

}  // namespace iabsim
