#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "mithril/cbs_table.hpp"
#include "mithril/timing.hpp"

namespace mithril {

// Probabilistic baseline: at every RFM command it refreshes the victims of
// one row sampled uniformly from the activates seen since the previous RFM.
class ParfmState {
 public:
  ParfmState(std::int64_t rfm_th, std::uint64_t seed);

  void on_activate(RowAddr row);

  // Uniform pick over the window, then the window clears. Empty window,
  // nothing to pick.
  std::optional<RowAddr> on_rfm();

  const std::vector<RowAddr>& window() const { return window_; }
  std::uint64_t seed() const { return seed_; }

 private:
  std::int64_t rfm_th_;
  std::uint64_t seed_;
  std::vector<RowAddr> window_;
  std::mt19937_64 rng_;
};

struct FailureModel {
  std::int64_t rfm_th = 0;
  std::int64_t flip_th = 0;            // must be even, at least 4
  std::int64_t horizon_intervals = 0;  // RFM commands inside one refresh window
  std::int64_t n_banks = 1;

  void validate() const;
};

// Attacker's payoff for packing j ACTs of one row into a single interval:
// (1 - j/rfm_th)^(1/j). Strictly decreasing in j, so spreading one ACT per
// interval is the most effective pattern against a uniform sampler.
double cost_effectiveness(std::int64_t j, std::int64_t rfm_th);

// Probability that one specific row accumulates flip_th/2 unsampled ACTs
// within the horizon, under the one-ACT-per-interval worst case:
//   P[i] = P[i-1] + (1/R)(1 - 1/R)^(F/2) (1 - P[i - F/2 - 1])
// with P[i] = 0 below i = F/2 and P[F/2] = (1 - 1/R)^(F/2).
// The power is evaluated in log space; results below 1e-300 clamp to zero.
double fail_single_row(const FailureModel& model);

// 1 - (1 - fail1)^n_banks, the first-order system failure estimate.
double system_failure(double fail1, std::int64_t n_banks);

// Largest rfm_th whose system failure over one refresh window stays below
// target_prob. The search stays inside the model's domain (the horizon must
// cover flip_th/2 intervals); nullopt when even rfm_th = 1 fails.
std::optional<std::int64_t> solve_rfm_th(std::int64_t flip_th, double target_prob,
                                         std::int64_t n_banks, const TimingParams& timing);

}  // namespace mithril
