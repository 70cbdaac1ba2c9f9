#include "mithril/parfm.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

#include "mithril/bounds.hpp"
#include "mithril/rng.hpp"

namespace mithril {

ParfmState::ParfmState(std::int64_t rfm_th, std::uint64_t seed)
    : rfm_th_(rfm_th), seed_(seed), rng_(seed) {
  if (rfm_th < 1) throw std::invalid_argument("rfm_th must be at least 1");
  window_.reserve(static_cast<std::size_t>(rfm_th));
}

void ParfmState::on_activate(RowAddr row) {
  if (static_cast<std::int64_t>(window_.size()) == rfm_th_) {
    window_.erase(window_.begin());  // keep only the last rfm_th activates
  }
  window_.push_back(row);
}

std::optional<RowAddr> ParfmState::on_rfm() {
  if (window_.empty()) return std::nullopt;
  const std::size_t pick =
      static_cast<std::size_t>(bounded(rng_, static_cast<std::uint64_t>(window_.size())));
  const RowAddr row = window_[pick];
  window_.clear();
  return row;
}

void FailureModel::validate() const {
  if (rfm_th < 1) throw std::invalid_argument("rfm_th must be at least 1");
  if (flip_th < 4) throw std::invalid_argument("flip_th must be at least 4");
  if (flip_th % 2 != 0) {
    throw std::invalid_argument("flip_th must be even for the half-threshold recurrence");
  }
  if (horizon_intervals < 0) throw std::invalid_argument("horizon must be non-negative");
  if (n_banks < 1) throw std::invalid_argument("n_banks must be at least 1");
}

double cost_effectiveness(std::int64_t j, std::int64_t rfm_th) {
  if (rfm_th < 1 || j < 1 || j > rfm_th) {
    throw std::invalid_argument("cost_effectiveness needs 1 <= j <= rfm_th");
  }
  const double base = 1.0 - static_cast<double>(j) / static_cast<double>(rfm_th);
  return std::pow(base, 1.0 / static_cast<double>(j));
}

double fail_single_row(const FailureModel& model) {
  model.validate();
  const std::int64_t half = model.flip_th / 2;
  if (model.horizon_intervals < half) return 0.0;  // too short for any row to fail

  const double inv_r = 1.0 / static_cast<double>(model.rfm_th);
  double survive = 0.0;  // (1 - 1/R)^(F/2)
  if (model.rfm_th > 1) {
    const double log_survive = static_cast<double>(half) * std::log1p(-inv_r);
    if (log_survive < std::log(1e-300)) {
      std::clog << "parfm: survival term below 1e-300, clamped to 0\n";
    } else {
      survive = std::exp(log_survive);
    }
  }
  const double gain = inv_r * survive;

  // P[i] needs P[i-1] and P[i - half - 1]; a ring of half + 2 values is
  // enough even for window-sized horizons.
  const std::size_t ring_size = static_cast<std::size_t>(half) + 2;
  std::vector<double> ring(ring_size, 0.0);
  auto at = [&](std::int64_t i) -> double& {
    return ring[static_cast<std::size_t>(i % static_cast<std::int64_t>(ring_size))];
  };
  at(half) = survive;
  double last = survive;
  for (std::int64_t i = half + 1; i <= model.horizon_intervals; ++i) {
    const double p = last + gain * (1.0 - at(i - half - 1));
    at(i) = p;
    last = p;
  }
  return last > 1.0 ? 1.0 : last;
}

double system_failure(double fail1, std::int64_t n_banks) {
  if (fail1 < 0.0 || fail1 > 1.0) throw std::invalid_argument("fail1 must be in [0, 1]");
  if (n_banks < 1) throw std::invalid_argument("n_banks must be at least 1");
  if (fail1 == 0.0) return 0.0;
  if (fail1 == 1.0) return 1.0;
  return -std::expm1(static_cast<double>(n_banks) * std::log1p(-fail1));
}

std::optional<std::int64_t> solve_rfm_th(std::int64_t flip_th, double target_prob,
                                         std::int64_t n_banks, const TimingParams& timing) {
  if (!(target_prob > 0.0 && target_prob < 1.0)) {
    throw std::invalid_argument("target_prob must lie in (0, 1)");
  }
  const std::int64_t half = flip_th / 2;
  std::int64_t best = 0;
  for (std::int64_t r = 1;; ++r) {
    const std::int64_t horizon = max_rfm_intervals(timing, r);
    if (horizon < half) break;  // outside the recurrence's domain
    FailureModel model{r, flip_th, horizon, n_banks};
    const double sys = system_failure(fail_single_row(model), n_banks);
    if (sys >= target_prob) break;
    best = r;
  }
  if (best == 0) return std::nullopt;
  return best;
}

}  // namespace mithril
