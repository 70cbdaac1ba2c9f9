#pragma once

#include <cstdint>
#include <optional>

#include "mithril/timing.hpp"

namespace mithril {

// Protection parameters of one tracker instance.
struct MithrilConfig {
  std::int64_t n_entry = 0;   // counter table entries
  std::int64_t rfm_th = 0;    // ACTs between consecutive RFM commands
  std::int64_t ad_th = 0;     // adaptive-refresh spread threshold, 0 disables
  std::int64_t flip_th = 0;   // disturbance level at which a victim may flip
  int blast_radius = 1;       // 1 (adjacent only) or 3 (non-adjacent)

  void validate() const;  // throws std::invalid_argument
};

struct BoundReport {
  std::int64_t w = 0;       // RFM intervals that fit in one refresh window
  double m = 0.0;           // worst-case estimated-count growth per window
  double m_adaptive = 0.0;  // same bound with adaptive refresh enabled
  std::int64_t n_star = 0;  // interval count at which the adaptive bound peaks
  bool safe = false;
  double margin = 0.0;      // threshold minus the applicable bound
};

// Summed per-ACT disturbance a victim can receive from both sides:
// 2.0 at radius 1, 3.5 at radius 3. Other radii are rejected.
double aggregated_effect(int blast_radius);

// Largest number of RFM intervals that fit into one refresh window when ACTs
// are issued back to back:
//   ceil((t_refw - (t_refw / t_refi) * t_rfc) / (t_rc * rfm_th + t_rfm))
// Evaluated in exact integer arithmetic at picosecond granularity so the
// ceiling never moves with rounding. Throws std::domain_error when the
// available time is not positive.
std::int64_t max_rfm_intervals(const TimingParams& timing, std::int64_t rfm_th);

// The same quantity before the ceiling. The growth bounds below use this
// real-valued form directly.
double rfm_intervals_real(const TimingParams& timing, std::int64_t rfm_th);

// Upper bound on how much any single row's estimated count can grow across
// one refresh window, as a function of table size and RFM cadence:
//   sum_{k=1..n} rfm_th/k + (rfm_th/n) * (intervals - 2)
// The harmonic sum is accumulated from k = n down to 1 so results are
// reproducible across call sites.
double growth_bound(std::int64_t n_entry, std::int64_t rfm_th, const TimingParams& timing);
double growth_bound_for_intervals(std::int64_t n_entry, std::int64_t rfm_th, double intervals);

// Interval count maximizing the adaptive-refresh bound:
// ceil(n_entry * rfm_th / (rfm_th + ad_th)), clamped to [1, n_entry].
std::int64_t adaptive_peak_intervals(std::int64_t n_entry, std::int64_t rfm_th,
                                     std::int64_t ad_th);

// Growth bound when preventive refreshes are skipped while the counter
// spread stays at or below ad_th. Collapses to growth_bound at ad_th = 0.
double adaptive_growth_bound(const MithrilConfig& cfg, const TimingParams& timing);
double adaptive_growth_bound_for_intervals(std::int64_t n_entry, std::int64_t rfm_th,
                                           std::int64_t ad_th, double intervals);

// Evaluates both bounds and compares the applicable one (adaptive when
// ad_th > 0) against flip_th / aggregated_effect, strictly.
BoundReport is_safe(const MithrilConfig& cfg, const TimingParams& timing);

// Smallest table size whose bound clears flip_th at the given cadence, or
// nullopt when no table up to n_cap entries can ("not achievable").
std::optional<std::int64_t> find_min_nentry(std::int64_t flip_th, std::int64_t rfm_th,
                                            std::int64_t ad_th, const TimingParams& timing,
                                            int blast_radius,
                                            std::int64_t n_cap = 1'000'000);

// Storage for one table: n_entry * (row_address_bits + counter_bits) / 8.
double table_size_bytes(std::int64_t n_entry, int row_address_bits, int counter_bits);

// Counter width that keeps wrapped ordering unambiguous for this
// configuration: ceil(log2(bound + rfm_th + 1)) + 1.
int default_counter_bits(const MithrilConfig& cfg, const TimingParams& timing);

}  // namespace mithril
