#include "mithril/bounds.hpp"

#include <cmath>
#include <stdexcept>

namespace mithril {

namespace {

std::int64_t to_picoseconds(double ns) { return std::llround(ns * 1000.0); }

std::int64_t ceil_div_i128(__int128 num, __int128 den) {
  return static_cast<std::int64_t>((num + den - 1) / den);
}

}  // namespace

void MithrilConfig::validate() const {
  if (n_entry < 2) throw std::invalid_argument("config: n_entry must be at least 2");
  if (rfm_th < 1) throw std::invalid_argument("config: rfm_th must be at least 1");
  if (ad_th < 0) throw std::invalid_argument("config: ad_th must be non-negative");
  if (flip_th < 1) throw std::invalid_argument("config: flip_th must be positive");
  aggregated_effect(blast_radius);
}

double aggregated_effect(int blast_radius) {
  if (blast_radius == 1) return 2.0;
  if (blast_radius == 3) return 3.5;
  throw std::invalid_argument("blast_radius must be 1 or 3");
}

std::int64_t max_rfm_intervals(const TimingParams& timing, std::int64_t rfm_th) {
  timing.validate();
  if (rfm_th < 1) throw std::invalid_argument("rfm_th must be at least 1");
  const std::int64_t refw = to_picoseconds(timing.t_refw);
  const std::int64_t refi = to_picoseconds(timing.t_refi);
  const std::int64_t rfc = to_picoseconds(timing.t_rfc);
  const std::int64_t rc = to_picoseconds(timing.t_rc);
  const std::int64_t rfm = to_picoseconds(timing.t_rfm);
  // W = ceil(refw * (refi - rfc) / (refi * (rc * rfm_th + rfm)))
  const __int128 num = static_cast<__int128>(refw) * (refi - rfc);
  const __int128 den =
      static_cast<__int128>(refi) * (static_cast<__int128>(rc) * rfm_th + rfm);
  if (num <= 0) throw std::domain_error("timing leaves no time for activates");
  if (den <= 0) throw std::domain_error("invalid RFM interval duration");
  return ceil_div_i128(num, den);
}

double rfm_intervals_real(const TimingParams& timing, std::int64_t rfm_th) {
  timing.validate();
  if (rfm_th < 1) throw std::invalid_argument("rfm_th must be at least 1");
  const double available = timing.t_refw * (1.0 - timing.t_rfc / timing.t_refi);
  const double interval = timing.t_rc * static_cast<double>(rfm_th) + timing.t_rfm;
  if (available <= 0) throw std::domain_error("timing leaves no time for activates");
  return available / interval;
}

double growth_bound_for_intervals(std::int64_t n_entry, std::int64_t rfm_th,
                                  double intervals) {
  if (n_entry < 1) throw std::invalid_argument("n_entry must be at least 1");
  if (rfm_th < 1) throw std::invalid_argument("rfm_th must be at least 1");
  double harmonic = 0.0;
  for (std::int64_t k = n_entry; k >= 1; --k) {
    harmonic += static_cast<double>(rfm_th) / static_cast<double>(k);
  }
  return harmonic + ((intervals - 2.0) * static_cast<double>(rfm_th)) /
                        static_cast<double>(n_entry);
}

double growth_bound(std::int64_t n_entry, std::int64_t rfm_th, const TimingParams& timing) {
  return growth_bound_for_intervals(n_entry, rfm_th, rfm_intervals_real(timing, rfm_th));
}

std::int64_t adaptive_peak_intervals(std::int64_t n_entry, std::int64_t rfm_th,
                                     std::int64_t ad_th) {
  if (n_entry < 1 || rfm_th < 1 || ad_th < 0) {
    throw std::invalid_argument("adaptive_peak_intervals: bad arguments");
  }
  const std::int64_t den = rfm_th + ad_th;
  std::int64_t n = (n_entry * rfm_th + den - 1) / den;
  if (n < 1) n = 1;
  if (n > n_entry) n = n_entry;
  return n;
}

double adaptive_growth_bound_for_intervals(std::int64_t n_entry, std::int64_t rfm_th,
                                           std::int64_t ad_th, double intervals) {
  if (n_entry < 1) throw std::invalid_argument("n_entry must be at least 1");
  if (rfm_th < 1) throw std::invalid_argument("rfm_th must be at least 1");
  if (ad_th < 0) throw std::invalid_argument("ad_th must be non-negative");
  const std::int64_t peak = adaptive_peak_intervals(n_entry, rfm_th, ad_th);
  double harmonic = 0.0;
  for (std::int64_t k = peak; k >= 1; --k) {
    harmonic += static_cast<double>(rfm_th) / static_cast<double>(k);
  }
  // Grouped as (intervals - 2) + (n_entry - peak) so the ad_th = 0 case
  // reduces to exactly the same float operations as growth_bound.
  const double skipped = static_cast<double>(n_entry - peak);
  const double tail = (((intervals - 2.0) + skipped) * static_cast<double>(rfm_th) +
                       skipped * static_cast<double>(ad_th)) /
                      static_cast<double>(n_entry);
  return harmonic + tail;
}

double adaptive_growth_bound(const MithrilConfig& cfg, const TimingParams& timing) {
  cfg.validate();
  return adaptive_growth_bound_for_intervals(cfg.n_entry, cfg.rfm_th, cfg.ad_th,
                                             rfm_intervals_real(timing, cfg.rfm_th));
}

BoundReport is_safe(const MithrilConfig& cfg, const TimingParams& timing) {
  cfg.validate();
  BoundReport r;
  const double intervals = rfm_intervals_real(timing, cfg.rfm_th);
  r.w = max_rfm_intervals(timing, cfg.rfm_th);
  r.m = growth_bound_for_intervals(cfg.n_entry, cfg.rfm_th, intervals);
  r.m_adaptive =
      adaptive_growth_bound_for_intervals(cfg.n_entry, cfg.rfm_th, cfg.ad_th, intervals);
  r.n_star = adaptive_peak_intervals(cfg.n_entry, cfg.rfm_th, cfg.ad_th);
  const double applicable = cfg.ad_th > 0 ? r.m_adaptive : r.m;
  const double threshold =
      static_cast<double>(cfg.flip_th) / aggregated_effect(cfg.blast_radius);
  r.safe = applicable < threshold;
  r.margin = threshold - applicable;
  return r;
}

std::optional<std::int64_t> find_min_nentry(std::int64_t flip_th, std::int64_t rfm_th,
                                            std::int64_t ad_th, const TimingParams& timing,
                                            int blast_radius, std::int64_t n_cap) {
  if (flip_th < 4) throw std::invalid_argument("flip_th must be at least 4");
  if (n_cap < 2) throw std::invalid_argument("n_cap must be at least 2");
  const double intervals = rfm_intervals_real(timing, rfm_th);
  const double threshold = static_cast<double>(flip_th) / aggregated_effect(blast_radius);
  auto bound_at = [&](std::int64_t n) {
    return ad_th > 0
               ? adaptive_growth_bound_for_intervals(n, rfm_th, ad_th, intervals)
               : growth_bound_for_intervals(n, rfm_th, intervals);
  };
  auto safe_at = [&](std::int64_t n) { return bound_at(n) < threshold; };

  // The bound falls while n stays below roughly intervals - 2 and rises
  // afterwards, so its minimum sits near that valley. Probe around it and
  // binary-search the decreasing side for the smallest safe size.
  std::int64_t valley = static_cast<std::int64_t>(std::ceil(intervals - 2.0));
  if (valley < 2) valley = 2;
  if (valley > n_cap) valley = n_cap;

  std::int64_t hi = -1;
  for (std::int64_t probe : {valley - 2, valley - 1, valley, valley + 1, valley + 2}) {
    if (probe < 2 || probe > n_cap) continue;
    if (safe_at(probe)) {
      hi = probe;
      break;
    }
  }
  if (hi < 0) return std::nullopt;

  std::int64_t lo = 2;
  while (lo < hi) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (safe_at(mid)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  while (hi > 2 && safe_at(hi - 1)) --hi;
  return hi;
}

double table_size_bytes(std::int64_t n_entry, int row_address_bits, int counter_bits) {
  if (n_entry < 1) throw std::invalid_argument("n_entry must be at least 1");
  if (row_address_bits < 1 || counter_bits < 1) {
    throw std::invalid_argument("bit widths must be positive");
  }
  return static_cast<double>(n_entry) *
         static_cast<double>(row_address_bits + counter_bits) / 8.0;
}

int default_counter_bits(const MithrilConfig& cfg, const TimingParams& timing) {
  const BoundReport r = is_safe(cfg, timing);
  const double applicable = cfg.ad_th > 0 ? r.m_adaptive : r.m;
  const double span = applicable + static_cast<double>(cfg.rfm_th) + 1.0;
  int bits = static_cast<int>(std::ceil(std::log2(span))) + 1;
  if (bits < 2) bits = 2;
  if (bits > 32) throw std::domain_error("counter spread does not fit 32-bit counters");
  return bits;
}

}  // namespace mithril
