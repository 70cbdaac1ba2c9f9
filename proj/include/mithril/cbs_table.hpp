#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <vector>

namespace mithril {

using RowAddr = std::uint32_t;

// Row addresses are per-bank indices; 16-bit banks (65536 rows) by default.
inline constexpr std::int64_t kDefaultRowsPerBank = 65536;
inline constexpr RowAddr kUnusedRow = std::numeric_limits<RowAddr>::max();

// Ordering of b-bit wrapping counters, -1 / 0 / +1 for a < b, a == b, a > b.
// Correct as long as the true distance between the two values is below
// 2^(bits-1); the table keeps its spread well under that by construction.
int wrapped_compare(std::uint32_t a, std::uint32_t b, int bits);

// (a - b) mod 2^bits.
std::uint32_t wrapped_diff(std::uint32_t a, std::uint32_t b, int bits);

// Rows a preventive refresh covers for an aggressor: the immediate
// neighbours at radius 1, the three rows on each side at radius 3.
// Addresses outside [0, rows_per_bank) are dropped.
std::vector<RowAddr> victims_of(RowAddr row, int blast_radius, std::int64_t rows_per_bank);

struct TrackerEntry {
  RowAddr row = kUnusedRow;
  std::uint32_t count = 0;   // wrapped counter, counter_bits wide
  std::uint64_t shadow = 0;  // unbounded mirror of count, diagnostics only
};

struct RefreshDecision {
  bool refreshed = false;
  bool skipped_by_adaptive = false;
  std::optional<RowAddr> aggressor;
  std::vector<RowAddr> victims;
};

// Per-bank counter table. Replace-min insertion on activate, greedy
// max selection with decrement-to-min on RFM. Unused entries take part in
// min selection as count-0 candidates, so a cold table behaves like one
// whose entries were zero-filled.
class MithrilTable {
 public:
  // counter_bits must already satisfy 2^(counter_bits-1) > bound + rfm_th
  // for the intended configuration (see default_counter_bits).
  MithrilTable(std::int64_t n_entry, int counter_bits);

  // On a hit, bumps the matching counter; on a miss, the entry holding the
  // minimum takes over the incoming row and is bumped.
  void on_activate(RowAddr row);

  // Greedy step at an RFM command. With ad_th > 0 the refresh is skipped
  // (and nothing mutates) while the max-min spread is at or below ad_th.
  // Otherwise the max entry's row becomes the aggressor, its victims are
  // reported, and its counter drops to the table minimum.
  RefreshDecision on_rfm(std::int64_t ad_th, int blast_radius,
                         std::int64_t rows_per_bank = kDefaultRowsPerBank);

  // Mode-register view used by the controller-side skip protocol:
  // true when a preventive refresh is worth issuing.
  bool adaptive_flag(std::int64_t ad_th) const;

  // Estimated activate count of a row: its own counter when tracked, the
  // table minimum otherwise. Reported from the unbounded mirror so callers
  // can compare magnitudes across wraps.
  std::uint64_t estimated_count(RowAddr row) const;

  // Raw wrapped counter value for the same query.
  std::uint32_t wrapped_count(RowAddr row) const;

  std::optional<std::size_t> find(RowAddr row) const;

  std::size_t min_index() const { return min_index_; }
  std::size_t max_index() const { return max_index_; }
  std::uint64_t shadow_min() const { return entries_[min_index_].shadow; }
  std::uint64_t shadow_max() const { return entries_[max_index_].shadow; }
  std::uint32_t spread() const;  // wrapped max - min
  std::uint64_t total_acts() const { return total_acts_; }
  int counter_bits() const { return bits_; }
  std::int64_t n_entry() const { return static_cast<std::int64_t>(entries_.size()); }
  const std::vector<TrackerEntry>& entries() const { return entries_; }

  // One line per entry: row,shadow,wrapped. Unused entries print row=-1.
  void dump_csv(std::ostream& out) const;

 private:
  void rescan();

  std::vector<TrackerEntry> entries_;
  std::size_t min_index_ = 0;
  std::size_t max_index_ = 0;
  int bits_;
  std::uint32_t mask_;
  std::uint64_t total_acts_ = 0;
};

}  // namespace mithril
