#include "mithril/cbs_table.hpp"

#include <stdexcept>

namespace mithril {

namespace {

std::uint32_t mask_for(int bits) {
  return bits >= 32 ? 0xFFFFFFFFu : ((1u << bits) - 1u);
}

}  // namespace

std::uint32_t wrapped_diff(std::uint32_t a, std::uint32_t b, int bits) {
  return (a - b) & mask_for(bits);
}

int wrapped_compare(std::uint32_t a, std::uint32_t b, int bits) {
  if (a == b) return 0;
  const std::uint32_t half = 1u << (bits - 1);
  return wrapped_diff(a, b, bits) < half ? 1 : -1;
}

std::vector<RowAddr> victims_of(RowAddr row, int blast_radius, std::int64_t rows_per_bank) {
  if (blast_radius != 1 && blast_radius != 3) {
    throw std::invalid_argument("blast_radius must be 1 or 3");
  }
  std::vector<RowAddr> victims;
  victims.reserve(2 * static_cast<std::size_t>(blast_radius));
  for (std::int64_t d = -blast_radius; d <= blast_radius; ++d) {
    if (d == 0) continue;
    const std::int64_t target = static_cast<std::int64_t>(row) + d;
    if (target >= 0 && target < rows_per_bank) {
      victims.push_back(static_cast<RowAddr>(target));
    }
  }
  return victims;
}

MithrilTable::MithrilTable(std::int64_t n_entry, int counter_bits)
    : bits_(counter_bits), mask_(mask_for(counter_bits)) {
  if (n_entry < 2) throw std::invalid_argument("table needs at least 2 entries");
  if (counter_bits < 2 || counter_bits > 32) {
    throw std::invalid_argument("counter_bits must be in [2, 32]");
  }
  entries_.resize(static_cast<std::size_t>(n_entry));
}

std::optional<std::size_t> MithrilTable::find(RowAddr row) const {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].row == row) return i;
  }
  return std::nullopt;
}

void MithrilTable::on_activate(RowAddr row) {
  const auto hit = find(row);
  TrackerEntry& e = hit ? entries_[*hit] : entries_[min_index_];
  e.row = row;
  e.count = (e.count + 1u) & mask_;
  e.shadow += 1;
  ++total_acts_;
  rescan();
}

RefreshDecision MithrilTable::on_rfm(std::int64_t ad_th, int blast_radius,
                                     std::int64_t rows_per_bank) {
  RefreshDecision decision;
  if (ad_th > 0 && static_cast<std::int64_t>(spread()) <= ad_th) {
    decision.skipped_by_adaptive = true;
    return decision;
  }
  TrackerEntry& aggressor = entries_[max_index_];
  if (aggressor.row == kUnusedRow) return decision;  // nothing tracked yet
  decision.refreshed = true;
  decision.aggressor = aggressor.row;
  decision.victims = victims_of(aggressor.row, blast_radius, rows_per_bank);
  aggressor.count = entries_[min_index_].count;
  aggressor.shadow = entries_[min_index_].shadow;
  rescan();
  return decision;
}

bool MithrilTable::adaptive_flag(std::int64_t ad_th) const {
  return static_cast<std::int64_t>(spread()) > ad_th;
}

std::uint32_t MithrilTable::spread() const {
  return wrapped_diff(entries_[max_index_].count, entries_[min_index_].count, bits_);
}

std::uint64_t MithrilTable::estimated_count(RowAddr row) const {
  const auto hit = find(row);
  return hit ? entries_[*hit].shadow : entries_[min_index_].shadow;
}

std::uint32_t MithrilTable::wrapped_count(RowAddr row) const {
  const auto hit = find(row);
  return hit ? entries_[*hit].count : entries_[min_index_].count;
}

void MithrilTable::rescan() {
  min_index_ = 0;
  max_index_ = 0;
  for (std::size_t i = 1; i < entries_.size(); ++i) {
    if (wrapped_compare(entries_[i].count, entries_[min_index_].count, bits_) < 0) {
      min_index_ = i;
    }
    if (wrapped_compare(entries_[i].count, entries_[max_index_].count, bits_) > 0) {
      max_index_ = i;
    }
  }
}

void MithrilTable::dump_csv(std::ostream& out) const {
  out << "row,shadow,wrapped\n";
  for (const TrackerEntry& e : entries_) {
    if (e.row == kUnusedRow) {
      out << "-1," << e.shadow << ',' << e.count << '\n';
    } else {
      out << e.row << ',' << e.shadow << ',' << e.count << '\n';
    }
  }
}

}  // namespace mithril
