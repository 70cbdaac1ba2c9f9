#include "mithril/oracle.hpp"

#include <sstream>
#include <stdexcept>

namespace mithril {

std::string to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kFlipThReached: return "FLIP_TH_REACHED";
    case ViolationKind::kIneq1: return "INEQ1";
    case ViolationKind::kIneq2: return "INEQ2";
    case ViolationKind::kBoundM: return "BOUND_M";
  }
  return "?";
}

void write_violations_csv(std::ostream& out, const std::vector<Violation>& violations) {
  out << "kind,row,at_seq,detail\n";
  for (const Violation& v : violations) {
    std::string detail = v.detail;
    for (char& c : detail) {
      if (c == ',' || c == '\n') c = ';';
    }
    out << to_string(v.kind) << ',' << v.row << ',' << v.at_seq << ',' << detail << '\n';
  }
}

OracleState::OracleState(const MithrilConfig& cfg, std::int64_t rows_per_bank,
                         std::int64_t refresh_groups)
    : flip_th_(cfg.flip_th),
      blast_radius_(cfg.blast_radius),
      rows_per_bank_(rows_per_bank),
      refresh_groups_(refresh_groups) {
  cfg.validate();
  if (rows_per_bank < 1 || refresh_groups < 1) {
    throw std::invalid_argument("oracle: bad bank geometry");
  }
  // Per-side disturbance by distance; both sides of radius 3 add up to 3.5.
  weights_ = blast_radius_ == 1 ? std::vector<double>{1.0}
                                : std::vector<double>{1.0, 0.5, 0.25};
}

void OracleState::reset_row(RowAddr row) {
  disturbance_.erase(row);
  acts_.erase(row);
}

std::optional<Violation> OracleState::step(const IssuedCommand& cmd) {
  const std::uint64_t seq = seq_++;
  switch (cmd.kind) {
    case CommandKind::kAct: {
      const RowAddr row = *cmd.row;
      acts_[row] += 1;
      for (int d = 1; d <= blast_radius_; ++d) {
        for (int side = -1; side <= 1; side += 2) {
          const std::int64_t victim = static_cast<std::int64_t>(row) + side * d;
          if (victim < 0 || victim >= rows_per_bank_) continue;
          const RowAddr v = static_cast<RowAddr>(victim);
          const double level = (disturbance_[v] += weights_[static_cast<std::size_t>(d - 1)]);
          if (level >= static_cast<double>(flip_th_) && !reported_.count(v)) {
            reported_.insert(v);
            std::ostringstream detail;
            detail << "disturbance " << level << " reached flip_th " << flip_th_;
            return Violation{ViolationKind::kFlipThReached, v, seq, detail.str()};
          }
        }
      }
      return std::nullopt;
    }
    case CommandKind::kRfm: {
      if (!cmd.row) return std::nullopt;  // issued but nothing refreshed
      const RowAddr aggressor = *cmd.row;
      for (int d = 1; d <= blast_radius_; ++d) {
        for (int side = -1; side <= 1; side += 2) {
          const std::int64_t victim = static_cast<std::int64_t>(aggressor) + side * d;
          if (victim < 0 || victim >= rows_per_bank_) continue;
          reset_row(static_cast<RowAddr>(victim));
        }
      }
      return std::nullopt;
    }
    case CommandKind::kRfmSkipped:
      return std::nullopt;
    case CommandKind::kAutoref: {
      const std::int64_t group = *cmd.group;
      auto covered = [&](RowAddr row) {
        return static_cast<std::int64_t>(row) % refresh_groups_ == group;
      };
      for (auto it = disturbance_.begin(); it != disturbance_.end();) {
        it = covered(it->first) ? disturbance_.erase(it) : std::next(it);
      }
      for (auto it = acts_.begin(); it != acts_.end();) {
        it = covered(it->first) ? acts_.erase(it) : std::next(it);
      }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

double OracleState::disturbance(RowAddr row) const {
  const auto it = disturbance_.find(row);
  return it == disturbance_.end() ? 0.0 : it->second;
}

std::int64_t OracleState::acts_since_refresh(RowAddr row) const {
  const auto it = acts_.find(row);
  return it == acts_.end() ? 0 : it->second;
}

void InequalityAuditor::sync_residents(const MithrilTable& table) {
  resident_.clear();
  for (const TrackerEntry& e : table.entries()) {
    if (e.row != kUnusedRow) resident_.insert(e.row);
  }
}

std::optional<Violation> InequalityAuditor::check_all(const MithrilTable& table) {
  const std::uint64_t min = table.shadow_min();
  for (const auto& [row, actual] : actual_) {
    const std::uint64_t estimate = table.estimated_count(row);
    if (actual > estimate) {
      std::ostringstream detail;
      detail << "actual " << actual << " > estimate " << estimate;
      return Violation{ViolationKind::kIneq1, row, seq_, detail.str()};
    }
    if (estimate > actual + min) {
      std::ostringstream detail;
      detail << "estimate " << estimate << " > actual " << actual << " + min " << min;
      return Violation{ViolationKind::kIneq2, row, seq_, detail.str()};
    }
  }
  return std::nullopt;
}

std::optional<Violation> InequalityAuditor::after_activate(const MithrilTable& table,
                                                           RowAddr row) {
  ++seq_;
  // A replace-min insertion starts a fresh accounting epoch for the row.
  if (!resident_.count(row)) actual_[row] = 0;
  actual_[row] += 1;
  sync_residents(table);
  return check_all(table);
}

std::optional<Violation> InequalityAuditor::after_rfm(const MithrilTable& table,
                                                      const RefreshDecision& decision) {
  ++seq_;
  if (decision.refreshed && decision.aggressor) {
    actual_[*decision.aggressor] = 0;  // decremented to min alongside the refresh
  }
  sync_residents(table);
  return check_all(table);
}

GrowthBoundAuditor::GrowthBoundAuditor(double bound, std::int64_t window_intervals)
    : bound_(bound), window_intervals_(window_intervals) {
  if (window_intervals < 1) throw std::invalid_argument("window must be at least 1");
}

void GrowthBoundAuditor::push(Series& series, RowAddr row, std::uint64_t estimate) {
  auto& window = series.window_minima;
  const std::int64_t oldest = interval_ - window_intervals_ + 1;
  while (!window.empty() && window.front().interval < oldest) window.pop_front();
  if (!window.empty() && !violation_) {
    const std::uint64_t floor = window.front().estimate;
    if (estimate > floor &&
        static_cast<double>(estimate - floor) > bound_) {
      std::ostringstream detail;
      detail << "estimate grew by " << (estimate - floor) << " > bound " << bound_
             << " within " << window_intervals_ << " intervals";
      violation_ = Violation{ViolationKind::kBoundM, row,
                             static_cast<std::uint64_t>(interval_), detail.str()};
    }
  }
  while (!window.empty() && window.back().estimate >= estimate) window.pop_back();
  window.push_back({interval_, estimate});
}

void GrowthBoundAuditor::sample(const MithrilTable& table) {
  for (const TrackerEntry& e : table.entries()) {
    if (e.row == kUnusedRow || seen_.count(e.row)) continue;
    seen_.insert(e.row);
    // Before its first insertion the row's estimate was the table minimum,
    // so it inherits the minimum's history.
    rows_[e.row] = off_table_;
  }
  for (RowAddr row : seen_) {
    push(rows_[row], row, table.estimated_count(row));
  }
  // Rows that never entered the table share the minimum as their estimate.
  push(off_table_, kUnusedRow, table.shadow_min());
}

void GrowthBoundAuditor::begin(const MithrilTable& table) { sample(table); }

void GrowthBoundAuditor::sample_interval_end(const MithrilTable& table) {
  sample(table);
}

void GrowthBoundAuditor::sample_interval_start(const MithrilTable& table) {
  ++interval_;
  sample(table);
}

}  // namespace mithril
