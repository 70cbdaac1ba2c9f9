#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "mithril/bounds.hpp"
#include "mithril/cbs_table.hpp"
#include "mithril/controller.hpp"

namespace mithril {

enum class ViolationKind { kFlipThReached, kIneq1, kIneq2, kBoundM };

std::string to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  RowAddr row = 0;
  std::uint64_t at_seq = 0;
  std::string detail;
};

void write_violations_csv(std::ostream& out, const std::vector<Violation>& violations);

// Ground-truth disturbance accounting, maintained from the command log
// alone. Shares no code with the tracker: victims of a preventive refresh
// are recomputed here from the aggressor address.
class OracleState {
 public:
  OracleState(const MithrilConfig& cfg, std::int64_t rows_per_bank,
              std::int64_t refresh_groups);

  // Feed commands in simulation order. Returns a violation the first time a
  // row's accumulated disturbance reaches flip_th (once per row).
  std::optional<Violation> step(const IssuedCommand& cmd);

  double disturbance(RowAddr row) const;
  std::int64_t acts_since_refresh(RowAddr row) const;

 private:
  void reset_row(RowAddr row);

  std::int64_t flip_th_;
  int blast_radius_;
  std::vector<double> weights_;  // disturbance per ACT at distance 1..blast
  std::int64_t rows_per_bank_;
  std::int64_t refresh_groups_;
  std::uint64_t seq_ = 0;
  std::unordered_map<RowAddr, double> disturbance_;
  std::unordered_map<RowAddr, std::int64_t> acts_;
  std::unordered_set<RowAddr> reported_;
};

// Checks the two counter-summary estimate bounds after every tracker
// mutation, against its own unbounded activity ledger:
//   actual count since a row's last insertion or decrement <= estimate
//   estimate <= that actual count + table minimum
class InequalityAuditor {
 public:
  std::optional<Violation> after_activate(const MithrilTable& table, RowAddr row);
  std::optional<Violation> after_rfm(const MithrilTable& table,
                                     const RefreshDecision& decision);

 private:
  std::optional<Violation> check_all(const MithrilTable& table);
  void sync_residents(const MithrilTable& table);

  std::unordered_map<RowAddr, std::uint64_t> actual_;
  std::unordered_set<RowAddr> resident_;
  std::uint64_t seq_ = 0;
};

// Watches estimated counts at RFM interval boundaries and flags any row
// whose estimate grows by more than the bound across a window of
// window_intervals consecutive intervals. Built for the mutation self-test
// too: pass a deliberately lowered bound and it must fire.
class GrowthBoundAuditor {
 public:
  GrowthBoundAuditor(double bound, std::int64_t window_intervals);

  void begin(const MithrilTable& table);                  // sample of interval 0
  void sample_interval_end(const MithrilTable& table);    // right before an RFM slot
  void sample_interval_start(const MithrilTable& table);  // right after an RFM slot

  const std::optional<Violation>& violation() const { return violation_; }

 private:
  void sample(const MithrilTable& table);

  struct Sample {
    std::int64_t interval;
    std::uint64_t estimate;
  };
  struct Series {
    std::deque<Sample> window_minima;  // increasing estimates, sliding window
  };

  double bound_;
  std::int64_t window_intervals_;
  std::int64_t interval_ = 0;
  std::unordered_map<RowAddr, Series> rows_;
  Series off_table_;  // the table minimum doubles as every untracked row
  std::unordered_set<RowAddr> seen_;
  std::optional<Violation> violation_;

  void push(Series& series, RowAddr row, std::uint64_t estimate);
};

}  // namespace mithril
