#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mithril/cbs_table.hpp"
#include "mithril/timing.hpp"

namespace mithril {

// One activate command. Generated streams leave ts_ns empty; trace files may
// carry timestamps for the paced replay mode.
struct ActEvent {
  int bank = 0;
  RowAddr row = 0;
  std::uint64_t seq = 0;
  std::optional<double> ts_ns;
};

enum class WorkloadKind {
  kSingleRow,      // hammer one row
  kRoundRobinK,    // cycle a fixed set of k rows
  kMultiSided,     // stride-2 aggressors disturbing `victims` rows
  kUniformRandom,  // uniform rows over a footprint
  kSweep,          // large-object sweep: bursts of same-row ACTs
  kParfmWorst,     // rfm_th fresh rows, one ACT each, per RFM interval
  kReactiveWorst,  // blocks of `threshold` ACTs per row, many rows
  kTraceFile,      // external trace
};

WorkloadKind workload_kind_from_string(const std::string& name);
std::string to_string(WorkloadKind kind);

struct WorkloadSpec {
  WorkloadKind kind = WorkloadKind::kSingleRow;
  std::int64_t length = 0;  // events to emit (derived for parfm_worst)
  std::uint64_t seed = 0;
  int bank = 0;
  RowAddr row = 1024;           // base row for single_row/multi_sided/sweep
  std::vector<RowAddr> rows;    // explicit row set for round_robin_k
  std::int64_t k = 0;           // round_robin_k set size when rows is empty
  std::int64_t footprint = 0;   // distinct rows for uniform_random/sweep
  std::int64_t victims = 32;    // rows disturbed by multi_sided
  std::int64_t burst = 128;     // same-row run length for sweep
  std::int64_t rfm_th = 0;      // parfm_worst cadence
  std::int64_t intervals = 0;   // parfm_worst interval count
  std::int64_t threshold = 0;   // reactive_worst per-row ACT count
  std::string path;             // trace_file source
};

// Deterministic: the same spec and rows_per_bank always yield the same
// event sequence. Throws when the spec references rows outside the bank.
std::vector<ActEvent> generate(const WorkloadSpec& spec,
                               std::int64_t rows_per_bank = kDefaultRowsPerBank);

// How far a buffered reactive scheme degrades under a periodic command
// budget: rows_reaching rows can hit `threshold` ACTs inside one refresh
// window, so the last buffered aggressor waits through rows_reaching *
// rfm_th further ACTs before its victims are refreshed.
struct ReactiveWorstCase {
  std::int64_t rows_reaching = 0;
  std::int64_t extra_wait_acts = 0;
  std::int64_t degraded_threshold = 0;
};

ReactiveWorstCase reactive_worst_case(std::int64_t threshold, std::int64_t rfm_th,
                                      const TimingParams& timing);

// Text traces, one event per line: bank,row[,ts_ns]. `#` starts a comment.
// Parse errors report the offending line number.
std::vector<ActEvent> load_trace(const std::string& path,
                                 std::int64_t rows_per_bank = kDefaultRowsPerBank);

}  // namespace mithril
