#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "mithril/bounds.hpp"
#include "mithril/cbs_table.hpp"
#include "mithril/timing.hpp"
#include "mithril/workloads.hpp"

namespace mithril {

enum class CommandKind { kAct, kRfm, kRfmSkipped, kAutoref };

std::string to_string(CommandKind kind);

struct IssuedCommand {
  CommandKind kind = CommandKind::kAct;
  // ACT target row, or the aggressor whose victims an RFM refreshed.
  // An RFM the tracker declined (adaptive skip) carries no row.
  std::optional<RowAddr> row;
  std::optional<std::int64_t> group;  // AUTOREF row group
  double at_ns = 0.0;
};

// Per-bank issue logic: a rolling ACT counter that triggers one RFM (or one
// skipped slot under the flag-query protocol) every rfm_th activates.
struct BankController {
  int bank = 0;
  std::int64_t rfm_th = 1;
  bool mithril_plus = false;  // query the tracker flag instead of always issuing
  std::int64_t raa = 0;       // rolling accumulated ACT count
  double now_ns = 0.0;
  double next_ref_ns = 0.0;   // set to t_refi on the first drive call
  std::int64_t ref_group_cursor = 0;
};

enum class DrivePhase { kPostAct, kPreRfm, kPostRfm, kPostSkip, kPostAutoref };

using DriveHook =
    std::function<void(DrivePhase, const IssuedCommand&, const MithrilTable&)>;

struct DriveOptions {
  std::int64_t rows_per_bank = kDefaultRowsPerBank;
  double horizon_ns = 0.0;  // keep emitting refresh ticks up to this time
  // Honor trace timestamps instead of back-to-back ACT pacing. Realistic for
  // benign replays; the worst-case bound checks never use it.
  bool paced = false;
  DriveHook hook;
};

// Runs the stream against one bank. ACTs advance the clock by t_rc and feed
// the tracker; every rfm_th ACTs the controller either spends t_rfm on an
// RFM or, under the flag-query protocol with a clear flag, skips it for
// free. Refresh ticks fire at t_refi cadence (t_rfc each) ahead of the ACT
// that crosses them.
std::vector<IssuedCommand> drive(BankController& controller, MithrilTable& tracker,
                                 std::span<const ActEvent> stream,
                                 const TimingParams& timing, const MithrilConfig& cfg,
                                 const DriveOptions& options = {});

// Fraction of elapsed time spent inside RFM windows; the artifact's
// stand-in for the scheme's slowdown.
double time_overhead_fraction(const std::vector<IssuedCommand>& commands,
                              const TimingParams& timing);

// at_ns,kind,row,group with empty cells for absent fields.
void write_command_csv(std::ostream& out, const std::vector<IssuedCommand>& commands);

}  // namespace mithril
