#pragma once

#include <cstdint>
#include <string>

namespace mithril {

// DRAM timing constants. All durations are in nanoseconds.
struct TimingParams {
  double t_refw = 0.0;  // refresh window: every row refreshed once per t_refw
  double t_refi = 0.0;  // refresh interval: one row group refreshed per tick
  double t_rfc = 0.0;   // time a refresh tick blocks the bank
  double t_rc = 0.0;    // row cycle time, minimum ACT-to-ACT spacing
  double t_rfm = 0.0;   // time an RFM command blocks the bank
  std::int64_t refresh_groups = 0;  // row groups per bank

  // Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

// DDR5-4800 style presets: tRFC 295 ns, tRC 48.64 ns, tRFM 97.28 ns,
// 8192 refresh groups. The 32 ms refresh window is the default; 64 ms is
// available as a named preset.
TimingParams ddr5_preset_32ms();
TimingParams ddr5_preset_64ms();

// Resolves "ddr5_32ms" / "ddr5_64ms"; anything else is treated as a path to
// a key=value file with the field names above (durations in ns).
TimingParams resolve_timing(const std::string& name_or_path);

TimingParams load_timing_file(const std::string& path);

}  // namespace mithril
