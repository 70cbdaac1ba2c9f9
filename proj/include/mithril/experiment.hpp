#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mithril/bounds.hpp"
#include "mithril/controller.hpp"
#include "mithril/oracle.hpp"
#include "mithril/timing.hpp"
#include "mithril/workloads.hpp"

namespace mithril {

inline constexpr int kReportSchemaVersion = 1;

enum class RunMode { kBound, kSweep, kSimulate, kParfm, kVerify };

RunMode run_mode_from_string(const std::string& name);
std::string to_string(RunMode mode);

struct EnergyWeights {
  double act = 1.0;
  double pre = 1.0;
  double victim_refresh = 2.0;  // per victim row actually refreshed
};

// Arbitrary-unit activity accounting for one simulated run. The data path
// closes the row after every access, so precharges track activates.
struct EnergyReport {
  std::int64_t act_count = 0;
  std::int64_t pre_count = 0;
  std::int64_t preventive_refresh_count = 0;  // RFMs that refreshed victims
  std::int64_t victim_rows_refreshed = 0;
  std::int64_t rfm_issued = 0;
  std::int64_t rfm_skipped = 0;
  double energy_proxy = 0.0;
};

double energy_proxy(const EnergyReport& report, const EnergyWeights& weights = {});

EnergyReport tally_energy(const std::vector<IssuedCommand>& commands, int blast_radius,
                          std::int64_t rows_per_bank,
                          const EnergyWeights& weights = {});

struct ExperimentConfig {
  RunMode mode = RunMode::kBound;
  std::string timing = "ddr5_32ms";  // preset name or key=value file path
  MithrilConfig mithril{.n_entry = 256, .rfm_th = 128, .ad_th = 0, .flip_th = 6250,
                        .blast_radius = 1};
  WorkloadSpec workload;
  bool mithril_plus = false;
  std::int64_t rows_per_bank = kDefaultRowsPerBank;
  double horizon_ns = 0.0;
  std::uint64_t seed = 0;
  int row_address_bits = 16;

  std::string out;             // report file; stdout when empty
  std::string command_log;     // optional command CSV (simulate/verify)
  std::string violations_out;  // optional violation CSV (simulate/verify)

  // sweep mode grid
  std::vector<std::int64_t> sweep_flip_th{1500, 3125, 6250, 12500, 25000, 50000};
  std::vector<std::int64_t> sweep_rfm_th{32, 64, 128, 256};
  int jobs = 1;

  // parfm mode
  double target_prob = 1e-15;
  std::int64_t n_banks = 64;
};

// Populates fields from a key=value file; flags parsed later override.
void apply_key_values(ExperimentConfig& cfg,
                      const std::map<std::string, std::string>& kv);

// Executes one experiment and writes its artifacts.
// Exit status: 0 clean, 1 a violation was found, 2 configuration error.
int run(const ExperimentConfig& cfg);

}  // namespace mithril
