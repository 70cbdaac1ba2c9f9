#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mithril/experiment.hpp"
#include "mithril/kv.hpp"

namespace {

struct CliState {
  mithril::ExperimentConfig cfg;
  std::string config_path;
  std::string kind;
  std::string rows_csv;
  std::string sweep_flip_csv;
  std::string sweep_rfm_csv;
};

std::vector<std::int64_t> parse_int_list(const std::string& csv) {
  std::vector<std::int64_t> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoll(item));
  return out;
}

void add_common_options(CLI::App* cmd, CliState& s) {
  cmd->add_option("--config", s.config_path, "key=value experiment config file");
  cmd->add_option("--timing", s.cfg.timing, "timing preset (ddr5_32ms, ddr5_64ms) or file");
  cmd->add_option("--seed", s.cfg.seed, "random seed, recorded in every report");
  cmd->add_option("--out", s.cfg.out, "report file (stdout when omitted)");
  cmd->add_option("--n_entry", s.cfg.mithril.n_entry, "tracker entries per bank");
  cmd->add_option("--rfm_th", s.cfg.mithril.rfm_th, "ACTs between RFM commands");
  cmd->add_option("--ad_th", s.cfg.mithril.ad_th, "adaptive refresh spread threshold");
  cmd->add_option("--flip_th", s.cfg.mithril.flip_th, "target disturbance threshold");
  cmd->add_option("--blast_radius", s.cfg.mithril.blast_radius, "1 or 3");
  cmd->add_option("--row_address_bits", s.cfg.row_address_bits, "address bits per entry");
}

void add_workload_options(CLI::App* cmd, CliState& s) {
  cmd->add_option("--kind", s.kind,
                  "single_row|round_robin_k|multi_sided|uniform_random|sweep|"
                  "parfm_worst|reactive_worst|trace_file");
  cmd->add_option("--length", s.cfg.workload.length, "events to generate");
  cmd->add_option("--row", s.cfg.workload.row, "base row");
  cmd->add_option("--rows", s.rows_csv, "explicit row set, comma separated");
  cmd->add_option("--k", s.cfg.workload.k, "round robin set size");
  cmd->add_option("--footprint", s.cfg.workload.footprint, "distinct rows touched");
  cmd->add_option("--victims", s.cfg.workload.victims, "rows disturbed by multi_sided");
  cmd->add_option("--burst", s.cfg.workload.burst, "sweep run length per row");
  cmd->add_option("--intervals", s.cfg.workload.intervals, "parfm_worst intervals");
  cmd->add_option("--threshold", s.cfg.workload.threshold, "reactive_worst ACTs per row");
  cmd->add_option("--path", s.cfg.workload.path, "trace file for kind=trace_file");
  cmd->add_option("--bank", s.cfg.workload.bank, "bank id carried by events");
  cmd->add_option("--rows_per_bank", s.cfg.rows_per_bank, "rows per bank");
  cmd->add_option("--horizon_ns", s.cfg.horizon_ns, "simulate refresh ticks up to here");
  cmd->add_flag("--mithril_plus", s.cfg.mithril_plus,
                "controller reads the flag and skips clear RFMs");
  cmd->add_option("--command_log", s.cfg.command_log, "write the command stream CSV here");
  cmd->add_option("--violations_out", s.cfg.violations_out, "write violation CSV here");
}

// The config file loads before command line parsing so explicit flags win.
std::string find_config_arg(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc) return argv[i + 1];
    if (arg.rfind("--config=", 0) == 0) return arg.substr(std::string("--config=").size());
  }
  return "";
}

int finish(CliState& s, mithril::RunMode mode) {
  s.cfg.mode = mode;
  if (!s.kind.empty()) s.cfg.workload.kind = mithril::workload_kind_from_string(s.kind);
  if (!s.rows_csv.empty()) {
    s.cfg.workload.rows.clear();
    for (std::int64_t r : parse_int_list(s.rows_csv)) {
      s.cfg.workload.rows.push_back(static_cast<mithril::RowAddr>(r));
    }
  }
  if (!s.sweep_flip_csv.empty()) s.cfg.sweep_flip_th = parse_int_list(s.sweep_flip_csv);
  if (!s.sweep_rfm_csv.empty()) s.cfg.sweep_rfm_th = parse_int_list(s.sweep_rfm_csv);
  s.cfg.workload.seed = s.cfg.seed;
  return mithril::run(s.cfg);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mithril RFM row-hammer protection: bounds, simulation, verification"};
  app.require_subcommand(1);

  CliState s;
  try {
    const std::string config_path = find_config_arg(argc, argv);
    if (!config_path.empty()) {
      mithril::apply_key_values(s.cfg, mithril::parse_key_value_file(config_path));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  CLI::App* bound = app.add_subcommand("bound", "closed-form safety report for one config");
  add_common_options(bound, s);

  CLI::App* sweep = app.add_subcommand(
      "sweep", "minimal table size over a (flip_th, rfm_th) grid, CSV output");
  add_common_options(sweep, s);
  sweep->add_option("--sweep_flip_th", s.sweep_flip_csv, "comma separated flip_th grid");
  sweep->add_option("--sweep_rfm_th", s.sweep_rfm_csv, "comma separated rfm_th grid");
  sweep->add_option("--jobs", s.cfg.jobs, "parallel workers");

  CLI::App* simulate =
      app.add_subcommand("simulate", "trace-driven run with energy and oracle verdict");
  add_common_options(simulate, s);
  add_workload_options(simulate, s);

  CLI::App* parfm = app.add_subcommand("parfm", "probabilistic baseline failure analysis");
  add_common_options(parfm, s);
  parfm->add_option("--target_prob", s.cfg.target_prob, "acceptable system failure");
  parfm->add_option("--n_banks", s.cfg.n_banks, "simultaneously attackable banks");

  CLI::App* verify = app.add_subcommand(
      "verify", "trace-driven run with the full invariant and bound audit");
  add_common_options(verify, s);
  add_workload_options(verify, s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (bound->parsed()) return finish(s, mithril::RunMode::kBound);
    if (sweep->parsed()) return finish(s, mithril::RunMode::kSweep);
    if (simulate->parsed()) return finish(s, mithril::RunMode::kSimulate);
    if (parfm->parsed()) return finish(s, mithril::RunMode::kParfm);
    if (verify->parsed()) return finish(s, mithril::RunMode::kVerify);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
