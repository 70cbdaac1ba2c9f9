#include "mithril/experiment.hpp"

#include <atomic>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "mithril/kv.hpp"
#include "mithril/parfm.hpp"

namespace mithril {

using nlohmann::json;

RunMode run_mode_from_string(const std::string& name) {
  if (name == "bound") return RunMode::kBound;
  if (name == "sweep") return RunMode::kSweep;
  if (name == "simulate") return RunMode::kSimulate;
  if (name == "parfm") return RunMode::kParfm;
  if (name == "verify") return RunMode::kVerify;
  throw std::invalid_argument("unknown mode: " + name);
}

std::string to_string(RunMode mode) {
  switch (mode) {
    case RunMode::kBound: return "bound";
    case RunMode::kSweep: return "sweep";
    case RunMode::kSimulate: return "simulate";
    case RunMode::kParfm: return "parfm";
    case RunMode::kVerify: return "verify";
  }
  return "?";
}

double energy_proxy(const EnergyReport& report, const EnergyWeights& weights) {
  if (weights.act < 0 || weights.pre < 0 || weights.victim_refresh < 0) {
    throw std::invalid_argument("energy weights must be non-negative");
  }
  return static_cast<double>(report.act_count) * weights.act +
         static_cast<double>(report.pre_count) * weights.pre +
         static_cast<double>(report.victim_rows_refreshed) * weights.victim_refresh;
}

EnergyReport tally_energy(const std::vector<IssuedCommand>& commands, int blast_radius,
                          std::int64_t rows_per_bank, const EnergyWeights& weights) {
  EnergyReport r;
  for (const IssuedCommand& cmd : commands) {
    switch (cmd.kind) {
      case CommandKind::kAct:
        ++r.act_count;
        break;
      case CommandKind::kRfm:
        ++r.rfm_issued;
        if (cmd.row) {
          ++r.preventive_refresh_count;
          r.victim_rows_refreshed += static_cast<std::int64_t>(
              victims_of(*cmd.row, blast_radius, rows_per_bank).size());
        }
        break;
      case CommandKind::kRfmSkipped:
        ++r.rfm_skipped;
        break;
      case CommandKind::kAutoref:
        break;
    }
  }
  r.pre_count = r.act_count;  // closed-per-access policy
  r.energy_proxy = energy_proxy(r, weights);
  return r;
}

namespace {

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write output file: " + path);
  out << text;
}

json timing_json(const std::string& name, const TimingParams& t) {
  return json{{"name", name},          {"t_refw", t.t_refw}, {"t_refi", t.t_refi},
              {"t_rfc", t.t_rfc},      {"t_rc", t.t_rc},     {"t_rfm", t.t_rfm},
              {"refresh_groups", t.refresh_groups}};
}

json config_json(const ExperimentConfig& cfg, const TimingParams& timing) {
  json workload{{"kind", to_string(cfg.workload.kind)},
                {"length", cfg.workload.length},
                {"seed", cfg.workload.seed},
                {"bank", cfg.workload.bank},
                {"row", cfg.workload.row},
                {"rows", cfg.workload.rows},
                {"k", cfg.workload.k},
                {"footprint", cfg.workload.footprint},
                {"victims", cfg.workload.victims},
                {"burst", cfg.workload.burst},
                {"rfm_th", cfg.workload.rfm_th},
                {"intervals", cfg.workload.intervals},
                {"threshold", cfg.workload.threshold},
                {"path", cfg.workload.path}};
  return json{{"schema_version", kReportSchemaVersion},
              {"mode", to_string(cfg.mode)},
              {"seed", cfg.seed},
              {"timing", timing_json(cfg.timing, timing)},
              {"mithril",
               {{"n_entry", cfg.mithril.n_entry},
                {"rfm_th", cfg.mithril.rfm_th},
                {"ad_th", cfg.mithril.ad_th},
                {"flip_th", cfg.mithril.flip_th},
                {"blast_radius", cfg.mithril.blast_radius}}},
              {"workload", workload},
              {"mithril_plus", cfg.mithril_plus},
              {"rows_per_bank", cfg.rows_per_bank},
              {"horizon_ns", cfg.horizon_ns},
              {"row_address_bits", cfg.row_address_bits}};
}

json bound_json(const BoundReport& r) {
  return json{{"w", r.w},           {"m", r.m},       {"m_adaptive", r.m_adaptive},
              {"n_star", r.n_star}, {"safe", r.safe}, {"margin", r.margin}};
}

json energy_json(const EnergyReport& r) {
  return json{{"act_count", r.act_count},
              {"pre_count", r.pre_count},
              {"preventive_refresh_count", r.preventive_refresh_count},
              {"victim_rows_refreshed", r.victim_rows_refreshed},
              {"rfm_issued", r.rfm_issued},
              {"rfm_skipped", r.rfm_skipped},
              {"energy_proxy", r.energy_proxy}};
}

json violations_json(const std::vector<Violation>& violations) {
  json arr = json::array();
  for (const Violation& v : violations) {
    arr.push_back(json{{"kind", to_string(v.kind)},
                       {"row", v.row},
                       {"at_seq", v.at_seq},
                       {"detail", v.detail}});
  }
  return arr;
}

int run_bound(const ExperimentConfig& cfg, const TimingParams& timing) {
  const BoundReport report = is_safe(cfg.mithril, timing);
  json out{{"config", config_json(cfg, timing)}, {"report", bound_json(report)}};
  if (report.safe) {
    const int bits = default_counter_bits(cfg.mithril, timing);
    out["report"]["counter_bits"] = bits;
    out["report"]["table_bytes"] =
        table_size_bytes(cfg.mithril.n_entry, cfg.row_address_bits, bits);
  }
  write_text(cfg.out, out.dump(2) + "\n");
  return 0;
}

int run_sweep(const ExperimentConfig& cfg, const TimingParams& timing) {
  struct Point {
    std::int64_t flip_th;
    std::int64_t rfm_th;
    std::optional<std::int64_t> min_n;
    double table_kb = 0.0;
  };
  std::vector<Point> points;
  for (const std::int64_t flip : cfg.sweep_flip_th) {
    for (const std::int64_t rfm : cfg.sweep_rfm_th) {
      points.push_back({flip, rfm, std::nullopt, 0.0});
    }
  }

  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::string first_error;
  auto worker = [&]() {
    try {
      for (std::size_t i = next.fetch_add(1); i < points.size(); i = next.fetch_add(1)) {
        Point& p = points[i];
        p.min_n = find_min_nentry(p.flip_th, p.rfm_th, cfg.mithril.ad_th, timing,
                                  cfg.mithril.blast_radius);
        if (p.min_n) {
          MithrilConfig mc = cfg.mithril;
          mc.n_entry = *p.min_n;
          mc.rfm_th = p.rfm_th;
          mc.flip_th = p.flip_th;
          const int bits = default_counter_bits(mc, timing);
          p.table_kb = table_size_bytes(*p.min_n, cfg.row_address_bits, bits) / 1024.0;
        }
      }
    } catch (const std::exception& e) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (first_error.empty()) first_error = e.what();
    }
  };
  const int jobs = std::max(1, cfg.jobs);
  std::vector<std::thread> pool;
  for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  if (!first_error.empty()) throw std::runtime_error("sweep point failed: " + first_error);

  std::ostringstream csv;
  csv << "# schema_version=" << kReportSchemaVersion << "\n";
  csv << "# mode=sweep seed=" << cfg.seed << " timing=" << cfg.timing
      << " ad_th=" << cfg.mithril.ad_th << " blast_radius=" << cfg.mithril.blast_radius
      << " row_address_bits=" << cfg.row_address_bits << "\n";
  csv << "flip_th,rfm_th,min_n_entry,table_kb\n";
  csv.precision(6);
  for (const Point& p : points) {
    if (!p.min_n) continue;  // point above the feasible curve
    csv << p.flip_th << ',' << p.rfm_th << ',' << *p.min_n << ',' << p.table_kb << '\n';
  }
  write_text(cfg.out, csv.str());
  return 0;
}

int run_parfm(const ExperimentConfig& cfg, const TimingParams& timing) {
  const std::int64_t horizon = max_rfm_intervals(timing, cfg.mithril.rfm_th);
  FailureModel model{cfg.mithril.rfm_th, cfg.mithril.flip_th, horizon, cfg.n_banks};
  const double fail1 = fail_single_row(model);
  const double sys = system_failure(fail1, cfg.n_banks);
  const auto solved = solve_rfm_th(cfg.mithril.flip_th, cfg.target_prob, cfg.n_banks, timing);
  json report{{"horizon_intervals", horizon},
              {"fail_single_row", fail1},
              {"system_failure", sys},
              {"target_prob", cfg.target_prob},
              {"n_banks", cfg.n_banks}};
  report["solved_rfm_th"] = solved ? json(*solved) : json();
  json out{{"config", config_json(cfg, timing)}, {"report", report}};
  write_text(cfg.out, out.dump(2) + "\n");
  return 0;
}

struct SimulationResult {
  std::vector<IssuedCommand> commands;
  EnergyReport energy;
  BoundReport bound;
  std::vector<Violation> violations;
  double overhead = 0.0;
};

SimulationResult simulate(const ExperimentConfig& cfg, const TimingParams& timing,
                          bool full_audit) {
  SimulationResult result;
  result.bound = is_safe(cfg.mithril, timing);

  int bits = 16;
  try {
    bits = default_counter_bits(cfg.mithril, timing);
  } catch (const std::domain_error&) {
    bits = 32;  // unsafe configs may overflow the sizing rule; cap for the run
  }
  MithrilTable table(cfg.mithril.n_entry, bits);

  BankController controller;
  controller.bank = cfg.workload.bank;
  controller.rfm_th = cfg.mithril.rfm_th;
  controller.mithril_plus = cfg.mithril_plus;

  const std::vector<ActEvent> events = generate(cfg.workload, cfg.rows_per_bank);

  InequalityAuditor ineq;
  const double applicable_bound =
      cfg.mithril.ad_th > 0 ? result.bound.m_adaptive : result.bound.m;
  GrowthBoundAuditor growth(applicable_bound, result.bound.w);
  growth.begin(table);

  DriveOptions options;
  options.rows_per_bank = cfg.rows_per_bank;
  options.horizon_ns = cfg.horizon_ns;
  if (full_audit) {
    options.hook = [&](DrivePhase phase, const IssuedCommand& cmd,
                       const MithrilTable& t) {
      std::optional<Violation> v;
      switch (phase) {
        case DrivePhase::kPostAct:
          v = ineq.after_activate(t, *cmd.row);
          break;
        case DrivePhase::kPreRfm:
          growth.sample_interval_end(t);
          break;
        case DrivePhase::kPostRfm: {
          RefreshDecision decision;
          decision.refreshed = cmd.row.has_value();
          if (cmd.row) decision.aggressor = *cmd.row;
          v = ineq.after_rfm(t, decision);
          growth.sample_interval_start(t);
          break;
        }
        case DrivePhase::kPostSkip:
          growth.sample_interval_end(t);
          growth.sample_interval_start(t);
          break;
        case DrivePhase::kPostAutoref:
          break;
      }
      if (v) result.violations.push_back(*v);
    };
  }

  result.commands = drive(controller, table, events, timing, cfg.mithril, options);
  result.energy = tally_energy(result.commands, cfg.mithril.blast_radius, cfg.rows_per_bank);
  result.overhead = time_overhead_fraction(result.commands, timing);

  OracleState oracle(cfg.mithril, cfg.rows_per_bank, timing.refresh_groups);
  for (const IssuedCommand& cmd : result.commands) {
    if (auto v = oracle.step(cmd)) result.violations.push_back(*v);
  }
  if (full_audit && growth.violation()) result.violations.push_back(*growth.violation());
  return result;
}

int run_simulation_mode(const ExperimentConfig& cfg, const TimingParams& timing,
                        bool full_audit) {
  SimulationResult result = simulate(cfg, timing, full_audit);

  if (!cfg.command_log.empty()) {
    std::ofstream log(cfg.command_log);
    if (!log) throw std::runtime_error("cannot write command log: " + cfg.command_log);
    write_command_csv(log, result.commands);
  }
  if (!cfg.violations_out.empty()) {
    std::ofstream out(cfg.violations_out);
    if (!out) throw std::runtime_error("cannot write violations: " + cfg.violations_out);
    write_violations_csv(out, result.violations);
  }

  json out{{"config", config_json(cfg, timing)},
           {"bound", bound_json(result.bound)},
           {"energy", energy_json(result.energy)},
           {"time_overhead_fraction", result.overhead},
           {"commands", result.commands.size()},
           {"violations", violations_json(result.violations)},
           {"clean", result.violations.empty()}};
  write_text(cfg.out, out.dump(2) + "\n");
  return result.violations.empty() ? 0 : 1;
}

}  // namespace

void apply_key_values(ExperimentConfig& cfg,
                      const std::map<std::string, std::string>& kv) {
  auto geti = [](const std::string& v) { return std::stoll(v); };
  auto getd = [](const std::string& v) { return std::stod(v); };
  auto getb = [](const std::string& v) {
    if (v == "1" || v == "true" || v == "yes") return true;
    if (v == "0" || v == "false" || v == "no") return false;
    throw std::invalid_argument("expected boolean, got " + v);
  };
  auto get_list = [&](const std::string& v) {
    std::vector<std::int64_t> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(geti(item));
    return out;
  };

  for (const auto& [key, value] : kv) {
    if (key == "mode") cfg.mode = run_mode_from_string(value);
    else if (key == "timing") cfg.timing = value;
    else if (key == "n_entry") cfg.mithril.n_entry = geti(value);
    else if (key == "rfm_th") cfg.mithril.rfm_th = geti(value);
    else if (key == "ad_th") cfg.mithril.ad_th = geti(value);
    else if (key == "flip_th") cfg.mithril.flip_th = geti(value);
    else if (key == "blast_radius") cfg.mithril.blast_radius = static_cast<int>(geti(value));
    else if (key == "kind") cfg.workload.kind = workload_kind_from_string(value);
    else if (key == "length") cfg.workload.length = geti(value);
    else if (key == "row") cfg.workload.row = static_cast<RowAddr>(geti(value));
    else if (key == "rows") {
      cfg.workload.rows.clear();
      for (std::int64_t r : get_list(value)) {
        cfg.workload.rows.push_back(static_cast<RowAddr>(r));
      }
    }
    else if (key == "k") cfg.workload.k = geti(value);
    else if (key == "footprint") cfg.workload.footprint = geti(value);
    else if (key == "victims") cfg.workload.victims = geti(value);
    else if (key == "burst") cfg.workload.burst = geti(value);
    else if (key == "workload_rfm_th") cfg.workload.rfm_th = geti(value);
    else if (key == "intervals") cfg.workload.intervals = geti(value);
    else if (key == "threshold") cfg.workload.threshold = geti(value);
    else if (key == "path") cfg.workload.path = value;
    else if (key == "bank") cfg.workload.bank = static_cast<int>(geti(value));
    else if (key == "seed") { cfg.seed = static_cast<std::uint64_t>(geti(value));
                              cfg.workload.seed = cfg.seed; }
    else if (key == "mithril_plus") cfg.mithril_plus = getb(value);
    else if (key == "rows_per_bank") cfg.rows_per_bank = geti(value);
    else if (key == "horizon_ns") cfg.horizon_ns = getd(value);
    else if (key == "row_address_bits") cfg.row_address_bits = static_cast<int>(geti(value));
    else if (key == "out") cfg.out = value;
    else if (key == "command_log") cfg.command_log = value;
    else if (key == "violations_out") cfg.violations_out = value;
    else if (key == "sweep_flip_th") cfg.sweep_flip_th = get_list(value);
    else if (key == "sweep_rfm_th") cfg.sweep_rfm_th = get_list(value);
    else if (key == "jobs") cfg.jobs = static_cast<int>(geti(value));
    else if (key == "target_prob") cfg.target_prob = getd(value);
    else if (key == "n_banks") cfg.n_banks = geti(value);
    else throw std::invalid_argument("unknown config key: " + key);
  }
}

int run(const ExperimentConfig& config) {
  try {
    ExperimentConfig cfg = config;
    if (cfg.workload.kind == WorkloadKind::kParfmWorst && cfg.workload.rfm_th == 0) {
      cfg.workload.rfm_th = cfg.mithril.rfm_th;  // follow the controller cadence
    }
    const TimingParams timing = resolve_timing(cfg.timing);
    timing.validate();
    switch (cfg.mode) {
      case RunMode::kBound: return run_bound(cfg, timing);
      case RunMode::kSweep: return run_sweep(cfg, timing);
      case RunMode::kParfm: return run_parfm(cfg, timing);
      case RunMode::kSimulate: return run_simulation_mode(cfg, timing, false);
      case RunMode::kVerify: return run_simulation_mode(cfg, timing, true);
    }
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace mithril
