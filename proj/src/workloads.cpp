#include "mithril/workloads.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "mithril/rng.hpp"

namespace mithril {

WorkloadKind workload_kind_from_string(const std::string& name) {
  if (name == "single_row") return WorkloadKind::kSingleRow;
  if (name == "round_robin_k") return WorkloadKind::kRoundRobinK;
  if (name == "multi_sided") return WorkloadKind::kMultiSided;
  if (name == "uniform_random") return WorkloadKind::kUniformRandom;
  if (name == "sweep") return WorkloadKind::kSweep;
  if (name == "parfm_worst") return WorkloadKind::kParfmWorst;
  if (name == "reactive_worst") return WorkloadKind::kReactiveWorst;
  if (name == "trace_file") return WorkloadKind::kTraceFile;
  throw std::invalid_argument("unknown workload kind: " + name);
}

std::string to_string(WorkloadKind kind) {
  switch (kind) {
    case WorkloadKind::kSingleRow: return "single_row";
    case WorkloadKind::kRoundRobinK: return "round_robin_k";
    case WorkloadKind::kMultiSided: return "multi_sided";
    case WorkloadKind::kUniformRandom: return "uniform_random";
    case WorkloadKind::kSweep: return "sweep";
    case WorkloadKind::kParfmWorst: return "parfm_worst";
    case WorkloadKind::kReactiveWorst: return "reactive_worst";
    case WorkloadKind::kTraceFile: return "trace_file";
  }
  return "?";
}

namespace {

void check_row(std::int64_t row, std::int64_t rows_per_bank) {
  if (row < 0 || row >= rows_per_bank) {
    throw std::invalid_argument("workload row " + std::to_string(row) +
                                " outside bank of " + std::to_string(rows_per_bank) +
                                " rows");
  }
}

std::vector<ActEvent> from_rows(const std::vector<RowAddr>& pattern, std::int64_t length,
                                int bank) {
  std::vector<ActEvent> events;
  events.reserve(static_cast<std::size_t>(length));
  for (std::int64_t i = 0; i < length; ++i) {
    ActEvent e;
    e.bank = bank;
    e.row = pattern[static_cast<std::size_t>(i % static_cast<std::int64_t>(pattern.size()))];
    e.seq = static_cast<std::uint64_t>(i);
    events.push_back(e);
  }
  return events;
}

}  // namespace

std::vector<ActEvent> generate(const WorkloadSpec& spec, std::int64_t rows_per_bank) {
  if (spec.kind == WorkloadKind::kTraceFile) return load_trace(spec.path, rows_per_bank);

  std::int64_t length = spec.length;
  if (spec.kind == WorkloadKind::kParfmWorst) {
    if (spec.rfm_th < 1) throw std::invalid_argument("parfm_worst needs rfm_th >= 1");
    if (spec.intervals >= 1) length = spec.rfm_th * spec.intervals;
  }
  if (length < 1) throw std::invalid_argument("workload length must be at least 1");

  switch (spec.kind) {
    case WorkloadKind::kSingleRow: {
      check_row(spec.row, rows_per_bank);
      return from_rows({spec.row}, length, spec.bank);
    }

    case WorkloadKind::kRoundRobinK: {
      std::vector<RowAddr> rows = spec.rows;
      if (rows.empty()) {
        if (spec.k < 1) throw std::invalid_argument("round_robin_k needs rows or k >= 1");
        for (std::int64_t i = 0; i < spec.k; ++i) {
          rows.push_back(spec.row + static_cast<RowAddr>(i));
        }
      }
      for (RowAddr r : rows) check_row(r, rows_per_bank);
      return from_rows(rows, length, spec.bank);
    }

    case WorkloadKind::kMultiSided: {
      // Aggressors at stride 2 over a contiguous region; every interior
      // victim sits between two of them. victims rows are disturbed total.
      if (spec.victims < 3) throw std::invalid_argument("multi_sided needs victims >= 3");
      const std::int64_t aggressors = spec.victims - 1;
      std::vector<RowAddr> rows;
      rows.reserve(static_cast<std::size_t>(aggressors));
      for (std::int64_t i = 0; i < aggressors; ++i) {
        const std::int64_t r = static_cast<std::int64_t>(spec.row) + 2 * i;
        check_row(r, rows_per_bank);
        rows.push_back(static_cast<RowAddr>(r));
      }
      if (spec.row < 1) throw std::invalid_argument("multi_sided base row must be >= 1");
      return from_rows(rows, length, spec.bank);
    }

    case WorkloadKind::kUniformRandom: {
      if (spec.footprint < 1) throw std::invalid_argument("uniform_random needs footprint");
      check_row(spec.footprint - 1, rows_per_bank);
      std::mt19937_64 rng(spec.seed);
      std::vector<ActEvent> events;
      events.reserve(static_cast<std::size_t>(length));
      for (std::int64_t i = 0; i < length; ++i) {
        ActEvent e;
        e.bank = spec.bank;
        e.row = static_cast<RowAddr>(bounded(rng, static_cast<std::uint64_t>(spec.footprint)));
        e.seq = static_cast<std::uint64_t>(i);
        events.push_back(e);
      }
      return events;
    }

    case WorkloadKind::kSweep: {
      // Streaming pass over a large footprint: `burst` back-to-back ACTs per
      // row, then move on, wrapping at the footprint edge.
      if (spec.footprint < 1 || spec.burst < 1) {
        throw std::invalid_argument("sweep needs footprint and burst");
      }
      check_row(static_cast<std::int64_t>(spec.row) + spec.footprint - 1, rows_per_bank);
      std::vector<ActEvent> events;
      events.reserve(static_cast<std::size_t>(length));
      for (std::int64_t i = 0; i < length; ++i) {
        ActEvent e;
        e.bank = spec.bank;
        e.row = spec.row + static_cast<RowAddr>((i / spec.burst) % spec.footprint);
        e.seq = static_cast<std::uint64_t>(i);
        events.push_back(e);
      }
      return events;
    }

    case WorkloadKind::kParfmWorst: {
      // One ACT per row, rfm_th fresh rows per interval: the pattern that
      // keeps a random sampler's per-row pick probability at its floor.
      std::vector<ActEvent> events;
      events.reserve(static_cast<std::size_t>(length));
      for (std::int64_t i = 0; i < length; ++i) {
        ActEvent e;
        e.bank = spec.bank;
        e.row = static_cast<RowAddr>(i % rows_per_bank);
        e.seq = static_cast<std::uint64_t>(i);
        events.push_back(e);
      }
      return events;
    }

    case WorkloadKind::kReactiveWorst: {
      // Many rows each pushed to `threshold` ACTs, one row at a time.
      if (spec.threshold < 1) throw std::invalid_argument("reactive_worst needs threshold");
      std::vector<ActEvent> events;
      events.reserve(static_cast<std::size_t>(length));
      for (std::int64_t i = 0; i < length; ++i) {
        const std::int64_t r = (i / spec.threshold) % rows_per_bank;
        ActEvent e;
        e.bank = spec.bank;
        e.row = static_cast<RowAddr>(r);
        e.seq = static_cast<std::uint64_t>(i);
        events.push_back(e);
      }
      return events;
    }

    case WorkloadKind::kTraceFile:
      break;  // handled above
  }
  throw std::logic_error("unhandled workload kind");
}

ReactiveWorstCase reactive_worst_case(std::int64_t threshold, std::int64_t rfm_th,
                                      const TimingParams& timing) {
  if (threshold < 1) throw std::invalid_argument("threshold must be at least 1");
  if (rfm_th < 1) throw std::invalid_argument("rfm_th must be at least 1");
  timing.validate();
  const double available = timing.t_refw * (1.0 - timing.t_rfc / timing.t_refi);
  const double per_act = timing.t_rc + timing.t_rfm / static_cast<double>(rfm_th);
  const double total_acts = available / per_act;
  ReactiveWorstCase r;
  r.rows_reaching =
      static_cast<std::int64_t>(std::floor(total_acts / static_cast<double>(threshold)));
  if (r.rows_reaching < 0) r.rows_reaching = 0;
  r.extra_wait_acts = r.rows_reaching * rfm_th;
  r.degraded_threshold = threshold + r.extra_wait_acts;
  return r;
}

std::vector<ActEvent> load_trace(const std::string& path, std::int64_t rows_per_bank) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace file: " + path);
  std::vector<ActEvent> events;
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& why) {
    throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + why + ": \"" +
                             line + "\"");
  };
  while (std::getline(in, line)) {
    ++lineno;
    std::string body = line;
    if (const auto hash = body.find('#'); hash != std::string::npos) {
      body = body.substr(0, hash);
    }
    const auto first = body.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = body.find_last_not_of(" \t\r");
    body = body.substr(first, last - first + 1);

    std::vector<std::string> fields;
    std::stringstream ss(body);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() < 2 || fields.size() > 3) fail("expected bank,row[,ts_ns]");

    ActEvent e;
    try {
      std::size_t used = 0;
      const long long bank = std::stoll(fields[0], &used);
      if (used != fields[0].size()) fail("bad bank field");
      const long long row = std::stoll(fields[1], &used);
      if (used != fields[1].size()) fail("bad row field");
      if (bank < 0) fail("bank out of range");
      if (row < 0 || row >= rows_per_bank) fail("row out of range");
      e.bank = static_cast<int>(bank);
      e.row = static_cast<RowAddr>(row);
      if (fields.size() == 3) {
        e.ts_ns = std::stod(fields[2], &used);
        if (used != fields[2].size()) fail("bad ts_ns field");
      }
    } catch (const std::invalid_argument&) {
      fail("not a number");
    } catch (const std::out_of_range&) {
      fail("value out of range");
    }
    e.seq = events.size();
    events.push_back(e);
  }
  return events;
}

}  // namespace mithril
