#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <set>

#include "mithril/cbs_table.hpp"
#include "mithril/workloads.hpp"

using namespace mithril;

namespace {

std::vector<RowAddr> rows_of(const std::vector<ActEvent>& events) {
  std::vector<RowAddr> rows;
  for (const auto& e : events) rows.push_back(e.row);
  return rows;
}

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& contents) {
    path = std::string("workload_test_") + std::to_string(counter()++) + ".trace";
    std::ofstream out(path);
    out << contents;
  }
  ~TempFile() { std::remove(path.c_str()); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

}  // namespace

TEST_CASE("single row and round robin generators") {
  WorkloadSpec spec;
  spec.kind = WorkloadKind::kSingleRow;
  spec.row = 7;
  spec.length = 5;
  CHECK(rows_of(generate(spec)) == std::vector<RowAddr>{7, 7, 7, 7, 7});

  WorkloadSpec rr;
  rr.kind = WorkloadKind::kRoundRobinK;
  rr.rows = {3, 9};
  rr.length = 4;
  CHECK(rows_of(generate(rr)) == std::vector<RowAddr>{3, 9, 3, 9});

  WorkloadSpec rrk;
  rrk.kind = WorkloadKind::kRoundRobinK;
  rrk.row = 100;
  rrk.k = 3;
  rrk.length = 6;
  CHECK(rows_of(generate(rrk)) == std::vector<RowAddr>{100, 101, 102, 100, 101, 102});
}

TEST_CASE("sequence numbers are dense and increasing") {
  WorkloadSpec spec;
  spec.kind = WorkloadKind::kUniformRandom;
  spec.footprint = 32;
  spec.length = 100;
  const auto events = generate(spec);
  for (std::size_t i = 0; i < events.size(); ++i) {
    CHECK(events[i].seq == i);
  }
}

TEST_CASE("generators are deterministic in the seed") {
  WorkloadSpec spec;
  spec.kind = WorkloadKind::kUniformRandom;
  spec.footprint = 64;
  spec.length = 500;
  spec.seed = 77;
  const auto a = generate(spec);
  const auto b = generate(spec);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].row == b[i].row);

  spec.seed = 78;
  const auto c = generate(spec);
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) differs |= a[i].row != c[i].row;
  CHECK(differs);
}

TEST_CASE("multi-sided pattern disturbs exactly the declared victims") {
  WorkloadSpec spec;
  spec.kind = WorkloadKind::kMultiSided;
  spec.row = 1000;
  spec.victims = 32;
  spec.length = 310;
  const auto events = generate(spec);

  std::set<RowAddr> aggressors;
  std::set<RowAddr> disturbed;
  for (const auto& e : events) {
    aggressors.insert(e.row);
    for (RowAddr v : victims_of(e.row, 1, kDefaultRowsPerBank)) disturbed.insert(v);
  }
  CHECK(aggressors.size() == 31);  // stride-2 aggressors
  CHECK(disturbed.size() == 32);   // declared victim count
}

TEST_CASE("sweep emits bursts of identical rows") {
  WorkloadSpec spec;
  spec.kind = WorkloadKind::kSweep;
  spec.row = 0;
  spec.footprint = 4;
  spec.burst = 3;
  spec.length = 14;
  CHECK(rows_of(generate(spec)) ==
        std::vector<RowAddr>{0, 0, 0, 1, 1, 1, 2, 2, 2, 3, 3, 3, 0, 0});
}

TEST_CASE("sampler worst case: one activate per row, fresh rows per interval") {
  WorkloadSpec spec;
  spec.kind = WorkloadKind::kParfmWorst;
  spec.rfm_th = 4;
  spec.intervals = 2;
  const auto events = generate(spec);
  REQUIRE(events.size() == 8);
  std::set<RowAddr> distinct;
  for (const auto& e : events) distinct.insert(e.row);
  CHECK(distinct.size() == 8);
}

TEST_CASE("reactive-baseline degradation accounting") {
  SUBCASE("ddr5 numbers at threshold 2000, cadence 64") {
    // Direct arithmetic: 32e6 * (1 - 295/3906.25) ns of activate time,
    // 48.64 + 97.28/64 ns per activate.
    const double total = 29583360.0 / (48.64 + 97.28 / 64.0);
    const auto expect = static_cast<std::int64_t>(total / 2000.0);
    const ReactiveWorstCase rwc = reactive_worst_case(2000, 64, ddr5_preset_32ms());
    CHECK(rwc.rows_reaching == expect);
    CHECK(rwc.rows_reaching == 294);
    CHECK(rwc.extra_wait_acts == 294 * 64);
    CHECK(rwc.degraded_threshold == 2000 + 294 * 64);
    // Within 10% of the 310-row figure this models.
    CHECK(std::abs(static_cast<double>(rwc.rows_reaching) - 310.0) / 310.0 < 0.10);
  }
  SUBCASE("threshold above the total act budget degrades nothing") {
    const ReactiveWorstCase rwc = reactive_worst_case(1000000, 64, ddr5_preset_32ms());
    CHECK(rwc.rows_reaching == 0);
    CHECK(rwc.degraded_threshold == 1000000);
  }
  SUBCASE("monotone in cadence, antitone in threshold") {
    std::int64_t prev = reactive_worst_case(2000, 16, ddr5_preset_32ms()).degraded_threshold;
    for (const std::int64_t rfm : {32, 64, 128, 256}) {
      const std::int64_t cur =
          reactive_worst_case(2000, rfm, ddr5_preset_32ms()).degraded_threshold;
      CHECK(cur > prev);
      prev = cur;
    }
    prev = reactive_worst_case(500, 64, ddr5_preset_32ms()).degraded_threshold;
    for (const std::int64_t threshold : {1000, 1500, 2000, 2500}) {
      const std::int64_t cur =
          reactive_worst_case(threshold, 64, ddr5_preset_32ms()).degraded_threshold;
      CHECK(cur < prev);
      prev = cur;
    }
  }
  SUBCASE("zero cadence is rejected") {
    CHECK_THROWS_AS(reactive_worst_case(2000, 0, ddr5_preset_32ms()),
                    std::invalid_argument);
  }
}

TEST_CASE("trace files parse with line diagnostics") {
  SUBCASE("bank,row and optional timestamp") {
    TempFile f("# header comment\n0,42\n0,42,1500\n\n1,7 # trailing comment\n");
    const auto events = load_trace(f.path);
    REQUIRE(events.size() == 3);
    CHECK(events[0].bank == 0);
    CHECK(events[0].row == 42);
    CHECK_FALSE(events[0].ts_ns.has_value());
    CHECK(events[1].ts_ns == 1500.0);
    CHECK(events[2].bank == 1);
    CHECK(events[2].seq == 2);
  }
  SUBCASE("malformed line reports its number") {
    TempFile f("0,1\nx,y\n");
    try {
      load_trace(f.path);
      FAIL("expected a parse error");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()).find(":2") != std::string::npos);
    }
  }
  SUBCASE("row outside the bank is rejected") {
    TempFile f("0,70000\n");
    CHECK_THROWS_AS(load_trace(f.path, 65536), std::runtime_error);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_trace("does_not_exist.trace"), std::runtime_error);
  }
}

TEST_CASE("workload validation") {
  WorkloadSpec spec;
  spec.kind = WorkloadKind::kSingleRow;
  spec.row = 70000;
  spec.length = 1;
  CHECK_THROWS_AS(generate(spec, 65536), std::invalid_argument);

  spec.row = 10;
  spec.length = 0;
  CHECK_THROWS_AS(generate(spec), std::invalid_argument);

  WorkloadSpec uniform;
  uniform.kind = WorkloadKind::kUniformRandom;
  uniform.footprint = 100000;
  uniform.length = 10;
  CHECK_THROWS_AS(generate(uniform, 65536), std::invalid_argument);
}
