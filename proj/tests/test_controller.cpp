#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "mithril/controller.hpp"
#include "test_support.hpp"

using namespace mithril;
using test::make_interval_timing;

namespace {

std::vector<ActEvent> acts(std::initializer_list<RowAddr> rows) {
  std::vector<ActEvent> events;
  std::uint64_t seq = 0;
  for (RowAddr r : rows) events.push_back({0, r, seq++, std::nullopt});
  return events;
}

std::vector<CommandKind> kinds(const std::vector<IssuedCommand>& commands) {
  std::vector<CommandKind> out;
  for (const auto& c : commands) out.push_back(c.kind);
  return out;
}

MithrilConfig small_cfg(std::int64_t rfm_th, std::int64_t ad_th = 0) {
  return MithrilConfig{.n_entry = 4, .rfm_th = rfm_th, .ad_th = ad_th, .flip_th = 1000,
                       .blast_radius = 1};
}

}  // namespace

TEST_CASE("one RFM per rfm_th activates") {
  const TimingParams timing = ddr5_preset_32ms();
  const MithrilConfig cfg = small_cfg(4);
  MithrilTable table(4, 16);
  BankController mc{.bank = 0, .rfm_th = 4};

  const auto log = drive(mc, table, acts({10, 20, 30, 40}), timing, cfg);
  CHECK(kinds(log) == std::vector<CommandKind>{CommandKind::kAct, CommandKind::kAct,
                                               CommandKind::kAct, CommandKind::kAct,
                                               CommandKind::kRfm});
  CHECK(log[4].row.has_value());  // the refresh picked an aggressor
  CHECK(mc.raa == 0);
}

TEST_CASE("flag-query protocol skips quiet RFMs without time cost") {
  const TimingParams timing = ddr5_preset_32ms();
  const MithrilConfig cfg = small_cfg(4, 200);
  MithrilTable table(4, 16);
  BankController mc{.bank = 0, .rfm_th = 4, .mithril_plus = true};

  const auto log = drive(mc, table, acts({10, 20, 30, 40}), timing, cfg);
  CHECK(kinds(log) == std::vector<CommandKind>{CommandKind::kAct, CommandKind::kAct,
                                               CommandKind::kAct, CommandKind::kAct,
                                               CommandKind::kRfmSkipped});
  // Four ACTs, no RFM window spent.
  CHECK(mc.now_ns == doctest::Approx(4 * timing.t_rc));
}

TEST_CASE("flag-query protocol still issues when the flag is raised") {
  const TimingParams timing = ddr5_preset_32ms();
  const MithrilConfig cfg = small_cfg(4, 2);
  MithrilTable table(4, 16);
  BankController mc{.bank = 0, .rfm_th = 4, .mithril_plus = true};

  // Hammering one row drives the spread past ad_th = 2 within one interval.
  const auto log = drive(mc, table, acts({10, 10, 10, 10}), timing, cfg);
  CHECK(log.back().kind == CommandKind::kRfm);
  CHECK(log.back().row == 10);
}

TEST_CASE("an empty stream yields only the refresh cadence") {
  const TimingParams timing = ddr5_preset_32ms();
  const MithrilConfig cfg = small_cfg(4);
  MithrilTable table(4, 16);
  BankController mc{.bank = 0, .rfm_th = 4};

  DriveOptions options;
  options.horizon_ns = 10.5 * timing.t_refi;
  const auto log = drive(mc, table, {}, timing, cfg, options);
  REQUIRE(log.size() == 10);
  for (std::size_t i = 0; i < log.size(); ++i) {
    CHECK(log[i].kind == CommandKind::kAutoref);
    CHECK(log[i].group == static_cast<std::int64_t>(i % 8192));
    CHECK(log[i].at_ns == doctest::Approx((i + 1) * timing.t_refi));
  }
}

TEST_CASE("refresh ticks interleave with activates and cover every group") {
  TimingParams timing = make_interval_timing(50.0, 4);
  const MithrilConfig cfg = small_cfg(4);
  MithrilTable table(4, 16);
  BankController mc{.bank = 0, .rfm_th = 4};

  std::vector<ActEvent> stream;
  for (int i = 0; i < 2000; ++i) stream.push_back({0, static_cast<RowAddr>(i % 8), 0});

  const auto log = drive(mc, table, stream, timing, cfg);
  std::int64_t autorefs = 0;
  std::int64_t running_acts = 0;
  std::int64_t acts_since_rfm_slot = 0;
  for (const auto& cmd : log) {
    switch (cmd.kind) {
      case CommandKind::kAct:
        ++running_acts;
        ++acts_since_rfm_slot;
        break;
      case CommandKind::kRfm:
      case CommandKind::kRfmSkipped:
        CHECK(acts_since_rfm_slot == 4);  // periodic, never bursty
        acts_since_rfm_slot = 0;
        break;
      case CommandKind::kAutoref:
        ++autorefs;
        break;
    }
  }
  CHECK(running_acts == 2000);
  // Elapsed time divided by t_refi bounds the tick count to within one.
  const double elapsed = mc.now_ns;
  CHECK(autorefs >= static_cast<std::int64_t>(elapsed / timing.t_refi) - 1);
  CHECK(autorefs <= static_cast<std::int64_t>(elapsed / timing.t_refi) + 1);
}

TEST_CASE("interval count inside one refresh window never exceeds the closed form") {
  const TimingParams timing = make_interval_timing(20.0, 8);
  const MithrilConfig cfg = small_cfg(8);
  const std::int64_t w = max_rfm_intervals(timing, 8);
  MithrilTable table(4, 16);
  BankController mc{.bank = 0, .rfm_th = 8};

  std::vector<ActEvent> stream;
  for (int i = 0; i < 4000; ++i) stream.push_back({0, static_cast<RowAddr>(i % 4), 0});
  const auto log = drive(mc, table, stream, timing, cfg);

  std::vector<double> rfm_times;
  for (const auto& cmd : log) {
    if (cmd.kind == CommandKind::kRfm) rfm_times.push_back(cmd.at_ns);
  }
  REQUIRE(!rfm_times.empty());
  for (std::size_t i = 0; i < rfm_times.size(); ++i) {
    std::size_t j = i;
    while (j + 1 < rfm_times.size() && rfm_times[j + 1] - rfm_times[i] < timing.t_refw) {
      ++j;
    }
    CHECK(static_cast<std::int64_t>(j - i + 1) <= w);
  }
}

TEST_CASE("time overhead fraction") {
  const TimingParams timing = ddr5_preset_32ms();

  SUBCASE("no RFM, no overhead") {
    CHECK(time_overhead_fraction({}, timing) == 0.0);
  }
  SUBCASE("one RFM per 64 activates") {
    const MithrilConfig cfg = small_cfg(64);
    MithrilTable table(4, 16);
    BankController mc{.bank = 0, .rfm_th = 64};
    std::vector<ActEvent> stream;
    for (int i = 0; i < 64; ++i) stream.push_back({0, 5, 0});
    const auto log = drive(mc, table, stream, timing, cfg);
    CHECK(time_overhead_fraction(log, timing) ==
          doctest::Approx(97.28 / (64 * 48.64 + 97.28)).epsilon(1e-9));
  }
  SUBCASE("skipped RFMs cost nothing") {
    const MithrilConfig cfg = small_cfg(4, 1000);
    MithrilTable table(4, 16);
    BankController mc{.bank = 0, .rfm_th = 4, .mithril_plus = true};
    std::vector<ActEvent> stream;
    for (int i = 0; i < 64; ++i) stream.push_back({0, static_cast<RowAddr>(i), 0});
    const auto log = drive(mc, table, stream, timing, cfg);
    CHECK(time_overhead_fraction(log, timing) == 0.0);
  }
}

TEST_CASE("stream for the wrong bank is rejected") {
  const TimingParams timing = ddr5_preset_32ms();
  const MithrilConfig cfg = small_cfg(4);
  MithrilTable table(4, 16);
  BankController mc{.bank = 1, .rfm_th = 4};
  CHECK_THROWS_AS(drive(mc, table, acts({1}), timing, cfg), std::invalid_argument);
}

TEST_CASE("paced replay honors trace timestamps") {
  const TimingParams timing = ddr5_preset_32ms();
  const MithrilConfig cfg = small_cfg(4);
  MithrilTable table(4, 16);
  BankController mc{.bank = 0, .rfm_th = 4};

  std::vector<ActEvent> stream{{0, 1, 0, 1000.0}, {0, 2, 1, 50000.0}};
  DriveOptions options;
  options.paced = true;
  const auto log = drive(mc, table, stream, timing, cfg, options);

  REQUIRE(log.size() >= 2);
  CHECK(log.front().at_ns == doctest::Approx(1000.0));
  // The jump to 50 us crosses refresh ticks, which run first.
  bool saw_autoref = false;
  for (const auto& cmd : log) {
    if (cmd.kind == CommandKind::kAutoref) saw_autoref = true;
    if (cmd.kind == CommandKind::kAct && cmd.row == 2) {
      CHECK(cmd.at_ns >= 50000.0);
    }
  }
  CHECK(saw_autoref);
}

TEST_CASE("command log serialization") {
  std::vector<IssuedCommand> commands;
  commands.push_back({CommandKind::kAct, 42, std::nullopt, 0.0});
  commands.push_back({CommandKind::kRfm, 42, std::nullopt, 48.64});
  commands.push_back({CommandKind::kAutoref, std::nullopt, 7, 145.92});
  std::ostringstream out;
  write_command_csv(out, commands);
  CHECK(out.str() ==
        "at_ns,kind,row,group\n"
        "0,ACT,42,\n"
        "48.64,RFM,42,\n"
        "145.92,AUTOREF,,7\n");
}
