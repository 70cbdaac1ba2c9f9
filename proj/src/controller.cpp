#include "mithril/controller.hpp"

#include <stdexcept>

namespace mithril {

std::string to_string(CommandKind kind) {
  switch (kind) {
    case CommandKind::kAct: return "ACT";
    case CommandKind::kRfm: return "RFM";
    case CommandKind::kRfmSkipped: return "RFM_SKIPPED";
    case CommandKind::kAutoref: return "AUTOREF";
  }
  return "?";
}

namespace {

void emit(std::vector<IssuedCommand>& log, const DriveHook& hook, DrivePhase phase,
          const MithrilTable& tracker, IssuedCommand cmd) {
  log.push_back(cmd);
  if (hook) hook(phase, log.back(), tracker);
}

}  // namespace

std::vector<IssuedCommand> drive(BankController& controller, MithrilTable& tracker,
                                 std::span<const ActEvent> stream,
                                 const TimingParams& timing, const MithrilConfig& cfg,
                                 const DriveOptions& options) {
  timing.validate();
  cfg.validate();
  if (controller.rfm_th < 1) throw std::invalid_argument("controller rfm_th must be >= 1");
  if (controller.next_ref_ns <= 0.0) controller.next_ref_ns = timing.t_refi;

  std::vector<IssuedCommand> log;
  log.reserve(stream.size() + stream.size() / static_cast<std::size_t>(controller.rfm_th) +
              16);

  auto catch_up_refresh = [&]() {
    while (controller.now_ns >= controller.next_ref_ns) {
      IssuedCommand cmd;
      cmd.kind = CommandKind::kAutoref;
      cmd.group = controller.ref_group_cursor;
      cmd.at_ns = controller.next_ref_ns;
      controller.now_ns += timing.t_rfc;
      controller.ref_group_cursor =
          (controller.ref_group_cursor + 1) % timing.refresh_groups;
      controller.next_ref_ns += timing.t_refi;
      emit(log, options.hook, DrivePhase::kPostAutoref, tracker, cmd);
    }
  };

  for (const ActEvent& event : stream) {
    if (event.bank != controller.bank) {
      throw std::invalid_argument("stream event for bank " + std::to_string(event.bank) +
                                  " fed to controller of bank " +
                                  std::to_string(controller.bank));
    }
    if (options.paced && event.ts_ns && *event.ts_ns > controller.now_ns) {
      controller.now_ns = *event.ts_ns;
    }
    catch_up_refresh();

    IssuedCommand act;
    act.kind = CommandKind::kAct;
    act.row = event.row;
    act.at_ns = controller.now_ns;
    controller.now_ns += timing.t_rc;
    controller.raa += 1;
    tracker.on_activate(event.row);
    emit(log, options.hook, DrivePhase::kPostAct, tracker, act);

    if (controller.raa >= controller.rfm_th) {
      if (controller.mithril_plus && !tracker.adaptive_flag(cfg.ad_th)) {
        IssuedCommand skip;
        skip.kind = CommandKind::kRfmSkipped;
        skip.at_ns = controller.now_ns;
        emit(log, options.hook, DrivePhase::kPostSkip, tracker, skip);
      } else {
        IssuedCommand rfm;
        rfm.kind = CommandKind::kRfm;
        rfm.at_ns = controller.now_ns;
        if (options.hook) options.hook(DrivePhase::kPreRfm, rfm, tracker);
        const RefreshDecision decision =
            tracker.on_rfm(cfg.ad_th, cfg.blast_radius, options.rows_per_bank);
        if (decision.refreshed) rfm.row = decision.aggressor;
        controller.now_ns += timing.t_rfm;
        emit(log, options.hook, DrivePhase::kPostRfm, tracker, rfm);
      }
      controller.raa = 0;
    }
  }

  // Idle tail: nothing but the refresh cadence up to the horizon.
  while (controller.next_ref_ns <= options.horizon_ns) {
    if (controller.now_ns < controller.next_ref_ns) {
      controller.now_ns = controller.next_ref_ns;
    }
    catch_up_refresh();
  }
  return log;
}

double time_overhead_fraction(const std::vector<IssuedCommand>& commands,
                              const TimingParams& timing) {
  if (commands.empty()) return 0.0;
  std::int64_t rfm_count = 0;
  double end_ns = 0.0;
  for (const IssuedCommand& cmd : commands) {
    double cost = 0.0;
    switch (cmd.kind) {
      case CommandKind::kAct: cost = timing.t_rc; break;
      case CommandKind::kRfm: cost = timing.t_rfm; ++rfm_count; break;
      case CommandKind::kRfmSkipped: cost = 0.0; break;
      case CommandKind::kAutoref: cost = timing.t_rfc; break;
    }
    if (cmd.at_ns + cost > end_ns) end_ns = cmd.at_ns + cost;
  }
  if (rfm_count == 0 || end_ns <= 0.0) return 0.0;
  return static_cast<double>(rfm_count) * timing.t_rfm / end_ns;
}

void write_command_csv(std::ostream& out, const std::vector<IssuedCommand>& commands) {
  out << "at_ns,kind,row,group\n";
  for (const IssuedCommand& cmd : commands) {
    out << cmd.at_ns << ',' << to_string(cmd.kind) << ',';
    if (cmd.row) out << *cmd.row;
    out << ',';
    if (cmd.group) out << *cmd.group;
    out << '\n';
  }
}

}  // namespace mithril
