#include "mithril/timing.hpp"

#include <stdexcept>
#include <string>

#include "mithril/kv.hpp"

namespace mithril {

void TimingParams::validate() const {
  if (t_refw <= 0 || t_refi <= 0 || t_rfc <= 0 || t_rc <= 0 || t_rfm <= 0) {
    throw std::invalid_argument("timing: all durations must be strictly positive");
  }
  if (!(t_rfc < t_refi)) {
    throw std::invalid_argument("timing: t_rfc must be smaller than t_refi");
  }
  if (!(t_refi <= t_refw)) {
    throw std::invalid_argument("timing: t_refi must not exceed t_refw");
  }
  if (refresh_groups < 1) {
    throw std::invalid_argument("timing: refresh_groups must be at least 1");
  }
}

TimingParams ddr5_preset_32ms() {
  TimingParams t;
  t.t_refw = 32.0e6;
  t.refresh_groups = 8192;
  t.t_refi = t.t_refw / 8192.0;
  t.t_rfc = 295.0;
  t.t_rc = 48.64;
  t.t_rfm = 97.28;
  return t;
}

TimingParams ddr5_preset_64ms() {
  TimingParams t = ddr5_preset_32ms();
  t.t_refw = 64.0e6;
  t.t_refi = t.t_refw / 8192.0;
  return t;
}

TimingParams load_timing_file(const std::string& path) {
  const auto kv = parse_key_value_file(path);
  TimingParams t;
  auto need = [&](const std::string& key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw std::runtime_error(path + ": missing timing key " + key);
    return it->second;
  };
  t.t_refw = std::stod(need("t_refw"));
  t.t_refi = std::stod(need("t_refi"));
  t.t_rfc = std::stod(need("t_rfc"));
  t.t_rc = std::stod(need("t_rc"));
  t.t_rfm = std::stod(need("t_rfm"));
  t.refresh_groups = std::stoll(need("refresh_groups"));
  t.validate();
  return t;
}

TimingParams resolve_timing(const std::string& name_or_path) {
  if (name_or_path.empty() || name_or_path == "ddr5_32ms") return ddr5_preset_32ms();
  if (name_or_path == "ddr5_64ms") return ddr5_preset_64ms();
  return load_timing_file(name_or_path);
}

}  // namespace mithril
