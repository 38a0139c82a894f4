#pragma once

// Attack scheduling: the median-deviation trigger over total, per-solver or
// class-conditioned (targeted) liquidity.

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lexsim/liquidity.hpp"

namespace lexsim {

enum class TriggerScope { Total, PerSolver, Class };

const char* to_string(TriggerScope scope);
std::optional<TriggerScope> parse_trigger_scope(std::string_view text);

struct TriggerConfig {
  unsigned k = 1;
  WindowMode window_mode = WindowMode::CausalExpanding;
  /// Minimum spacing between consecutive trigger times.
  Seconds cooldown_s = 1000;
  TriggerScope scope = TriggerScope::Total;
  Seconds sample_resolution = 60;
  /// No trigger fires within this long of the series origin.
  Seconds warmup_s = 0;
  /// Required for TriggerScope::Class.
  std::optional<IntentClass> intent_class;
};

struct AttackTrigger {
  Timestamp at = 0;
  Money liquidity_at_trigger;  // L(t), L_s(t) or L_eff(c, t) depending on scope
  Money threshold;             // median - k * std
  Money median;
  Money stddev;
  Money total_liquidity;       // L(t) over all solvers
  Rate alpha = Rate::from_integer(1);
  TriggerScope scope = TriggerScope::Total;
  std::string scope_label;

  /// Capital the attacker must drain: L_eff for targeted triggers, L(t) otherwise.
  Money drain_target() const { return scope == TriggerScope::Class ? liquidity_at_trigger : total_liquidity; }
};

/// Scans `series` on its sampling grid within [t0, t1]. Emits a trigger at the
/// first grid time where the balance is strictly below median - k * std, then
/// suppresses triggers for cooldown_s. Stats are causal (history up to and
/// including the grid time) or full-period per `config.window_mode`.
std::vector<AttackTrigger> scan_for_triggers(const LiquiditySeries& series, const TriggerConfig& config, Timestamp t0,
                                             Timestamp t1);

/// Baseline trigger over total (default) or per-solver liquidity.
std::vector<AttackTrigger> detect_triggers(const SeriesMap& series, const TriggerConfig& config, Timestamp t0,
                                           Timestamp t1);

/// Trigger over L_eff(c, t); each trigger carries alpha = L_eff / L.
std::vector<AttackTrigger> targeted_triggers(const SeriesMap& series, const IntentClass& cls,
                                             const TriggerConfig& config, Timestamp t0, Timestamp t1);

/// Attack placements at given timestamps irrespective of liquidity
/// (alpha = 1, threshold = 0); used for uniformly placed byzantine runs.
std::vector<AttackTrigger> fixed_schedule(const SeriesMap& series, std::span<const Timestamp> times);

/// Evenly spaced timestamps in [t0, t1].
std::vector<Timestamp> uniform_times(Timestamp t0, Timestamp t1, Seconds spacing);

/// Delimited text: t_s, liquidity, threshold, alpha, scope.
void write_schedule(std::ostream& out, std::span<const AttackTrigger> triggers, char delimiter = ',');

}  // namespace lexsim
