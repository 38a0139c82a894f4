#pragma once

// One attack instance at a trigger time: rational economics (induction cost,
// fill cost, revenue, net profit) and byzantine availability impact.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lexsim/strategies.hpp"

namespace lexsim {

struct Route {
  ChainId src_chain;
  ChainId dst_chain;
  Bridge bridge;

  bool matches(const IntentRecord& r) const {
    return r.src_chain == src_chain && r.dst_chain == dst_chain && r.bridge == bridge;
  }
  std::string str() const { return bridge.label + ":" + src_chain.name() + "->" + dst_chain.name(); }
};

enum class EpsilonModel { Zero, Fixed, BpsOfInducedVolume };

struct EpsilonConfig {
  EpsilonModel model = EpsilonModel::Zero;
  Money fixed;           // Fixed
  std::int64_t bps = 0;  // BpsOfInducedVolume: bps of the drained capital
};

/// Per-flooding-intent gas. Default: median g_i of route intents created in
/// the trailing window before t_s (falling back to all earlier route intents,
/// then to zero). A constant overrides the estimate.
struct FloodGasModel {
  std::optional<Money> constant;
  Seconds trailing_window_s = 86400;
};

enum class AttackMode { Rational, Byzantine };

const char* to_string(AttackMode mode);

struct AttackConfig {
  Route route;
  Seconds attack_window = 1000;
  Money max_tx_value = Money::from_integer(10000);
  Rate volume_multiplier = Rate::from_integer(1);
  std::optional<Rate> override_solver_profit_pct;
  std::optional<Rate> override_protocol_fee_pct;
  EpsilonConfig epsilon;
  FloodGasModel flood_gas;
  AttackMode mode = AttackMode::Rational;

  /// Throws InvalidArgument when W, max_tx_value or the multiplier is not positive.
  void validate() const;
  /// Canonical one-line description; the basis of the config fingerprint.
  std::string canonical() const;
};

struct InductionCost {
  Money total;
  Money fee_component;
  Money gas_component;
  std::int64_t n_flood_intents = 0;
  Money working_capital;  // alpha * L(t): principal locked, not a cost
};

/// alpha * L * fee + ceil(alpha * L / max_tx_value) * gas_per_intent.
InductionCost induction_cost(Rate alpha, Money liquidity, Rate fee_pct, Money max_tx_value, Money gas_per_intent);
/// Same, with the drained capital given directly.
InductionCost induction_cost_for_drain(Money drained, Rate fee_pct, Money max_tx_value, Money gas_per_intent);

/// Route intents sorted by creation time, with the trailing cost estimates
/// the engine needs.
class RouteTrace {
 public:
  RouteTrace(std::span<const IntentRecord> records, const Route& route);

  const Route& route() const { return route_; }
  std::span<const IntentRecord> intents() const { return intents_; }
  bool empty() const { return intents_.empty(); }

  /// Intents with created_at in [t, t + window).
  std::span<const IntentRecord> window(Timestamp t, Seconds window) const;

  /// Median fill gas of intents created in [t - trailing, t); falls back to all
  /// intents before t, then to zero.
  Money trailing_gas_median(Timestamp t, Seconds trailing) const;
  /// Median protocol fee pct, same window and fallbacks.
  Rate trailing_fee_median(Timestamp t, Seconds trailing) const;

 private:
  std::size_t lower_index(Timestamp t) const;
  Route route_;
  std::vector<IntentRecord> intents_;
};

/// Base set = route intents created in [t_s, t_s + W). The integer part of the
/// multiplier replicates each intent; the fractional part adds one more copy
/// with that probability (seeded). A multiplier of 1 returns the base set.
std::vector<IntentRecord> capture_intents(std::span<const IntentRecord> route_intents, Timestamp t_s, Seconds window,
                                          Rate volume_multiplier, std::uint64_t seed);

struct AttackInstanceResult {
  Timestamp t_s = 0;
  Rate alpha;
  Money liquidity;        // L(t_s)
  Money working_capital;  // alpha * L(t_s)
  Money induction_cost;
  std::int64_t n_flood_intents = 0;
  Money fill_cost;
  Money revenue;
  Money epsilon;
  Money net_profit;
  std::int64_t n_fulfillments = 0;
  Money volume_fulfilled;
  std::vector<std::string> captured_intent_ids;
};

struct ByzantineImpact {
  Timestamp t_s = 0;
  Seconds window = 0;
  Money total_cost;
  std::int64_t failed_intents = 0;
  Money failed_value;
  Money failed_value_median;
  Money failed_value_std;
  Money missed_solver_profit;
  Money missed_protocol_fees;
};

/// Seed for one instance, derived from the global seed, t_s and the config.
std::uint64_t instance_seed(std::uint64_t global_seed, Timestamp t_s, const AttackConfig& config);

/// Throws EmptyRoute when the route has no intents in the whole trace.
AttackInstanceResult rational_attack(const AttackTrigger& trigger, const RouteTrace& trace, const AttackConfig& config,
                                     std::uint64_t seed);

ByzantineImpact byzantine_attack(const AttackTrigger& trigger, const RouteTrace& trace, const AttackConfig& config);

}  // namespace lexsim
