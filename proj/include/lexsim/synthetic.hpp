#pragma once

// Seeded synthetic trace generator. Produces intents, the solver liquidity
// events they imply, and starting balances, for desk-scale runs where the
// real dataset is not available.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lexsim/ingest.hpp"
#include "lexsim/trace_model.hpp"

namespace lexsim {

/// Planted participation pattern for one solver. A solver only fills intents
/// whose value is in [value_min, value_max), whose token is in `tokens` (empty
/// = any) and whose creation time lies in [active_from, active_until).
struct SolverSpec {
  std::string address;
  double liquidity_share = 0.0;  // fraction of total_liquidity
  std::optional<Money> value_min;
  std::optional<Money> value_max;
  std::vector<std::string> tokens;
  std::optional<Timestamp> active_from;
  std::optional<Timestamp> active_until;
};

/// Four-hour (by default) window of elevated intent arrival.
struct DiurnalPeak {
  int start_hour_utc = 14;
  int hours = 4;
  double weight = 3.0;  // arrival-rate multiplier inside the window
};

struct TokenWeight {
  std::string symbol;
  double weight = 1.0;
};

struct SyntheticProfile {
  Bridge bridge{"debridge"};
  ChainId src_chain = ChainId::of("solana");
  ChainId dst_chain = ChainId::of("ethereum");
  Money median_intent_value = Money::from_integer(100);
  /// Log-normal shape (sigma of log value).
  double value_sigma = 1.5;
  Rate solver_profit_pct = Rate::parse("0.01");
  /// Log-normal spread of per-intent margins around the median.
  double profit_sigma = 0.25;
  Rate protocol_fee_pct = Rate::parse("0.001");
  Money protocol_fixed_fee;
  Money total_liquidity = Money::from_integer(500000);
  int n_solvers = 5;
  /// Liquidity share of the largest generated solver (the rest split evenly);
  /// unset gives equal shares. Fill shares follow liquidity shares.
  std::optional<double> top_solver_share;
  /// The largest generated solver ignores intents below this value.
  std::optional<Money> top_solver_value_min;
  /// A solver never commits more than this fraction of its base capital to a
  /// single intent (unset = no limit).
  std::optional<double> max_fill_fraction;
  double intents_per_hour = 100.0;
  Seconds refund_delay_s = 1000;
  Seconds fill_latency_s = 20;
  Money median_fill_gas = Money::parse("0.5");
  Money auction_cost;
  std::optional<DiurnalPeak> diurnal_peak;
  /// Realized solver profit is withdrawn at this interval (0 = never), which
  /// keeps balances stationary over multi-day traces.
  Seconds profit_sweep_interval_s = 0;
  /// Every rebalance_interval_s (0 = off) each solver's committed capital is
  /// moved toward base * exp(x), x a mean-reverting log deviation with
  /// stationary std capital_log_sigma, via external injections/withdrawals.
  Seconds rebalance_interval_s = 0;
  double capital_log_sigma = 0.0;
  Seconds capital_reversion_s = 86400;
  Timestamp start_time = 1748736000;  // 2025-06-01T00:00:00Z
  std::vector<TokenWeight> tokens{{"USDC", 1.0}};
  /// Explicit solvers; when empty, n_solvers solvers are created.
  std::vector<SolverSpec> solvers;
};

/// Throws InvalidProfile when a rate, amount or count is not positive.
void validate_profile(const SyntheticProfile& profile);

/// Built-in calibration for "debridge", "across" or "mayan"; throws InvalidProfile otherwise.
SyntheticProfile preset_profile(std::string_view name);

/// Structured (JSON) profile; unspecified fields keep the defaults of `base`.
SyntheticProfile load_profile(const std::filesystem::path& path, const SyntheticProfile& base = {});
SyntheticProfile parse_profile(std::string_view json_text, const SyntheticProfile& base = {});

struct SyntheticTrace {
  std::vector<IntentRecord> records;   // sorted by (created_at, intent_id)
  std::vector<LiquidityEvent> events;  // sorted by time, generation order on ties
  OriginBalances origin_balances;
  Timestamp origin_time = 0;
  Money total_profit;     // sum of realized solver profit
  Money total_withdrawn;  // sum of external withdrawals (profit sweeps and rebalancing)
  Money total_injected;   // sum of external injections
};

SyntheticTrace generate_synthetic(const SyntheticProfile& profile, Seconds duration, std::uint64_t seed);

}  // namespace lexsim
