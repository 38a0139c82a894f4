#pragma once

// Aggregation of attack instances, parameter sweeps and output emission.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lexsim/engine.hpp"

namespace lexsim {

/// Everything a simulation reads: validated intents plus reconstructed
/// liquidity. Immutable once built; shared by all sweep workers.
struct SimulationInputs {
  std::vector<IntentRecord> records;
  SeriesMap series;
  Timestamp coverage_start = 0;
  Timestamp coverage_end = 0;
};

/// Builds the series and sets coverage to [earliest origin, latest event or intent creation].
SimulationInputs make_inputs(std::vector<IntentRecord> records, std::span<const LiquidityEvent> events,
                             const OriginBalances& origins, std::optional<Timestamp> origin_time = std::nullopt);

/// Default "reliable attack" rule: pr_profit >= min_pr_profit and, when
/// required, mean net profit > 0.
struct ReliabilityRule {
  Rate min_pr_profit = Rate::from_units(500'000'000);
  bool require_positive_mean = true;
};

using Decimal6 = Fixed<6>;

struct AggregateReport {
  std::string fingerprint;
  std::int64_t n_attacks = 0;
  Money mean_net_profit;
  Money std_net_profit;  // population
  Money p90_net_profit;  // nearest rank
  Rate pr_profit;
  Decimal6 mean_n_fulfillments;
  Decimal6 std_n_fulfillments;
  Money mean_volume_fulfilled;
  Money std_volume_fulfilled;
  Money min_induction_cost;
  Money median_induction_cost;
  Money max_induction_cost;
  bool reliable_attack = false;
};

/// Empty input gives the all-zero report.
AggregateReport aggregate(std::span<const AttackInstanceResult> instances, const ReliabilityRule& rule = {});

/// Nearest-rank percentile: the value at rank ceil(p/100 * n), 1-based.
Money nearest_rank(std::vector<Money> values, unsigned percent);

struct ByzantineReport {
  std::string fingerprint;
  std::int64_t n_attacks = 0;
  Money median_total_cost;
  Money p90_total_cost;
  Decimal6 mean_failed_intents;
  Decimal6 std_failed_intents;
  std::int64_t median_failed_intents = 0;
  Money median_failed_value;  // median over instances of the per-instance median
  Money mean_failed_value_std;
  Money median_missed_solver_profit;
  Money p90_missed_solver_profit;
  Money median_missed_protocol_fees;
  Money p90_missed_protocol_fees;
};

ByzantineReport aggregate_byzantine(std::span<const ByzantineImpact> impacts);

/// 16 hex digits derived from a canonical description.
std::string fingerprint(const std::string& canonical);

/// Where attack timestamps come from. Triggers are recomputed per k; with
/// `cooldown_follows_window` the trigger cooldown equals the cell's W.
struct ScheduleSource {
  enum class Kind { Triggers, Fixed };
  Kind kind = Kind::Triggers;
  TriggerConfig trigger;
  bool cooldown_follows_window = true;
  std::vector<Timestamp> times;  // Kind::Fixed
  std::optional<Timestamp> from;
  std::optional<Timestamp> to;

  std::string canonical() const;
};

struct SweepGrid {
  AttackConfig base;  // route, mode, epsilon and gas model are fixed per sweep
  std::vector<unsigned> k{1};
  std::vector<Seconds> attack_window{1000};
  std::vector<std::optional<Rate>> solver_profit_pct{std::nullopt};
  std::vector<std::optional<Rate>> protocol_fee_pct{std::nullopt};
  std::vector<Money> max_tx_value{Money::from_integer(10000)};
  std::vector<Rate> volume_multiplier{Rate::from_integer(1)};
  std::size_t max_cells = 10000;

  std::size_t cell_count() const;
  /// InvalidArgument on an empty axis, GridTooLarge above max_cells.
  void validate() const;
};

struct SweepCell {
  unsigned k = 0;
  AttackConfig config;
  std::string canonical;
  std::string fingerprint;
  AggregateReport report;     // rational mode
  ByzantineReport byzantine;  // byzantine mode
  std::vector<AttackInstanceResult> instances;
  std::vector<ByzantineImpact> impacts;
};

struct SweepOptions {
  std::uint64_t seed = 0;
  unsigned threads = 0;  // 0: hardware concurrency
  bool keep_instances = true;
  ReliabilityRule reliability;
};

/// Attack timestamps for one cell.
std::vector<AttackTrigger> schedule_for(const SimulationInputs& inputs, const ScheduleSource& source, unsigned k,
                                        Seconds window);

/// One report per cell, in grid order (k, W, profit, fee, max tx, multiplier).
/// Cells run in parallel; results do not depend on the thread count.
std::vector<SweepCell> run_sweep(const SweepGrid& grid, const SimulationInputs& inputs, const ScheduleSource& source,
                                 const SweepOptions& options = {});

enum class OutputFormat { Delimited, RecordStream, AlignedTable };

const char* to_string(OutputFormat format);
std::optional<OutputFormat> parse_output_format(std::string_view text);

struct RunMetadata {
  std::uint64_t seed = 0;
  WindowMode window_mode = WindowMode::CausalExpanding;
  TriggerScope scope = TriggerScope::Total;
  AttackMode mode = AttackMode::Rational;
};

/// Header line, then one row per cell sorted by fingerprint. Byzantine sweeps
/// use the byzantine columns. Throws IoFailure when the stream fails.
void emit(std::ostream& out, std::span<const SweepCell> cells, OutputFormat format, const RunMetadata& meta);

/// Per-instance export; `read_instances` inverts `write_instances` exactly.
void write_instances(std::ostream& out, std::span<const AttackInstanceResult> instances, OutputFormat format);
std::vector<AttackInstanceResult> read_instances(std::istream& in, OutputFormat format);

void write_impacts(std::ostream& out, std::span<const ByzantineImpact> impacts, OutputFormat format);

/// Step series (t, L(t)) at every change point in [from, to], followed in time
/// order by trigger markers. Columns: t, liquidity, marker.
void write_plot_series(std::ostream& out, const LiquiditySeries& series, std::span<const AttackTrigger> triggers,
                       Timestamp from, Timestamp to);

}  // namespace lexsim
