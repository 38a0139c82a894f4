#pragma once

// File-based ingestion of intent traces, liquidity events, origin balances and
// daily token prices.
//
// Trace column mapping (header names follow the cross-chain transaction data
// model; any column not listed is preserved verbatim in IntentRecord::raw):
//
//   intent_id                  -> intent_id
//   bridge                     -> bridge
//   src_blockchain             -> src_chain
//   dst_blockchain             -> dst_chain
//   dst_from                   -> solver (fulfiller address on dst chain)
//   src_timestamp              -> created_at
//   dst_timestamp              -> fulfilled_at (empty = never fulfilled)
//   repayment_timestamp        -> refunded_at (optional column)
//   input_amount_usd           -> value (or input_amount priced via PriceTable)
//   solver_profitability_pct   -> solver_profit_pct (percent, 1.129 == 1.129%)
//   percent_fee                -> protocol_fee_pct (percent)
//   native_fix_fee_usd         -> protocol_fixed_fee (optional, default 0)
//   adjusted_dst_fee_usd       -> fill_gas (falls back to dst_fee_usd)
//   auction_cost_usd           -> auction_cost (optional, default 0)
//   dst_symbol                 -> dst_token
//   same_chain                 -> same_chain_swap (optional, true/false/1/0)
//
// When dst_timestamp is absent but fill_latency is present, fulfilled_at is
// src_timestamp + fill_latency. percent_fee_usd is kept in `raw`; the
// percentage column is authoritative and a disagreement above 1% of the
// recomputed fee is reported as a warning.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "lexsim/trace_model.hpp"

namespace lexsim {

class PriceTable;

enum class TraceFormat { Delimited, RecordStream };

struct TraceLoadOptions {
  TraceFormat format = TraceFormat::Delimited;
  char delimiter = ',';
  /// Loading aborts with RowRejected once rejected/total exceeds this ratio.
  double max_rejection_ratio = 0.05;
  /// The ratio cap only applies to files with at least this many data rows.
  std::size_t min_rows_for_ratio = 20;
  ValidationOptions validation;
  /// When set, rows with an empty input_amount_usd are priced from
  /// input_amount and src_symbol (else dst_symbol) on the creation date.
  const PriceTable* prices = nullptr;
};

struct RowRejection {
  std::size_t row = 0;  // 1-based data row
  Rejection rejection;
};

struct TraceLoad {
  std::vector<IntentRecord> records;  // sorted by (created_at, intent_id)
  std::vector<RowRejection> rejected;
  std::vector<std::string> warnings;
};

TraceLoad load_traces(const std::filesystem::path& path, const TraceLoadOptions& options = {});
TraceLoad read_traces(std::istream& in, const TraceLoadOptions& options = {});

/// Writes records in the canonical column layout (plus sorted raw columns).
void write_traces(std::ostream& out, std::span<const IntentRecord> records, TraceFormat format = TraceFormat::Delimited,
                  char delimiter = ',');

/// Ascending created_at, ties broken by intent_id.
void sort_records(std::vector<IntentRecord>& records);

// --- liquidity events and origin balances ---------------------------------

std::vector<LiquidityEvent> load_liquidity_events(const std::filesystem::path& path, char delimiter = ',');
std::vector<LiquidityEvent> read_liquidity_events(std::istream& in, char delimiter = ',');
void write_liquidity_events(std::ostream& out, std::span<const LiquidityEvent> events, char delimiter = ',');

using OriginBalances = std::map<SolverId, Money>;

OriginBalances load_origin_balances(const std::filesystem::path& path, char delimiter = ',');
OriginBalances read_origin_balances(std::istream& in, char delimiter = ',');
void write_origin_balances(std::ostream& out, const OriginBalances& balances, char delimiter = ',');

// --- prices ---------------------------------------------------------------

/// Daily USD prices keyed by (token symbol, UTC date "YYYY-MM-DD").
class PriceTable {
 public:
  /// Throws DuplicateKey or NonPositivePrice.
  void add(std::string_view symbol, std::string_view date, UnitPrice price);
  /// Throws MissingPrice when the pair is not covered.
  UnitPrice lookup(std::string_view symbol, std::string_view date) const;
  std::size_t size() const { return prices_.size(); }

 private:
  static std::string key(std::string_view symbol, std::string_view date);
  std::unordered_map<std::string, UnitPrice> prices_;
};

PriceTable load_prices(const std::filesystem::path& path, char delimiter = ',');
PriceTable read_prices(std::istream& in, char delimiter = ',');

/// UTC calendar date of an epoch timestamp, "YYYY-MM-DD".
std::string utc_date(Timestamp t);

/// amount (token units, decimal text) * price on `date`, half-even to 6 places.
Money usd_normalize(std::string_view amount, std::string_view symbol, std::string_view date, const PriceTable& prices);

}  // namespace lexsim
