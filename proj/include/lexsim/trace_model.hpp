#pragma once

// Canonical in-memory form of cross-chain intents, solver identities and
// liquidity events. Everything here is immutable once validated.

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lexsim/decimal.hpp"
#include "lexsim/error.hpp"

namespace lexsim {

/// Epoch seconds, UTC.
using Timestamp = std::int64_t;
using Seconds = std::int64_t;

/// Blockchain label. The nine chains of the collected dataset are built in;
/// further labels are accepted when listed in ValidationOptions.
class ChainId {
 public:
  ChainId() = default;

  /// Case-insensitive lookup among the built-in chains plus `extensions`.
  static std::optional<ChainId> parse(std::string_view label, std::span<const std::string> extensions = {});
  /// Built-in chain by name; throws UnknownChain otherwise.
  static ChainId of(std::string_view label);

  const std::string& name() const { return name_; }
  bool builtin() const;
  bool empty() const { return name_.empty(); }

  friend auto operator<=>(const ChainId&, const ChainId&) = default;

  static std::span<const std::string_view> builtin_names();

 private:
  explicit ChainId(std::string name) : name_(std::move(name)) {}
  std::string name_;
};

/// Bridge protocol label: mayan, across, debridge or an extension label.
struct Bridge {
  std::string label;

  static Bridge parse(std::string_view text);
  /// Solver selection is first-come-first-served (no auction bidding cost).
  bool fcfs() const { return label == "across" || label == "debridge"; }
  friend auto operator<=>(const Bridge&, const Bridge&) = default;
};

struct SolverId {
  std::string address;  // lower-case
  ChainId chain;

  std::string str() const { return address + "@" + chain.name(); }
  friend auto operator<=>(const SolverId&, const SolverId&) = default;
};

/// Lower-cases `address` so that checksummed and plain spellings collapse.
SolverId normalize_solver(std::string_view address, const ChainId& chain);

struct IntentRecord {
  std::string intent_id;
  Bridge bridge;
  ChainId src_chain;
  ChainId dst_chain;
  bool same_chain_swap = false;
  SolverId solver;  // empty address when never fulfilled
  Timestamp created_at = 0;
  std::optional<Timestamp> fulfilled_at;
  std::optional<Timestamp> refunded_at;
  Money value;                 // V_i
  Rate solver_profit_pct;      // p_i, fraction; may be negative
  Rate protocol_fee_pct;       // fraction of V_i
  Money protocol_fixed_fee;
  Money fill_gas;              // g_i
  Money auction_cost;          // C_i^auction
  std::string dst_token;
  std::map<std::string, std::string> raw;

  /// V_i * p_i, or V_i * `margin_override` when given.
  Money solver_profit(std::optional<Rate> margin_override = std::nullopt) const;
  /// pct * V_i + fixed fee.
  Money protocol_fee() const;
  /// g_i + C_i^auction.
  Money fill_cost() const { return fill_gas + auction_cost; }

  friend bool operator==(const IntentRecord&, const IntentRecord&) = default;
};

enum class EventKind { FulfillmentOutflow, RefundInflow, ExternalInjection, ExternalWithdrawal };

const char* to_string(EventKind kind);
std::optional<EventKind> parse_event_kind(std::string_view text);

struct LiquidityEvent {
  SolverId solver;
  Timestamp at = 0;
  Money delta;
  EventKind kind = EventKind::ExternalInjection;

  friend bool operator==(const LiquidityEvent&, const LiquidityEvent&) = default;
};

struct Rejection {
  ErrorCode code;
  std::string field;
  std::string message;
};

class RecordRejected : public Error {
 public:
  explicit RecordRejected(Rejection r)
      : Error(r.code, r.field + ": " + r.message), rejection_(std::move(r)) {}
  const Rejection& rejection() const { return rejection_; }

 private:
  Rejection rejection_;
};

struct ValidationOptions {
  std::vector<std::string> extra_chains;
};

/// First violated invariant of `record`, if any.
std::optional<Rejection> check_record(const IntentRecord& record, const ValidationOptions& options = {});

/// Returns `record` unchanged when valid; throws RecordRejected otherwise.
IntentRecord validate_record(IntentRecord record, const ValidationOptions& options = {});

/// One DuplicateId rejection per repeated intent_id (after the first).
std::vector<Rejection> check_unique_ids(std::span<const IntentRecord> records);

std::optional<Rejection> check_event(const LiquidityEvent& event);

}  // namespace lexsim
