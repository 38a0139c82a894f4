#include "lexsim/trace_model.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <unordered_set>

namespace lexsim {

namespace {

constexpr std::array<std::string_view, 9> kBuiltinChains = {
    "solana", "arbitrum", "ethereum", "base", "polygon", "bnb", "unichain", "optimism", "avalanche",
};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

std::span<const std::string_view> ChainId::builtin_names() { return kBuiltinChains; }

std::optional<ChainId> ChainId::parse(std::string_view label, std::span<const std::string> extensions) {
  std::string name = lower(trim(label));
  if (name.empty()) return std::nullopt;
  if (std::find(kBuiltinChains.begin(), kBuiltinChains.end(), name) != kBuiltinChains.end()) {
    return ChainId(std::move(name));
  }
  for (const auto& ext : extensions) {
    if (lower(ext) == name) return ChainId(std::move(name));
  }
  return std::nullopt;
}

ChainId ChainId::of(std::string_view label) {
  auto c = parse(label);
  if (!c) throw Error(ErrorCode::UnknownChain, "unknown chain '" + std::string(label) + "'");
  return *c;
}

bool ChainId::builtin() const {
  return std::find(kBuiltinChains.begin(), kBuiltinChains.end(), name_) != kBuiltinChains.end();
}

Bridge Bridge::parse(std::string_view text) { return Bridge{lower(trim(text))}; }

SolverId normalize_solver(std::string_view address, const ChainId& chain) {
  std::string a = lower(trim(address));
  if (a.empty()) throw Error(ErrorCode::EmptyAddress, "solver address is empty");
  return SolverId{std::move(a), chain};
}

Money IntentRecord::solver_profit(std::optional<Rate> margin_override) const {
  return scale(value, margin_override.value_or(solver_profit_pct));
}

Money IntentRecord::protocol_fee() const { return scale(value, protocol_fee_pct) + protocol_fixed_fee; }

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::FulfillmentOutflow: return "fulfillment_outflow";
    case EventKind::RefundInflow: return "refund_inflow";
    case EventKind::ExternalInjection: return "external_injection";
    case EventKind::ExternalWithdrawal: return "external_withdrawal";
  }
  return "unknown";
}

std::optional<EventKind> parse_event_kind(std::string_view text) {
  const std::string t = lower(trim(text));
  for (auto k : {EventKind::FulfillmentOutflow, EventKind::RefundInflow, EventKind::ExternalInjection,
                 EventKind::ExternalWithdrawal}) {
    if (t == to_string(k)) return k;
  }
  return std::nullopt;
}

std::optional<Rejection> check_record(const IntentRecord& r, const ValidationOptions& options) {
  auto reject = [](ErrorCode c, std::string field, std::string msg) {
    return std::optional<Rejection>(Rejection{c, std::move(field), std::move(msg)});
  };
  if (r.intent_id.empty()) return reject(ErrorCode::InvalidArgument, "intent_id", "empty intent id");
  if (r.bridge.label.empty()) return reject(ErrorCode::InvalidArgument, "bridge", "empty bridge label");

  if (!ChainId::parse(r.src_chain.name(), options.extra_chains)) {
    return reject(ErrorCode::UnknownChain, "src_chain", "unknown chain '" + r.src_chain.name() + "'");
  }
  if (!ChainId::parse(r.dst_chain.name(), options.extra_chains)) {
    return reject(ErrorCode::UnknownChain, "dst_chain", "unknown chain '" + r.dst_chain.name() + "'");
  }
  if (r.src_chain == r.dst_chain && !r.same_chain_swap) {
    return reject(ErrorCode::UnknownChain, "dst_chain", "source equals destination without same-chain flag");
  }
  // Unfulfilled intents carry no solver.
  if (r.fulfilled_at && r.solver.address.empty()) {
    return reject(ErrorCode::EmptyAddress, "solver", "fulfilled intent without solver");
  }
  if (!r.solver.address.empty() && !ChainId::parse(r.solver.chain.name(), options.extra_chains)) {
    return reject(ErrorCode::UnknownChain, "solver", "unknown solver chain '" + r.solver.chain.name() + "'");
  }

  if (r.fulfilled_at && *r.fulfilled_at < r.created_at) {
    return reject(ErrorCode::TimestampOrder, "fulfilled_at", "fulfilled before creation");
  }
  if (r.refunded_at) {
    if (*r.refunded_at < r.created_at) {
      return reject(ErrorCode::TimestampOrder, "refunded_at", "refunded before creation");
    }
    if (r.fulfilled_at && *r.refunded_at < *r.fulfilled_at) {
      return reject(ErrorCode::TimestampOrder, "refunded_at", "refunded before fulfillment");
    }
  }
  if (r.value.is_negative()) return reject(ErrorCode::NegativeValue, "value", "negative intent value");
  if (r.fill_gas.is_negative()) return reject(ErrorCode::NegativeValue, "fill_gas", "negative fill gas");
  if (r.auction_cost.is_negative()) {
    return reject(ErrorCode::NegativeValue, "auction_cost", "negative auction cost");
  }
  if (r.protocol_fee_pct.is_negative()) {
    return reject(ErrorCode::NegativeValue, "protocol_fee_pct", "negative protocol fee");
  }
  if (r.protocol_fixed_fee.is_negative()) {
    return reject(ErrorCode::NegativeValue, "protocol_fixed_fee", "negative fixed fee");
  }
  return std::nullopt;
}

IntentRecord validate_record(IntentRecord record, const ValidationOptions& options) {
  if (auto rej = check_record(record, options)) throw RecordRejected(std::move(*rej));
  return record;
}

std::vector<Rejection> check_unique_ids(std::span<const IntentRecord> records) {
  std::vector<Rejection> out;
  std::unordered_set<std::string_view> seen;
  seen.reserve(records.size());
  for (const auto& r : records) {
    if (!seen.insert(r.intent_id).second) {
      out.push_back({ErrorCode::DuplicateId, "intent_id", "duplicate intent id '" + r.intent_id + "'"});
    }
  }
  return out;
}

std::optional<Rejection> check_event(const LiquidityEvent& e) {
  if (e.solver.address.empty()) return Rejection{ErrorCode::EmptyAddress, "solver", "empty solver address"};
  switch (e.kind) {
    case EventKind::FulfillmentOutflow:
    case EventKind::ExternalWithdrawal:
      if (!e.delta.is_negative()) {
        return Rejection{ErrorCode::InvalidArgument, "delta", std::string(to_string(e.kind)) + " must be negative"};
      }
      break;
    case EventKind::RefundInflow:
    case EventKind::ExternalInjection:
      if (e.delta.is_negative() || e.delta.is_zero()) {
        return Rejection{ErrorCode::InvalidArgument, "delta", std::string(to_string(e.kind)) + " must be positive"};
      }
      break;
  }
  return std::nullopt;
}

}  // namespace lexsim
