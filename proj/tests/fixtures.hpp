#pragma once

// Small builders shared by the unit tests.

#include <string>
#include <vector>

#include "lexsim/engine.hpp"

namespace fx {

using namespace lexsim;

inline Money usd(const char* text) { return Money::parse(text); }

inline IntentRecord intent(std::string id, Timestamp created, const char* value, const char* profit_fraction = "0.01",
                           const char* fee_fraction = "0.001", const char* gas = "0.5") {
  IntentRecord r;
  r.intent_id = std::move(id);
  r.bridge = Bridge{"debridge"};
  r.src_chain = ChainId::of("solana");
  r.dst_chain = ChainId::of("ethereum");
  r.solver = normalize_solver("0xabc", ChainId::of("ethereum"));
  r.created_at = created;
  r.fulfilled_at = created + 20;
  r.refunded_at = created + 1000;
  r.value = Money::parse(value);
  r.solver_profit_pct = Rate::parse(profit_fraction);
  r.protocol_fee_pct = Rate::parse(fee_fraction);
  r.fill_gas = Money::parse(gas);
  r.dst_token = "USDC";
  return r;
}

inline Route debridge_route() { return Route{ChainId::of("solana"), ChainId::of("ethereum"), Bridge{"debridge"}}; }

inline SolverId solver(const char* address) { return normalize_solver(address, ChainId::of("ethereum")); }

inline AttackTrigger trigger_at(Timestamp t, const char* liquidity, const char* alpha = "1") {
  AttackTrigger tr;
  tr.at = t;
  tr.liquidity_at_trigger = Money::parse(liquidity);
  tr.total_liquidity = Money::parse(liquidity);
  tr.alpha = Rate::parse(alpha);
  return tr;
}

}  // namespace fx
