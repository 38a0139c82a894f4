#include "lexsim/engine.hpp"

#include <algorithm>
#include <sstream>

#include "random.hpp"

namespace lexsim {

const char* to_string(AttackMode mode) { return mode == AttackMode::Rational ? "rational" : "byzantine"; }

void AttackConfig::validate() const {
  if (attack_window <= 0) throw Error(ErrorCode::InvalidArgument, "attack window must be positive");
  if (max_tx_value <= Money{}) throw Error(ErrorCode::InvalidArgument, "max_tx_value must be positive");
  if (volume_multiplier <= Rate{}) throw Error(ErrorCode::InvalidArgument, "volume multiplier must be positive");
  if (epsilon.fixed.is_negative() || epsilon.bps < 0) throw Error(ErrorCode::InvalidArgument, "epsilon must be non-negative");
  if (override_protocol_fee_pct && override_protocol_fee_pct->is_negative()) {
    throw Error(ErrorCode::InvalidArgument, "protocol fee override must be non-negative");
  }
  if (flood_gas.constant && flood_gas.constant->is_negative()) {
    throw Error(ErrorCode::InvalidArgument, "flood gas must be non-negative");
  }
}

std::string AttackConfig::canonical() const {
  std::ostringstream s;
  s << "route=" << route.str() << ";window=" << attack_window << ";max_tx=" << max_tx_value.str()
    << ";vol_mul=" << volume_multiplier.str()
    << ";profit=" << (override_solver_profit_pct ? override_solver_profit_pct->str() : "real")
    << ";fee=" << (override_protocol_fee_pct ? override_protocol_fee_pct->str() : "real") << ";eps=";
  switch (epsilon.model) {
    case EpsilonModel::Zero: s << "zero"; break;
    case EpsilonModel::Fixed: s << "fixed:" << epsilon.fixed.str(); break;
    case EpsilonModel::BpsOfInducedVolume: s << "bps:" << epsilon.bps; break;
  }
  s << ";gas=" << (flood_gas.constant ? flood_gas.constant->str() : "trailing:" + std::to_string(flood_gas.trailing_window_s))
    << ";mode=" << to_string(mode);
  return s.str();
}

InductionCost induction_cost_for_drain(Money drained, Rate fee_pct, Money max_tx_value, Money gas_per_intent) {
  if (max_tx_value <= Money{}) throw Error(ErrorCode::InvalidArgument, "max_tx_value must be positive");
  if (drained.is_negative()) throw Error(ErrorCode::InvalidArgument, "drained liquidity must be non-negative");
  InductionCost c;
  c.working_capital = drained;
  c.fee_component = scale(drained, fee_pct);
  c.n_flood_intents = (drained.units() + max_tx_value.units() - 1) / max_tx_value.units();
  c.gas_component = gas_per_intent * c.n_flood_intents;
  c.total = c.fee_component + c.gas_component;
  return c;
}

InductionCost induction_cost(Rate alpha, Money liquidity, Rate fee_pct, Money max_tx_value, Money gas_per_intent) {
  if (alpha.is_negative() || alpha > Rate::from_integer(1)) {
    throw Error(ErrorCode::InvalidArgument, "alpha must lie in [0, 1]");
  }
  if (liquidity.is_negative()) throw Error(ErrorCode::InvalidArgument, "liquidity must be non-negative");
  return induction_cost_for_drain(scale(liquidity, alpha), fee_pct, max_tx_value, gas_per_intent);
}

RouteTrace::RouteTrace(std::span<const IntentRecord> records, const Route& route) : route_(route) {
  for (const auto& r : records) {
    if (route.matches(r)) intents_.push_back(r);
  }
  std::stable_sort(intents_.begin(), intents_.end(), [](const IntentRecord& a, const IntentRecord& b) {
    return a.created_at != b.created_at ? a.created_at < b.created_at : a.intent_id < b.intent_id;
  });
}

std::size_t RouteTrace::lower_index(Timestamp t) const {
  return static_cast<std::size_t>(
      std::lower_bound(intents_.begin(), intents_.end(), t,
                       [](const IntentRecord& r, Timestamp v) { return r.created_at < v; }) -
      intents_.begin());
}

std::span<const IntentRecord> RouteTrace::window(Timestamp t, Seconds w) const {
  const std::size_t a = lower_index(t);
  const std::size_t b = lower_index(t + w);
  return std::span<const IntentRecord>(intents_).subspan(a, b - a);
}

namespace {

template <typename T, typename Proj>
std::optional<T> lower_median(std::span<const IntentRecord> rs, Proj proj) {
  if (rs.empty()) return std::nullopt;
  std::vector<T> v;
  v.reserve(rs.size());
  for (const auto& r : rs) v.push_back(proj(r));
  auto mid = v.begin() + static_cast<std::ptrdiff_t>((v.size() - 1) / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

}  // namespace

Money RouteTrace::trailing_gas_median(Timestamp t, Seconds trailing) const {
  const std::size_t end = lower_index(t);
  const std::size_t begin = lower_index(t - trailing);
  auto proj = [](const IntentRecord& r) { return r.fill_gas; };
  std::span<const IntentRecord> all(intents_);
  if (auto m = lower_median<Money>(all.subspan(begin, end - begin), proj)) return *m;
  if (auto m = lower_median<Money>(all.subspan(0, end), proj)) return *m;
  return Money{};
}

Rate RouteTrace::trailing_fee_median(Timestamp t, Seconds trailing) const {
  const std::size_t end = lower_index(t);
  const std::size_t begin = lower_index(t - trailing);
  auto proj = [](const IntentRecord& r) { return r.protocol_fee_pct; };
  std::span<const IntentRecord> all(intents_);
  if (auto m = lower_median<Rate>(all.subspan(begin, end - begin), proj)) return *m;
  if (auto m = lower_median<Rate>(all.subspan(0, end), proj)) return *m;
  // No history before t: the route's overall median.
  if (auto m = lower_median<Rate>(all, proj)) return *m;
  return Rate{};
}

std::vector<IntentRecord> capture_intents(std::span<const IntentRecord> route_intents, Timestamp t_s, Seconds window,
                                          Rate volume_multiplier, std::uint64_t seed) {
  if (volume_multiplier.is_negative()) throw Error(ErrorCode::InvalidArgument, "negative volume multiplier");
  auto first = std::lower_bound(route_intents.begin(), route_intents.end(), t_s,
                                [](const IntentRecord& r, Timestamp v) { return r.created_at < v; });
  auto last = std::lower_bound(first, route_intents.end(), t_s + window,
                               [](const IntentRecord& r, Timestamp v) { return r.created_at < v; });
  const std::int64_t copies = volume_multiplier.units() / Rate::kScale;
  const std::int64_t frac_units = volume_multiplier.units() % Rate::kScale;
  const double frac = static_cast<double>(frac_units) / static_cast<double>(Rate::kScale);

  std::vector<IntentRecord> out;
  out.reserve(static_cast<std::size_t>(last - first) * static_cast<std::size_t>(copies + 1));
  rnd::Stream rng(seed);
  for (auto it = first; it != last; ++it) {
    for (std::int64_t c = 0; c < copies; ++c) out.push_back(*it);
    if (frac_units != 0 && rng.bernoulli(frac)) out.push_back(*it);
  }
  return out;
}

std::uint64_t instance_seed(std::uint64_t global_seed, Timestamp t_s, const AttackConfig& config) {
  return rnd::mix(rnd::mix(global_seed, static_cast<std::uint64_t>(t_s)), rnd::fnv1a(config.canonical()));
}

namespace {

Money flood_gas_at(const RouteTrace& trace, const AttackConfig& config, Timestamp t) {
  if (config.flood_gas.constant) return *config.flood_gas.constant;
  return trace.trailing_gas_median(t, config.flood_gas.trailing_window_s);
}

Rate induction_fee_at(const RouteTrace& trace, const AttackConfig& config, Timestamp t) {
  if (config.override_protocol_fee_pct) return *config.override_protocol_fee_pct;
  return trace.trailing_fee_median(t, config.flood_gas.trailing_window_s);
}

}  // namespace

AttackInstanceResult rational_attack(const AttackTrigger& trigger, const RouteTrace& trace, const AttackConfig& config,
                                     std::uint64_t seed) {
  config.validate();
  if (trace.empty()) throw Error(ErrorCode::EmptyRoute, "no intents on route " + trace.route().str());

  AttackInstanceResult res;
  res.t_s = trigger.at;
  res.alpha = trigger.alpha;
  res.liquidity = trigger.total_liquidity;

  const InductionCost ind = induction_cost_for_drain(trigger.drain_target(), induction_fee_at(trace, config, trigger.at),
                                                     config.max_tx_value, flood_gas_at(trace, config, trigger.at));
  res.working_capital = ind.working_capital;
  res.induction_cost = ind.total;
  res.n_flood_intents = ind.n_flood_intents;

  const auto captured = capture_intents(trace.intents(), trigger.at, config.attack_window, config.volume_multiplier, seed);
  res.captured_intent_ids.reserve(captured.size());
  for (const auto& r : captured) {
    res.revenue += r.solver_profit(config.override_solver_profit_pct);
    res.fill_cost += r.fill_cost();
    res.volume_fulfilled += r.value;
    res.captured_intent_ids.push_back(r.intent_id);
  }
  res.n_fulfillments = static_cast<std::int64_t>(captured.size());

  switch (config.epsilon.model) {
    case EpsilonModel::Zero: break;
    case EpsilonModel::Fixed: res.epsilon = config.epsilon.fixed; break;
    case EpsilonModel::BpsOfInducedVolume:
      res.epsilon = scale(res.working_capital, Rate::from_units(config.epsilon.bps * (Rate::kScale / 10000)));
      break;
  }
  res.net_profit = res.revenue - res.induction_cost - res.fill_cost - res.epsilon;
  return res;
}

ByzantineImpact byzantine_attack(const AttackTrigger& trigger, const RouteTrace& trace, const AttackConfig& config) {
  config.validate();
  ByzantineImpact imp;
  imp.t_s = trigger.at;
  imp.window = config.attack_window;
  // Full liquidity must be drained regardless of the window length.
  imp.total_cost = induction_cost_for_drain(trigger.total_liquidity, induction_fee_at(trace, config, trigger.at),
                                            config.max_tx_value, flood_gas_at(trace, config, trigger.at))
                       .total;

  const auto failed = trace.window(trigger.at, config.attack_window);
  imp.failed_intents = static_cast<std::int64_t>(failed.size());
  if (failed.empty()) return imp;

  std::vector<Money> values;
  values.reserve(failed.size());
  __int128 sum = 0;
  __int128 sum_sq = 0;
  for (const auto& r : failed) {
    imp.missed_solver_profit += r.solver_profit();
    imp.missed_protocol_fees += r.protocol_fee();
    imp.failed_value += r.value;
    values.push_back(r.value);
    sum += r.value.units();
    sum_sq += static_cast<__int128>(r.value.units()) * r.value.units();
  }
  auto mid = values.begin() + static_cast<std::ptrdiff_t>((values.size() - 1) / 2);
  std::nth_element(values.begin(), mid, values.end());
  imp.failed_value_median = *mid;
  imp.failed_value_std = money_pstddev(sum, sum_sq, static_cast<std::int64_t>(values.size()));
  return imp;
}

}  // namespace lexsim
