#include "lexsim/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <queue>
#include <sstream>

#include <json.hpp>

#include "random.hpp"

namespace lexsim {

namespace {

using json = nlohmann::json;

// Observation period of the protocol summary: 2025-06-01 .. 2025-11-01.
constexpr double kPeriodHours = 153.0 * 24.0;

/// Log-normal shape implied by a median and a mean: mean = median * exp(s^2/2).
double sigma_from_mean(double median, double mean) { return std::sqrt(2.0 * std::log(mean / median)); }

struct AgendaItem {
  Timestamp at;
  std::uint64_t seq;
  int kind;  // 0 = refund, 1 = profit sweep, 2 = rebalance
  std::size_t solver;
  Money amount;
  Money profit;
  bool operator>(const AgendaItem& o) const { return at != o.at ? at > o.at : seq > o.seq; }
};

struct SolverState {
  SolverId id;
  SolverSpec spec;
  Money balance;
  Money accrued_profit;
  Money base_capital;
  Money capital;  // committed capital after rebalancing
  double log_dev = 0.0;
};

std::string hex_address(std::uint64_t seed, std::size_t index) {
  std::string out = "0x";
  char buf[17];
  for (int part = 0; part < 3; ++part) {
    const std::uint64_t v = rnd::mix(seed, index * 3 + static_cast<std::uint64_t>(part));
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    out += buf;
  }
  return out.substr(0, 42);
}

bool accepts(const SolverSpec& s, Money value, const std::string& token, Timestamp created) {
  if (s.value_min && value < *s.value_min) return false;
  if (s.value_max && !(value < *s.value_max)) return false;
  if (!s.tokens.empty() && std::find(s.tokens.begin(), s.tokens.end(), token) == s.tokens.end()) return false;
  if (s.active_from && created < *s.active_from) return false;
  if (s.active_until && !(created < *s.active_until)) return false;
  return true;
}

Money money_field(const json& v) {
  if (v.is_string()) return Money::parse(v.get<std::string>());
  return Money::parse(v.dump());
}

Rate rate_field(const json& v) {
  if (v.is_string()) return Rate::parse(v.get<std::string>());
  return Rate::parse(v.dump());
}

}  // namespace

void validate_profile(const SyntheticProfile& p) {
  auto bad = [](const std::string& what) { return Error(ErrorCode::InvalidProfile, "invalid profile: " + what); };
  if (p.bridge.label.empty()) throw bad("empty bridge");
  if (p.src_chain.empty() || p.dst_chain.empty()) throw bad("missing chain");
  if (p.median_intent_value <= Money{}) throw bad("median_intent_value must be positive");
  if (!(p.value_sigma >= 0.0) || !std::isfinite(p.value_sigma)) throw bad("value_sigma must be non-negative");
  if (!(p.profit_sigma >= 0.0) || !std::isfinite(p.profit_sigma)) throw bad("profit_sigma must be non-negative");
  if (p.solver_profit_pct <= Rate{}) throw bad("solver_profit_pct must be positive");
  if (p.protocol_fee_pct <= Rate{}) throw bad("protocol_fee_pct must be positive");
  if (p.protocol_fixed_fee.is_negative()) throw bad("protocol_fixed_fee must be non-negative");
  if (p.total_liquidity <= Money{}) throw bad("total_liquidity must be positive");
  if (p.solvers.empty() && p.n_solvers < 1) throw bad("n_solvers must be at least 1");
  if (p.top_solver_share && !(*p.top_solver_share > 0.0 && *p.top_solver_share <= 1.0)) {
    throw bad("top_solver_share must lie in (0, 1]");
  }
  if (!(p.intents_per_hour > 0.0) || !std::isfinite(p.intents_per_hour)) throw bad("intents_per_hour must be positive");
  if (p.refund_delay_s <= 0) throw bad("refund_delay_s must be positive");
  if (p.fill_latency_s < 0) throw bad("fill_latency_s must be non-negative");
  if (p.median_fill_gas.is_negative() || p.auction_cost.is_negative()) throw bad("costs must be non-negative");
  if (p.profit_sweep_interval_s < 0) throw bad("profit_sweep_interval_s must be non-negative");
  if (p.rebalance_interval_s < 0) throw bad("rebalance_interval_s must be non-negative");
  if (p.max_fill_fraction && !(*p.max_fill_fraction > 0.0 && *p.max_fill_fraction <= 1.0)) {
    throw bad("max_fill_fraction must lie in (0, 1]");
  }
  if (!(p.capital_log_sigma >= 0.0) || !std::isfinite(p.capital_log_sigma)) {
    throw bad("capital_log_sigma must be non-negative");
  }
  if (p.capital_reversion_s <= 0) throw bad("capital_reversion_s must be positive");
  if (p.tokens.empty()) throw bad("no tokens");
  for (const auto& t : p.tokens) {
    if (t.symbol.empty() || !(t.weight > 0.0)) throw bad("token weights must be positive");
  }
  if (p.diurnal_peak) {
    const auto& d = *p.diurnal_peak;
    if (d.start_hour_utc < 0 || d.start_hour_utc > 23 || d.hours < 1 || d.hours > 24 || !(d.weight > 0.0)) {
      throw bad("diurnal_peak out of range");
    }
  }
  double share_sum = 0.0;
  for (const auto& s : p.solvers) {
    if (s.address.empty()) throw bad("solver without address");
    if (!(s.liquidity_share > 0.0)) throw bad("solver liquidity_share must be positive");
    if (s.value_min && s.value_max && !(*s.value_min < *s.value_max)) throw bad("solver value band is empty");
    share_sum += s.liquidity_share;
  }
  if (!p.solvers.empty() && std::fabs(share_sum - 1.0) > 1e-9) throw bad("solver liquidity shares must sum to 1");
}

SyntheticProfile preset_profile(std::string_view name) {
  SyntheticProfile p;
  p.src_chain = ChainId::of("solana");
  p.dst_chain = ChainId::of("ethereum");
  p.profit_sweep_interval_s = 3600;
  p.rebalance_interval_s = 3600;
  p.capital_log_sigma = 0.15;
  p.max_fill_fraction = 0.3;
  p.diurnal_peak = DiurnalPeak{14, 4, 6.0};
  p.median_fill_gas = Money::parse("0.50");
  if (name == "debridge") {
    p.bridge = Bridge{"debridge"};
    p.median_intent_value = Money::parse("260.411");
    p.value_sigma = sigma_from_mean(260.411, 4.78e9 / 937688.0);
    p.solver_profit_pct = rate_from_percent("1.129");
    p.protocol_fee_pct = rate_from_percent("1.3");
    p.total_liquidity = Money::from_integer(514000);
    p.n_solvers = 9;
    p.top_solver_share = 0.94;
    p.intents_per_hour = 937688.0 / kPeriodHours;
    p.refund_delay_s = 989;
    p.fill_latency_s = 20;
  } else if (name == "across") {
    p.bridge = Bridge{"across"};
    p.src_chain = ChainId::of("base");
    p.median_intent_value = Money::parse("73.06");
    p.value_sigma = sigma_from_mean(73.06, 3.61e9 / 1619496.0);
    p.solver_profit_pct = rate_from_percent("0.018");
    p.protocol_fee_pct = rate_from_percent("0.027");
    p.total_liquidity = Money::from_integer(8900000);
    p.n_solvers = 60;
    p.top_solver_share = 0.19;
    p.intents_per_hour = 1619496.0 / kPeriodHours;
    p.refund_delay_s = 7200;
    p.fill_latency_s = 8;
  } else if (name == "mayan") {
    p.bridge = Bridge{"mayan"};
    p.median_intent_value = Money::parse("74.395");
    p.value_sigma = sigma_from_mean(74.395, 0.852e9 / 895206.0);
    p.solver_profit_pct = rate_from_percent("0.381");
    p.protocol_fee_pct = rate_from_percent("0.029");
    p.total_liquidity = Money::from_integer(600000);
    p.n_solvers = 14;
    p.top_solver_share = 0.24;
    p.intents_per_hour = 895206.0 / kPeriodHours;
    p.refund_delay_s = 1281;
    p.fill_latency_s = 28;
    p.auction_cost = Money::parse("0.10");
  } else {
    throw Error(ErrorCode::InvalidProfile, "unknown profile preset '" + std::string(name) + "'");
  }
  return p;
}

SyntheticProfile parse_profile(std::string_view json_text, const SyntheticProfile& base) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidProfile, std::string("profile is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::InvalidProfile, "profile must be an object");
  SyntheticProfile p = j.contains("preset") ? preset_profile(j["preset"].get<std::string>()) : base;
  try {
    if (j.contains("bridge")) p.bridge = Bridge::parse(j["bridge"].get<std::string>());
    if (j.contains("src_chain")) p.src_chain = ChainId::of(j["src_chain"].get<std::string>());
    if (j.contains("dst_chain")) p.dst_chain = ChainId::of(j["dst_chain"].get<std::string>());
    if (j.contains("median_intent_value")) p.median_intent_value = money_field(j["median_intent_value"]);
    if (j.contains("value_sigma")) p.value_sigma = j["value_sigma"].get<double>();
    if (j.contains("solver_profit_pct")) p.solver_profit_pct = rate_field(j["solver_profit_pct"]);
    if (j.contains("profit_sigma")) p.profit_sigma = j["profit_sigma"].get<double>();
    if (j.contains("protocol_fee_pct")) p.protocol_fee_pct = rate_field(j["protocol_fee_pct"]);
    if (j.contains("protocol_fixed_fee")) p.protocol_fixed_fee = money_field(j["protocol_fixed_fee"]);
    if (j.contains("total_liquidity")) p.total_liquidity = money_field(j["total_liquidity"]);
    if (j.contains("n_solvers")) p.n_solvers = j["n_solvers"].get<int>();
    if (j.contains("top_solver_share")) p.top_solver_share = j["top_solver_share"].get<double>();
    if (j.contains("top_solver_value_min")) p.top_solver_value_min = money_field(j["top_solver_value_min"]);
    if (j.contains("max_fill_fraction")) p.max_fill_fraction = j["max_fill_fraction"].get<double>();
    if (j.contains("intents_per_hour")) p.intents_per_hour = j["intents_per_hour"].get<double>();
    if (j.contains("refund_delay_s")) p.refund_delay_s = j["refund_delay_s"].get<Seconds>();
    if (j.contains("fill_latency_s")) p.fill_latency_s = j["fill_latency_s"].get<Seconds>();
    if (j.contains("median_fill_gas")) p.median_fill_gas = money_field(j["median_fill_gas"]);
    if (j.contains("auction_cost")) p.auction_cost = money_field(j["auction_cost"]);
    if (j.contains("profit_sweep_interval_s")) p.profit_sweep_interval_s = j["profit_sweep_interval_s"].get<Seconds>();
    if (j.contains("rebalance_interval_s")) p.rebalance_interval_s = j["rebalance_interval_s"].get<Seconds>();
    if (j.contains("capital_log_sigma")) p.capital_log_sigma = j["capital_log_sigma"].get<double>();
    if (j.contains("capital_reversion_s")) p.capital_reversion_s = j["capital_reversion_s"].get<Seconds>();
    if (j.contains("start_time")) p.start_time = j["start_time"].get<Timestamp>();
    if (j.contains("diurnal_peak")) {
      const auto& d = j["diurnal_peak"];
      if (d.is_null()) {
        p.diurnal_peak.reset();
      } else {
        DiurnalPeak peak;
        peak.start_hour_utc = d.value("start_hour_utc", peak.start_hour_utc);
        peak.hours = d.value("hours", peak.hours);
        peak.weight = d.value("weight", peak.weight);
        p.diurnal_peak = peak;
      }
    }
    if (j.contains("tokens")) {
      p.tokens.clear();
      for (const auto& t : j["tokens"]) p.tokens.push_back({t.at("symbol").get<std::string>(), t.value("weight", 1.0)});
    }
    if (j.contains("solvers")) {
      p.solvers.clear();
      for (const auto& s : j["solvers"]) {
        SolverSpec spec;
        spec.address = s.at("address").get<std::string>();
        spec.liquidity_share = s.at("liquidity_share").get<double>();
        if (s.contains("value_min")) spec.value_min = money_field(s["value_min"]);
        if (s.contains("value_max")) spec.value_max = money_field(s["value_max"]);
        if (s.contains("tokens")) spec.tokens = s["tokens"].get<std::vector<std::string>>();
        if (s.contains("active_from")) spec.active_from = s["active_from"].get<Timestamp>();
        if (s.contains("active_until")) spec.active_until = s["active_until"].get<Timestamp>();
        p.solvers.push_back(std::move(spec));
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidProfile, std::string("bad profile field: ") + e.what());
  }
  validate_profile(p);
  return p;
}

SyntheticProfile load_profile(const std::filesystem::path& path, const SyntheticProfile& base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileMissing, "cannot open profile '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_profile(ss.str(), base);
}

SyntheticTrace generate_synthetic(const SyntheticProfile& profile, Seconds duration, std::uint64_t seed) {
  if (duration <= 0) throw Error(ErrorCode::InvalidProfile, "duration must be positive");
  validate_profile(profile);

  rnd::Stream rng(seed);
  SyntheticTrace out;
  out.origin_time = profile.start_time;

  // Solvers and starting balances; shares sum to the total exactly.
  std::vector<SolverState> solvers;
  if (profile.solvers.empty()) {
    for (int i = 0; i < profile.n_solvers; ++i) {
      SolverSpec s;
      s.address = hex_address(seed, static_cast<std::size_t>(i));
      if (profile.top_solver_share && profile.n_solvers > 1) {
        const double top = *profile.top_solver_share;
        s.liquidity_share = i == 0 ? top : (1.0 - top) / (profile.n_solvers - 1);
        if (i == 0) s.value_min = profile.top_solver_value_min;
      } else {
        s.liquidity_share = 1.0 / profile.n_solvers;
      }
      solvers.push_back({normalize_solver(s.address, profile.dst_chain), s, {}, {}});
    }
  } else {
    for (const auto& s : profile.solvers) solvers.push_back({normalize_solver(s.address, profile.dst_chain), s, {}, {}});
  }
  Money assigned;
  for (std::size_t i = 0; i < solvers.size(); ++i) {
    Money m = i + 1 == solvers.size()
                  ? profile.total_liquidity - assigned
                  : Money::from_units(static_cast<std::int64_t>(
                        std::floor(static_cast<long double>(profile.total_liquidity.units()) * solvers[i].spec.liquidity_share)));
    solvers[i].balance = m;
    solvers[i].base_capital = m;
    solvers[i].capital = m;
    assigned += m;
    out.origin_balances[solvers[i].id] += m;
  }

  double token_weight_sum = 0.0;
  for (const auto& t : profile.tokens) token_weight_sum += t.weight;

  // Arrival-rate shaping: mean daily rate stays intents_per_hour.
  double base_rate = profile.intents_per_hour / 3600.0;
  double peak_rate = base_rate;
  if (profile.diurnal_peak) {
    const auto& d = *profile.diurnal_peak;
    base_rate = base_rate * 24.0 / ((24.0 - d.hours) + d.hours * d.weight);
    peak_rate = base_rate * d.weight;
  }
  const double max_rate = std::max(base_rate, peak_rate);
  auto rate_at = [&](double t) {
    if (!profile.diurnal_peak) return base_rate;
    const auto& d = *profile.diurnal_peak;
    const auto secs = static_cast<std::int64_t>(std::floor(t));
    const int hour = static_cast<int>(((secs % 86400) + 86400) % 86400 / 3600);
    const int rel = ((hour - d.start_hour_utc) % 24 + 24) % 24;
    return rel < d.hours ? peak_rate : base_rate;
  };

  std::priority_queue<AgendaItem, std::vector<AgendaItem>, std::greater<>> agenda;
  std::uint64_t agenda_seq = 0;
  if (profile.profit_sweep_interval_s > 0) {
    agenda.push({profile.start_time + profile.profit_sweep_interval_s, agenda_seq++, 1, 0, {}, {}});
  }
  if (profile.rebalance_interval_s > 0) {
    agenda.push({profile.start_time + profile.rebalance_interval_s, agenda_seq++, 2, 0, {}, {}});
  }
  // Separate stream so rebalancing does not perturb the intent sequence.
  rnd::Stream rebalance_rng(rnd::mix(seed, 0x7265626Cu));
  const double decay = std::exp(-static_cast<double>(profile.rebalance_interval_s) /
                                static_cast<double>(profile.capital_reversion_s));
  const double shock = profile.capital_log_sigma * std::sqrt(1.0 - decay * decay);
  const Timestamp end_time = profile.start_time + duration;

  auto run_agenda_until = [&](Timestamp limit) {
    while (!agenda.empty() && agenda.top().at <= limit) {
      AgendaItem item = agenda.top();
      agenda.pop();
      if (item.kind == 0) {
        auto& s = solvers[item.solver];
        s.balance += item.amount;
        s.accrued_profit += item.profit;
        out.events.push_back({s.id, item.at, item.amount, EventKind::RefundInflow});
      } else if (item.kind == 2) {
        for (auto& s : solvers) {
          s.log_dev = s.log_dev * decay + shock * rebalance_rng.normal();
          const Money target = Money::from_units(
              std::llround(static_cast<double>(s.base_capital.units()) * std::exp(s.log_dev) / 10000.0) * 10000);
          if (target > s.capital) {
            const Money add = target - s.capital;
            s.balance += add;
            s.capital += add;
            out.total_injected += add;
            out.events.push_back({s.id, item.at, add, EventKind::ExternalInjection});
          } else if (target < s.capital) {
            const Money take = std::min(s.capital - target, s.balance);
            if (take > Money{}) {
              s.balance -= take;
              s.capital -= take;
              out.total_withdrawn += take;
              out.events.push_back({s.id, item.at, -take, EventKind::ExternalWithdrawal});
            }
          }
        }
        const Timestamp next = item.at + profile.rebalance_interval_s;
        if (next <= end_time) agenda.push({next, agenda_seq++, 2, 0, {}, {}});
      } else {
        for (auto& s : solvers) {
          Money take = std::min(s.accrued_profit, s.balance);
          if (take > Money{}) {
            s.balance -= take;
            s.accrued_profit -= take;
            out.total_withdrawn += take;
            out.events.push_back({s.id, item.at, -take, EventKind::ExternalWithdrawal});
          }
        }
        const Timestamp next = item.at + profile.profit_sweep_interval_s;
        if (next <= end_time) agenda.push({next, agenda_seq++, 1, 0, {}, {}});
      }
    }
  };

  const double log_median = std::log(profile.median_intent_value.to_double());
  const double log_gas = profile.median_fill_gas.is_zero() ? 0.0 : std::log(profile.median_fill_gas.to_double());
  std::uint64_t seq = 0;
  std::vector<std::size_t> eligible;
  double clock = static_cast<double>(profile.start_time);
  while (true) {
    clock += rng.exponential(max_rate);
    if (clock >= static_cast<double>(end_time)) break;
    if (profile.diurnal_peak && !rng.bernoulli(rate_at(clock) / max_rate)) continue;
    const auto created = static_cast<Timestamp>(std::floor(clock));

    IntentRecord r;
    char idbuf[32];
    std::snprintf(idbuf, sizeof idbuf, "%09llu", static_cast<unsigned long long>(seq++));
    r.intent_id = profile.bridge.label + "-" + idbuf;
    r.bridge = profile.bridge;
    r.src_chain = profile.src_chain;
    r.dst_chain = profile.dst_chain;
    r.same_chain_swap = profile.src_chain == profile.dst_chain;
    r.created_at = created;

    const double value = std::exp(log_median + profile.value_sigma * rng.normal());
    r.value = Money::from_units(std::max<std::int64_t>(10000, std::llround(value * 100.0) * 10000));
    r.solver_profit_pct =
        Rate::from_double(profile.solver_profit_pct.to_double() * std::exp(profile.profit_sigma * rng.normal()));
    r.protocol_fee_pct = profile.protocol_fee_pct;
    r.protocol_fixed_fee = profile.protocol_fixed_fee;
    r.fill_gas = profile.median_fill_gas.is_zero()
                     ? Money{}
                     : Money::from_units(std::llround(std::exp(log_gas + 0.3 * rng.normal()) * 100.0) * 10000);
    r.auction_cost = profile.auction_cost;
    {
      double pick = rng.uniform() * token_weight_sum;
      r.dst_token = profile.tokens.back().symbol;
      for (const auto& t : profile.tokens) {
        if (pick < t.weight) {
          r.dst_token = t.symbol;
          break;
        }
        pick -= t.weight;
      }
    }

    const Timestamp fill_at = created + profile.fill_latency_s;
    run_agenda_until(fill_at);

    eligible.clear();
    long double weight_sum = 0;
    const auto within_limit = [&](const SolverState& s, Money value) {
      if (!profile.max_fill_fraction) return true;
      return static_cast<long double>(value.units()) <=
             static_cast<long double>(s.base_capital.units()) * *profile.max_fill_fraction;
    };
    for (std::size_t i = 0; i < solvers.size(); ++i) {
      const auto& s = solvers[i];
      if (s.balance >= r.value && within_limit(s, r.value) && accepts(s.spec, r.value, r.dst_token, created)) {
        eligible.push_back(i);
        weight_sum += static_cast<long double>(s.balance.units());
      }
    }
    // Draw unconditionally so the random stream does not depend on eligibility.
    const double pick = rng.uniform();
    if (!eligible.empty()) {
      long double target = pick * weight_sum;
      std::size_t chosen = eligible.back();
      for (auto i : eligible) {
        const auto w = static_cast<long double>(solvers[i].balance.units());
        if (target < w) {
          chosen = i;
          break;
        }
        target -= w;
      }
      auto& s = solvers[chosen];
      const Money profit = r.solver_profit();
      r.solver = s.id;
      r.fulfilled_at = fill_at;
      r.refunded_at = fill_at + profile.refund_delay_s;
      s.balance -= r.value;
      out.total_profit += profit;
      out.events.push_back({s.id, fill_at, -r.value, EventKind::FulfillmentOutflow});
      agenda.push({*r.refunded_at, agenda_seq++, 0, chosen, r.value + profit, profit});
    }
    out.records.push_back(std::move(r));
  }
  // Settle every outstanding refund; sweeps stop at the end of the trace.
  while (!agenda.empty()) {
    if (agenda.top().kind != 0 && agenda.top().at > end_time) {
      agenda.pop();
      continue;
    }
    run_agenda_until(agenda.top().at);
  }

  std::stable_sort(out.events.begin(), out.events.end(),
                   [](const LiquidityEvent& a, const LiquidityEvent& b) { return a.at < b.at; });
  sort_records(out.records);
  return out;
}

}  // namespace lexsim
