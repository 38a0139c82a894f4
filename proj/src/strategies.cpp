#include "lexsim/strategies.hpp"

#include <algorithm>
#include <ostream>

#include "csv.hpp"

namespace lexsim {

const char* to_string(TriggerScope scope) {
  switch (scope) {
    case TriggerScope::Total: return "total";
    case TriggerScope::PerSolver: return "per-solver";
    case TriggerScope::Class: return "class";
  }
  return "unknown";
}

std::optional<TriggerScope> parse_trigger_scope(std::string_view text) {
  if (text == "total") return TriggerScope::Total;
  if (text == "per-solver") return TriggerScope::PerSolver;
  if (text == "class") return TriggerScope::Class;
  return std::nullopt;
}

std::vector<AttackTrigger> scan_for_triggers(const LiquiditySeries& series, const TriggerConfig& config, Timestamp t0,
                                             Timestamp t1) {
  const Seconds res = config.sample_resolution;
  if (res <= 0) throw Error(ErrorCode::InvalidArgument, "sample resolution must be positive");
  if (config.cooldown_s < 0) throw Error(ErrorCode::InvalidArgument, "cooldown must be non-negative");
  const Timestamp origin = series.start();
  if (t1 < origin + res) {
    throw Error(ErrorCode::InsufficientHistory, "interval ends before two liquidity samples exist");
  }
  const auto k = static_cast<std::int64_t>(config.k);

  std::optional<LiquidityStats> fixed;
  if (config.window_mode == WindowMode::FullPeriod) {
    fixed = stats_at(series, std::max(t1, series.last_change()), WindowMode::FullPeriod, res);
  }

  std::vector<AttackTrigger> out;
  ExpandingStats running;
  Timestamp next_allowed = std::max(t0, origin + config.warmup_s);
  const auto pts = series.points();
  std::size_t i = 0;
  for (Timestamp t = origin; t <= t1; t += res) {
    while (i + 1 < pts.size() && pts[i + 1].at <= t) ++i;
    const Money balance = pts[i].balance;
    Money median;
    Money stddev;
    if (fixed) {
      median = fixed->median;
      stddev = fixed->stddev;
    } else {
      running.add(balance);
      if (running.count() < 2) continue;
      median = running.median();
      stddev = running.stddev();
    }
    if (t < next_allowed) continue;
    const Money threshold = median - stddev * k;
    if (balance < threshold) {
      AttackTrigger trig;
      trig.at = t;
      trig.liquidity_at_trigger = balance;
      trig.threshold = threshold;
      trig.median = median;
      trig.stddev = stddev;
      trig.total_liquidity = balance;
      trig.scope = config.scope;
      trig.scope_label = series.solver().address;
      out.push_back(std::move(trig));
      next_allowed = t + std::max<Seconds>(config.cooldown_s, 1);
    }
  }
  return out;
}

namespace {

const SolverId& total_label() {
  static const SolverId id{"total", ChainId{}};
  return id;
}

}  // namespace

std::vector<AttackTrigger> detect_triggers(const SeriesMap& series, const TriggerConfig& config, Timestamp t0,
                                           Timestamp t1) {
  if (config.scope == TriggerScope::Class) {
    if (!config.intent_class) throw Error(ErrorCode::InvalidArgument, "class scope requires an intent class");
    return targeted_triggers(series, *config.intent_class, config, t0, t1);
  }
  if (series.empty()) throw Error(ErrorCode::InsufficientHistory, "no liquidity series");
  const LiquiditySeries total = sum_series(series, nullptr, total_label());

  if (config.scope == TriggerScope::Total) {
    auto out = scan_for_triggers(total, config, t0, t1);
    for (auto& trig : out) trig.scope_label = "total";
    return out;
  }

  std::vector<AttackTrigger> out;
  for (const auto& [id, s] : series) {
    for (auto& trig : scan_for_triggers(s, config, t0, t1)) {
      trig.total_liquidity = total.balance_at(trig.at);
      trig.scope_label = id.str();
      out.push_back(std::move(trig));
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const AttackTrigger& a, const AttackTrigger& b) {
    return a.at != b.at ? a.at < b.at : a.scope_label < b.scope_label;
  });
  return out;
}

std::vector<AttackTrigger> targeted_triggers(const SeriesMap& series, const IntentClass& cls,
                                             const TriggerConfig& config, Timestamp t0, Timestamp t1) {
  cls.validate();
  if (series.empty()) throw Error(ErrorCode::InsufficientHistory, "no liquidity series");
  const LiquiditySeries total = sum_series(series, nullptr, total_label());
  const LiquiditySeries effective = sum_series(series, &cls.competing, SolverId{"effective", ChainId{}});

  TriggerConfig cfg = config;
  cfg.scope = TriggerScope::Class;
  auto out = scan_for_triggers(effective, cfg, t0, t1);
  const std::string label = cls.describe();
  for (auto& trig : out) {
    trig.total_liquidity = total.balance_at(trig.at);
    trig.alpha = trig.total_liquidity.is_zero() ? Rate::from_integer(1) : ratio(trig.liquidity_at_trigger, trig.total_liquidity);
    trig.scope_label = label;
  }
  return out;
}

std::vector<AttackTrigger> fixed_schedule(const SeriesMap& series, std::span<const Timestamp> times) {
  const LiquiditySeries total = sum_series(series, nullptr, total_label());
  std::vector<AttackTrigger> out;
  for (Timestamp t : times) {
    AttackTrigger trig;
    trig.at = t;
    trig.total_liquidity = total.balance_at(t);
    trig.liquidity_at_trigger = trig.total_liquidity;
    trig.scope = TriggerScope::Total;
    trig.scope_label = "fixed";
    out.push_back(std::move(trig));
  }
  return out;
}

std::vector<Timestamp> uniform_times(Timestamp t0, Timestamp t1, Seconds spacing) {
  if (spacing <= 0) throw Error(ErrorCode::InvalidArgument, "spacing must be positive");
  std::vector<Timestamp> out;
  for (Timestamp t = t0; t <= t1; t += spacing) out.push_back(t);
  return out;
}

void write_schedule(std::ostream& out, std::span<const AttackTrigger> triggers, char delimiter) {
  csv::write_row(out, {"t_s", "liquidity", "threshold", "alpha", "scope"}, delimiter);
  for (const auto& t : triggers) {
    csv::write_row(out,
                   {std::to_string(t.at), t.liquidity_at_trigger.str(), t.threshold.str(), t.alpha.str(),
                    std::string(to_string(t.scope)) + ":" + t.scope_label},
                   delimiter);
  }
}

}  // namespace lexsim
