// Acceptance run: one PASS/FAIL line per criterion, with the measured values
// and the pinned limits. Exit status is non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "lexsim/report.hpp"
#include "lexsim/synthetic.hpp"

using namespace lexsim;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  const char* name;
  double limit_s;
  std::function<Outcome()> run;
};

Route route_of(const SyntheticProfile& p) { return Route{p.src_chain, p.dst_chain, p.bridge}; }

SimulationInputs synth_inputs(const SyntheticProfile& p, Seconds duration, std::uint64_t seed) {
  auto tr = generate_synthetic(p, duration, seed);
  return make_inputs(std::move(tr.records), tr.events, tr.origin_balances, tr.origin_time);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Held out from the seeds used while calibrating the presets.
constexpr std::uint64_t kSeeds[] = {101, 102, 103, 104};
constexpr Seconds kWeek = 7 * 86400;
constexpr Seconds kWarmup = 86400;

// --- profit identity --------------------------------------------------------

Outcome profit_identity() {
  std::mt19937_64 gen(20251101);
  std::int64_t instances = 0, identity_bad = 0, oracle_bad = 0;
  for (const char* name : {"debridge", "across", "mayan"}) {
    for (std::uint64_t seed : {1, 2}) {
      const auto profile = preset_profile(name);
      const auto in = synth_inputs(profile, 2 * 86400, seed);
      const RouteTrace trace(in.records, route_of(profile));
      std::unordered_map<std::string, const IntentRecord*> by_id;
      for (const auto& r : trace.intents()) by_id.emplace(r.intent_id, &r);

      for (int i = 0; i < 1700; ++i) {
        AttackConfig cfg;
        cfg.route = route_of(profile);
        cfg.attack_window = 60 + static_cast<Seconds>(gen() % 3000);
        const char* mults[] = {"1", "2", "0.5", "1.37", "3.6"};
        cfg.volume_multiplier = Rate::parse(mults[gen() % 5]);
        cfg.max_tx_value = Money::from_integer(1000 + static_cast<std::int64_t>(gen() % 100000));
        if (gen() % 2) cfg.override_solver_profit_pct = Rate::from_units(static_cast<std::int64_t>(gen() % 20'000'000));
        if (gen() % 2) cfg.override_protocol_fee_pct = Rate::from_units(static_cast<std::int64_t>(gen() % 15'000'000));
        if (gen() % 2) cfg.flood_gas.constant = Money::from_units(static_cast<std::int64_t>(gen() % 3'000'000));
        switch (gen() % 3) {
          case 0: break;
          case 1: cfg.epsilon = {EpsilonModel::Fixed, Money::from_units(static_cast<std::int64_t>(gen() % 50'000'000)), 0}; break;
          default: cfg.epsilon = {EpsilonModel::BpsOfInducedVolume, {}, static_cast<std::int64_t>(gen() % 50)}; break;
        }
        const Timestamp t = in.coverage_start + static_cast<Timestamp>(gen() % (in.coverage_end - in.coverage_start));
        AttackTrigger tr;
        tr.at = t;
        tr.total_liquidity = total_liquidity(in.series, t);
        if (gen() % 2) {
          tr.scope = TriggerScope::Class;
          tr.alpha = Rate::from_units(static_cast<std::int64_t>(gen() % 1'000'000'001));
          tr.liquidity_at_trigger = scale(tr.total_liquidity, tr.alpha);
        } else {
          tr.liquidity_at_trigger = tr.total_liquidity;
        }
        const auto res = rational_attack(tr, trace, cfg, gen());
        ++instances;
        if (!(res.net_profit + res.induction_cost + res.fill_cost + res.epsilon - res.revenue).is_zero()) ++identity_bad;

        // Independent recomputation from the captured ids.
        Money revenue, fill, volume;
        for (const auto& id : res.captured_intent_ids) {
          const auto* r = by_id.at(id);
          const Rate p = cfg.override_solver_profit_pct.value_or(r->solver_profit_pct);
          revenue += Money::from_units(static_cast<std::int64_t>(
              div_round_half_even(static_cast<__int128>(r->value.units()) * p.units(), Rate::kScale)));
          fill += r->fill_gas + r->auction_cost;
          volume += r->value;
        }
        bool ok = revenue == res.revenue && fill == res.fill_cost && volume == res.volume_fulfilled &&
                  static_cast<std::int64_t>(res.captured_intent_ids.size()) == res.n_fulfillments;
        if (cfg.override_protocol_fee_pct && cfg.flood_gas.constant) {
          const Money drained = tr.drain_target();
          const auto fee = div_round_half_even(static_cast<__int128>(drained.units()) * cfg.override_protocol_fee_pct->units(),
                                               Rate::kScale);
          const std::int64_t n = (drained.units() + cfg.max_tx_value.units() - 1) / cfg.max_tx_value.units();
          ok = ok && res.induction_cost.units() == fee + n * cfg.flood_gas.constant->units() && res.n_flood_intents == n;
        }
        if (!ok) ++oracle_bad;
      }
    }
  }
  return {instances >= 10000 && identity_bad == 0 && oracle_bad == 0,
          fmt("%lld instances, identity residual non-zero in %lld, oracle mismatches %lld", (long long)instances,
              (long long)identity_bad, (long long)oracle_bad)};
}

// --- ledger oracle ----------------------------------------------------------

Outcome ledger_oracle() {
  std::mt19937_64 gen(77);
  std::int64_t queries = 0, bad = 0;
  for (int set = 0; set < 1000; ++set) {
    const int n_solvers = 1 + static_cast<int>(gen() % 5);
    std::vector<SolverId> solvers;
    OriginBalances origins;
    for (int s = 0; s < n_solvers; ++s) {
      solvers.push_back(normalize_solver("0xs" + std::to_string(s), ChainId::of("ethereum")));
      origins[solvers.back()] = Money::from_units(2'000'000'000'000);
    }
    const std::size_t n_events = gen() % 1001;
    // Narrow time ranges force many shared timestamps.
    const Timestamp span = gen() % 2 ? 1'000'000 : 500;
    std::vector<LiquidityEvent> events;
    for (std::size_t i = 0; i < n_events; ++i) {
      const std::int64_t d = static_cast<std::int64_t>(gen() % 2'000'000'001) - 1'000'000'000;
      events.push_back({solvers[gen() % solvers.size()], static_cast<Timestamp>(gen() % span), Money::from_units(d),
                        d < 0 ? EventKind::ExternalWithdrawal : EventKind::ExternalInjection});
    }
    std::stable_sort(events.begin(), events.end(), [](const auto& a, const auto& b) { return a.at < b.at; });
    const auto series = build_series(events, origins, 0);
    for (int q = 0; q < 100; ++q) {
      const Timestamp t = static_cast<Timestamp>(gen() % (span + span / 10 + 1));
      std::map<SolverId, __int128> fold;
      for (const auto& s : solvers) fold[s] = origins[s].units();
      for (const auto& e : events) {
        if (e.at <= t) fold[e.solver] += e.delta.units();
      }
      __int128 total = 0;
      for (const auto& s : solvers) {
        total += fold[s];
        if (series.at(s).balance_at(t).units() != fold[s]) ++bad;
      }
      if (total_liquidity(series, t).units() != total) ++bad;
      ++queries;
    }
  }
  return {bad == 0, fmt("1000 event sets, %lld queries, %lld mismatches", (long long)queries, (long long)bad)};
}

// --- trigger monotonicity ---------------------------------------------------

LiquiditySeries random_series(std::mt19937_64& gen) {
  std::normal_distribution<double> z(0.0, 1.0);
  const double base = 1e5 + static_cast<double>(gen() % 10'000'000);
  LiquiditySeries s(normalize_solver("0xr", ChainId::of("ethereum")), 0, Money::from_double(base));
  const double vol = base * (0.001 + 0.05 * static_cast<double>(gen() % 1000) / 1000.0);
  const double revert = 0.001 + 0.05 * static_cast<double>(gen() % 1000) / 1000.0;
  double level = base;
  Timestamp t = 0;
  const Timestamp end = 86400 + static_cast<Timestamp>(gen() % 86400);
  while (t < end) {
    t += 1 + static_cast<Timestamp>(gen() % 300);
    level += revert * (base - level) + vol * z(gen);
    if (gen() % 200 == 0) level -= base * 0.5 * static_cast<double>(gen() % 1000) / 1000.0;  // whale fill
    level = std::max(0.0, level);
    s.set(t, Money::from_double(level));
  }
  return s;
}

Outcome trigger_monotonicity() {
  std::mt19937_64 gen(4242);
  int violations = 0;
  std::int64_t fired = 0;
  for (int i = 0; i < 500; ++i) {
    const auto s = random_series(gen);
    std::size_t prev = SIZE_MAX;
    for (unsigned k = 0; k <= 3; ++k) {
      TriggerConfig cfg;
      cfg.k = k;
      const auto n = scan_for_triggers(s, cfg, s.start(), s.last_change()).size();
      fired += static_cast<std::int64_t>(n);
      if (n > prev) ++violations;
      prev = n;
    }
  }
  std::string k4;
  std::int64_t k4_total = 0;
  for (const char* name : {"debridge", "across", "mayan"}) {
    std::int64_t n = 0;
    for (auto seed : kSeeds) {
      const auto in = synth_inputs(preset_profile(name), kWeek, seed);
      TriggerConfig cfg;
      cfg.k = 4;
      cfg.warmup_s = kWarmup;
      n += static_cast<std::int64_t>(detect_triggers(in.series, cfg, in.coverage_start, in.coverage_end).size());
    }
    k4 += fmt("%s%s %lld", k4.empty() ? "" : ", ", name, (long long)n);
    k4_total += n;
  }
  return {violations == 0 && k4_total == 0,
          fmt("500 series, %d count increases over k=0..3 (%lld triggers); k=4 triggers over 4 week-long traces: %s",
              violations, (long long)fired, k4.c_str())};
}

// --- byzantine window monotonicity ------------------------------------------

Outcome window_monotonicity() {
  const auto profile = preset_profile("debridge");
  const auto in = synth_inputs(profile, kWeek, 201);
  ScheduleSource src;
  src.kind = ScheduleSource::Kind::Fixed;
  const Timestamp span = in.coverage_end - 1000 - (in.coverage_start + kWarmup);
  for (int i = 0; i < 200; ++i) src.times.push_back(in.coverage_start + kWarmup + span * i / 200);
  SweepGrid grid;
  grid.base.route = route_of(profile);
  grid.base.mode = AttackMode::Byzantine;
  grid.attack_window = {200, 600, 1000};
  const auto cells = run_sweep(grid, in, src, {.seed = 1});
  int count_bad = 0, value_bad = 0;
  double worst_spread = 0.0;
  for (std::size_t i = 0; i < 200; ++i) {
    const auto& a = cells[0].impacts[i];
    const auto& b = cells[1].impacts[i];
    const auto& c = cells[2].impacts[i];
    if (a.failed_intents > b.failed_intents || b.failed_intents > c.failed_intents) ++count_bad;
    if (a.failed_value > b.failed_value || b.failed_value > c.failed_value) ++value_bad;
    const auto [lo, hi] = std::minmax({a.total_cost, b.total_cost, c.total_cost});
    if (hi > Money{}) worst_spread = std::max(worst_spread, (hi - lo).to_double() / hi.to_double());
  }
  return {count_bad == 0 && value_bad == 0 && worst_spread < 0.01,
          fmt("200 placements, W in {200,600,1000}: count decreases %d, volume decreases %d, max cost spread %.4f%% "
              "(limit 1%%); median failed intents %lld/%lld/%lld",
              count_bad, value_bad, worst_spread * 100, (long long)cells[0].byzantine.median_failed_intents,
              (long long)cells[1].byzantine.median_failed_intents, (long long)cells[2].byzantine.median_failed_intents)};
}

// --- economic direction -----------------------------------------------------

std::vector<AttackInstanceResult> pooled_instances(const char* name, const SweepGrid& shape) {
  std::vector<AttackInstanceResult> all;
  for (auto seed : kSeeds) {
    const auto profile = preset_profile(name);
    const auto in = synth_inputs(profile, kWeek, seed);
    auto grid = shape;
    grid.base.route = route_of(profile);
    ScheduleSource src;
    src.trigger.warmup_s = kWarmup;
    auto cells = run_sweep(grid, in, src, {.seed = seed});
    all.insert(all.end(), cells[0].instances.begin(), cells[0].instances.end());
  }
  return all;
}

Outcome economic_direction() {
  SweepGrid grid;
  grid.k = {1};
  grid.attack_window = {1000};
  const auto deb = aggregate(pooled_instances("debridge", grid));
  const auto acr = aggregate(pooled_instances("across", grid));
  const double pd = deb.pr_profit.to_double(), pa = acr.pr_profit.to_double();
  return {deb.n_attacks >= 100 && acr.n_attacks >= 100 && pd > 0.5 && pa < 0.05,
          fmt("k=1 W=1000: deBridge Pr=%.3f over %lld (mean %s), Across Pr=%.3f over %lld (mean %s)", pd,
              (long long)deb.n_attacks, deb.mean_net_profit.str().c_str(), pa, (long long)acr.n_attacks,
              acr.mean_net_profit.str().c_str())};
}

// --- targeted alpha ---------------------------------------------------------

struct TargetedRun {
  double median_alpha = 0.0;
  std::size_t triggers = 0;
  int cost_above_baseline = 0;
  double median_reduction = 0.0;
  bool competing_ok = false;
};

TargetedRun targeted_run(const SyntheticProfile& p, const IntentClass& shape, unsigned k, Timestamp learn_from,
                         const std::set<SolverId>& expected) {
  const auto tr = generate_synthetic(p, kWeek, 11);
  const auto in = make_inputs(tr.records, tr.events, tr.origin_balances, tr.origin_time);
  IntentClass cls = shape;
  cls.competing = infer_competing_set(in.records, cls, learn_from, in.coverage_end);
  TargetedRun out;
  out.competing_ok = cls.competing == expected;
  if (cls.competing.empty()) return out;
  TriggerConfig cfg;
  cfg.k = k;
  cfg.warmup_s = kWarmup;
  cfg.scope = TriggerScope::Class;
  cfg.intent_class = cls;
  const auto trs = targeted_triggers(in.series, cls, cfg, learn_from, in.coverage_end);
  out.triggers = trs.size();
  if (trs.empty()) return out;

  const RouteTrace trace(in.records, route_of(p));
  AttackConfig ac;
  ac.route = route_of(p);
  std::vector<double> alphas, reductions;
  for (const auto& t : trs) {
    alphas.push_back(t.alpha.to_double());
    const Rate fee = trace.trailing_fee_median(t.at, 86400);
    const Money gas = trace.trailing_gas_median(t.at, 86400);
    const auto targeted = induction_cost_for_drain(t.drain_target(), fee, ac.max_tx_value, gas);
    const auto baseline = induction_cost_for_drain(t.total_liquidity, fee, ac.max_tx_value, gas);
    if (targeted.total > baseline.total) ++out.cost_above_baseline;
    if (baseline.total > Money{}) reductions.push_back(1.0 - targeted.total.to_double() / baseline.total.to_double());
  }
  std::sort(alphas.begin(), alphas.end());
  std::sort(reductions.begin(), reductions.end());
  out.median_alpha = alphas[(alphas.size() - 1) / 2];
  if (!reductions.empty()) out.median_reduction = reductions[(reductions.size() - 1) / 2];
  return out;
}

SolverSpec spec(const char* address, double share) {
  SolverSpec s;
  s.address = address;
  s.liquidity_share = share;
  return s;
}

// Participation fixtures keep the flow small next to the competing capital,
// so alpha at a trigger stays close to the planted liquidity share.
SyntheticProfile fixture_profile(const char* preset, std::int64_t liquidity, double intents_per_hour) {
  SyntheticProfile p = preset_profile(preset);
  p.total_liquidity = Money::from_integer(liquidity);
  p.intents_per_hour = intents_per_hour;
  p.value_sigma = 1.0;
  p.tokens = {{"USDC", 0.7}, {"ETH", 0.3}};
  p.max_fill_fraction.reset();
  p.diurnal_peak.reset();
  p.rebalance_interval_s = 0;
  p.capital_log_sigma = 0.0;
  return p;
}

Outcome targeted_alpha() {
  const auto eth = ChainId::of("ethereum");
  // Mayan pattern: the largest solver skips intents below $100 and two solvers
  // stop after the first day; the rest compete everywhere.
  SyntheticProfile mayan = fixture_profile("mayan", 760000, 200);
  auto big = spec("0xDfd122610A14Ac12D934898c02dBEc1f72708116", 0.805);
  big.value_min = Money::from_integer(100);
  auto gone_a = spec("0xcbb0cb4492afbcd9963441cc6aea50f35807ff96", 0.06);
  gone_a.active_until = mayan.start_time + 86400;
  auto gone_b = spec("0x38bf020e39e5a3ef1519c1283f6cac8a6b5851ff", 0.06);
  gone_b.active_until = mayan.start_time + 86400;
  mayan.solvers = {big, gone_a, gone_b, spec("0x7c825c6e7e4e1f618ca67e4943cdb41ca00b7f6b", 0.025),
                   spec("0x00000000000000000000000000000000000000a1", 0.025),
                   spec("0x00000000000000000000000000000000000000a2", 0.025)};
  IntentClass mayan_cls{mayan.bridge, std::string("USDC"), std::nullopt, Money::from_integer(100), {}};
  const std::set<SolverId> mayan_expected{normalize_solver("0x7c825c6e7e4e1f618ca67e4943cdb41ca00b7f6b", eth),
                                          normalize_solver("0x00000000000000000000000000000000000000a1", eth),
                                          normalize_solver("0x00000000000000000000000000000000000000a2", eth)};
  const auto m = targeted_run(mayan, mayan_cls, 2, mayan.start_time + 86400, mayan_expected);

  // deBridge pattern: two solvers only fill USDC below $500; one fills every value.
  SyntheticProfile deb = fixture_profile("debridge", 318000, 10);
  auto low_a = spec("0xc4eb49ea01578cb9b1c68ad27f457dbfa0bfbd97", 0.80);
  low_a.value_max = Money::from_integer(500);
  low_a.tokens = {"USDC"};
  auto low_b = spec("0x78b0f42536aeee037deedbb968ffb23cc2c0082e", 0.071);
  low_b.value_max = Money::from_integer(500);
  low_b.tokens = {"USDC"};
  deb.solvers = {low_a, low_b, spec("0x555ce236c0220695b68341bc48c68d52210cc35b", 0.129)};
  IntentClass deb_cls{deb.bridge, std::string("USDC"), Money::from_integer(500), std::nullopt, {}};
  const std::set<SolverId> deb_expected{normalize_solver("0x555ce236c0220695b68341bc48c68d52210cc35b", eth)};
  const auto d = targeted_run(deb, deb_cls, 1, deb.start_time, deb_expected);

  const bool pass = m.competing_ok && d.competing_ok && m.triggers > 0 && d.triggers > 0 &&
                    std::abs(m.median_alpha - 0.075) <= 0.005 && std::abs(d.median_alpha - 0.129) <= 0.01 &&
                    m.cost_above_baseline == 0 && d.cost_above_baseline == 0 && m.median_reduction >= 0.80;
  return {pass, fmt("Mayan fixture: %zu triggers, median alpha %.4f (0.075 +/- 0.005), median cost reduction %.2f%% "
                    "(>= 80%%); deBridge fixture: %zu triggers, median alpha %.4f (0.129 +/- 0.01); targeted above "
                    "baseline %d/%d; competing sets %s/%s",
                    m.triggers, m.median_alpha, m.median_reduction * 100, d.triggers, d.median_alpha,
                    m.cost_above_baseline, d.cost_above_baseline, m.competing_ok ? "ok" : "wrong",
                    d.competing_ok ? "ok" : "wrong")};
}

// --- profit override monotonicity ------------------------------------------

Outcome override_monotonicity() {
  const auto profile = preset_profile("debridge");
  const auto in = synth_inputs(profile, kWeek, 101);
  SweepGrid grid;
  grid.base.route = route_of(profile);
  grid.solver_profit_pct = {rate_from_percent("0.018"), rate_from_percent("0.381"), rate_from_percent("1.129")};
  ScheduleSource src;
  src.trigger.warmup_s = kWarmup;
  const auto cells = run_sweep(grid, in, src, {.seed = 5});
  const Money a = cells[0].report.mean_net_profit, b = cells[1].report.mean_net_profit,
              c = cells[2].report.mean_net_profit;
  const bool pass = cells[0].report.n_attacks > 0 && a <= b && b <= c && a.is_negative() && c > Money{};
  return {pass, fmt("deBridge k=1, %lld instances: mean net %s / %s / %s at 0.018%% / 0.381%% / 1.129%%",
                    (long long)cells[0].report.n_attacks, a.str().c_str(), b.str().c_str(), c.str().c_str())};
}

// --- determinism ------------------------------------------------------------

std::string sweep_bytes(unsigned threads) {
  const auto profile = preset_profile("mayan");
  const auto in = synth_inputs(profile, 3 * 86400, 301);
  SweepGrid grid;
  grid.base.route = route_of(profile);
  grid.k = {0, 1, 2};
  grid.attack_window = {300, 1000};
  grid.solver_profit_pct = {std::nullopt, rate_from_percent("1.129")};
  grid.volume_multiplier = {Rate::from_integer(1), Rate::parse("1.5")};
  ScheduleSource src;
  const auto cells = run_sweep(grid, in, src, {.seed = 99, .threads = threads});
  std::ostringstream out;
  for (auto f : {OutputFormat::Delimited, OutputFormat::RecordStream, OutputFormat::AlignedTable}) {
    emit(out, cells, f, {.seed = 99});
  }
  for (const auto& c : cells) write_instances(out, c.instances, OutputFormat::Delimited);
  return out.str();
}

Outcome determinism() {
  const auto a = sweep_bytes(1);
  const auto b = sweep_bytes(std::max(2u, std::thread::hardware_concurrency()));
  return {a == b && !a.empty(), fmt("24-cell sweep run twice (1 thread vs several): %zu vs %zu bytes, %s", a.size(),
                                    b.size(), a == b ? "identical" : "different")};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"profit-identity", 10, profit_identity},
      {"ledger-oracle", 10, ledger_oracle},
      {"trigger-monotonicity", 30, trigger_monotonicity},
      {"byzantine-window-monotonicity", 30, window_monotonicity},
      {"economic-direction", 120, economic_direction},
      {"targeted-alpha", 30, targeted_alpha},
      {"profit-override-monotonicity", 60, override_monotonicity},
      {"determinism", 60, determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = o.pass && secs < c.limit_s;
    if (!pass) ++failed;
    std::printf("%s %s: %s [%.1f s, limit %.0f s]\n", pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), secs,
                c.limit_s);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
