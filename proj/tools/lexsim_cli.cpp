// Command-line front end over the C interface.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lexsim/lexsim.h"

namespace {

struct DataArgs {
  std::string traces;
  std::string traces_format = "delimited";
  std::string events;
  std::string balances;
  std::string prices;
  std::optional<std::int64_t> origin_time;
  std::string profile;
  std::int64_t duration = 7 * 86400;
  std::uint64_t seed = 0;
};

struct TriggerArgs {
  unsigned k = 1;
  std::string window_mode = "causal-expanding";
  std::string scope = "total";
  std::optional<std::int64_t> cooldown;
  std::int64_t resolution = 60;
  std::int64_t warmup = 0;
  std::optional<std::int64_t> from;
  std::optional<std::int64_t> to;
  std::string class_bridge;
  std::string class_token;
  std::string class_min;
  std::string class_max;
  std::vector<std::string> competing;
  std::vector<std::string> excluded;
};

struct AttackArgs {
  std::string bridge;
  std::string src;
  std::string dst;
  std::int64_t window = 1000;
  std::string max_tx = "10000";
  std::string multiplier = "1";
  std::string solver_profit;
  std::string protocol_fee;
  std::string epsilon = "zero";
  std::string epsilon_value;
  std::string flood_gas;
  std::string mode = "rational";
};

struct OutArgs {
  std::string out = "-";
  std::string format = "delimited";
  std::string instances;
  std::int64_t every = 0;  // byzantine: fixed placements every N seconds
  unsigned threads = 0;
};

int fail(lx_status st) {
  std::fprintf(stderr, "error (%s): %s\n", lx_status_name(st), lx_last_error());
  return 1;
}

void add_data_options(CLI::App* app, DataArgs& d) {
  app->add_option("--traces", d.traces, "Intent trace file");
  app->add_option("--traces-format", d.traces_format, "delimited | record-stream")
      ->check(CLI::IsMember({"delimited", "record-stream"}));
  app->add_option("--liquidity-events", d.events, "Liquidity event file");
  app->add_option("--balances", d.balances, "Origin balance file (solver, chain, balance_usd)");
  app->add_option("--prices", d.prices, "Daily price table (symbol, date, price_usd)");
  app->add_option("--origin-time", d.origin_time, "Series origin (epoch seconds)");
  app->add_option("--profile", d.profile, "Synthesize instead: debridge | across | mayan | profile JSON");
  app->add_option("--duration", d.duration, "Synthetic trace length in seconds");
  app->add_option("--seed", d.seed, "Seed for synthesis and the simulation");
}

void add_trigger_options(CLI::App* app, TriggerArgs& t) {
  app->add_option("--window-mode", t.window_mode, "causal-expanding | full-period")
      ->check(CLI::IsMember({"causal-expanding", "full-period"}));
  app->add_option("--scope", t.scope, "total | per-solver | class")->check(CLI::IsMember({"total", "per-solver", "class"}));
  app->add_option("--cooldown", t.cooldown, "Minimum seconds between triggers (default: the attack window)");
  app->add_option("--resolution", t.resolution, "Liquidity sampling step in seconds");
  app->add_option("--warmup", t.warmup, "No triggers this many seconds after the series origin");
  app->add_option("--from", t.from, "Interval start (epoch seconds)");
  app->add_option("--to", t.to, "Interval end (epoch seconds)");
  app->add_option("--class-bridge", t.class_bridge, "Intent class bridge (class scope)");
  app->add_option("--class-token", t.class_token, "Intent class destination token");
  app->add_option("--class-min", t.class_min, "Intent class lower value bound (USD, inclusive)");
  app->add_option("--class-max", t.class_max, "Intent class upper value bound (USD, exclusive)");
  app->add_option("--competing", t.competing, "Competing solvers as address@chain (default: inferred)");
  app->add_option("--exclude", t.excluded, "Solvers removed from the competing set");
}

void add_attack_options(CLI::App* app, AttackArgs& a) {
  app->add_option("--bridge", a.bridge, "Bridge label (default: busiest route in the data)");
  app->add_option("--src-blockchain", a.src, "Source chain");
  app->add_option("--dst-blockchain", a.dst, "Destination chain");
  app->add_option("--epsilon", a.epsilon, "zero | fixed | bps")->check(CLI::IsMember({"zero", "fixed", "bps"}));
  app->add_option("--epsilon-value", a.epsilon_value, "USD (fixed) or basis points (bps)");
  app->add_option("--flood-gas", a.flood_gas, "Gas per flooding intent in USD (default: trailing median)");
}

void add_out_options(CLI::App* app, OutArgs& o) {
  app->add_option("--out", o.out, "Output path ('-' = stdout)");
  app->add_option("--format", o.format, "delimited | record-stream | aligned-table")
      ->check(CLI::IsMember({"delimited", "record-stream", "aligned-table"}));
  app->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
}

lx_status open_dataset(const DataArgs& d, lx_dataset** ds) {
  if (!d.profile.empty()) return lx_dataset_synthesize(d.profile.c_str(), d.duration, d.seed, ds);
  lx_load_options o;
  lx_load_options_init(&o);
  o.traces_path = d.traces.empty() ? nullptr : d.traces.c_str();
  o.traces_format = d.traces_format == "record-stream" ? LX_FORMAT_RECORD_STREAM : LX_FORMAT_DELIMITED;
  o.events_path = d.events.empty() ? nullptr : d.events.c_str();
  o.balances_path = d.balances.empty() ? nullptr : d.balances.c_str();
  o.prices_path = d.prices.empty() ? nullptr : d.prices.c_str();
  if (d.origin_time) {
    o.has_origin_time = 1;
    o.origin_time = *d.origin_time;
  }
  return lx_dataset_load(&o, ds);
}

const char* or_null(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

std::vector<const char*> c_strings(const std::vector<std::string>& v) {
  std::vector<const char*> out;
  for (const auto& s : v) out.push_back(s.c_str());
  return out;
}

/// Owns the strings that a lx_trigger_config points into.
struct TriggerBinding {
  lx_trigger_config cfg;
  std::vector<const char*> competing;
  std::vector<const char*> excluded;

  TriggerBinding(const TriggerArgs& t, std::optional<std::int64_t> fallback_cooldown) {
    lx_trigger_config_init(&cfg);
    cfg.k = t.k;
    cfg.window_mode = t.window_mode == "full-period" ? LX_WINDOW_FULL_PERIOD : LX_WINDOW_CAUSAL;
    cfg.scope = t.scope == "class" ? LX_SCOPE_CLASS : t.scope == "per-solver" ? LX_SCOPE_PER_SOLVER : LX_SCOPE_TOTAL;
    if (t.cooldown) {
      cfg.cooldown_s = *t.cooldown;
      cfg.cooldown_follows_window = 0;
    } else if (fallback_cooldown) {
      cfg.cooldown_s = *fallback_cooldown;
    }
    cfg.sample_resolution_s = t.resolution;
    cfg.warmup_s = t.warmup;
    if (t.from) {
      cfg.has_from = 1;
      cfg.from = *t.from;
    }
    if (t.to) {
      cfg.has_to = 1;
      cfg.to = *t.to;
    }
    cfg.class_bridge = or_null(t.class_bridge);
    cfg.class_token = or_null(t.class_token);
    cfg.class_value_min = or_null(t.class_min);
    cfg.class_value_max = or_null(t.class_max);
    competing = c_strings(t.competing);
    excluded = c_strings(t.excluded);
    cfg.competing = competing.data();
    cfg.n_competing = competing.size();
    cfg.excluded = excluded.data();
    cfg.n_excluded = excluded.size();
  }
};

lx_format format_of(const std::string& f) {
  if (f == "record-stream") return LX_FORMAT_RECORD_STREAM;
  if (f == "aligned-table") return LX_FORMAT_ALIGNED_TABLE;
  return LX_FORMAT_DELIMITED;
}

/// Fills the route from the data when not given on the command line.
lx_status resolve_route(lx_dataset* ds, AttackArgs& a) {
  if (!a.bridge.empty() && !a.src.empty() && !a.dst.empty()) return LX_OK;
  char bridge[64], src[64], dst[64];
  const lx_status st = lx_dataset_busiest_route(ds, bridge, src, dst, sizeof bridge);
  if (st != LX_OK) return st;
  if (a.bridge.empty()) a.bridge = bridge;
  if (a.src.empty()) a.src = src;
  if (a.dst.empty()) a.dst = dst;
  return LX_OK;
}

lx_attack_config attack_config(const AttackArgs& a) {
  lx_attack_config c;
  lx_attack_config_init(&c);
  c.bridge = a.bridge.c_str();
  c.src_chain = a.src.c_str();
  c.dst_chain = a.dst.c_str();
  c.attack_window_s = a.window;
  c.max_tx_value = a.max_tx.c_str();
  c.volume_multiplier = a.multiplier.c_str();
  c.solver_profit_percent = a.solver_profit.empty() || a.solver_profit == "real" ? nullptr : a.solver_profit.c_str();
  c.protocol_fee_percent = a.protocol_fee.empty() || a.protocol_fee == "real" ? nullptr : a.protocol_fee.c_str();
  c.epsilon_model = a.epsilon.c_str();
  c.epsilon_value = or_null(a.epsilon_value);
  c.flood_gas_usd = or_null(a.flood_gas);
  c.mode = a.mode == "byzantine" ? LX_MODE_BYZANTINE : LX_MODE_RATIONAL;
  return c;
}

int finish_results(lx_results* res, const OutArgs& o) {
  lx_status st = lx_results_emit(res, o.out.c_str(), format_of(o.format));
  if (st == LX_OK && !o.instances.empty()) {
    const lx_format f = o.format == "record-stream" ? LX_FORMAT_RECORD_STREAM : LX_FORMAT_DELIMITED;
    st = lx_results_write_instances(res, 0, o.instances.c_str(), f);
  }
  lx_results_free(res);
  return st == LX_OK ? 0 : fail(st);
}

/// Per-run fixed timestamps for uniformly placed byzantine attacks.
std::vector<std::int64_t> uniform_placements(lx_dataset* ds, const TriggerArgs& t, std::int64_t every) {
  std::int64_t start = 0, end = 0;
  lx_dataset_coverage(ds, &start, &end);
  if (t.from) start = *t.from;
  if (t.to) end = *t.to;
  start += t.warmup;
  std::vector<std::int64_t> out;
  for (std::int64_t x = start; x <= end; x += every) out.push_back(x);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lexsim: liquidity exhaustion attack simulation over intent traces"};
  app.require_subcommand(1);

  DataArgs data;
  TriggerArgs trig;
  AttackArgs atk;
  OutArgs out;

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a calibrated synthetic trace");
  std::string synth_dir = ".";
  synth->add_option("--profile", data.profile, "debridge | across | mayan | profile JSON")->required();
  synth->add_option("--duration", data.duration, "Trace length in seconds");
  synth->add_option("--seed", data.seed, "Generator seed");
  synth->add_option("--out", synth_dir, "Directory for traces.csv, events.csv, balances.csv");

  // triggers
  auto* triggers = app.add_subcommand("triggers", "Detect attack trigger times");
  std::string plot_path;
  add_data_options(triggers, data);
  add_trigger_options(triggers, trig);
  triggers->add_option("--k", trig.k, "Trigger depth in standard deviations");
  triggers->add_option("--out", out.out, "Schedule output ('-' = stdout)");
  triggers->add_option("--plot", plot_path, "Also write the (t, L(t)) series with trigger markers");

  // simulate / byzantine
  auto* simulate = app.add_subcommand("simulate", "Run one attack configuration over the trigger schedule");
  auto* byzantine = app.add_subcommand("byzantine", "Availability impact of attacks at triggers or fixed times");
  for (auto* sub : {simulate, byzantine}) {
    add_data_options(sub, data);
    add_trigger_options(sub, trig);
    add_attack_options(sub, atk);
    add_out_options(sub, out);
    sub->add_option("--k", trig.k, "Trigger depth in standard deviations");
    sub->add_option("--attack-window", atk.window, "Attack window in seconds")->envname("ATTACK_WINDOW");
    sub->add_option("--max-tx-value", atk.max_tx, "Cap per flooding intent (USD)")->envname("MAX_TX_VALUE");
    sub->add_option("--volume-multiplier", atk.multiplier, "Scale on captured volume")->envname("VOLUME_MULTIPLIER");
    sub->add_option("--solver-profit-pct", atk.solver_profit, "Override solver profit, percent, or 'real'");
    sub->add_option("--protocol-fee-pct", atk.protocol_fee, "Override protocol fee, percent, or 'real'");
    sub->add_option("--instances", out.instances, "Also write per-instance rows here");
  }
  simulate->add_option("--mode", atk.mode, "rational | byzantine")->check(CLI::IsMember({"rational", "byzantine"}));
  byzantine->add_option("--every", out.every, "Place attacks every N seconds instead of at triggers");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Parameter sweep; one aggregate row per cell");
  std::vector<unsigned> ks{1};
  std::vector<std::int64_t> windows{1000};
  std::vector<std::string> profits{"real"}, fees{"real"}, max_txs{"10000"}, multipliers{"1"};
  std::size_t max_cells = 10000;
  add_data_options(sweep, data);
  add_trigger_options(sweep, trig);
  add_attack_options(sweep, atk);
  add_out_options(sweep, out);
  sweep->add_option("--mode", atk.mode, "rational | byzantine")->check(CLI::IsMember({"rational", "byzantine"}));
  sweep->add_option("--k", ks, "Trigger depths")->delimiter(',');
  sweep->add_option("--attack-window", windows, "Attack windows (s)")->delimiter(',')->envname("ATTACK_WINDOW");
  sweep->add_option("--max-tx-value", max_txs, "Flooding caps (USD)")->delimiter(',')->envname("MAX_TX_VALUE");
  sweep->add_option("--volume-multiplier", multipliers, "Volume multipliers")
      ->delimiter(',')
      ->envname("VOLUME_MULTIPLIER");
  sweep->add_option("--solver-profit-pct", profits, "Solver profit overrides (percent or 'real')")->delimiter(',');
  sweep->add_option("--protocol-fee-pct", fees, "Protocol fee overrides (percent or 'real')")->delimiter(',');
  sweep->add_option("--max-cells", max_cells, "Refuse grids larger than this");

  CLI11_PARSE(app, argc, argv);

  if (synth->parsed()) {
    lx_dataset* ds = nullptr;
    lx_status st = lx_dataset_synthesize(data.profile.c_str(), data.duration, data.seed, &ds);
    if (st != LX_OK) return fail(st);
    std::error_code ec;
    std::filesystem::create_directories(synth_dir, ec);
    const std::string t = synth_dir + "/traces.csv", e = synth_dir + "/events.csv", b = synth_dir + "/balances.csv";
    st = lx_dataset_write(ds, t.c_str(), e.c_str(), b.c_str());
    if (st == LX_OK) {
      std::int64_t start = 0, end = 0;
      lx_dataset_coverage(ds, &start, &end);
      std::fprintf(stderr, "%zu intents, %zu solvers, origin %lld\n", lx_dataset_intent_count(ds),
                   lx_dataset_solver_count(ds), static_cast<long long>(start));
    }
    lx_dataset_free(ds);
    return st == LX_OK ? 0 : fail(st);
  }

  lx_dataset* ds = nullptr;
  if (lx_status st = open_dataset(data, &ds); st != LX_OK) return fail(st);
  if (lx_dataset_rejected_count(ds) > 0) {
    std::fprintf(stderr, "warning: %zu trace rows rejected\n", lx_dataset_rejected_count(ds));
  }
  int rc = 0;

  if (triggers->parsed()) {
    TriggerBinding tb(trig, std::nullopt);
    lx_schedule* s = nullptr;
    lx_status st = lx_triggers(ds, &tb.cfg, &s);
    if (st == LX_OK) st = lx_schedule_write(s, out.out.c_str());
    if (st == LX_OK && !plot_path.empty()) st = lx_schedule_write_plot(ds, s, plot_path.c_str());
    lx_schedule_free(s);
    rc = st == LX_OK ? 0 : fail(st);
  } else if (simulate->parsed() || byzantine->parsed() || sweep->parsed()) {
    if (byzantine->parsed()) atk.mode = "byzantine";
    if (lx_status st = resolve_route(ds, atk); st != LX_OK) {
      lx_dataset_free(ds);
      return fail(st);
    }
    TriggerBinding tb(trig, std::nullopt);
    lx_attack_config cfg = attack_config(atk);
    lx_run_options run;
    lx_run_options_init(&run);
    run.seed = data.seed;
    run.threads = out.threads;
    std::vector<std::int64_t> fixed;
    if (out.every > 0) {
      fixed = uniform_placements(ds, trig, out.every);
      run.fixed_times = fixed.data();
      run.n_fixed_times = fixed.size();
    }
    lx_results* res = nullptr;
    lx_status st;
    if (sweep->parsed()) {
      auto profit_ptrs = c_strings(profits);
      auto fee_ptrs = c_strings(fees);
      for (auto& p : profit_ptrs) if (std::string(p) == "real") p = nullptr;
      for (auto& p : fee_ptrs) if (std::string(p) == "real") p = nullptr;
      auto tx_ptrs = c_strings(max_txs);
      auto mul_ptrs = c_strings(multipliers);
      lx_sweep_axes axes;
      lx_sweep_axes_init(&axes);
      axes.k = ks.data();
      axes.n_k = ks.size();
      axes.attack_window_s = windows.data();
      axes.n_attack_window = windows.size();
      axes.solver_profit_percent = profit_ptrs.data();
      axes.n_solver_profit = profit_ptrs.size();
      axes.protocol_fee_percent = fee_ptrs.data();
      axes.n_protocol_fee = fee_ptrs.size();
      axes.max_tx_value = tx_ptrs.data();
      axes.n_max_tx_value = tx_ptrs.size();
      axes.volume_multiplier = mul_ptrs.data();
      axes.n_volume_multiplier = mul_ptrs.size();
      axes.max_cells = max_cells;
      st = lx_sweep(ds, &cfg, &axes, &tb.cfg, &run, &res);
    } else {
      st = lx_simulate(ds, &cfg, &tb.cfg, &run, &res);
    }
    rc = st == LX_OK ? finish_results(res, out) : fail(st);
  }
  lx_dataset_free(ds);
  return rc;
}
