#include "lexsim/lexsim.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <tuple>

#include "lexsim/report.hpp"
#include "lexsim/synthetic.hpp"

using namespace lexsim;

struct lx_dataset {
  SimulationInputs inputs;
  std::vector<LiquidityEvent> events;
  OriginBalances origins;
  std::size_t rejected = 0;
};

struct lx_schedule {
  std::vector<AttackTrigger> triggers;
};

struct lx_results {
  std::vector<SweepCell> cells;
  RunMetadata meta;
};

namespace {

thread_local std::string g_last_error;

static_assert(static_cast<int>(ErrorCode::IoFailure) + 1 == LX_E_IO_FAILURE, "status codes follow ErrorCode");

template <typename F>
lx_status guard(F&& f) {
  try {
    g_last_error.clear();
    f();
    return LX_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return static_cast<lx_status>(static_cast<int>(e.code()) + 1);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return LX_E_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return LX_E_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (!p) throw Error(ErrorCode::InvalidArgument, std::string(what) + " is null");
}

template <typename F>
void with_output(const char* path, F&& write) {
  if (!path || std::strcmp(path, "-") == 0) {
    write(std::cout);
    std::cout.flush();
    if (!std::cout) throw Error(ErrorCode::IoFailure, "cannot write to stdout");
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoFailure, std::string("cannot open '") + path + "' for writing");
  write(out);
  out.flush();
  if (!out) throw Error(ErrorCode::IoFailure, std::string("write to '") + path + "' failed");
}

OutputFormat output_format(lx_format f) {
  switch (f) {
    case LX_FORMAT_DELIMITED: return OutputFormat::Delimited;
    case LX_FORMAT_RECORD_STREAM: return OutputFormat::RecordStream;
    case LX_FORMAT_ALIGNED_TABLE: return OutputFormat::AlignedTable;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown output format");
}

SolverId parse_solver(std::string_view text) {
  const auto at = text.rfind('@');
  if (at == std::string_view::npos) {
    throw Error(ErrorCode::InvalidArgument, "solver must be written address@chain: '" + std::string(text) + "'");
  }
  return normalize_solver(std::string(text.substr(0, at)), ChainId::of(text.substr(at + 1)));
}

TriggerConfig to_trigger_config(const lx_dataset& ds, const lx_trigger_config& c) {
  TriggerConfig t;
  t.k = c.k;
  t.window_mode = c.window_mode == LX_WINDOW_FULL_PERIOD ? WindowMode::FullPeriod : WindowMode::CausalExpanding;
  switch (c.scope) {
    case LX_SCOPE_TOTAL: t.scope = TriggerScope::Total; break;
    case LX_SCOPE_PER_SOLVER: t.scope = TriggerScope::PerSolver; break;
    case LX_SCOPE_CLASS: t.scope = TriggerScope::Class; break;
    default: throw Error(ErrorCode::InvalidArgument, "unknown trigger scope");
  }
  t.cooldown_s = c.cooldown_s;
  t.sample_resolution = c.sample_resolution_s;
  t.warmup_s = c.warmup_s;
  if (t.scope == TriggerScope::Class) {
    if (!c.class_bridge) throw Error(ErrorCode::InvalidArgument, "class scope requires class_bridge");
    IntentClass cls;
    cls.bridge = Bridge::parse(c.class_bridge);
    if (c.class_token) cls.token = c.class_token;
    if (c.class_value_min) cls.value_min = Money::parse(c.class_value_min);
    if (c.class_value_max) cls.value_max = Money::parse(c.class_value_max);
    if (c.n_competing > 0) {
      for (std::size_t i = 0; i < c.n_competing; ++i) cls.competing.insert(parse_solver(c.competing[i]));
    } else {
      cls.competing = infer_competing_set(ds.inputs.records, cls);
    }
    for (std::size_t i = 0; i < c.n_excluded; ++i) cls.competing.erase(parse_solver(c.excluded[i]));
    t.intent_class = std::move(cls);
  }
  return t;
}

std::optional<Rate> percent_or_real(const char* text) {
  if (!text) return std::nullopt;
  return rate_from_percent(text);
}

AttackConfig to_attack_config(const lx_attack_config& c) {
  require(c.bridge, "bridge");
  require(c.src_chain, "src_chain");
  require(c.dst_chain, "dst_chain");
  AttackConfig a;
  a.route = Route{ChainId::of(c.src_chain), ChainId::of(c.dst_chain), Bridge::parse(c.bridge)};
  a.attack_window = c.attack_window_s;
  if (c.max_tx_value) a.max_tx_value = Money::parse(c.max_tx_value);
  if (c.volume_multiplier) a.volume_multiplier = Rate::parse(c.volume_multiplier);
  a.override_solver_profit_pct = percent_or_real(c.solver_profit_percent);
  a.override_protocol_fee_pct = percent_or_real(c.protocol_fee_percent);
  const std::string eps = c.epsilon_model ? c.epsilon_model : "zero";
  if (eps == "fixed") {
    require(c.epsilon_value, "epsilon_value");
    a.epsilon.model = EpsilonModel::Fixed;
    a.epsilon.fixed = Money::parse(c.epsilon_value);
  } else if (eps == "bps") {
    require(c.epsilon_value, "epsilon_value");
    a.epsilon.model = EpsilonModel::BpsOfInducedVolume;
    a.epsilon.bps = std::stoll(c.epsilon_value);
  } else if (eps != "zero") {
    throw Error(ErrorCode::InvalidArgument, "unknown epsilon model '" + eps + "'");
  }
  if (c.flood_gas_usd) a.flood_gas.constant = Money::parse(c.flood_gas_usd);
  a.mode = c.mode == LX_MODE_BYZANTINE ? AttackMode::Byzantine : AttackMode::Rational;
  a.validate();
  return a;
}

ScheduleSource to_schedule_source(const lx_dataset& ds, const lx_trigger_config* t, const lx_run_options& o) {
  ScheduleSource src;
  lx_trigger_config defaults;
  lx_trigger_config_init(&defaults);
  const lx_trigger_config& c = t ? *t : defaults;
  src.trigger = to_trigger_config(ds, c);
  src.cooldown_follows_window = c.cooldown_follows_window != 0;
  if (c.has_from) src.from = c.from;
  if (c.has_to) src.to = c.to;
  if (o.fixed_times) {
    src.kind = ScheduleSource::Kind::Fixed;
    src.times.assign(o.fixed_times, o.fixed_times + o.n_fixed_times);
  }
  return src;
}

lx_dataset* finish_dataset(std::vector<IntentRecord> records, std::vector<LiquidityEvent> events,
                           OriginBalances origins, std::optional<Timestamp> origin_time) {
  auto ds = std::make_unique<lx_dataset>();
  ds->inputs = make_inputs(std::move(records), events, origins, origin_time);
  ds->events = std::move(events);
  ds->origins = std::move(origins);
  return ds.release();
}

}  // namespace

extern "C" {

const char* lx_version(void) { return "0.1.0"; }

const char* lx_status_name(lx_status status) {
  if (status == LX_OK) return "ok";
  if (status == LX_E_INTERNAL) return "internal";
  const int code = static_cast<int>(status) - 1;
  if (code < 0 || code > static_cast<int>(ErrorCode::IoFailure)) return "unknown";
  return to_string(static_cast<ErrorCode>(code));
}

const char* lx_last_error(void) { return g_last_error.c_str(); }

void lx_load_options_init(lx_load_options* o) {
  if (!o) return;
  *o = lx_load_options{};
  o->traces_format = LX_FORMAT_DELIMITED;
  o->delimiter = ',';
  o->max_rejection_ratio = 0.05;
}

lx_status lx_dataset_load(const lx_load_options* o, lx_dataset** out) {
  return guard([&] {
    require(o, "options");
    require(out, "out");
    require(o->traces_path, "traces_path");
    require(o->events_path, "events_path");
    *out = nullptr;
    TraceLoadOptions opts;
    opts.format = o->traces_format == LX_FORMAT_RECORD_STREAM ? TraceFormat::RecordStream : TraceFormat::Delimited;
    opts.delimiter = o->delimiter ? o->delimiter : ',';
    opts.max_rejection_ratio = o->max_rejection_ratio;
    PriceTable prices;
    if (o->prices_path) {
      prices = load_prices(o->prices_path, opts.delimiter);
      opts.prices = &prices;
    }
    TraceLoad load = load_traces(o->traces_path, opts);
    auto events = load_liquidity_events(o->events_path, opts.delimiter);
    OriginBalances origins;
    if (o->balances_path) origins = load_origin_balances(o->balances_path, opts.delimiter);
    std::optional<Timestamp> origin_time;
    if (o->has_origin_time) origin_time = o->origin_time;
    const std::size_t rejected = load.rejected.size();
    *out = finish_dataset(std::move(load.records), std::move(events), std::move(origins), origin_time);
    (*out)->rejected = rejected;
  });
}

lx_status lx_dataset_synthesize(const char* profile, int64_t duration_s, uint64_t seed, lx_dataset** out) {
  return guard([&] {
    require(profile, "profile");
    require(out, "out");
    *out = nullptr;
    const SyntheticProfile p =
        std::filesystem::is_regular_file(profile) ? load_profile(profile) : preset_profile(profile);
    SyntheticTrace trace = generate_synthetic(p, duration_s, seed);
    *out = finish_dataset(std::move(trace.records), std::move(trace.events), std::move(trace.origin_balances),
                          trace.origin_time);
  });
}

lx_status lx_dataset_write(const lx_dataset* ds, const char* traces_path, const char* events_path,
                           const char* balances_path) {
  return guard([&] {
    require(ds, "dataset");
    if (traces_path) with_output(traces_path, [&](std::ostream& o) { write_traces(o, ds->inputs.records); });
    if (events_path) with_output(events_path, [&](std::ostream& o) { write_liquidity_events(o, ds->events); });
    if (balances_path) with_output(balances_path, [&](std::ostream& o) { write_origin_balances(o, ds->origins); });
  });
}

size_t lx_dataset_intent_count(const lx_dataset* ds) { return ds ? ds->inputs.records.size() : 0; }
size_t lx_dataset_rejected_count(const lx_dataset* ds) { return ds ? ds->rejected : 0; }
size_t lx_dataset_solver_count(const lx_dataset* ds) { return ds ? ds->inputs.series.size() : 0; }

void lx_dataset_coverage(const lx_dataset* ds, int64_t* start, int64_t* end) {
  if (!ds) return;
  if (start) *start = ds->inputs.coverage_start;
  if (end) *end = ds->inputs.coverage_end;
}

lx_status lx_dataset_liquidity_at(const lx_dataset* ds, int64_t t, char* buf, size_t buf_len) {
  return guard([&] {
    require(ds, "dataset");
    require(buf, "buf");
    const std::string s = total_liquidity(ds->inputs.series, t).str();
    if (s.size() + 1 > buf_len) throw Error(ErrorCode::InvalidArgument, "buffer too small");
    std::memcpy(buf, s.c_str(), s.size() + 1);
  });
}

lx_status lx_dataset_busiest_route(const lx_dataset* ds, char* bridge, char* src, char* dst, size_t len) {
  return guard([&] {
    require(ds, "dataset");
    require(bridge, "bridge");
    require(src, "src");
    require(dst, "dst");
    std::map<std::tuple<std::string, std::string, std::string>, std::size_t> counts;
    for (const auto& r : ds->inputs.records) ++counts[{r.bridge.label, r.src_chain.name(), r.dst_chain.name()}];
    if (counts.empty()) throw Error(ErrorCode::EmptyRoute, "dataset has no intents");
    auto best = counts.begin();
    for (auto it = counts.begin(); it != counts.end(); ++it) {
      if (it->second > best->second) best = it;
    }
    const auto& [b, s, d] = best->first;
    for (const auto* text : {&b, &s, &d}) {
      if (text->size() + 1 > len) throw Error(ErrorCode::InvalidArgument, "buffer too small");
    }
    std::memcpy(bridge, b.c_str(), b.size() + 1);
    std::memcpy(src, s.c_str(), s.size() + 1);
    std::memcpy(dst, d.c_str(), d.size() + 1);
  });
}

void lx_dataset_free(lx_dataset* ds) { delete ds; }

void lx_trigger_config_init(lx_trigger_config* c) {
  if (!c) return;
  *c = lx_trigger_config{};
  c->k = 1;
  c->window_mode = LX_WINDOW_CAUSAL;
  c->scope = LX_SCOPE_TOTAL;
  c->cooldown_s = 1000;
  c->cooldown_follows_window = 1;
  c->sample_resolution_s = 60;
}

lx_status lx_triggers(const lx_dataset* ds, const lx_trigger_config* config, lx_schedule** out) {
  return guard([&] {
    require(ds, "dataset");
    require(config, "config");
    require(out, "out");
    *out = nullptr;
    const TriggerConfig cfg = to_trigger_config(*ds, *config);
    const Timestamp from = config->has_from ? config->from : ds->inputs.coverage_start;
    const Timestamp to = config->has_to ? config->to : ds->inputs.coverage_end;
    auto s = std::make_unique<lx_schedule>();
    s->triggers = detect_triggers(ds->inputs.series, cfg, from, to);
    *out = s.release();
  });
}

lx_status lx_schedule_fixed(const lx_dataset* ds, const int64_t* times, size_t n, lx_schedule** out) {
  return guard([&] {
    require(ds, "dataset");
    require(out, "out");
    if (n > 0) require(times, "times");
    *out = nullptr;
    auto s = std::make_unique<lx_schedule>();
    s->triggers = fixed_schedule(ds->inputs.series, std::span<const Timestamp>(times, n));
    *out = s.release();
  });
}

size_t lx_schedule_size(const lx_schedule* s) { return s ? s->triggers.size() : 0; }

lx_status lx_schedule_get(const lx_schedule* s, size_t i, int64_t* at, double* alpha, double* liquidity) {
  return guard([&] {
    require(s, "schedule");
    if (i >= s->triggers.size()) throw Error(ErrorCode::OutOfRange, "schedule index out of range");
    const auto& t = s->triggers[i];
    if (at) *at = t.at;
    if (alpha) *alpha = t.alpha.to_double();
    if (liquidity) *liquidity = t.liquidity_at_trigger.to_double();
  });
}

lx_status lx_schedule_write(const lx_schedule* s, const char* path) {
  return guard([&] {
    require(s, "schedule");
    with_output(path, [&](std::ostream& o) { write_schedule(o, s->triggers); });
  });
}

lx_status lx_schedule_write_plot(const lx_dataset* ds, const lx_schedule* s, const char* path) {
  return guard([&] {
    require(ds, "dataset");
    require(s, "schedule");
    const auto total = sum_series(ds->inputs.series, nullptr, SolverId{"total", ChainId{}});
    with_output(path, [&](std::ostream& o) {
      write_plot_series(o, total, s->triggers, ds->inputs.coverage_start, ds->inputs.coverage_end);
    });
  });
}

void lx_schedule_free(lx_schedule* s) { delete s; }

void lx_attack_config_init(lx_attack_config* c) {
  if (!c) return;
  *c = lx_attack_config{};
  c->attack_window_s = 1000;
  c->mode = LX_MODE_RATIONAL;
}

void lx_sweep_axes_init(lx_sweep_axes* a) {
  if (!a) return;
  *a = lx_sweep_axes{};
  a->max_cells = 10000;
}

void lx_run_options_init(lx_run_options* o) {
  if (!o) return;
  *o = lx_run_options{};
}

lx_status lx_sweep(const lx_dataset* ds, const lx_attack_config* base, const lx_sweep_axes* axes,
                   const lx_trigger_config* triggers, const lx_run_options* options, lx_results** out) {
  return guard([&] {
    require(ds, "dataset");
    require(base, "base config");
    require(out, "out");
    *out = nullptr;
    lx_run_options run;
    lx_run_options_init(&run);
    if (options) run = *options;

    SweepGrid grid;
    grid.base = to_attack_config(*base);
    grid.k = {triggers ? triggers->k : 1u};
    grid.attack_window = {grid.base.attack_window};
    grid.solver_profit_pct = {grid.base.override_solver_profit_pct};
    grid.protocol_fee_pct = {grid.base.override_protocol_fee_pct};
    grid.max_tx_value = {grid.base.max_tx_value};
    grid.volume_multiplier = {grid.base.volume_multiplier};
    if (axes) {
      if (axes->n_k) grid.k.assign(axes->k, axes->k + axes->n_k);
      if (axes->n_attack_window) {
        grid.attack_window.assign(axes->attack_window_s, axes->attack_window_s + axes->n_attack_window);
      }
      if (axes->n_solver_profit) {
        grid.solver_profit_pct.clear();
        for (size_t i = 0; i < axes->n_solver_profit; ++i) {
          grid.solver_profit_pct.push_back(percent_or_real(axes->solver_profit_percent[i]));
        }
      }
      if (axes->n_protocol_fee) {
        grid.protocol_fee_pct.clear();
        for (size_t i = 0; i < axes->n_protocol_fee; ++i) {
          grid.protocol_fee_pct.push_back(percent_or_real(axes->protocol_fee_percent[i]));
        }
      }
      if (axes->n_max_tx_value) {
        grid.max_tx_value.clear();
        for (size_t i = 0; i < axes->n_max_tx_value; ++i) grid.max_tx_value.push_back(Money::parse(axes->max_tx_value[i]));
      }
      if (axes->n_volume_multiplier) {
        grid.volume_multiplier.clear();
        for (size_t i = 0; i < axes->n_volume_multiplier; ++i) {
          grid.volume_multiplier.push_back(Rate::parse(axes->volume_multiplier[i]));
        }
      }
      grid.max_cells = axes->max_cells;
    }

    const ScheduleSource source = to_schedule_source(*ds, triggers, run);
    SweepOptions opts;
    opts.seed = run.seed;
    opts.threads = run.threads;
    auto res = std::make_unique<lx_results>();
    res->cells = run_sweep(grid, ds->inputs, source, opts);
    res->meta.seed = run.seed;
    res->meta.window_mode = source.trigger.window_mode;
    res->meta.scope = source.trigger.scope;
    res->meta.mode = grid.base.mode;
    *out = res.release();
  });
}

lx_status lx_simulate(const lx_dataset* ds, const lx_attack_config* config, const lx_trigger_config* triggers,
                      const lx_run_options* options, lx_results** out) {
  return lx_sweep(ds, config, nullptr, triggers, options, out);
}

size_t lx_results_cell_count(const lx_results* r) { return r ? r->cells.size() : 0; }

lx_status lx_results_cell(const lx_results* r, size_t i, lx_cell_summary* out) {
  return guard([&] {
    require(r, "results");
    require(out, "out");
    if (i >= r->cells.size()) throw Error(ErrorCode::OutOfRange, "cell index out of range");
    const auto& c = r->cells[i];
    *out = lx_cell_summary{};
    std::snprintf(out->fingerprint, sizeof out->fingerprint, "%s", c.fingerprint.c_str());
    out->k = c.k;
    out->attack_window_s = c.config.attack_window;
    out->n_attacks = c.report.n_attacks;
    out->mean_net_profit = c.report.mean_net_profit.to_double();
    out->std_net_profit = c.report.std_net_profit.to_double();
    out->p90_net_profit = c.report.p90_net_profit.to_double();
    out->pr_profit = c.report.pr_profit.to_double();
    out->mean_n_fulfillments = c.report.mean_n_fulfillments.to_double();
    out->mean_volume_fulfilled = c.report.mean_volume_fulfilled.to_double();
    out->median_induction_cost = c.report.median_induction_cost.to_double();
    out->reliable_attack = c.report.reliable_attack ? 1 : 0;
    out->mean_failed_intents = c.byzantine.mean_failed_intents.to_double();
    out->median_failed_value = c.byzantine.median_failed_value.to_double();
    out->median_missed_solver_profit = c.byzantine.median_missed_solver_profit.to_double();
    out->median_missed_protocol_fees = c.byzantine.median_missed_protocol_fees.to_double();
    out->median_total_cost = c.byzantine.median_total_cost.to_double();
  });
}

lx_status lx_results_emit(const lx_results* r, const char* path, lx_format format) {
  return guard([&] {
    require(r, "results");
    const OutputFormat f = output_format(format);
    with_output(path, [&](std::ostream& o) { emit(o, r->cells, f, r->meta); });
  });
}

lx_status lx_results_write_instances(const lx_results* r, size_t cell, const char* path, lx_format format) {
  return guard([&] {
    require(r, "results");
    if (cell >= r->cells.size()) throw Error(ErrorCode::OutOfRange, "cell index out of range");
    const OutputFormat f = output_format(format);
    const auto& c = r->cells[cell];
    with_output(path, [&](std::ostream& o) {
      if (c.config.mode == AttackMode::Byzantine) {
        write_impacts(o, c.impacts, f);
      } else {
        write_instances(o, c.instances, f);
      }
    });
  });
}

void lx_results_free(lx_results* r) { delete r; }

}  // extern "C"
