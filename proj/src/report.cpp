#include "lexsim/report.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <cstdio>
#include <iomanip>
#include <istream>
#include <json.hpp>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "csv.hpp"
#include "random.hpp"

namespace lexsim {

using json = nlohmann::json;

SimulationInputs make_inputs(std::vector<IntentRecord> records, std::span<const LiquidityEvent> events,
                             const OriginBalances& origins, std::optional<Timestamp> origin_time) {
  SimulationInputs in;
  in.series = build_series(events, origins, origin_time);
  in.records = std::move(records);
  sort_records(in.records);
  if (in.series.empty()) throw Error(ErrorCode::InsufficientHistory, "no solver liquidity to replay");
  in.coverage_start = in.series.begin()->second.start();
  in.coverage_end = in.coverage_start;
  for (const auto& [_, s] : in.series) {
    in.coverage_start = std::min(in.coverage_start, s.start());
    in.coverage_end = std::max(in.coverage_end, s.last_change());
  }
  for (const auto& r : in.records) in.coverage_end = std::max(in.coverage_end, r.created_at);
  return in;
}

namespace {

Money median_of(std::vector<Money> v) {
  if (v.empty()) return Money{};
  auto mid = v.begin() + static_cast<std::ptrdiff_t>((v.size() - 1) / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

struct Moments {
  __int128 sum = 0;
  __int128 sum_sq = 0;
  std::int64_t n = 0;

  void add(std::int64_t units) {
    sum += units;
    sum_sq += static_cast<__int128>(units) * units;
    ++n;
  }
  Money mean() const { return n == 0 ? Money{} : money_mean(sum, n); }
  Money stddev() const { return n == 0 ? Money{} : money_pstddev(sum, sum_sq, n); }
};

Decimal6 as_decimal(Money m) { return Decimal6::from_units(m.units()); }

}  // namespace

Money nearest_rank(std::vector<Money> values, unsigned percent) {
  if (values.empty()) return Money{};
  if (percent == 0 || percent > 100) throw Error(ErrorCode::InvalidArgument, "percentile must be in 1..100");
  const std::size_t n = values.size();
  const std::size_t rank = (percent * n + 99) / 100;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(rank - 1), values.end());
  return values[rank - 1];
}

AggregateReport aggregate(std::span<const AttackInstanceResult> instances, const ReliabilityRule& rule) {
  AggregateReport rep;
  rep.n_attacks = static_cast<std::int64_t>(instances.size());
  if (instances.empty()) return rep;

  Moments profit;
  Moments fulfills;
  Moments volume;
  std::vector<Money> profits;
  std::vector<Money> costs;
  std::int64_t wins = 0;
  for (const auto& r : instances) {
    profit.add(r.net_profit.units());
    fulfills.add(r.n_fulfillments * Decimal6::kScale);
    volume.add(r.volume_fulfilled.units());
    profits.push_back(r.net_profit);
    costs.push_back(r.induction_cost);
    if (r.net_profit > Money{}) ++wins;
  }
  rep.mean_net_profit = profit.mean();
  rep.std_net_profit = profit.stddev();
  rep.p90_net_profit = nearest_rank(std::move(profits), 90);
  rep.pr_profit = Rate::from_units(static_cast<std::int64_t>(
      div_round_half_even(static_cast<__int128>(wins) * Rate::kScale, rep.n_attacks)));
  rep.mean_n_fulfillments = as_decimal(fulfills.mean());
  rep.std_n_fulfillments = as_decimal(fulfills.stddev());
  rep.mean_volume_fulfilled = volume.mean();
  rep.std_volume_fulfilled = volume.stddev();
  rep.min_induction_cost = *std::min_element(costs.begin(), costs.end());
  rep.max_induction_cost = *std::max_element(costs.begin(), costs.end());
  rep.median_induction_cost = median_of(std::move(costs));
  rep.reliable_attack =
      rep.pr_profit >= rule.min_pr_profit && (!rule.require_positive_mean || rep.mean_net_profit > Money{});
  return rep;
}

ByzantineReport aggregate_byzantine(std::span<const ByzantineImpact> impacts) {
  ByzantineReport rep;
  rep.n_attacks = static_cast<std::int64_t>(impacts.size());
  if (impacts.empty()) return rep;
  std::vector<Money> cost, failed, median_value, profit, fees;
  Moments failed_m;
  Moments value_std;
  for (const auto& i : impacts) {
    cost.push_back(i.total_cost);
    failed.push_back(Money::from_units(i.failed_intents));
    failed_m.add(i.failed_intents * Decimal6::kScale);
    median_value.push_back(i.failed_value_median);
    value_std.add(i.failed_value_std.units());
    profit.push_back(i.missed_solver_profit);
    fees.push_back(i.missed_protocol_fees);
  }
  rep.median_total_cost = median_of(cost);
  rep.p90_total_cost = nearest_rank(std::move(cost), 90);
  rep.mean_failed_intents = as_decimal(failed_m.mean());
  rep.std_failed_intents = as_decimal(failed_m.stddev());
  rep.median_failed_intents = median_of(std::move(failed)).units();
  rep.median_failed_value = median_of(std::move(median_value));
  rep.mean_failed_value_std = value_std.mean();
  rep.median_missed_solver_profit = median_of(profit);
  rep.p90_missed_solver_profit = nearest_rank(std::move(profit), 90);
  rep.median_missed_protocol_fees = median_of(fees);
  rep.p90_missed_protocol_fees = nearest_rank(std::move(fees), 90);
  return rep;
}

std::string fingerprint(const std::string& canonical) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(rnd::fnv1a(canonical)));
  return buf;
}

std::string ScheduleSource::canonical() const {
  std::ostringstream s;
  if (kind == Kind::Fixed) {
    s << "fixed:" << times.size() << ":" << fingerprint([&] {
      std::string joined;
      for (auto t : times) joined += std::to_string(t) + ",";
      return joined;
    }());
  } else {
    s << "triggers:" << to_string(trigger.window_mode) << ":" << to_string(trigger.scope)
      << ":res=" << trigger.sample_resolution << ":warmup=" << trigger.warmup_s << ":cooldown="
      << (cooldown_follows_window ? std::string("W") : std::to_string(trigger.cooldown_s));
    if (trigger.intent_class) {
      s << ":" << trigger.intent_class->describe() << ":";
      for (const auto& id : trigger.intent_class->competing) s << id.str() << ",";
    }
  }
  if (from) s << ":from=" << *from;
  if (to) s << ":to=" << *to;
  return s.str();
}

std::size_t SweepGrid::cell_count() const {
  return k.size() * attack_window.size() * solver_profit_pct.size() * protocol_fee_pct.size() *
         max_tx_value.size() * volume_multiplier.size();
}

void SweepGrid::validate() const {
  if (k.empty() || attack_window.empty() || solver_profit_pct.empty() || protocol_fee_pct.empty() ||
      max_tx_value.empty() || volume_multiplier.empty()) {
    throw Error(ErrorCode::InvalidArgument, "sweep axes must be non-empty");
  }
  if (cell_count() > max_cells) {
    throw Error(ErrorCode::GridTooLarge,
                "sweep has " + std::to_string(cell_count()) + " cells, cap is " + std::to_string(max_cells));
  }
}

std::vector<AttackTrigger> schedule_for(const SimulationInputs& inputs, const ScheduleSource& source, unsigned k,
                                        Seconds window) {
  const Timestamp from = source.from.value_or(inputs.coverage_start);
  const Timestamp to = source.to.value_or(inputs.coverage_end);
  if (source.kind == ScheduleSource::Kind::Fixed) return fixed_schedule(inputs.series, source.times);
  TriggerConfig cfg = source.trigger;
  cfg.k = k;
  if (source.cooldown_follows_window) cfg.cooldown_s = window;
  return detect_triggers(inputs.series, cfg, from, to);
}

std::vector<SweepCell> run_sweep(const SweepGrid& grid, const SimulationInputs& inputs, const ScheduleSource& source,
                                 const SweepOptions& options) {
  grid.validate();
  grid.base.validate();

  std::vector<SweepCell> cells;
  cells.reserve(grid.cell_count());
  for (unsigned k : grid.k)
    for (Seconds w : grid.attack_window)
      for (const auto& profit : grid.solver_profit_pct)
        for (const auto& fee : grid.protocol_fee_pct)
          for (Money max_tx : grid.max_tx_value)
            for (Rate mul : grid.volume_multiplier) {
              SweepCell c;
              c.k = k;
              c.config = grid.base;
              c.config.attack_window = w;
              c.config.override_solver_profit_pct = profit;
              c.config.override_protocol_fee_pct = fee;
              c.config.max_tx_value = max_tx;
              c.config.volume_multiplier = mul;
              c.config.validate();
              c.canonical = c.config.canonical() + ";k=" + std::to_string(k) + ";schedule=" + source.canonical();
              c.fingerprint = fingerprint(c.canonical);
              cells.push_back(std::move(c));
            }

  // Schedules depend only on (k, W); compute each once up front.
  std::map<std::pair<unsigned, Seconds>, std::vector<AttackTrigger>> schedules;
  for (const auto& c : cells) {
    const Seconds w = source.kind == ScheduleSource::Kind::Fixed ? 0 : c.config.attack_window;
    const auto key = std::make_pair(source.kind == ScheduleSource::Kind::Fixed ? 0u : c.k, w);
    if (!schedules.count(key)) schedules.emplace(key, schedule_for(inputs, source, c.k, c.config.attack_window));
  }
  const RouteTrace trace(inputs.records, grid.base.route);

  auto run_cell = [&](SweepCell& c) {
    const bool fixed = source.kind == ScheduleSource::Kind::Fixed;
    const auto& triggers = schedules.at({fixed ? 0u : c.k, fixed ? 0 : c.config.attack_window});
    if (c.config.mode == AttackMode::Rational) {
      c.instances.reserve(triggers.size());
      for (const auto& t : triggers) {
        c.instances.push_back(rational_attack(t, trace, c.config, instance_seed(options.seed, t.at, c.config)));
      }
      c.report = aggregate(c.instances, options.reliability);
      c.report.fingerprint = c.fingerprint;
    } else {
      c.impacts.reserve(triggers.size());
      for (const auto& t : triggers) c.impacts.push_back(byzantine_attack(t, trace, c.config));
      c.byzantine = aggregate_byzantine(c.impacts);
      c.byzantine.fingerprint = c.fingerprint;
      c.report.fingerprint = c.fingerprint;
      c.report.n_attacks = c.byzantine.n_attacks;
    }
    if (!options.keep_instances) {
      c.instances.clear();
      c.instances.shrink_to_fit();
      c.impacts.clear();
      c.impacts.shrink_to_fit();
    }
  };

  unsigned n_threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, cells.size()));
  if (n_threads <= 1) {
    for (auto& c : cells) run_cell(c);
    return cells;
  }

  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(cells.size());
  {
    std::vector<std::jthread> workers;
    for (unsigned i = 0; i < n_threads; ++i) {
      workers.emplace_back([&] {
        for (std::size_t idx; (idx = next.fetch_add(1)) < cells.size();) {
          try {
            run_cell(cells[idx]);
          } catch (...) {
            errors[idx] = std::current_exception();
          }
        }
      });
    }
  }
  // First failing cell in grid order, independent of scheduling.
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return cells;
}

const char* to_string(OutputFormat format) {
  switch (format) {
    case OutputFormat::Delimited: return "delimited";
    case OutputFormat::RecordStream: return "record-stream";
    case OutputFormat::AlignedTable: return "aligned-table";
  }
  return "unknown";
}

std::optional<OutputFormat> parse_output_format(std::string_view text) {
  if (text == "delimited" || text == "csv") return OutputFormat::Delimited;
  if (text == "record-stream" || text == "jsonl") return OutputFormat::RecordStream;
  if (text == "aligned-table" || text == "table") return OutputFormat::AlignedTable;
  return std::nullopt;
}

namespace {

using Row = std::vector<std::string>;

std::string opt_rate(const std::optional<Rate>& r) { return r ? r->str() : "real"; }

Row rational_header() {
  return {"fingerprint",  "bridge",         "route",          "k",
          "window_s",     "s_profit_pct",   "prot_fee_pct",   "max_tx_value",
          "vol_mul",      "n_attacks",      "mean_n_fulfillments", "std_n_fulfillments",
          "mean_volume_fulfilled", "std_volume_fulfilled", "mean_net_profit", "std_net_profit",
          "p90_net_profit", "pr_profit",    "reliable_attack", "min_induction_cost",
          "median_induction_cost", "max_induction_cost"};
}

Row byzantine_header() {
  return {"fingerprint", "bridge", "route", "k", "window_s", "max_tx_value", "n_attacks", "mean_failed_intents",
          "std_failed_intents", "median_failed_intents", "median_failed_value", "mean_failed_value_std",
          "median_missed_solver_profit", "p90_missed_solver_profit", "median_missed_protocol_fees",
          "p90_missed_protocol_fees", "median_total_cost", "p90_total_cost"};
}

std::string route_text(const Route& r) { return r.src_chain.name() + "->" + r.dst_chain.name(); }

Row rational_row(const SweepCell& c) {
  const auto& r = c.report;
  return {c.fingerprint,
          c.config.route.bridge.label,
          route_text(c.config.route),
          std::to_string(c.k),
          std::to_string(c.config.attack_window),
          opt_rate(c.config.override_solver_profit_pct),
          opt_rate(c.config.override_protocol_fee_pct),
          c.config.max_tx_value.str(),
          c.config.volume_multiplier.str(),
          std::to_string(r.n_attacks),
          r.mean_n_fulfillments.str(),
          r.std_n_fulfillments.str(),
          r.mean_volume_fulfilled.str(),
          r.std_volume_fulfilled.str(),
          r.mean_net_profit.str(),
          r.std_net_profit.str(),
          r.p90_net_profit.str(),
          r.pr_profit.str(),
          r.reliable_attack ? "yes" : "no",
          r.min_induction_cost.str(),
          r.median_induction_cost.str(),
          r.max_induction_cost.str()};
}

Row byzantine_row(const SweepCell& c) {
  const auto& b = c.byzantine;
  return {c.fingerprint,
          c.config.route.bridge.label,
          route_text(c.config.route),
          std::to_string(c.k),
          std::to_string(c.config.attack_window),
          c.config.max_tx_value.str(),
          std::to_string(b.n_attacks),
          b.mean_failed_intents.str(),
          b.std_failed_intents.str(),
          std::to_string(b.median_failed_intents),
          b.median_failed_value.str(),
          b.mean_failed_value_std.str(),
          b.median_missed_solver_profit.str(),
          b.p90_missed_solver_profit.str(),
          b.median_missed_protocol_fees.str(),
          b.p90_missed_protocol_fees.str(),
          b.median_total_cost.str(),
          b.p90_total_cost.str()};
}

void write_aligned(std::ostream& out, const Row& header, const std::vector<Row>& rows) {
  std::vector<std::size_t> width(header.size());
  for (std::size_t i = 0; i < header.size(); ++i) width[i] = header[i].size();
  for (const auto& r : rows)
    for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
  auto line = [&](const Row& r) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) out << "  ";
      // Text columns left-aligned, numbers right-aligned.
      const bool text = i < 3;
      out << (text ? std::left : std::right) << std::setw(static_cast<int>(width[i])) << r[i];
    }
    out << std::right << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
}

void write_rows(std::ostream& out, const Row& header, const std::vector<Row>& rows, OutputFormat format) {
  switch (format) {
    case OutputFormat::Delimited:
      csv::write_row(out, header, ',');
      for (const auto& r : rows) csv::write_row(out, r, ',');
      break;
    case OutputFormat::RecordStream:
      for (const auto& r : rows) {
        json obj = json::object();
        for (std::size_t i = 0; i < header.size(); ++i) obj[header[i]] = r[i];
        out << obj.dump() << '\n';
      }
      break;
    case OutputFormat::AlignedTable:
      write_aligned(out, header, rows);
      break;
  }
}

void check_stream(std::ostream& out) {
  if (!out) throw Error(ErrorCode::IoFailure, "write failed");
}

}  // namespace

void emit(std::ostream& out, std::span<const SweepCell> cells, OutputFormat format, const RunMetadata& meta) {
  std::vector<const SweepCell*> sorted;
  for (const auto& c : cells) sorted.push_back(&c);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const SweepCell* a, const SweepCell* b) { return a->fingerprint < b->fingerprint; });

  std::string all;
  for (auto* c : sorted) all += c->fingerprint;
  const std::string config_hash = fingerprint(all);
  if (format == OutputFormat::RecordStream) {
    json head = {{"config_hash", config_hash},
                 {"seed", std::to_string(meta.seed)},
                 {"window_mode", to_string(meta.window_mode)},
                 {"scope", to_string(meta.scope)},
                 {"mode", to_string(meta.mode)}};
    out << json{{"lexsim", head}}.dump() << '\n';
  } else {
    out << "# lexsim config_hash=" << config_hash << " seed=" << meta.seed
        << " window_mode=" << to_string(meta.window_mode) << " scope=" << to_string(meta.scope)
        << " mode=" << to_string(meta.mode) << '\n';
  }

  const bool byz = meta.mode == AttackMode::Byzantine;
  std::vector<Row> rows;
  for (auto* c : sorted) rows.push_back(byz ? byzantine_row(*c) : rational_row(*c));
  write_rows(out, byz ? byzantine_header() : rational_header(), rows, format);
  out.flush();
  check_stream(out);
}

namespace {

Row instance_header() {
  return {"t_s",       "alpha",   "liquidity", "working_capital", "induction_cost",   "n_flood_intents",
          "fill_cost", "revenue", "epsilon",   "net_profit",      "n_fulfillments", "volume_fulfilled",
          "captured_intent_ids"};
}

std::string join_ids(const std::vector<std::string>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ';';
    out += ids[i];
  }
  return out;
}

std::vector<std::string> split_ids(const std::string& s) {
  std::vector<std::string> out;
  if (s.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(';', start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::int64_t parse_int(const std::string& s, const char* field) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::SchemaMismatch, std::string("bad integer in ") + field + ": '" + s + "'");
  }
}

AttackInstanceResult instance_from(const std::function<std::string(const char*)>& get) {
  AttackInstanceResult r;
  r.t_s = parse_int(get("t_s"), "t_s");
  r.alpha = Rate::parse(get("alpha"));
  r.liquidity = Money::parse(get("liquidity"));
  r.working_capital = Money::parse(get("working_capital"));
  r.induction_cost = Money::parse(get("induction_cost"));
  r.n_flood_intents = parse_int(get("n_flood_intents"), "n_flood_intents");
  r.fill_cost = Money::parse(get("fill_cost"));
  r.revenue = Money::parse(get("revenue"));
  r.epsilon = Money::parse(get("epsilon"));
  r.net_profit = Money::parse(get("net_profit"));
  r.n_fulfillments = parse_int(get("n_fulfillments"), "n_fulfillments");
  r.volume_fulfilled = Money::parse(get("volume_fulfilled"));
  r.captured_intent_ids = split_ids(get("captured_intent_ids"));
  return r;
}

}  // namespace

void write_instances(std::ostream& out, std::span<const AttackInstanceResult> instances, OutputFormat format) {
  std::vector<Row> rows;
  for (const auto& r : instances) {
    rows.push_back({std::to_string(r.t_s), r.alpha.str(), r.liquidity.str(), r.working_capital.str(),
                    r.induction_cost.str(), std::to_string(r.n_flood_intents), r.fill_cost.str(), r.revenue.str(),
                    r.epsilon.str(), r.net_profit.str(), std::to_string(r.n_fulfillments), r.volume_fulfilled.str(),
                    join_ids(r.captured_intent_ids)});
  }
  write_rows(out, instance_header(), rows, format);
  out.flush();
  check_stream(out);
}

std::vector<AttackInstanceResult> read_instances(std::istream& in, OutputFormat format) {
  std::vector<AttackInstanceResult> out;
  if (format == OutputFormat::AlignedTable) {
    throw Error(ErrorCode::InvalidArgument, "aligned tables are for reading by people; export delimited instead");
  }
  if (format == OutputFormat::Delimited) {
    csv::Reader reader(in, ',');
    auto head = reader.next();
    if (!head) return out;
    csv::Header header(*head);
    while (auto row = reader.next()) {
      out.push_back(instance_from([&](const char* name) {
        const auto idx = header.require(name);
        if (idx >= row->size()) throw Error(ErrorCode::SchemaMismatch, "short row");
        return (*row)[idx];
      }));
    }
    return out;
  }
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::SchemaMismatch, std::string("malformed record: ") + e.what());
    }
    if (obj.contains("lexsim")) continue;
    out.push_back(instance_from([&](const char* name) {
      auto it = obj.find(name);
      if (it == obj.end()) throw Error(ErrorCode::SchemaMismatch, std::string("missing field ") + name);
      return it->is_string() ? it->get<std::string>() : it->dump();
    }));
  }
  return out;
}

void write_impacts(std::ostream& out, std::span<const ByzantineImpact> impacts, OutputFormat format) {
  const Row header{"t_s",
                   "window_s",
                   "total_cost",
                   "failed_intents",
                   "failed_value",
                   "failed_value_median",
                   "failed_value_std",
                   "missed_solver_profit",
                   "missed_protocol_fees"};
  std::vector<Row> rows;
  for (const auto& i : impacts) {
    rows.push_back({std::to_string(i.t_s), std::to_string(i.window), i.total_cost.str(),
                    std::to_string(i.failed_intents), i.failed_value.str(), i.failed_value_median.str(),
                    i.failed_value_std.str(), i.missed_solver_profit.str(), i.missed_protocol_fees.str()});
  }
  write_rows(out, header, rows, format);
  out.flush();
  check_stream(out);
}

void write_plot_series(std::ostream& out, const LiquiditySeries& series, std::span<const AttackTrigger> triggers,
                       Timestamp from, Timestamp to) {
  csv::write_row(out, {"t", "liquidity", "marker"}, ',');
  std::vector<Row> rows;
  from = std::max(from, series.start());
  if (to >= from) rows.push_back({std::to_string(from), series.balance_at(from).str(), ""});
  for (const auto& p : series.points()) {
    if (p.at > from && p.at <= to) rows.push_back({std::to_string(p.at), p.balance.str(), ""});
  }
  std::vector<Row> marks;
  for (const auto& t : triggers) {
    if (t.at >= from && t.at <= to) marks.push_back({std::to_string(t.at), t.liquidity_at_trigger.str(), "trigger"});
  }
  // Merge by time; a marker follows the step row at the same time.
  std::size_t i = 0;
  std::size_t j = 0;
  auto time_of = [](const Row& r) { return std::stoll(r[0]); };
  while (i < rows.size() || j < marks.size()) {
    if (j == marks.size() || (i < rows.size() && time_of(rows[i]) <= time_of(marks[j]))) {
      csv::write_row(out, rows[i++], ',');
    } else {
      csv::write_row(out, marks[j++], ',');
    }
  }
  out.flush();
  check_stream(out);
}

}  // namespace lexsim
