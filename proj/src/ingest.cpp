#include "lexsim/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <json.hpp>

#include "csv.hpp"

namespace lexsim {

namespace {

using json = nlohmann::json;

// Columns consumed by the mapping; everything else lands in `raw`.
const std::vector<std::string>& canonical_columns() {
  static const std::vector<std::string> cols = {
      "intent_id",      "bridge",           "src_blockchain",           "dst_blockchain",
      "dst_from",       "src_timestamp",    "dst_timestamp",            "repayment_timestamp",
      "input_amount_usd", "solver_profitability_pct", "percent_fee",    "native_fix_fee_usd",
      "adjusted_dst_fee_usd", "auction_cost_usd", "dst_symbol",          "same_chain",
  };
  return cols;
}

const std::set<std::string>& consumed_columns() {
  static const std::set<std::string> cols = [] {
    std::set<std::string> s(canonical_columns().begin(), canonical_columns().end());
    s.insert("dst_fee_usd");
    return s;
  }();
  return cols;
}

const std::vector<std::string>& required_columns() {
  static const std::vector<std::string> cols = {
      "intent_id",        "bridge",       "src_blockchain", "dst_blockchain", "dst_from", "src_timestamp",
      "input_amount_usd", "solver_profitability_pct", "percent_fee", "dst_symbol",
  };
  return cols;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileMissing, "cannot open '" + path.string() + "'");
  return in;
}

std::int64_t parse_int(std::string_view text, std::string_view field) {
  auto b = text.find_first_not_of(" \t");
  auto e = text.find_last_not_of(" \t");
  if (b == std::string_view::npos) throw Error(ErrorCode::InvalidArgument, std::string(field) + ": empty integer");
  text = text.substr(b, e - b + 1);
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::InvalidArgument, std::string(field) + ": not an integer '" + std::string(text) + "'");
  }
  return v;
}

bool parse_bool(std::string_view text) {
  std::string t(text);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (t == "1" || t == "true" || t == "yes") return true;
  if (t == "0" || t == "false" || t == "no" || t.empty()) return false;
  throw Error(ErrorCode::InvalidArgument, "not a boolean: '" + std::string(text) + "'");
}

std::string percent_text(Rate r) {
  // Fraction with 9 digits -> percent with 7 digits, exact.
  return Fixed<7>::from_units(r.units()).str();
}

using FieldGetter = std::function<std::optional<std::string>(const std::string&)>;

struct RowOutcome {
  std::optional<IntentRecord> record;
  std::optional<Rejection> rejection;
  std::optional<std::string> warning;
};

RowOutcome map_row(const FieldGetter& get, const std::vector<std::string>& all_names,
                   const TraceLoadOptions& options) {
  const ValidationOptions& validation = options.validation;
  RowOutcome out;
  try {
    auto need = [&](const std::string& name) {
      auto v = get(name);
      if (!v) throw Error(ErrorCode::SchemaMismatch, "missing column '" + name + "'");
      return *v;
    };
    auto optional_field = [&](const std::string& name) -> std::optional<std::string> {
      auto v = get(name);
      if (!v || v->empty()) return std::nullopt;
      return v;
    };

    IntentRecord r;
    r.intent_id = need("intent_id");
    r.bridge = Bridge::parse(need("bridge"));
    const std::string src = need("src_blockchain");
    const std::string dst = need("dst_blockchain");
    auto src_chain = ChainId::parse(src, validation.extra_chains);
    auto dst_chain = ChainId::parse(dst, validation.extra_chains);
    if (!src_chain) {
      out.rejection = Rejection{ErrorCode::UnknownChain, "src_chain", "unknown chain '" + src + "'"};
      return out;
    }
    if (!dst_chain) {
      out.rejection = Rejection{ErrorCode::UnknownChain, "dst_chain", "unknown chain '" + dst + "'"};
      return out;
    }
    r.src_chain = *src_chain;
    r.dst_chain = *dst_chain;
    if (auto sc = optional_field("same_chain")) r.same_chain_swap = parse_bool(*sc);

    r.created_at = parse_int(need("src_timestamp"), "src_timestamp");
    if (auto v = optional_field("dst_timestamp")) {
      r.fulfilled_at = parse_int(*v, "dst_timestamp");
    } else if (auto lat = optional_field("fill_latency")) {
      r.fulfilled_at = r.created_at + parse_int(*lat, "fill_latency");
    }
    if (auto v = optional_field("repayment_timestamp")) r.refunded_at = parse_int(*v, "repayment_timestamp");

    const std::string solver = need("dst_from");
    if (!solver.empty()) r.solver = normalize_solver(solver, r.dst_chain);

    if (auto usd = optional_field("input_amount_usd")) {
      r.value = Money::parse(*usd);
    } else if (auto amount = optional_field("input_amount"); amount && options.prices) {
      // Token units priced at the creation day's close.
      const auto symbol = optional_field("src_symbol").value_or(need("dst_symbol"));
      r.value = usd_normalize(*amount, symbol, utc_date(r.created_at), *options.prices);
    } else {
      need("input_amount_usd");
      throw Error(ErrorCode::InvalidArgument, "input_amount_usd is empty");
    }
    r.solver_profit_pct = rate_from_percent(need("solver_profitability_pct"));
    r.protocol_fee_pct = rate_from_percent(need("percent_fee"));
    if (auto v = optional_field("native_fix_fee_usd")) r.protocol_fixed_fee = Money::parse(*v);
    if (auto v = optional_field("adjusted_dst_fee_usd")) {
      r.fill_gas = Money::parse(*v);
    } else if (auto g = optional_field("dst_fee_usd")) {
      r.fill_gas = Money::parse(*g);
    } else if (!get("adjusted_dst_fee_usd") && !get("dst_fee_usd")) {
      throw Error(ErrorCode::SchemaMismatch, "missing column 'adjusted_dst_fee_usd'");
    }
    if (auto v = optional_field("auction_cost_usd")) r.auction_cost = Money::parse(*v);
    r.dst_token = need("dst_symbol");

    for (const auto& name : all_names) {
      if (consumed_columns().count(name)) continue;
      auto v = get(name);
      if (v && !v->empty()) r.raw.emplace(name, *v);
    }

    if (auto rej = check_record(r, validation)) {
      out.rejection = std::move(rej);
      return out;
    }

    if (auto it = r.raw.find("percent_fee_usd"); it != r.raw.end()) {
      const Money stated = Money::parse(it->second);
      const Money recomputed = scale(r.value, r.protocol_fee_pct);
      const Money diff = stated > recomputed ? stated - recomputed : recomputed - stated;
      // |diff| > 1% of recomputed (or any difference when recomputed is zero).
      if (diff.units() * 100 > recomputed.units() && !(diff.is_zero())) {
        out.warning = "intent " + r.intent_id + ": percent_fee_usd " + stated.str() + " disagrees with " +
                      recomputed.str() + " recomputed from percent_fee";
      }
    }
    out.record = std::move(r);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::SchemaMismatch) throw;
    out.rejection = Rejection{e.code(), "row", e.what()};
  }
  return out;
}

void finish_load(TraceLoad& load, std::size_t total_rows, const TraceLoadOptions& options) {
  // Set-level duplicate detection: later duplicates are rejected rows.
  std::set<std::string> seen;
  std::vector<IntentRecord> unique;
  unique.reserve(load.records.size());
  for (auto& r : load.records) {
    if (!seen.insert(r.intent_id).second) {
      load.rejected.push_back({0, {ErrorCode::DuplicateId, "intent_id", "duplicate intent id '" + r.intent_id + "'"}});
      continue;
    }
    unique.push_back(std::move(r));
  }
  load.records = std::move(unique);
  sort_records(load.records);

  if (total_rows >= options.min_rows_for_ratio && total_rows > 0) {
    const double ratio = static_cast<double>(load.rejected.size()) / static_cast<double>(total_rows);
    if (ratio > options.max_rejection_ratio) {
      std::ostringstream msg;
      msg << load.rejected.size() << " of " << total_rows << " rows rejected";
      if (!load.rejected.empty()) msg << " (first: " << load.rejected.front().rejection.message << ")";
      throw Error(ErrorCode::RowRejected, msg.str());
    }
  }
}

TraceLoad read_delimited(std::istream& in, const TraceLoadOptions& options) {
  csv::Reader reader(in, options.delimiter);
  auto header_row = reader.next();
  if (!header_row) throw Error(ErrorCode::SchemaMismatch, "trace file has no header row");
  const csv::Header header(std::move(*header_row));
  for (const auto& col : required_columns()) header.require(col);
  if (!header.find("adjusted_dst_fee_usd") && !header.find("dst_fee_usd")) {
    header.require("adjusted_dst_fee_usd");
  }

  TraceLoad load;
  std::size_t rows = 0;
  while (auto row = reader.next()) {
    ++rows;
    const auto& fields = *row;
    FieldGetter get = [&](const std::string& name) -> std::optional<std::string> {
      auto i = header.find(name);
      if (!i) return std::nullopt;
      if (*i >= fields.size()) return std::string{};
      return fields[*i];
    };
    auto outcome = map_row(get, header.names(), options);
    if (outcome.rejection) load.rejected.push_back({rows, std::move(*outcome.rejection)});
    if (outcome.warning) load.warnings.push_back(std::move(*outcome.warning));
    if (outcome.record) load.records.push_back(std::move(*outcome.record));
  }
  finish_load(load, rows, options);
  return load;
}

std::string json_scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return {};
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  return v.dump();
}

TraceLoad read_record_stream(std::istream& in, const TraceLoadOptions& options) {
  TraceLoad load;
  std::size_t rows = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ++rows;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::exception& e) {
      load.rejected.push_back({rows, {ErrorCode::SchemaMismatch, "row", e.what()}});
      continue;
    }
    if (!obj.is_object()) {
      load.rejected.push_back({rows, {ErrorCode::SchemaMismatch, "row", "record is not an object"}});
      continue;
    }
    std::vector<std::string> names;
    for (auto it = obj.begin(); it != obj.end(); ++it) names.push_back(it.key());
    FieldGetter get = [&](const std::string& name) -> std::optional<std::string> {
      auto it = obj.find(name);
      if (it == obj.end()) return std::nullopt;
      return json_scalar_text(*it);
    };
    try {
      auto outcome = map_row(get, names, options);
      if (outcome.rejection) load.rejected.push_back({rows, std::move(*outcome.rejection)});
      if (outcome.warning) load.warnings.push_back(std::move(*outcome.warning));
      if (outcome.record) load.records.push_back(std::move(*outcome.record));
    } catch (const Error& e) {
      // Self-describing records: a missing field rejects only that record.
      load.rejected.push_back({rows, {e.code(), "row", e.what()}});
    }
  }
  finish_load(load, rows, options);
  return load;
}

std::map<std::string, std::string> record_columns(const IntentRecord& r) {
  std::map<std::string, std::string> c;
  c["intent_id"] = r.intent_id;
  c["bridge"] = r.bridge.label;
  c["src_blockchain"] = r.src_chain.name();
  c["dst_blockchain"] = r.dst_chain.name();
  c["dst_from"] = r.solver.address;
  c["src_timestamp"] = std::to_string(r.created_at);
  c["dst_timestamp"] = r.fulfilled_at ? std::to_string(*r.fulfilled_at) : "";
  c["repayment_timestamp"] = r.refunded_at ? std::to_string(*r.refunded_at) : "";
  c["input_amount_usd"] = r.value.str();
  c["solver_profitability_pct"] = percent_text(r.solver_profit_pct);
  c["percent_fee"] = percent_text(r.protocol_fee_pct);
  c["native_fix_fee_usd"] = r.protocol_fixed_fee.str();
  c["adjusted_dst_fee_usd"] = r.fill_gas.str();
  c["auction_cost_usd"] = r.auction_cost.str();
  c["dst_symbol"] = r.dst_token;
  c["same_chain"] = r.same_chain_swap ? "true" : "false";
  return c;
}

std::tm utc_tm(Timestamp t) {
  using namespace std::chrono;
  const sys_days day = floor<days>(sys_seconds{seconds{t}});
  const year_month_day ymd{day};
  std::tm tm{};
  tm.tm_year = static_cast<int>(ymd.year()) - 1900;
  tm.tm_mon = static_cast<int>(static_cast<unsigned>(ymd.month())) - 1;
  tm.tm_mday = static_cast<int>(static_cast<unsigned>(ymd.day()));
  return tm;
}

bool valid_date(std::string_view d) {
  if (d.size() != 10 || d[4] != '-' || d[7] != '-') return false;
  for (std::size_t i : {0, 1, 2, 3, 5, 6, 8, 9}) {
    if (d[i] < '0' || d[i] > '9') return false;
  }
  using namespace std::chrono;
  const int y = std::stoi(std::string(d.substr(0, 4)));
  const unsigned m = static_cast<unsigned>(std::stoi(std::string(d.substr(5, 2))));
  const unsigned dd = static_cast<unsigned>(std::stoi(std::string(d.substr(8, 2))));
  return year_month_day{year{y}, month{m}, day{dd}}.ok();
}

}  // namespace

void sort_records(std::vector<IntentRecord>& records) {
  std::stable_sort(records.begin(), records.end(), [](const IntentRecord& a, const IntentRecord& b) {
    if (a.created_at != b.created_at) return a.created_at < b.created_at;
    return a.intent_id < b.intent_id;
  });
}

TraceLoad read_traces(std::istream& in, const TraceLoadOptions& options) {
  return options.format == TraceFormat::Delimited ? read_delimited(in, options) : read_record_stream(in, options);
}

TraceLoad load_traces(const std::filesystem::path& path, const TraceLoadOptions& options) {
  auto in = open_input(path);
  return read_traces(in, options);
}

void write_traces(std::ostream& out, std::span<const IntentRecord> records, TraceFormat format, char delimiter) {
  if (format == TraceFormat::RecordStream) {
    for (const auto& r : records) {
      json obj = json::object();
      for (auto& [k, v] : r.raw) obj[k] = v;
      for (auto& [k, v] : record_columns(r)) obj[k] = v;
      out << obj.dump() << '\n';
    }
    return;
  }
  std::set<std::string> raw_names;
  for (const auto& r : records) {
    for (const auto& [k, _] : r.raw) raw_names.insert(k);
  }
  std::vector<std::string> header = canonical_columns();
  header.insert(header.end(), raw_names.begin(), raw_names.end());
  csv::write_row(out, header, delimiter);
  std::vector<std::string> fields;
  for (const auto& r : records) {
    auto cols = record_columns(r);
    fields.clear();
    for (const auto& name : canonical_columns()) fields.push_back(cols[name]);
    for (const auto& name : raw_names) {
      auto it = r.raw.find(name);
      fields.push_back(it == r.raw.end() ? std::string{} : it->second);
    }
    csv::write_row(out, fields, delimiter);
  }
}

// --- liquidity events -------------------------------------------------------

std::vector<LiquidityEvent> read_liquidity_events(std::istream& in, char delimiter) {
  csv::Reader reader(in, delimiter);
  auto header_row = reader.next();
  if (!header_row) throw Error(ErrorCode::SchemaMismatch, "liquidity event file has no header row");
  const csv::Header header(std::move(*header_row));
  const auto c_solver = header.require("solver");
  const auto c_chain = header.require("chain");
  const auto c_at = header.require("at_epoch_s");
  const auto c_delta = header.require("delta_usd");
  const auto c_kind = header.require("kind");
  std::vector<LiquidityEvent> events;
  while (auto row = reader.next()) {
    const auto& f = *row;
    auto field = [&](std::size_t i) -> const std::string& {
      if (i >= f.size()) throw Error(ErrorCode::SchemaMismatch, "short row at line " + std::to_string(reader.line()));
      return f[i];
    };
    LiquidityEvent e;
    e.solver = normalize_solver(field(c_solver), ChainId::of(field(c_chain)));
    e.at = parse_int(field(c_at), "at_epoch_s");
    e.delta = Money::parse(field(c_delta));
    auto kind = parse_event_kind(field(c_kind));
    if (!kind) throw Error(ErrorCode::SchemaMismatch, "unknown event kind '" + field(c_kind) + "'");
    e.kind = *kind;
    if (auto rej = check_event(e)) {
      throw Error(rej->code, "line " + std::to_string(reader.line()) + ": " + rej->message);
    }
    events.push_back(std::move(e));
  }
  return events;
}

std::vector<LiquidityEvent> load_liquidity_events(const std::filesystem::path& path, char delimiter) {
  auto in = open_input(path);
  return read_liquidity_events(in, delimiter);
}

void write_liquidity_events(std::ostream& out, std::span<const LiquidityEvent> events, char delimiter) {
  csv::write_row(out, {"solver", "chain", "at_epoch_s", "delta_usd", "kind"}, delimiter);
  for (const auto& e : events) {
    csv::write_row(out, {e.solver.address, e.solver.chain.name(), std::to_string(e.at), e.delta.str(), to_string(e.kind)},
                   delimiter);
  }
}

OriginBalances read_origin_balances(std::istream& in, char delimiter) {
  csv::Reader reader(in, delimiter);
  auto header_row = reader.next();
  if (!header_row) throw Error(ErrorCode::SchemaMismatch, "origin balance file has no header row");
  const csv::Header header(std::move(*header_row));
  const auto c_solver = header.require("solver");
  const auto c_chain = header.require("chain");
  const auto c_balance = header.require("balance_usd");
  OriginBalances out;
  while (auto row = reader.next()) {
    const auto& f = *row;
    if (f.size() <= std::max({c_solver, c_chain, c_balance})) {
      throw Error(ErrorCode::SchemaMismatch, "short row at line " + std::to_string(reader.line()));
    }
    auto id = normalize_solver(f[c_solver], ChainId::of(f[c_chain]));
    const Money balance = Money::parse(f[c_balance]);
    if (balance.is_negative()) throw Error(ErrorCode::NegativeValue, "negative origin balance for " + id.str());
    if (!out.emplace(id, balance).second) throw Error(ErrorCode::DuplicateKey, "duplicate origin balance for " + id.str());
  }
  return out;
}

OriginBalances load_origin_balances(const std::filesystem::path& path, char delimiter) {
  auto in = open_input(path);
  return read_origin_balances(in, delimiter);
}

void write_origin_balances(std::ostream& out, const OriginBalances& balances, char delimiter) {
  csv::write_row(out, {"solver", "chain", "balance_usd"}, delimiter);
  for (const auto& [id, balance] : balances) {
    csv::write_row(out, {id.address, id.chain.name(), balance.str()}, delimiter);
  }
}

// --- prices -----------------------------------------------------------------

std::string PriceTable::key(std::string_view symbol, std::string_view date) {
  std::string k(symbol);
  std::transform(k.begin(), k.end(), k.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  k += '|';
  k += date;
  return k;
}

void PriceTable::add(std::string_view symbol, std::string_view date, UnitPrice price) {
  if (!valid_date(date)) throw Error(ErrorCode::InvalidArgument, "bad date '" + std::string(date) + "'");
  if (price <= UnitPrice{}) {
    throw Error(ErrorCode::NonPositivePrice,
                "non-positive price for " + std::string(symbol) + " on " + std::string(date) + ": " + price.str());
  }
  if (!prices_.emplace(key(symbol, date), price).second) {
    throw Error(ErrorCode::DuplicateKey, "duplicate price for " + std::string(symbol) + " on " + std::string(date));
  }
}

UnitPrice PriceTable::lookup(std::string_view symbol, std::string_view date) const {
  auto it = prices_.find(key(symbol, date));
  if (it == prices_.end()) {
    throw Error(ErrorCode::MissingPrice, "no price for " + std::string(symbol) + " on " + std::string(date));
  }
  return it->second;
}

PriceTable read_prices(std::istream& in, char delimiter) {
  csv::Reader reader(in, delimiter);
  auto header_row = reader.next();
  if (!header_row) throw Error(ErrorCode::SchemaMismatch, "price file has no header row");
  const csv::Header header(std::move(*header_row));
  const auto c_symbol = header.require("symbol");
  const auto c_date = header.require("date");
  const auto c_price = header.require("price_usd");
  PriceTable table;
  while (auto row = reader.next()) {
    const auto& f = *row;
    if (f.size() <= std::max({c_symbol, c_date, c_price})) {
      throw Error(ErrorCode::SchemaMismatch, "short row at line " + std::to_string(reader.line()));
    }
    table.add(f[c_symbol], f[c_date], UnitPrice::parse(f[c_price]));
  }
  return table;
}

PriceTable load_prices(const std::filesystem::path& path, char delimiter) {
  auto in = open_input(path);
  return read_prices(in, delimiter);
}

std::string utc_date(Timestamp t) {
  const std::tm tm = utc_tm(t);
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday);
  return buf;
}

Money usd_normalize(std::string_view amount, std::string_view symbol, std::string_view date, const PriceTable& prices) {
  return scale_text(amount, prices.lookup(symbol, date));
}

}  // namespace lexsim
