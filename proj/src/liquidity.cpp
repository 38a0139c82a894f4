#include "lexsim/liquidity.hpp"

#include <algorithm>
#include <numeric>

namespace lexsim {

LiquiditySeries::LiquiditySeries(SolverId solver, Timestamp origin_time, Money origin_balance)
    : solver_(std::move(solver)), points_{{origin_time, origin_balance}} {}

Money LiquiditySeries::balance_at(Timestamp t) const {
  if (points_.empty() || t < points_.front().at) {
    throw Error(ErrorCode::OutOfRange, "time " + std::to_string(t) + " precedes series origin for " + solver_.str());
  }
  auto it = std::upper_bound(points_.begin(), points_.end(), t, [](Timestamp v, const Point& p) { return v < p.at; });
  return std::prev(it)->balance;
}

void LiquiditySeries::set(Timestamp at, Money balance) {
  if (at < points_.back().at) throw Error(ErrorCode::InvalidArgument, "series points must be time-ordered");
  if (at == points_.back().at) {
    points_.back().balance = balance;
    return;
  }
  if (balance == points_.back().balance) return;
  points_.push_back({at, balance});
}

SeriesMap build_series(std::span<const LiquidityEvent> events, const OriginBalances& origin_balances,
                       std::optional<Timestamp> origin_time) {
  Timestamp origin = 0;
  if (origin_time) {
    origin = *origin_time;
  } else if (!events.empty()) {
    origin = std::min_element(events.begin(), events.end(), [](auto& a, auto& b) { return a.at < b.at; })->at;
  }

  std::vector<std::size_t> order(events.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return events[a].at < events[b].at; });

  SeriesMap out;
  for (const auto& [solver, balance] : origin_balances) {
    if (balance.is_negative()) throw Error(ErrorCode::NegativeBalance, "negative origin balance for " + solver.str());
    out.emplace(solver, LiquiditySeries(solver, origin, balance));
  }

  // Per-solver running balance; validated once a timestamp is complete.
  std::map<SolverId, Money> running;
  for (const auto& [solver, s] : out) running[solver] = s.origin_balance();
  std::set<SolverId> touched;
  auto flush = [&](Timestamp at) {
    for (const auto& solver : touched) {
      const Money bal = running[solver];
      if (bal.is_negative()) {
        throw Error(ErrorCode::NegativeBalance,
                    "balance of " + solver.str() + " goes negative (" + bal.str() + ") at " + std::to_string(at));
      }
      out.at(solver).set(at, bal);
    }
    touched.clear();
  };

  std::optional<Timestamp> current;
  for (auto idx : order) {
    const auto& e = events[idx];
    if (e.at < origin) {
      throw Error(ErrorCode::OutOfRange, "event at " + std::to_string(e.at) + " precedes series origin");
    }
    if (current && *current != e.at) flush(*current);
    current = e.at;
    if (!out.count(e.solver)) {
      out.emplace(e.solver, LiquiditySeries(e.solver, origin, Money{}));
      running[e.solver] = Money{};
    }
    running[e.solver] += e.delta;
    touched.insert(e.solver);
  }
  if (current) flush(*current);
  return out;
}

Money total_liquidity(const SeriesMap& series, Timestamp t) {
  Money sum;
  for (const auto& [_, s] : series) sum += s.balance_at(t);
  return sum;
}

LiquiditySeries sum_series(const SeriesMap& series, const std::set<SolverId>* members, const SolverId& label) {
  std::vector<const LiquiditySeries*> selected;
  for (const auto& [id, s] : series) {
    if (!members || members->count(id)) selected.push_back(&s);
  }
  if (selected.empty()) return LiquiditySeries(label, 0, Money{});

  Timestamp origin = selected.front()->start();
  for (auto* s : selected) origin = std::min(origin, s->start());

  // Merge change points; track each series' current balance.
  struct Cursor {
    const LiquiditySeries* s;
    std::size_t next;
    Money current;
  };
  std::vector<Cursor> cursors;
  Money total;
  for (auto* s : selected) {
    // Series starting later than the merged origin contribute zero before it.
    const bool starts_now = s->start() == origin;
    cursors.push_back({s, starts_now ? std::size_t{1} : std::size_t{0}, starts_now ? s->origin_balance() : Money{}});
    total += cursors.back().current;
  }
  LiquiditySeries out(label, origin, total);
  while (true) {
    std::optional<Timestamp> next_at;
    for (const auto& c : cursors) {
      if (c.next < c.s->points().size()) {
        const Timestamp at = c.s->points()[c.next].at;
        if (!next_at || at < *next_at) next_at = at;
      }
    }
    if (!next_at) break;
    for (auto& c : cursors) {
      if (c.next < c.s->points().size() && c.s->points()[c.next].at == *next_at) {
        total -= c.current;
        c.current = c.s->points()[c.next].balance;
        total += c.current;
        ++c.next;
      }
    }
    out.set(*next_at, total);
  }
  return out;
}

const char* to_string(WindowMode mode) {
  return mode == WindowMode::CausalExpanding ? "causal-expanding" : "full-period";
}

std::optional<WindowMode> parse_window_mode(std::string_view text) {
  if (text == "causal-expanding" || text == "causal") return WindowMode::CausalExpanding;
  if (text == "full-period" || text == "full") return WindowMode::FullPeriod;
  return std::nullopt;
}

std::vector<Money> sample_series(const LiquiditySeries& series, Timestamp from, Timestamp to, Seconds resolution) {
  if (resolution <= 0) throw Error(ErrorCode::InvalidArgument, "sample resolution must be positive");
  std::vector<Money> out;
  const Timestamp origin = series.start();
  from = std::max(from, origin);
  if (to < from) return out;
  // First grid time >= from.
  Timestamp t = origin + ((from - origin + resolution - 1) / resolution) * resolution;
  const auto pts = series.points();
  std::size_t i = 0;
  for (; t <= to; t += resolution) {
    while (i + 1 < pts.size() && pts[i + 1].at <= t) ++i;
    out.push_back(pts[i].balance);
  }
  return out;
}

void ExpandingStats::add(Money value) {
  const std::int64_t v = value.units();
  if (lower_.empty() || v <= lower_.top()) {
    lower_.push(v);
  } else {
    upper_.push(v);
  }
  // Keep |lower| == ceil(n/2) so lower.top() is the lower-middle element.
  if (lower_.size() > upper_.size() + 1) {
    upper_.push(lower_.top());
    lower_.pop();
  } else if (upper_.size() > lower_.size()) {
    lower_.push(upper_.top());
    upper_.pop();
  }
  ++n_;
  sum_ += v;
  sum_sq_ += static_cast<__int128>(v) * v;
}

Money ExpandingStats::median() const {
  if (n_ == 0) throw Error(ErrorCode::InsufficientHistory, "no samples");
  return Money::from_units(lower_.top());
}

Money ExpandingStats::stddev() const { return money_pstddev(sum_, sum_sq_, n_); }

LiquidityStats stats_at(const LiquiditySeries& series, Timestamp t, WindowMode mode, Seconds resolution) {
  if (t < series.start()) {
    throw Error(ErrorCode::OutOfRange, "stats requested before series origin for " + series.solver().str());
  }
  const Timestamp upto = mode == WindowMode::CausalExpanding ? t : std::max(series.last_change(), t);
  std::vector<Money> samples = sample_series(series, series.start(), upto, resolution);
  if (samples.size() < 2) {
    throw Error(ErrorCode::InsufficientHistory, "fewer than two liquidity samples for " + series.solver().str());
  }
  __int128 sum = 0;
  __int128 sum_sq = 0;
  for (auto m : samples) {
    sum += m.units();
    sum_sq += static_cast<__int128>(m.units()) * m.units();
  }
  const auto n = static_cast<std::int64_t>(samples.size());
  auto mid = samples.begin() + (n - 1) / 2;
  std::nth_element(samples.begin(), mid, samples.end());
  LiquidityStats st;
  st.solver = series.solver();
  st.as_of = t;
  st.median = *mid;
  st.stddev = money_pstddev(sum, sum_sq, n);
  st.samples = n;
  st.window = mode;
  return st;
}

bool IntentClass::matches(const IntentRecord& r) const {
  if (!(r.bridge == bridge)) return false;
  if (token && r.dst_token != *token) return false;
  if (value_min && r.value < *value_min) return false;
  if (value_max && !(r.value < *value_max)) return false;
  return true;
}

void IntentClass::validate() const {
  if (value_min && value_max && !(*value_min < *value_max)) {
    throw Error(ErrorCode::InvalidArgument, "intent class value band is empty");
  }
  if (competing.empty()) throw Error(ErrorCode::EmptyCompetingSet, "intent class has no competing solvers");
}

std::string IntentClass::describe() const {
  std::string out = "class(" + bridge.label + "," + token.value_or("*") + ",";
  out += value_min ? value_min->str() : "-inf";
  out += "..";
  out += value_max ? value_max->str() : "+inf";
  out += ")";
  return out;
}

Money effective_liquidity(const SeriesMap& series, const IntentClass& cls, Timestamp t) {
  cls.validate();
  Money sum;
  for (const auto& solver : cls.competing) {
    auto it = series.find(solver);
    if (it != series.end()) sum += it->second.balance_at(t);
  }
  return sum;
}

std::set<SolverId> infer_competing_set(std::span<const IntentRecord> records, const IntentClass& cls,
                                       std::optional<Timestamp> from, std::optional<Timestamp> to) {
  std::set<SolverId> out;
  for (const auto& r : records) {
    if (!r.fulfilled_at || r.solver.address.empty()) continue;
    if (from && r.created_at < *from) continue;
    if (to && !(r.created_at < *to)) continue;
    if (cls.matches(r)) out.insert(r.solver);
  }
  return out;
}

}  // namespace lexsim
