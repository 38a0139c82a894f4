#pragma once

// Per-solver liquidity reconstruction L_s(t) and the statistics the trigger
// strategies are built on.

#include <map>
#include <optional>
#include <queue>
#include <set>
#include <span>
#include <vector>

#include "lexsim/ingest.hpp"
#include "lexsim/trace_model.hpp"

namespace lexsim {

/// Stepwise-constant balance over time. The first point is the origin
/// (origin time, origin balance); the balance holds until the next point and
/// after the last point indefinitely.
class LiquiditySeries {
 public:
  struct Point {
    Timestamp at;
    Money balance;
    friend bool operator==(const Point&, const Point&) = default;
  };

  LiquiditySeries() = default;
  LiquiditySeries(SolverId solver, Timestamp origin_time, Money origin_balance);

  const SolverId& solver() const { return solver_; }
  Timestamp start() const { return points_.front().at; }
  Timestamp last_change() const { return points_.back().at; }
  Money origin_balance() const { return points_.front().balance; }
  std::span<const Point> points() const { return points_; }

  /// Throws OutOfRange when t precedes the origin.
  Money balance_at(Timestamp t) const;

  /// Appends a point; `at` must not precede the last point. A point at the
  /// same time as the last one replaces its balance.
  void set(Timestamp at, Money balance);

 private:
  SolverId solver_;
  std::vector<Point> points_;
};

using SeriesMap = std::map<SolverId, LiquiditySeries>;

/// Replays deltas per solver in time order (stable within a timestamp). The
/// balance is checked after each timestamp's deltas are applied; a negative
/// result throws NegativeBalance. Every series starts at `origin_time`
/// (default: the earliest event, or 0 with no events).
SeriesMap build_series(std::span<const LiquidityEvent> events, const OriginBalances& origin_balances,
                       std::optional<Timestamp> origin_time = std::nullopt);

/// Sum over all solvers; throws OutOfRange before the earliest origin.
Money total_liquidity(const SeriesMap& series, Timestamp t);

/// Point-wise sum of the selected series (all when `members` is null) as one
/// series labelled `label`.
LiquiditySeries sum_series(const SeriesMap& series, const std::set<SolverId>* members, const SolverId& label);

enum class WindowMode { CausalExpanding, FullPeriod };

const char* to_string(WindowMode mode);
std::optional<WindowMode> parse_window_mode(std::string_view text);

struct LiquidityStats {
  SolverId solver;
  Timestamp as_of = 0;
  Money median;  // lower-middle order statistic
  Money stddev;  // population
  std::int64_t samples = 0;
  WindowMode window = WindowMode::CausalExpanding;
};

/// Balances sampled at origin + j*resolution, for every grid time in [from, to].
std::vector<Money> sample_series(const LiquiditySeries& series, Timestamp from, Timestamp to, Seconds resolution);

/// Median and population std of balances on the sampling grid: from the
/// origin up to and including t (causal), or over [origin, last change]
/// (full period, extended to t when later). Throws InsufficientHistory with fewer than two samples.
LiquidityStats stats_at(const LiquiditySeries& series, Timestamp t, WindowMode mode, Seconds resolution = 60);

/// Expanding-window median (lower middle) and population standard deviation,
/// exact in micro-dollars.
class ExpandingStats {
 public:
  void add(Money value);
  std::int64_t count() const { return n_; }
  Money median() const;
  Money stddev() const;

 private:
  std::priority_queue<std::int64_t> lower_;                                             // max-heap
  std::priority_queue<std::int64_t, std::vector<std::int64_t>, std::greater<>> upper_;  // min-heap
  std::int64_t n_ = 0;
  __int128 sum_ = 0;
  __int128 sum_sq_ = 0;
};

/// Intents of one bridge, optionally restricted to a token and a value band
/// [value_min, value_max), and the solvers that compete for them.
struct IntentClass {
  Bridge bridge;
  std::optional<std::string> token;
  std::optional<Money> value_min;
  std::optional<Money> value_max;
  std::set<SolverId> competing;

  bool matches(const IntentRecord& r) const;
  /// Throws InvalidArgument on an empty band, EmptyCompetingSet when `competing` is empty.
  void validate() const;
  std::string describe() const;
};

/// Sum of L_s(t) over the class's competing set.
Money effective_liquidity(const SeriesMap& series, const IntentClass& cls, Timestamp t);

/// Solvers with at least one fulfillment of a matching intent whose creation
/// time lies in [from, to). `cls.competing` is ignored.
std::set<SolverId> infer_competing_set(std::span<const IntentRecord> records, const IntentClass& cls,
                                       std::optional<Timestamp> from = std::nullopt,
                                       std::optional<Timestamp> to = std::nullopt);

}  // namespace lexsim
