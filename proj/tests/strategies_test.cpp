#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "lexsim/strategies.hpp"

using namespace lexsim;

namespace {

// 1000 for 100 minutes, 0 for 5 minutes, then 1000 again.
LiquiditySeries dip_series() {
  LiquiditySeries s(fx::solver("0x1"), 0, Money::parse("1000"));
  s.set(6000, Money{});
  s.set(6300, Money::parse("1000"));
  return s;
}

}  // namespace

TEST_CASE("flat series never triggers") {
  LiquiditySeries s(fx::solver("0x1"), 0, Money::parse("1000"));
  TriggerConfig cfg;
  cfg.k = 0;
  CHECK(scan_for_triggers(s, cfg, 0, 86400).empty());
}

TEST_CASE("one dip gives one trigger inside it") {
  TriggerConfig cfg;
  cfg.k = 1;
  auto trs = scan_for_triggers(dip_series(), cfg, 0, 20000);
  REQUIRE(trs.size() == 1);
  CHECK(trs[0].at >= 6000);
  CHECK(trs[0].at < 6300);
  CHECK(trs[0].liquidity_at_trigger.is_zero());
  CHECK(trs[0].threshold == trs[0].median - trs[0].stddev);
}

TEST_CASE("warmup suppresses early triggers") {
  TriggerConfig cfg;
  cfg.k = 1;
  cfg.warmup_s = 7000;
  CHECK(scan_for_triggers(dip_series(), cfg, 0, 20000).empty());
}

TEST_CASE("triggers are nested in k and spaced by the cooldown") {
  std::mt19937_64 gen(5);
  LiquiditySeries s(fx::solver("0x1"), 0, Money::parse("500000"));
  std::int64_t level = 500'000;
  for (Timestamp t = 60; t < 3 * 86400; t += 60) {
    level = std::max<std::int64_t>(0, level + static_cast<std::int64_t>(gen() % 20001) - 10000);
    s.set(t, Money::from_integer(level));
  }
  std::size_t prev = SIZE_MAX;
  for (unsigned k = 0; k <= 3; ++k) {
    TriggerConfig cfg;
    cfg.k = k;
    auto trs = scan_for_triggers(s, cfg, 0, 3 * 86400);
    CHECK(trs.size() <= prev);
    prev = trs.size();
    for (std::size_t i = 1; i < trs.size(); ++i) CHECK(trs[i].at - trs[i - 1].at >= cfg.cooldown_s);
  }
}

TEST_CASE("targeted trigger over every solver reduces to the baseline") {
  const auto a = fx::solver("0x1"), b = fx::solver("0x2");
  std::vector<LiquidityEvent> evs{{a, 6000, Money::parse("-900"), EventKind::FulfillmentOutflow},
                                  {a, 6300, Money::parse("900"), EventKind::RefundInflow}};
  auto m = build_series(evs, {{a, Money::parse("1000")}, {b, Money::parse("500")}}, 0);
  TriggerConfig cfg;
  IntentClass all{Bridge{"debridge"}, std::nullopt, std::nullopt, std::nullopt, {a, b}};
  auto base = detect_triggers(m, cfg, 0, 20000);
  auto targeted = targeted_triggers(m, all, cfg, 0, 20000);
  REQUIRE(base.size() == targeted.size());
  REQUIRE(!base.empty());
  for (std::size_t i = 0; i < base.size(); ++i) {
    CHECK(base[i].at == targeted[i].at);
    CHECK(targeted[i].alpha == Rate::from_integer(1));
  }
  IntentClass only_a{Bridge{"debridge"}, std::nullopt, std::nullopt, std::nullopt, {a}};
  auto ta = targeted_triggers(m, only_a, cfg, 0, 20000);
  REQUIRE(!ta.empty());
  CHECK(ta[0].alpha < Rate::from_integer(1));
  CHECK(ta[0].drain_target() == ta[0].liquidity_at_trigger);
}

TEST_CASE("fixed placements and uniform spacing") {
  const auto a = fx::solver("0x1");
  auto m = build_series({}, {{a, Money::parse("10")}}, 0);
  auto times = uniform_times(0, 1000, 250);
  CHECK(times == std::vector<Timestamp>{0, 250, 500, 750, 1000});
  auto sched = fixed_schedule(m, times);
  REQUIRE(sched.size() == 5);
  CHECK(sched[2].total_liquidity == Money::parse("10"));
  CHECK(sched[2].alpha == Rate::from_integer(1));
}
