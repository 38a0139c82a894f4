#include <numeric>

#include "doctest.h"
#include "fixtures.hpp"

using namespace lexsim;

namespace {

AttackTrigger mayan_class_trigger(Timestamp t) {
  AttackTrigger tr;
  tr.at = t;
  tr.scope = TriggerScope::Class;
  tr.total_liquidity = Money::parse("760000");
  tr.liquidity_at_trigger = Money::parse("57000");
  tr.alpha = Rate::parse("0.075");
  return tr;
}

AttackConfig flat_config() {
  AttackConfig c;
  c.route = fx::debridge_route();
  c.override_protocol_fee_pct = Rate::parse("0.00029");
  c.flood_gas.constant = Money::parse("0.20");
  return c;
}

}  // namespace

TEST_CASE("induction cost at deBridge scale") {
  auto c = induction_cost(Rate::from_integer(1), Money::parse("514000"), Rate::parse("0.013"), Money::parse("10000"),
                          Money::parse("1"));
  CHECK(c.fee_component == Money::parse("6682"));
  CHECK(c.n_flood_intents == 52);
  CHECK(c.gas_component == Money::parse("52"));
  CHECK(c.total == Money::parse("6734"));
}

TEST_CASE("targeted induction cost at Mayan scale") {
  auto c = induction_cost(Rate::parse("0.075"), Money::parse("760000"), Rate::parse("0.00029"), Money::parse("10000"),
                          Money::parse("0.20"));
  CHECK(c.fee_component == Money::parse("16.53"));
  CHECK(c.n_flood_intents == 6);
  CHECK(c.gas_component == Money::parse("1.2"));
  CHECK(c.total == Money::parse("17.73"));
  CHECK(c.working_capital == Money::parse("57000"));
}

TEST_CASE("zero alpha costs nothing and bad alpha is rejected") {
  auto c = induction_cost(Rate{}, Money::parse("514000"), Rate::parse("0.013"), Money::parse("10000"), Money::parse("1"));
  CHECK(c.total.is_zero());
  CHECK(c.n_flood_intents == 0);
  CHECK_THROWS_AS(induction_cost(Rate::parse("1.5"), Money::parse("1"), Rate{}, Money::parse("1"), Money{}), Error);
}

TEST_CASE("one captured intent nets a small loss") {
  std::vector<IntentRecord> rs{fx::intent("a", 1000, "1000", "0.01129", "0.013", "0.50")};
  RouteTrace trace(rs, fx::debridge_route());
  auto res = rational_attack(mayan_class_trigger(1000), trace, flat_config(), 1);
  CHECK(res.induction_cost == Money::parse("17.73"));
  CHECK(res.revenue == Money::parse("11.29"));
  CHECK(res.fill_cost == Money::parse("0.5"));
  CHECK(res.net_profit == Money::parse("-6.94"));
  CHECK(res.n_fulfillments == 1);
  CHECK(res.captured_intent_ids == std::vector<std::string>{"a"});
}

TEST_CASE("empty window is pure cost") {
  std::vector<IntentRecord> rs{fx::intent("a", 50000, "1000")};
  RouteTrace trace(rs, fx::debridge_route());
  auto cfg = flat_config();
  cfg.epsilon = {EpsilonModel::Fixed, Money::parse("3"), 0};
  auto res = rational_attack(mayan_class_trigger(1000), trace, cfg, 1);
  CHECK(res.revenue.is_zero());
  CHECK(res.fill_cost.is_zero());
  CHECK(res.net_profit == -(res.induction_cost + Money::parse("3")));
}

TEST_CASE("route with no intents is an error") {
  std::vector<IntentRecord> rs{fx::intent("a", 1000, "1000")};
  auto route = fx::debridge_route();
  route.bridge = Bridge{"across"};
  RouteTrace trace(rs, route);
  try {
    rational_attack(mayan_class_trigger(1000), trace, flat_config(), 1);
    FAIL("expected EmptyRoute");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyRoute);
  }
}

TEST_CASE("capture multiplier semantics") {
  std::vector<IntentRecord> three{fx::intent("a", 0, "1"), fx::intent("b", 1, "2"), fx::intent("c", 2, "3")};
  auto same = capture_intents(three, 0, 10, Rate::from_integer(1), 9);
  CHECK(same == three);
  auto doubled = capture_intents(three, 0, 10, Rate::from_integer(2), 9);
  REQUIRE(doubled.size() == 6);
  for (const auto& r : three) CHECK(std::count(doubled.begin(), doubled.end(), r) == 2);

  std::vector<IntentRecord> many;
  for (int i = 0; i < 10000; ++i) many.push_back(fx::intent("i" + std::to_string(i), i, "10"));
  auto half = capture_intents(many, 0, 10000, Rate::parse("0.5"), 42);
  CHECK(half.size() >= 4800);
  CHECK(half.size() <= 5200);
  CHECK(capture_intents(many, 0, 10000, Rate::parse("0.5"), 42) == half);
}

TEST_CASE("byzantine impact of a three-intent window") {
  std::vector<IntentRecord> rs{fx::intent("a", 100, "100"), fx::intent("b", 200, "300"), fx::intent("c", 300, "500"),
                               fx::intent("late", 5000, "999")};
  RouteTrace trace(rs, fx::debridge_route());
  AttackConfig cfg;
  cfg.route = fx::debridge_route();
  cfg.flood_gas.constant = Money::parse("1");
  auto imp = byzantine_attack(fx::trigger_at(100, "514000"), trace, cfg);
  CHECK(imp.failed_intents == 3);
  CHECK(imp.missed_solver_profit == Money::parse("9"));
  CHECK(imp.failed_value_median == Money::parse("300"));
  CHECK(imp.failed_value == Money::parse("900"));
  CHECK(imp.missed_protocol_fees == Money::parse("0.9"));

  auto empty = byzantine_attack(fx::trigger_at(10000, "514000"), trace, cfg);
  CHECK(empty.failed_intents == 0);
  CHECK(empty.missed_solver_profit.is_zero());
  CHECK(empty.total_cost == imp.total_cost);
  CHECK(empty.total_cost > Money{});
}

TEST_CASE("override equal to the historical margin is neutral") {
  std::vector<IntentRecord> rs;
  for (int i = 0; i < 20; ++i) rs.push_back(fx::intent("i" + std::to_string(i), 1000 + 30 * i, "123.45", "0.01129"));
  RouteTrace trace(rs, fx::debridge_route());
  auto cfg = flat_config();
  auto base = rational_attack(fx::trigger_at(1000, "514000"), trace, cfg, 3);
  cfg.override_solver_profit_pct = Rate::parse("0.01129");
  auto over = rational_attack(fx::trigger_at(1000, "514000"), trace, cfg, 3);
  CHECK(base.revenue == over.revenue);
}

TEST_CASE("integer multiplier scales revenue and leaves induction alone") {
  std::vector<IntentRecord> rs;
  for (int i = 0; i < 20; ++i) rs.push_back(fx::intent("i" + std::to_string(i), 1000 + 30 * i, "77.7", "0.005"));
  RouteTrace trace(rs, fx::debridge_route());
  auto cfg = flat_config();
  auto one = rational_attack(fx::trigger_at(1000, "514000"), trace, cfg, 3);
  cfg.volume_multiplier = Rate::from_integer(3);
  auto three = rational_attack(fx::trigger_at(1000, "514000"), trace, cfg, 3);
  CHECK(three.revenue == one.revenue * 3);
  CHECK(three.fill_cost == one.fill_cost * 3);
  CHECK(three.volume_fulfilled == one.volume_fulfilled * 3);
  CHECK(three.induction_cost == one.induction_cost);
}

TEST_CASE("trailing medians fall back when the window is empty") {
  std::vector<IntentRecord> rs{fx::intent("a", 0, "1", "0.01", "0.001", "0.3"), fx::intent("b", 10, "1", "0.01", "0.003", "0.9")};
  RouteTrace trace(rs, fx::debridge_route());
  CHECK(trace.trailing_gas_median(100000, 86400) == Money::parse("0.3"));
  CHECK(trace.trailing_gas_median(20, 86400) == Money::parse("0.3"));
  CHECK(trace.trailing_gas_median(0, 86400).is_zero());
}

TEST_CASE("config validation and canonical text") {
  AttackConfig c;
  c.route = fx::debridge_route();
  CHECK_NOTHROW(c.validate());
  auto d = c;
  d.attack_window = 0;
  CHECK_THROWS_AS(d.validate(), Error);
  d = c;
  d.override_solver_profit_pct = Rate::parse("0.00018");
  CHECK(c.canonical() != d.canonical());
  CHECK(instance_seed(1, 100, c) != instance_seed(1, 100, d));
  CHECK(instance_seed(1, 100, c) == instance_seed(1, 100, c));
}
