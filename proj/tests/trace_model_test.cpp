#include "doctest.h"
#include "fixtures.hpp"

using namespace lexsim;

TEST_CASE("fulfilled before creation is a timestamp order rejection") {
  auto r = fx::intent("a", 100, "10");
  r.fulfilled_at = 99;
  auto rej = check_record(r);
  REQUIRE(rej);
  CHECK(rej->code == ErrorCode::TimestampOrder);
  CHECK(rej->field == "fulfilled_at");
  CHECK_THROWS_AS(validate_record(r), RecordRejected);
}

TEST_CASE("degenerate zero intent is accepted") {
  auto r = fx::intent("z", 100, "0", "0", "0", "0");
  CHECK_FALSE(check_record(r));
}

TEST_CASE("loss-making fill is accepted and keeps its sign") {
  auto r = fx::intent("neg", 100, "1000", "-0.002");
  CHECK_FALSE(check_record(r));
  CHECK(r.solver_profit() == fx::usd("-2"));
}

TEST_CASE("negative value and unknown chain are rejected") {
  auto r = fx::intent("n", 100, "-1");
  CHECK(check_record(r)->code == ErrorCode::NegativeValue);
  CHECK_FALSE(ChainId::parse("narnia"));
  CHECK_THROWS_AS(ChainId::of("narnia"), Error);
  const std::vector<std::string> ext{"narnia"};
  CHECK(ChainId::parse("Narnia", ext));
}

TEST_CASE("duplicate ids are reported at set level") {
  std::vector<IntentRecord> rs{fx::intent("a", 1, "1"), fx::intent("b", 2, "1"), fx::intent("a", 3, "1")};
  auto dups = check_unique_ids(rs);
  REQUIRE(dups.size() == 1);
  CHECK(dups[0].code == ErrorCode::DuplicateId);
}

TEST_CASE("solver addresses collapse across casing") {
  const auto eth = ChainId::of("ethereum");
  auto a = normalize_solver("0xDfd122610A14Ac12D934898c02dBEc1f72708116", eth);
  auto b = normalize_solver("0xdfd122610a14ac12d934898c02dbec1f72708116", eth);
  CHECK(a == b);
  CHECK(normalize_solver("0xabc", ChainId::of("base")) != normalize_solver("0xabc", eth));
  try {
    normalize_solver("", eth);
    FAIL("expected EmptyAddress");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyAddress);
  }
}

TEST_CASE("profit and fee formulas") {
  auto r = fx::intent("p", 0, "1000", "0.01129", "0.013");
  r.protocol_fixed_fee = fx::usd("0.25");
  r.auction_cost = fx::usd("0.1");
  CHECK(r.solver_profit() == fx::usd("11.29"));
  CHECK(r.solver_profit(Rate::parse("0.00018")) == fx::usd("0.18"));
  CHECK(r.protocol_fee() == fx::usd("13.25"));
  CHECK(r.fill_cost() == fx::usd("0.6"));
}

TEST_CASE("event sign must match its kind") {
  LiquidityEvent e{fx::solver("0x1"), 10, fx::usd("5"), EventKind::FulfillmentOutflow};
  CHECK(check_event(e));
  e.delta = fx::usd("-5");
  CHECK_FALSE(check_event(e));
  CHECK(parse_event_kind("Refund_Inflow") == EventKind::RefundInflow);
}
