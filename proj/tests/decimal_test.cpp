#include <random>
#include <vector>

#include "doctest.h"
#include "lexsim/decimal.hpp"
#include "lexsim/error.hpp"

using namespace lexsim;

TEST_CASE("money parses and prints with six places") {
  CHECK(Money::parse("12").str() == "12.000000");
  CHECK(Money::parse("-0.5").units() == -500000);
  CHECK(Money::parse("0.0000005").units() == 0);  // tie to even
  CHECK(Money::parse("0.0000015").units() == 2);
  CHECK_THROWS_AS(Money::parse("1.25e3"), Error);
  CHECK_THROWS_AS(Money::parse(""), Error);
}

TEST_CASE("scaling rounds half to even") {
  // 1.000001 * 0.5 = 0.5000005 -> 0.500000
  CHECK(scale(Money::parse("1.000001"), Rate::parse("0.5")).str() == "0.500000");
  // 1.000003 * 0.5 = 0.5000015 -> 0.500002
  CHECK(scale(Money::parse("1.000003"), Rate::parse("0.5")).str() == "0.500002");
  CHECK(scale(Money::parse("-1.000003"), Rate::parse("0.5")).str() == "-0.500002");
  CHECK(div_round_half_even(5, 2) == 2);
  CHECK(div_round_half_even(7, 2) == 4);
  CHECK(div_round_half_even(-5, 2) == -2);
}

TEST_CASE("percent text converts to a fraction") {
  CHECK(rate_from_percent("1.3") == Rate::parse("0.013"));
  CHECK(rate_from_percent("1.129") == Rate::parse("0.01129"));
  CHECK(rate_from_percent("0.018") == Rate::parse("0.00018"));
}

TEST_CASE("sums are independent of order") {
  std::mt19937_64 gen(7);
  std::uniform_int_distribution<std::int64_t> d(-1'000'000'000, 1'000'000'000);
  std::vector<Money> xs;
  for (int i = 0; i < 500; ++i) xs.push_back(Money::from_units(d(gen)));
  Money forward, backward;
  for (auto x : xs) forward += x;
  for (auto it = xs.rbegin(); it != xs.rend(); ++it) backward += *it;
  CHECK(forward == backward);
}

TEST_CASE("population std of exact sums") {
  // {0, 100}: std 50
  const __int128 a = Money::from_integer(0).units(), b = Money::from_integer(100).units();
  CHECK(money_pstddev(a + b, a * a + b * b, 2) == Money::from_integer(50));
  CHECK(money_mean(a + b, 2) == Money::from_integer(50));
}
