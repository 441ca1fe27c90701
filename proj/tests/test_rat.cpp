#include <doctest.h>

#include "restake/errors.hpp"
#include "restake/rat.hpp"

using namespace restake;

TEST_CASE("rationals parse from fractions, integers, and decimals") {
  CHECK(Rat::parse("3/4") == Rat(3, 4));
  CHECK(Rat::parse("-3/4") == Rat(-3, 4));
  CHECK(Rat::parse("7") == Rat(7));
  CHECK(Rat::parse("-7") == Rat(-7));
  CHECK(Rat::parse("0.25") == Rat(1, 4));
  CHECK(Rat::parse("-3.5") == Rat(-7, 2));
  CHECK(Rat::parse("0.1") == Rat(1, 10));  // exact, not the binary float
  CHECK(Rat::parse(".5") == Rat(1, 2));
  CHECK(Rat::parse("5.") == Rat(5));
  CHECK(Rat::parse(" 2/6 ") == Rat(1, 3));

  CHECK_THROWS_AS(Rat::parse("1/0"), InputError);
  CHECK_THROWS_AS(Rat::parse(""), InputError);
  CHECK_THROWS_AS(Rat::parse("abc"), InputError);
  CHECK_THROWS_AS(Rat::parse("1.5e3"), InputError);
  CHECK_THROWS_AS(Rat::parse("1/-2"), InputError);
  CHECK_THROWS_AS(Rat::parse("."), InputError);
}

TEST_CASE("canonical form: lowest terms, positive denominator") {
  CHECK(Rat(2, 4).str() == "1/2");
  CHECK(Rat(1, -2).str() == "-1/2");
  CHECK(Rat(-6, -3).str() == "2");
  CHECK(Rat(0, 17).str() == "0");
  CHECK(Rat(2, 4).denominator() == 2);
  CHECK_THROWS_AS(Rat(1, 0), InputError);
}

TEST_CASE("arithmetic is exact") {
  CHECK(Rat(1, 3) + Rat(1, 6) == Rat(1, 2));
  CHECK(Rat(1, 10) * Rat(10) == Rat(1));
  CHECK(Rat(1) - Rat(1, 3) == Rat(2, 3));
  CHECK(Rat(2, 3) / Rat(4) == Rat(1, 6));
  CHECK(-Rat(1, 2) == Rat(-1, 2));
  CHECK_THROWS_AS(Rat(1) / Rat(0), InputError);

  // the classic float trap
  Rat sum;
  for (int i = 0; i < 10; ++i) sum += Rat(1, 10);
  CHECK(sum == Rat(1));
}

TEST_CASE("comparisons are strict and exact") {
  CHECK(Rat(1, 3) < Rat(334, 1000));
  CHECK(Rat(1, 3) > Rat(333, 1000));
  CHECK_FALSE(Rat(1, 7) < Rat(1, 7));
  CHECK(Rat(1, 7) <= Rat(1, 7));
  CHECK(Rat(-1, 2).is_negative());
  CHECK(Rat(0).is_zero());
  CHECK(Rat(3).is_integer());
  CHECK_FALSE(Rat(1, 3).is_integer());
}

TEST_CASE("string round trip") {
  for (const char* text : {"0", "1", "-1", "1/3", "-22/7", "123456789/1024"}) {
    const Rat r = Rat::parse(text);
    CHECK(Rat::parse(r.str()) == r);
    CHECK(r.str() == text);
  }
}

TEST_CASE("floor division for grid math") {
  CHECK(Rat::floor_div(Rat(7, 2), Rat(1, 2)) == 7);
  CHECK(Rat::floor_div(Rat(5, 3), Rat(1, 3)) == 5);
  CHECK(Rat::floor_div(Rat(1, 3), Rat(1)) == 0);
  CHECK(Rat::floor_div(Rat(12), Rat(1, 3)) == 36);
  CHECK(Rat::floor_div(Rat(-1, 2), Rat(1, 3)) == -2);
  CHECK_THROWS_AS(Rat::floor_div(Rat(1), Rat(0)), InputError);
}
