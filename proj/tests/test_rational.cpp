#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fan/rational.hpp"
#include "fan/rng.hpp"

using fan::Rat;

TEST_CASE("arithmetic stays normalized") {
    Rat a(1, 3), b(1, 6);
    CHECK(a + b == Rat(1, 2));
    CHECK(a - b == Rat(1, 6));
    CHECK(a * b == Rat(1, 18));
    CHECK(a / b == Rat(2));
    CHECK((-a).num == -1);
    CHECK(Rat(4, 8) == Rat(1, 2));
    CHECK(Rat(3, -6) == Rat(-1, 2));
}

TEST_CASE("comparisons are exact") {
    CHECK(Rat(1, 3) < Rat(34, 100));
    CHECK(Rat(1, 3) > Rat(33, 100));
    CHECK(Rat(2, 6) == Rat(1, 3));
    CHECK(Rat(-1, 2) < Rat(0));
}

TEST_CASE("floor and ceil") {
    CHECK(Rat(7, 2).floor() == 3);
    CHECK(Rat(7, 2).ceil() == 4);
    CHECK(Rat(-7, 2).floor() == -4);
    CHECK(Rat(-7, 2).ceil() == -3);
    CHECK(Rat(6, 2).floor() == 3);
    CHECK(Rat(6, 2).ceil() == 3);
}

TEST_CASE("from_double recovers short decimals exactly") {
    CHECK(Rat::from_double(0.05) == Rat(1, 20));
    CHECK(Rat::from_double(0.2) == Rat(1, 5));
    CHECK(Rat::from_double(0.056) == Rat(7, 125));
    CHECK(Rat::from_double(0.0) == Rat(0));
    CHECK(Rat::from_double(1.0) == Rat(1));
    CHECK(Rat::from_double(-0.5) == Rat(-1, 2));
    CHECK(Rat::from_double(0.3333) == Rat(3333, 10000));
}

TEST_CASE("from_double round-trip on random small fractions") {
    fan::Rng rng(99);
    for (int i = 0; i < 500; ++i) {
        long long den = 1 + static_cast<long long>(rng.uniform_int(9999));
        long long num = static_cast<long long>(rng.uniform_int(static_cast<uint64_t>(den) + 1));
        Rat r(num, den);
        CHECK(Rat::from_double(r.to_double()) == r);
    }
}

TEST_CASE("clamp01") {
    CHECK(fan::clamp01(Rat(3, 2)) == Rat(1));
    CHECK(fan::clamp01(Rat(-1, 2)) == Rat(0));
    CHECK(fan::clamp01(Rat(1, 2)) == Rat(1, 2));
}

TEST_CASE("string form") {
    CHECK(Rat(1, 3).str() == "1/3");
    CHECK(Rat(4).str() == "4");
    CHECK(Rat(-2, 4).str() == "-1/2");
}
