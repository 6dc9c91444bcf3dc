#include <catch_amalgamated.hpp>

#include <random>

#include "qn/exact.hpp"

using namespace qn;

TEST_CASE("rational canonical form") {
    REQUIRE(Rational(Int(2), Int(4)).str() == "1/2");
    REQUIRE(Rational(Int(-2), Int(-4)).str() == "1/2");
    REQUIRE(Rational(Int(2), Int(-4)).str() == "-1/2");
    REQUIRE(Rational(Int(0), Int(7)).str() == "0");
    REQUIRE(Rational::parse("10/36") == Rational(Int(5), Int(18)));
    REQUIRE(Rational::parse("-3").str() == "-3");
    REQUIRE_THROWS_AS(Rational(Int(1), Int(0)), QnError);
    REQUIRE_THROWS_AS(Rational::parse("1/0"), QnError);
    REQUIRE_THROWS_AS(Rational::parse("abc"), QnError);
}

TEST_CASE("canonicalization idempotence on random triples") {
    std::mt19937_64 rng(12345);
    for (int t = 0; t < 1000; ++t) {
        long p = static_cast<long>(rng() % 2001) - 1000;
        long q = static_cast<long>(rng() % 999) + 1;
        long k = static_cast<long>(rng() % 50) + 1;
        REQUIRE(Rational(Int(k * p), Int(k * q)) == Rational(Int(p), Int(q)));
    }
}

TEST_CASE("floor ceil frac") {
    REQUIRE(Rational::parse("-5/36").floor() == Int(-1));
    REQUIRE(Rational::parse("-5/36").ceil() == Int(0));
    REQUIRE(Rational::parse("5/18").floor() == Int(0));
    REQUIRE(Rational::parse("-5/36").frac() == Rational::parse("31/36"));
    REQUIRE(Rational(Int(3)).frac() == Rational(0));
}

TEST_CASE("slope_factor examples") {
    REQUIRE(slope_factor(Rational(1), 3) == SlopeExponents{0, 0, 3});
    REQUIRE(slope_factor(Rational(6), 2) == SlopeExponents{1, 1, 2});
    REQUIRE(slope_factor(Rational::parse("4/3"), 2) == SlopeExponents{2, -1, 2});
    REQUIRE_THROWS_AS(slope_factor(Rational(5), 2), QnError);
    try {
        slope_factor(Rational(5), 2);
    } catch (const QnError& e) {
        REQUIRE(e.code() == Err::NotAProductOfBases);
    }
}

TEST_CASE("slope_factor round trip exhaustive") {
    for (int n : {2, 3, 4}) {
        for (long i = -20; i <= 20; ++i) {
            for (long j = -20; j <= 20; ++j) {
                Rational q = rat_pow(Int(n), i) * rat_pow(Int(n + 1), j);
                SlopeExponents se = slope_factor(q, n);
                REQUIRE(se.i == i);
                REQUIRE(se.j == j);
            }
        }
    }
}

TEST_CASE("in_ring examples") {
    REQUIRE(in_ring(Rational::parse("3/4"), 2));
    REQUIRE(in_ring(Rational::parse("10/36"), 6));
    REQUIRE_FALSE(in_ring(Rational::parse("1/5"), 6));
}

TEST_CASE("in_ring closed under ring operations") {
    std::mt19937_64 rng(777);
    for (int t = 0; t < 500; ++t) {
        int m = 2 + static_cast<int>(rng() % 5);
        long kx = static_cast<long>(rng() % 5);
        long ky = static_cast<long>(rng() % 5);
        Rational x(Int(static_cast<long>(rng() % 200) - 100), ipow(m, kx));
        Rational y(Int(static_cast<long>(rng() % 200) - 100), ipow(m, ky));
        REQUIRE(in_ring(x, m));
        REQUIRE(in_ring(y, m));
        REQUIRE(in_ring(x + y, m));
        REQUIRE(in_ring(x * y, m));
    }
}

TEST_CASE("adic depth and residue class") {
    REQUIRE(adic_depth(Rational::parse("3/4"), 2) == 2);
    REQUIRE(adic_depth(Rational(5), 2) == 0);
    REQUIRE(adic_depth(Rational::parse("1/8"), 6) == 3);
    REQUIRE(numerator_at_depth(Rational::parse("3/4"), 2, 2) == Int(3));
    // residue_class(p/n^k) = p mod (n-1), independent of the representative.
    REQUIRE(residue_class(Rational::parse("5/9"), 3) == 1);
    REQUIRE(residue_class(Rational::parse("2/3"), 3) == 0);
    REQUIRE(residue_class(Rational::parse("10/36"), 6) == 0);
    REQUIRE(residue_class(Rational::parse("15/27"), 3) == residue_class(Rational::parse("5/9"), 3));
    REQUIRE_THROWS_AS(residue_class(Rational::parse("1/5"), 6), QnError);
}

TEST_CASE("decimal rendering stays exact") {
    REQUIRE(decimal_string(Rational::parse("5/18"), 6) == "0.277777");
    REQUIRE(decimal_string(Rational::parse("-3/2"), 4) == "-1.5");
    REQUIRE(decimal_string(Rational(7)) == "7");
}
