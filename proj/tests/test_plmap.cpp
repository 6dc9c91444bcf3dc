#include <catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "qn/plmap.hpp"

using namespace qn;

namespace {

Rational Q(const char* s) { return Rational::parse(s); }

// The three-piece map (1/2 on [0,1/2], 1 on [1/2,3/4], 2 on [3/4,1]); the
// smallest nontrivial element of F_2 used throughout the tests.
CompactPL halving_map() {
    return CompactPL({{Q("0"), Q("0")},
                      {Q("1/2"), Q("1/4")},
                      {Q("3/4"), Q("1/2")},
                      {Q("1"), Q("1")}});
}

// xi for n=2 built with k=2: slopes (6, 2, 1/6) per period, 0 -> 5/18.
PeriodicPL xi22() {
    return PeriodicPL({{Q("0"), Q("5/18")},
                       {Q("1/3"), Q("1/3")},
                       {Q("5/6"), Q("5/6")},
                       {Q("31/36"), Q("1")},
                       {Q("1"), Q("23/18")}});
}

}  // namespace

TEST_CASE("compact evaluate and slopes") {
    CompactPL f = halving_map();
    REQUIRE(f.evaluate(Q("1/3")) == Q("1/6"));
    REQUIRE(f.evaluate(Q("7/13")) == Q("1/4") + (Q("7/13") - Q("1/2")));
    REQUIRE(CompactPL::identity().evaluate(Q("7/13")) == Q("7/13"));
    REQUIRE(f.one_sided_slope(Q("1/2"), Side::Left) == Q("1/2"));
    REQUIRE(f.one_sided_slope(Q("1/2"), Side::Right) == Q("1"));
    REQUIRE_THROWS_AS(f.one_sided_slope(Q("0"), Side::Left), QnError);
    REQUIRE_THROWS_AS(f.one_sided_slope(Q("1"), Side::Right), QnError);
    REQUIRE_THROWS_AS(f.evaluate(Q("-1/2")), QnError);
}

TEST_CASE("periodic evaluate uses the extension rule") {
    PeriodicPL xi = xi22();
    REQUIRE(xi.evaluate(Q("0")) == Q("5/18"));
    REQUIRE(xi.evaluate(Q("1")) == Q("5/18") + Q("1"));
    REQUIRE(xi.evaluate(Q("-5/36")) == Q("0"));
    REQUIRE(xi.one_sided_slope(Q("0"), Side::Left) == Q("2"));
    REQUIRE(xi.one_sided_slope(Q("0"), Side::Right) == Q("1/6"));
    REQUIRE(xi.one_sided_slope(Q("-1/6"), Side::Right) == Q("6"));
}

TEST_CASE("compose and invert") {
    PeriodicPL xi = xi22();
    REQUIRE(xi.compose(xi.inverse()) == PeriodicPL::identity());
    REQUIRE(xi.inverse().compose(xi) == PeriodicPL::identity());
    REQUIRE(xi.compose(xi).evaluate(Q("0")) == xi.evaluate(Q("5/18")));
    REQUIRE(xi.inverse().evaluate(Q("5/18")) == Q("0"));
    REQUIRE(xi != xi.inverse());

    CompactPL f = halving_map();
    REQUIRE(f.compose(f.inverse()) == CompactPL::identity());
    REQUIRE(f.inverse().compose(f) == CompactPL::identity());
}

TEST_CASE("chain rule at smooth points") {
    PeriodicPL xi = xi22();
    PeriodicPL sq = xi.compose(xi);
    std::mt19937_64 rng(42);
    for (int t = 0; t < 100; ++t) {
        Rational x(Int(static_cast<long>(rng() % 720)), Int(720));
        Rational fx = xi.evaluate(x);
        Rational s1 = xi.one_sided_slope(x, Side::Right);
        Rational s2 = xi.one_sided_slope(fx, Side::Right);
        REQUIRE(sq.one_sided_slope(x, Side::Right) == s1 * s2);
    }
}

TEST_CASE("canonicalization merges collinear nodes") {
    CompactPL with_redundant({{Q("0"), Q("0")},
                              {Q("1/2"), Q("1/4")},
                              {Q("5/8"), Q("3/8")},
                              {Q("3/4"), Q("1/2")},
                              {Q("1"), Q("1")}});
    REQUIRE(with_redundant == halving_map());
    REQUIRE(with_redundant.nodes().size() == 4);

    PeriodicPL shift({{Q("0"), Q("5")}, {Q("1/3"), Q("16/3")}, {Q("1"), Q("6")}});
    REQUIRE(shift.nodes().size() == 2);
}

TEST_CASE("degenerate values are legal") {
    PeriodicPL shift({{Q("0"), Q("1")}, {Q("1"), Q("2")}});  // unit translation
    REQUIRE(shift.evaluate(Q("1/2")) == Q("3/2"));
    REQUIRE(shift.nodes().size() == 2);
    REQUIRE(CompactPL::identity().is_identity());
}

TEST_CASE("support sets") {
    REQUIRE(support(PeriodicPL::identity()).empty());
    REQUIRE(support(CompactPL::identity()).empty());

    SupportSet s = support(xi22());
    REQUIRE(s.periodic);
    REQUIRE(s.intervals.size() == 1);
    // (-1/6, 1/3) + Z, anchored with left endpoint in [0,1).
    REQUIRE(s.intervals[0].first == Q("5/6"));
    REQUIRE(s.intervals[0].second == Q("4/3"));
    REQUIRE(s.total_length() == Q("1/2"));

    // One-bump map fixing [0,1/2] pointwise.
    CompactPL bump({{Q("0"), Q("0")},
                    {Q("1/2"), Q("1/2")},
                    {Q("5/8"), Q("3/4")},
                    {Q("1"), Q("1")}});
    SupportSet sb = support(bump);
    REQUIRE(sb.intervals.size() == 1);
    REQUIRE(sb.intervals[0].first >= Q("1/2"));
    REQUIRE(sb.intervals[0].second <= Q("1"));

    PeriodicPL shift({{Q("0"), Q("1")}, {Q("1"), Q("2")}});
    REQUIRE(support(shift).whole_line);
}

TEST_CASE("agree_on") {
    PeriodicPL xi = xi22();
    PeriodicPL id = PeriodicPL::identity();
    REQUIRE(agree_on(xi, xi, Q("0"), Q("1")));
    REQUIRE(agree_on(id, xi, Q("2/5"), Q("1/2")));
    REQUIRE_FALSE(agree_on(id, xi, Q("0"), Q("1/4")));
    CompactPL f = halving_map();
    REQUIRE(agree_on(f, CompactPL::identity(), Q("0"), Q("0")));
    REQUIRE_FALSE(agree_on(f, CompactPL::identity(), Q("0"), Q("1/2")));
}

TEST_CASE("periodic displacement of a short interval stays short") {
    PeriodicPL xi = xi22();
    std::mt19937_64 rng(99);
    for (int t = 0; t < 200; ++t) {
        Rational a(Int(static_cast<long>(rng() % 1000)) - 500, Int(360));
        Rational len(Int(static_cast<long>(rng() % 359) + 1), Int(360));
        Rational b = a + len;
        Rational img = xi.evaluate(b) - xi.evaluate(a);
        REQUIRE(img < Rational(1));
        REQUIRE(img > Rational(0));
    }
}

TEST_CASE("serialization round trip is bit exact") {
    PeriodicPL xi = xi22();
    std::string text = encode(xi, 2);
    std::istringstream in(text);
    ParsedPLMap parsed = parse_plmap(in);
    REQUIRE(parsed.periodic);
    REQUIRE(parsed.n == 2);
    REQUIRE(*parsed.per == xi);
    REQUIRE(encode(*parsed.per, parsed.n) == text);

    CompactPL f = halving_map();
    std::istringstream in2(encode(f, 2));
    ParsedPLMap p2 = parse_plmap(in2);
    REQUIRE_FALSE(p2.periodic);
    REQUIRE(*p2.compact == f);

    // Redundant collinear node is re-canonicalized away.
    std::istringstream in3("plmap kind=compact n=2\n0 0\n1/2 1/4\n5/8 3/8\n3/4 1/2\n1 1\n");
    REQUIRE(*parse_plmap(in3).compact == f);

    std::istringstream bad("plmap kind=compact n=2\n0 0\n1/2 1/4\n");
    REQUIRE_THROWS_AS(parse_plmap(bad), QnError);
}

TEST_CASE("two blocks back to back parse sequentially") {
    std::string two = encode(halving_map(), 2) + encode(CompactPL::identity(), 2);
    std::istringstream in(two);
    ParsedPLMap a = parse_plmap(in);
    ParsedPLMap b = parse_plmap(in);
    REQUIRE(*a.compact == halving_map());
    REQUIRE(b.compact->is_identity());
}
