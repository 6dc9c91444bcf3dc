#pragma once

#include <algorithm>
#include <sstream>
#include <string>
#include <vector>

#include "qn/plmap.hpp"

namespace qn {

// --- n-cones and n-ary subdivisions ------------------------------------------

// An n-cone is an interval [k/n^m, (k+1)/n^m].
inline bool is_ncone(const Rational& lo, const Rational& hi, int n, long* depth_out = nullptr) {
    if (!(lo < hi)) return false;
    Rational len = hi - lo;
    if (len.num() != 1) return false;
    Int d = len.den();
    long k = 0;
    while (d > 1) {
        if (d % n != 0) return false;
        d /= n;
        ++k;
    }
    if (!(lo * rat_pow(Int(n), k)).is_integer()) return false;
    if (depth_out) *depth_out = k;
    return true;
}

inline bool is_nary_interval(const Rational& lo, const Rational& hi, int n) {
    return lo < hi && in_ring(lo, n) && in_ring(hi, n);
}

// Ordered n-ary subdivision of [0,1], stored by its interior cut points.
// Valid iff every consecutive interval is an n-cone and the subdivision is
// reachable from {[0,1]} by tau moves (checked by greedy collapse).
class Subdivision {
    struct Unchecked {};
    Subdivision(Unchecked, int n, std::vector<Rational> cuts) : n_(n), cuts_(std::move(cuts)) {}

public:
    Subdivision(int n, std::vector<Rational> cuts) : n_(n), cuts_(std::move(cuts)) { validate(); }

    // For internal construction steps that preserve validity (tau moves,
    // sibling collapses, uniform grids): skips the quadratic reachability check.
    static Subdivision unchecked(int n, std::vector<Rational> cuts) {
        return Subdivision(Unchecked{}, n, std::move(cuts));
    }

    static Subdivision trivial(int n) { return Subdivision(n, {}); }

    static Subdivision uniform(int n, long depth) {
        std::vector<Rational> cuts;
        Int den = ipow(n, static_cast<unsigned long>(depth));
        for (Int k = 1; k < den; ++k) cuts.push_back(Rational(k, den));
        return Subdivision(Unchecked{}, n, std::move(cuts));
    }

    int base_n() const { return n_; }
    const std::vector<Rational>& cuts() const { return cuts_; }
    size_t size() const { return cuts_.size() + 1; }  // interval count

    std::vector<Rational> boundaries() const {
        std::vector<Rational> b;
        b.reserve(cuts_.size() + 2);
        b.push_back(Rational(0));
        for (const auto& c : cuts_) b.push_back(c);
        b.push_back(Rational(1));
        return b;
    }

    // Replaces the k-th interval by its regular n-ary subdivision.
    Subdivision tau(size_t k) const {
        if (k >= size()) fail(Err::IndexOutOfRange, "tau index " + std::to_string(k));
        auto b = boundaries();
        std::vector<Rational> cuts;
        for (size_t i = 1; i + 1 < b.size(); ++i) cuts.push_back(b[i]);
        Rational lo = b[k], step = (b[k + 1] - b[k]) / Rational(n_);
        std::vector<Rational> inserted;
        for (int j = 1; j < n_; ++j) inserted.push_back(lo + step * Rational(j));
        cuts.insert(cuts.begin() + static_cast<long>(k), inserted.begin(), inserted.end());
        return Subdivision(Unchecked{}, n_, std::move(cuts));
    }

    bool operator==(const Subdivision& o) const { return n_ == o.n_ && cuts_ == o.cuts_; }
    bool operator!=(const Subdivision& o) const { return !(*this == o); }
    bool operator<(const Subdivision& o) const {
        if (cuts_.size() != o.cuts_.size()) return cuts_.size() < o.cuts_.size();
        for (size_t i = 0; i < cuts_.size(); ++i) {
            int c = cuts_[i].cmp(o.cuts_[i]);
            if (c != 0) return c < 0;
        }
        return false;
    }

    std::string str() const {
        std::ostringstream os;
        os << "subdiv n=" << n_ << ":";
        for (const auto& c : cuts_) os << " " << c.str();
        return os.str();
    }

    static Subdivision parse(const std::string& line) {
        std::istringstream is(line);
        std::string head;
        is >> head;
        if (head != "subdiv") fail(Err::ParseError, "expected 'subdiv'");
        std::string ntok;
        is >> ntok;
        if (ntok.rfind("n=", 0) != 0) fail(Err::ParseError, "subdiv missing n=");
        if (ntok.back() == ':') ntok.pop_back();
        int n = std::stoi(ntok.substr(2));
        std::vector<Rational> cuts;
        std::string tok;
        while (is >> tok) cuts.push_back(Rational::parse(tok));
        return Subdivision(n, std::move(cuts));
    }

private:
    void validate() const {
        if (n_ < 2) fail(Err::DomainError, "subdivision base must be >= 2");
        auto b = boundaries();
        for (size_t i = 0; i + 1 < b.size(); ++i) {
            if (!(b[i] < b[i + 1]))
                fail(Err::DomainError, "subdivision cuts not strictly increasing");
            if (!is_ncone(b[i], b[i + 1], n_))
                fail(Err::DomainError,
                     "[" + b[i].str() + "," + b[i + 1].str() + "] is not a " +
                         std::to_string(n_) + "-cone");
        }
        // Constructive tau-reachability: greedily collapse sibling blocks,
        // leftmost first, backing the cursor up after each collapse.
        size_t i = 0;
        while (b.size() > 2) {
            if (i + n_ + 1 > b.size()) fail(Err::DomainError, "subdivision is not tau-reachable");
            Rational len = b[i + 1] - b[i];
            bool block = true;
            for (int j = 1; j < n_ && block; ++j) block = (b[i + j + 1] - b[i + j]) == len;
            if (block && is_ncone(b[i], b[i + n_], n_)) {
                b.erase(b.begin() + static_cast<long>(i) + 1,
                        b.begin() + static_cast<long>(i) + n_);
                i = i > static_cast<size_t>(n_ - 1) ? i - static_cast<size_t>(n_ - 1) : 0;
            } else {
                ++i;
            }
        }
    }

    int n_;
    std::vector<Rational> cuts_;
};

// --- greedy cone machinery ----------------------------------------------------

// Boundaries of the greedy n-ary subdivision of an n-ary interval [lo,hi]:
// repeatedly take the largest n-cone starting at the left end.
inline std::vector<Rational> greedy_cones(const Rational& lo, const Rational& hi, int n) {
    if (!is_nary_interval(lo, hi, n))
        fail(Err::NotAnNaryInterval, "[" + lo.str() + "," + hi.str() + "]");
    std::vector<Rational> b{lo};
    Rational cur = lo;
    int guard = 0;
    while (cur < hi) {
        if (++guard > 1000000) fail(Err::Internal, "greedy_cones runaway");
        long d = adic_depth(cur, n);
        while (cur + rat_pow(Int(n), -d) > hi) ++d;
        cur += rat_pow(Int(n), -d);
        b.push_back(cur);
    }
    return b;
}

// Splits the rightmost cone until the list has target_count cones.
inline void pad_cones_right(std::vector<Rational>& b, int n, size_t target_count) {
    while (b.size() - 1 < target_count) {
        Rational lo = b[b.size() - 2], hi = b.back();
        Rational step = (hi - lo) / Rational(n);
        b.pop_back();
        for (int j = 1; j <= n; ++j) b.push_back(lo + step * Rational(j));
    }
    if (b.size() - 1 != target_count) fail(Err::Internal, "pad_cones_right overshoot");
}

// Graph of the PL map [lo1,hi1] -> [lo2,hi2] matching greedy n-ary
// subdivisions cone by cone (the smaller side is padded on the right).
// Exists iff the cone counts agree mod n-1, i.e. iff the endpoint residue
// classes satisfy cls(hi1)-cls(lo1) = cls(hi2)-cls(lo2).
inline std::vector<Point> cone_match(const Rational& lo1, const Rational& hi1,
                                     const Rational& lo2, const Rational& hi2, int n) {
    auto b1 = greedy_cones(lo1, hi1, n);
    auto b2 = greedy_cones(lo2, hi2, n);
    long diff = static_cast<long>(b1.size()) - static_cast<long>(b2.size());
    if (diff % (n - 1) != 0)
        fail(Err::Internal, "cone_match: counts differ by " + std::to_string(diff) +
                                " mod " + std::to_string(n - 1));
    if (b1.size() < b2.size())
        pad_cones_right(b1, n, b2.size() - 1);
    else
        pad_cones_right(b2, n, b1.size() - 1);
    std::vector<Point> nodes;
    nodes.reserve(b1.size());
    for (size_t i = 0; i < b1.size(); ++i) nodes.push_back({b1[i], b2[i]});
    return nodes;
}

// --- pair diagrams -------------------------------------------------------------

// Ordered pair of equal-size n-ary subdivisions in reduced form: the canonical
// combinatorial representation of an F_n element. Reduction greedily collapses
// simultaneous sibling blocks, leftmost first.
class PairDiagram {
public:
    PairDiagram(Subdivision dom, Subdivision ran) : dom_(std::move(dom)), ran_(std::move(ran)) {
        if (dom_.base_n() != ran_.base_n())
            fail(Err::DomainError, "pair diagram bases differ");
        if (dom_.size() != ran_.size())
            fail(Err::DomainError, "pair diagram sides have different sizes");
        reduce();
    }

    int base_n() const { return dom_.base_n(); }
    const Subdivision& domain() const { return dom_; }
    const Subdivision& range() const { return ran_; }

    bool operator==(const PairDiagram& o) const { return dom_ == o.dom_ && ran_ == o.ran_; }
    bool operator!=(const PairDiagram& o) const { return !(*this == o); }

    std::string str() const { return dom_.str() + "\n" + ran_.str() + "\n"; }

private:
    static bool block_collapsible(const std::vector<Rational>& b, size_t i, int n) {
        if (i + n + 1 > b.size()) return false;
        Rational len = b[i + 1] - b[i];
        for (int j = 1; j < n; ++j)
            if (b[i + j + 1] - b[i + j] != len) return false;
        return is_ncone(b[i], b[i + n], n);
    }

    void reduce() {
        int n = dom_.base_n();
        auto bd = dom_.boundaries();
        auto br = ran_.boundaries();
        // Leftmost-first simultaneous collapse to a fixpoint; after a collapse
        // new blocks can only appear n-1 positions to the left.
        size_t i = 0;
        while (i + n + 1 <= bd.size()) {
            if (block_collapsible(bd, i, n) && block_collapsible(br, i, n)) {
                bd.erase(bd.begin() + static_cast<long>(i) + 1,
                         bd.begin() + static_cast<long>(i) + n);
                br.erase(br.begin() + static_cast<long>(i) + 1,
                         br.begin() + static_cast<long>(i) + n);
                i = i > static_cast<size_t>(n - 1) ? i - static_cast<size_t>(n - 1) : 0;
            } else {
                ++i;
            }
        }
        dom_ = Subdivision::unchecked(n, std::vector<Rational>(bd.begin() + 1, bd.end() - 1));
        ran_ = Subdivision::unchecked(n, std::vector<Rational>(br.begin() + 1, br.end() - 1));
    }

    Subdivision dom_, ran_;
};

// The homeomorphism sending the i-th domain cone linearly onto the i-th range cone.
inline CompactPL pair_to_map(const PairDiagram& p) {
    auto bd = p.domain().boundaries();
    auto br = p.range().boundaries();
    std::vector<Point> nodes;
    nodes.reserve(bd.size());
    for (size_t i = 0; i < bd.size(); ++i) nodes.push_back({bd[i], br[i]});
    return CompactPL(std::move(nodes));
}

// True iff all slopes are integer powers of n and all breakpoints lie in Z[1/n].
inline bool member_Fn(const CompactPL& f, int n) {
    const auto& pts = f.nodes();
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        if (i > 0 && !in_ring(pts[i].x, n)) return false;
        Rational s = detail::segment_slope(pts[i], pts[i + 1]);
        if (s.num() != 1 && s.den() != 1) return false;
        Int v = s.num() == 1 ? s.den() : s.num();
        while (v > 1) {
            if (v % n != 0) return false;
            v /= n;
        }
    }
    return true;
}

// Reduced pair diagram of an F_n element: each linear piece is refined into
// cones deep enough that their images are cones, then the pair is reduced.
inline PairDiagram map_to_pair(const CompactPL& f, int n) {
    if (!member_Fn(f, n)) fail(Err::NotInFn, "map is not in F_" + std::to_string(n));
    const auto& pts = f.nodes();
    std::vector<Rational> bd{Rational(0)}, br{Rational(0)};
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        Rational s = detail::segment_slope(pts[i], pts[i + 1]);
        long sexp = 0;
        for (Int v = s.num() == 1 ? s.den() : s.num(); v > 1; v /= n) ++sexp;
        if (s.num() == 1 && s.den() != 1) sexp = -sexp;
        Rational offset = pts[i].y - s * pts[i].x;
        // Any domain cone of depth >= d_min has a cone as its image under
        // y = n^sexp x + offset; tile the piece greedily under that floor.
        long d_min = std::max(sexp + adic_depth(offset, n), 0L);
        Rational cur = pts[i].x;
        int guard = 0;
        while (cur < pts[i + 1].x) {
            if (++guard > 1000000) fail(Err::Internal, "map_to_pair runaway");
            long dd = std::max(adic_depth(cur, n), d_min);
            while (cur + rat_pow(Int(n), -dd) > pts[i + 1].x) ++dd;
            cur += rat_pow(Int(n), -dd);
            bd.push_back(cur);
            br.push_back(f.evaluate(cur));
        }
    }
    return PairDiagram(Subdivision(n, std::vector<Rational>(bd.begin() + 1, bd.end() - 1)),
                       Subdivision(n, std::vector<Rational>(br.begin() + 1, br.end() - 1)));
}

// Composition of pair diagrams through a common middle subdivision K.
inline PairDiagram multiply_pairs(const PairDiagram& p, const PairDiagram& q) {
    if (p.base_n() != q.base_n()) fail(Err::DomainError, "multiply_pairs: bases differ");
    int n = p.base_n();
    // K = common refinement of p.range and q.domain.
    std::vector<Rational> mid = p.range().cuts();
    for (const auto& c : q.domain().cuts()) mid.push_back(c);
    detail::sort_unique(mid);
    Subdivision K(n, mid);

    // Refine a pair so that the chosen side's cuts contain `target`.
    auto refine = [n](Subdivision primary, Subdivision secondary,
                      const std::vector<Rational>& target) {
        for (const auto& c : target) {
            while (true) {
                auto b = primary.boundaries();
                auto it = std::lower_bound(b.begin(), b.end(), c);
                if (it != b.end() && *it == c) break;
                size_t idx = static_cast<size_t>(it - b.begin()) - 1;
                primary = primary.tau(idx);
                secondary = secondary.tau(idx);
            }
        }
        return std::make_pair(primary, secondary);
    };

    auto [pr, pd] = refine(p.range(), p.domain(), K.cuts());
    auto [qd, qr] = refine(q.domain(), q.range(), K.cuts());
    // After refinement both middles equal K refined further; bring to equality.
    while (pr != qd) {
        if (pr.size() < qd.size()) {
            auto [a, b] = refine(pr, pd, qd.cuts());
            pr = a;
            pd = b;
        } else {
            auto [a, b] = refine(qd, qr, pr.cuts());
            qd = a;
            qr = b;
        }
    }
    return PairDiagram(pd, qr);
}

// --- orbits --------------------------------------------------------------------

// O_i for i in {1,...,n-1}: the class of m/n^k with m = i mod n-1.
struct OrbitClass {
    int index;
    bool operator==(const OrbitClass& o) const { return index == o.index; }
    std::string str() const { return "O_" + std::to_string(index); }
};

inline OrbitClass orbit_class(const Rational& x, int n) {
    if (!in_ring(x, n)) fail(Err::NotInRing, x.str() + " not in Z[1/" + std::to_string(n) + "]");
    if (!(x > Rational(0) && x < Rational(1))) fail(Err::OutOfRange, x.str() + " not in (0,1)");
    long r = residue_class(x, n);
    return OrbitClass{r == 0 ? n - 1 : static_cast<int>(r)};
}

// The element of F_n carrying x = m/n^k to i/n, built as in the orbit lemma:
// uniform depth-k domain; range obtained by iterating tau_0 on the regular
// subdivision, then padding the rightmost interval.
inline CompactPL orbit_map(const Rational& x, int n) {
    int i = orbit_class(x, n).index;
    long k = adic_depth(x, n);
    if (k == 0) fail(Err::Internal, "orbit_map: integer input");
    Int m = numerator_at_depth(x, n, k);
    Subdivision dom = Subdivision::uniform(n, k);
    Subdivision ran = Subdivision::uniform(n, 1);
    Int l1 = (m - i) / (n - 1);
    for (Int t = 0; t < l1; ++t) ran = ran.tau(0);
    auto b = ran.boundaries();
    Int target = ipow(n, static_cast<unsigned long>(k));
    if (Int(b.size()) - 1 > target) fail(Err::Internal, "orbit_map: range overshoot");
    pad_cones_right(b, n, static_cast<size_t>(static_cast<unsigned long>(target)));
    ran = Subdivision::unchecked(n, std::vector<Rational>(b.begin() + 1, b.end() - 1));
    CompactPL f = pair_to_map(PairDiagram(dom, ran));
    if (f.evaluate(x) != Rational(Int(i), Int(n))) fail(Err::Internal, "orbit_map: wrong image");
    return f;
}

// --- dense point selection -------------------------------------------------

// Some n-adic point strictly inside (lo, hi).
inline Rational nadic_point_in(const Rational& lo, const Rational& hi, int n) {
    if (!(lo < hi)) fail(Err::Internal, "nadic_point_in: empty interval");
    for (long d = 0;; ++d) {
        Rational step = rat_pow(Int(n), -d);
        Rational cand = step * Rational((lo / step).floor() + 1);
        if (cand < hi && cand > lo) return cand;
        if (d > 200000) fail(Err::Internal, "nadic_point_in runaway");
    }
}

// Some n-adic point of the given residue class strictly inside (lo, hi).
inline Rational class_point_in(const Rational& lo, const Rational& hi, int n, long cls) {
    if (!(lo < hi)) fail(Err::Internal, "class_point_in: empty interval");
    long m = n - 1;
    for (long d = 1;; ++d) {
        Rational step = rat_pow(Int(n), -d);
        for (Int k = (lo / step).floor() + 1; step * Rational(k) < hi; ++k) {
            if (m == 1 || (((k % m) + m) % m) == Int(((cls % m) + m) % m))
                return step * Rational(k);
        }
        if (d > 200000) fail(Err::Internal, "class_point_in runaway");
    }
}

// --- transports ----------------------------------------------------------------

// F_n element supported in (A,B) sending x to y; exists iff x and y have the
// same residue class. Built by cone-matching [A,x]->[A,y] and [x,B]->[y,B].
inline CompactPL transport_in(const Rational& x, const Rational& y, const Rational& A,
                              const Rational& B, int n) {
    if (x == y) return CompactPL::identity();
    if (!(A < x && x < B && A < y && y < B))
        fail(Err::Internal, "transport_in: points outside interval");
    if (residue_class(x, n) != residue_class(y, n))
        fail(Err::Internal, "transport_in: class mismatch");
    std::vector<Point> nodes;
    if (A > Rational(0)) nodes.push_back({Rational(0), Rational(0)});
    auto left = cone_match(A, x, A, y, n);
    auto right = cone_match(x, B, y, B, n);
    nodes.insert(nodes.end(), left.begin(), left.end());
    nodes.insert(nodes.end(), right.begin() + 1, right.end());
    if (B < Rational(1)) nodes.push_back({Rational(1), Rational(1)});
    return CompactPL(std::move(nodes));
}

// F_n element with x.f = y, no support constraint.
inline CompactPL point_transport(const Rational& x, const Rational& y, int n) {
    return transport_in(x, y, Rational(0), Rational(1), n);
}

// Plain F_n transport of an increasing tuple to an increasing tuple of
// matching residue classes (no derived-subgroup certificate).
inline CompactPL tuple_transport_plain(const std::vector<Rational>& xs,
                                       const std::vector<Rational>& ys, int n) {
    if (xs.size() != ys.size()) fail(Err::Internal, "tuple_transport_plain: size mismatch");
    CompactPL f = CompactPL::identity();
    for (size_t i = 0; i < xs.size(); ++i) {
        Rational cur = f.evaluate(xs[i]);
        Rational A = i == 0 ? Rational(0) : ys[i - 1];
        f = f.compose(transport_in(cur, ys[i], A, Rational(1), n));
    }
    for (size_t i = 0; i < xs.size(); ++i)
        if (f.evaluate(xs[i]) != ys[i]) fail(Err::Internal, "tuple_transport_plain missed");
    return f;
}

struct Commutator {
    CompactPL a, b;
    // [a,b] = a^-1 b^-1 a b
    CompactPL value() const {
        return a.inverse().compose(b.inverse()).compose(a).compose(b);
    }
};

// A map together with an explicit factorization into commutators of F_n
// elements: a certificate of membership in the derived subgroup.
struct CertifiedMap {
    CompactPL map;
    std::vector<Commutator> factors;

    CompactPL recompose() const {
        CompactPL f = CompactPL::identity();
        for (const auto& c : factors) f = f.compose(c.value());
        return f;
    }
};

// Single-commutator transport: [g,h] with h a transport of x to y supported in
// (A*,B*) and g squashing (A*,B*) below x, so x.[g,h] = x.h = y. The support
// of the result stays inside (A,B).
inline CertifiedMap certified_point_transport(const Rational& x, const Rational& y,
                                              const Rational& A, const Rational& B, int n) {
    if (x == y) return {CompactPL::identity(), {}};
    Rational lo = std::min(x, y), hi = std::max(x, y);
    Rational Astar = nadic_point_in(A, lo, n);
    Rational Bstar = nadic_point_in(hi, B, n);
    CompactPL h = transport_in(x, y, Astar, Bstar, n);
    Rational Bg = nadic_point_in(Bstar, B, n);
    Rational Bss = class_point_in(Astar, x, n, residue_class(Bstar, n));
    CompactPL g = transport_in(Bstar, Bss, Astar, Bg, n);
    Commutator c{g, h};
    CompactPL val = c.value();
    if (val.evaluate(x) != y) fail(Err::Internal, "certified transport missed target");
    return {val, {c}};
}

// Order-preserving transport of a tuple s to a tuple t by an element of F_n'
// with explicit commutator certificate. Requires matching residue classes.
inline CertifiedMap tuple_transport(const std::vector<Rational>& s,
                                    const std::vector<Rational>& t, int n) {
    if (s.size() != t.size()) fail(Err::SignatureMismatch, "tuple lengths differ");
    for (size_t i = 0; i < s.size(); ++i) {
        orbit_class(s[i], n);  // validates ring membership and range
        orbit_class(t[i], n);
        if (i > 0 && (!(s[i - 1] < s[i]) || !(t[i - 1] < t[i])))
            fail(Err::DomainError, "tuples must be strictly increasing");
        if (orbit_class(s[i], n).index != orbit_class(t[i], n).index)
            fail(Err::SignatureMismatch,
                 "classes differ at position " + std::to_string(i) + ": " + s[i].str() +
                     " vs " + t[i].str());
    }
    CertifiedMap out{CompactPL::identity(), {}};
    for (size_t i = 0; i < s.size(); ++i) {
        Rational x = out.map.evaluate(s[i]);
        Rational A = i == 0 ? Rational(0) : t[i - 1];
        CertifiedMap step = certified_point_transport(x, t[i], A, Rational(1), n);
        out.map = out.map.compose(step.map);
        for (auto& c : step.factors) out.factors.push_back(std::move(c));
    }
    for (size_t i = 0; i < s.size(); ++i)
        if (out.map.evaluate(s[i]) != t[i]) fail(Err::Internal, "tuple_transport missed");
    return out;
}

// --- completion, cones, interval conjugation ------------------------------------

// Extends a partial PL bijection [0,r1] -> [0,r2] (slopes n-powers,
// breakpoints n-adic) to an element of F_n, by cone-matching the complements.
inline CompactPL complete_partial(const std::vector<Point>& partial, int n) {
    if (partial.size() < 2) fail(Err::BadPartial, "partial map needs two nodes");
    if (!(partial.front() == Point{Rational(0), Rational(0)}))
        fail(Err::BadPartial, "partial map must start at (0,0)");
    Rational r1 = partial.back().x, r2 = partial.back().y;
    if (!(r1 > Rational(0) && r1 < Rational(1) && r2 > Rational(0) && r2 < Rational(1)))
        fail(Err::BadPartial, "endpoints must lie in (0,1)");
    for (size_t i = 0; i + 1 < partial.size(); ++i) {
        if (!(partial[i].x < partial[i + 1].x && partial[i].y < partial[i + 1].y))
            fail(Err::BadPartial, "partial map not strictly increasing");
        if (!in_ring(partial[i].x, n) || !in_ring(partial[i].y, n))
            fail(Err::BadPartial, "breakpoint outside Z[1/n]");
        Rational s = detail::segment_slope(partial[i], partial[i + 1]);
        if (s.num() != 1 && s.den() != 1) fail(Err::BadPartial, "slope not a power of n");
        for (Int v = s.num() == 1 ? s.den() : s.num(); v > 1; v /= n)
            if (v % n != 0) fail(Err::BadPartial, "slope not a power of n");
    }
    if (!in_ring(r1, n) || !in_ring(r2, n)) fail(Err::BadPartial, "corner outside Z[1/n]");
    std::vector<Point> nodes = partial;
    auto tail = cone_match(r1, Rational(1), r2, Rational(1), n);
    nodes.insert(nodes.end(), tail.begin() + 1, tail.end());
    CompactPL g(std::move(nodes));
    if (!member_Fn(g, n)) fail(Err::Internal, "complete_partial left F_n");
    return g;
}

// The copy of f inside the n-cone I, conjugated by the linear rescale; the
// rigid stabilizer embedding.
inline CompactPL cone_embed(const CompactPL& f, const Rational& lo, const Rational& hi, int n) {
    if (!is_ncone(lo, hi, n))
        fail(Err::NotACone, "[" + lo.str() + "," + hi.str() + "]");
    if (!member_Fn(f, n)) fail(Err::NotInFn, "cone_embed input outside F_n");
    Rational len = hi - lo;
    std::vector<Point> nodes;
    if (lo > Rational(0)) nodes.push_back({Rational(0), Rational(0)});
    for (const auto& p : f.nodes()) nodes.push_back({lo + len * p.x, lo + len * p.y});
    if (hi < Rational(1)) nodes.push_back({Rational(1), Rational(1)});
    return CompactPL(std::move(nodes));
}

// phi: J -> [0,l] mapping the i-th greedy cone of J linearly onto [i-1,i].
// Conjugation by phi carries Rstab_{F_n}(J) into F_{n,l}.
struct IntervalConj {
    std::vector<Point> phi;  // graph J -> [0, l]
    long cones = 0;

    Rational apply(const Rational& x) const { return detail::eval_graph(phi, x); }
    Rational apply_inverse(const Rational& y) const {
        return detail::eval_graph(detail::swap_coords(phi), y);
    }
};

inline IntervalConj interval_conj(const Rational& lo, const Rational& hi, int n) {
    if (!is_nary_interval(lo, hi, n))
        fail(Err::NotAnNaryInterval, "[" + lo.str() + "," + hi.str() + "]");
    auto b = greedy_cones(lo, hi, n);
    IntervalConj out;
    out.cones = static_cast<long>(b.size()) - 1;
    for (size_t i = 0; i < b.size(); ++i) out.phi.push_back({b[i], Rational(Int(i))});
    return out;
}

// F_{n,r} membership for an arbitrary increasing PL graph: slopes n-powers,
// breakpoints n-adic (Def of the groups on [0,r]).
inline bool fnr_member(const std::vector<Point>& nodes, int n) {
    for (size_t i = 0; i + 1 < nodes.size(); ++i) {
        if (i > 0 && !in_ring(nodes[i].x, n)) return false;
        Rational s = detail::segment_slope(nodes[i], nodes[i + 1]);
        if (s.num() != 1 && s.den() != 1) return false;
        for (Int v = s.num() == 1 ? s.den() : s.num(); v > 1; v /= n)
            if (v % n != 0) return false;
    }
    return true;
}

// --- chain generating set --------------------------------------------------------

// The n generators with chained supports. Shapes are three-segment bumps
// (slope n, unit shift, slope 1/n) on the depth-3 grid; the first gap is
// adjustable so the middle supports can clear a prescribed left margin.
struct ChainSet {
    int n = 2;
    std::vector<CompactPL> psis;
    std::vector<std::pair<Rational, Rational>> supports;
    bool chain_ok = false;
    bool fast_ok = false;
    Rational fast_x, fast_y, fast_image;
};

inline bool check_chain(const std::vector<std::pair<Rational, Rational>>& J) {
    size_t m = J.size();
    if (m < 2) return false;
    if (J.front().first != Rational(0) || J.back().second != Rational(1)) return false;
    for (size_t i = 0; i + 1 < m; ++i) {
        if (!(J[i].first < J[i + 1].first && J[i + 1].first < J[i].second &&
              J[i].second < J[i + 1].second))
            return false;
    }
    for (size_t i = 0; i < m; ++i)
        for (size_t j = i + 2; j < m; ++j)
            if (!(J[i].second <= J[j].first)) return false;
    return true;
}

inline bool check_fast(const std::vector<CompactPL>& psis,
                       const std::vector<std::pair<Rational, Rational>>& J, Rational* x_out,
                       Rational* y_out, Rational* img_out) {
    size_t m = psis.size();
    Rational x = J[1].first;
    Rational y = J[m - 2].second;  // sup J_{m-1}
    Rational z = x;
    for (const auto& f : psis) z = f.evaluate(z);
    if (x_out) *x_out = x;
    if (y_out) *y_out = y;
    if (img_out) *img_out = z;
    return z >= y;
}

inline ChainSet chain_generators(int m, long min_first_gap = 0) {
    if (m < 2) fail(Err::DomainError, "chain_generators needs n >= 2");
    Int N = ipow(m, 3);
    Int d1 = std::max<Int>(Int(m - 1), Int(min_first_gap));
    if (d1 > N - Int(m) * (m - 2) - (m + 1))
        fail(Err::DomainError, "chain_generators: first gap too large");
    std::vector<Int> a(static_cast<size_t>(m)), B(static_cast<size_t>(m));
    a[0] = 0;
    for (int i = 1; i < m; ++i) a[static_cast<size_t>(i)] = d1 + Int(m) * (i - 1);
    B[0] = d1 + m;
    for (int i = 1; i + 1 < m; ++i) B[static_cast<size_t>(i)] = 2 * m - 1;
    B[static_cast<size_t>(m - 1)] = N - a[static_cast<size_t>(m - 1)];

    ChainSet out;
    out.n = m;
    Rational unit(Int(1), N);
    for (int i = 0; i < m; ++i) {
        Rational lo = Rational(a[static_cast<size_t>(i)], N);
        Rational hi = Rational(a[static_cast<size_t>(i)] + B[static_cast<size_t>(i)], N);
        std::vector<Point> nodes;
        if (lo > Rational(0)) nodes.push_back({Rational(0), Rational(0)});
        nodes.push_back({lo, lo});
        nodes.push_back({lo + unit, lo + unit * Rational(m)});
        Rational flat_hi = hi - unit * Rational(m);
        if (flat_hi != lo + unit) nodes.push_back({flat_hi, hi - unit});
        nodes.push_back({hi, hi});
        if (hi < Rational(1)) nodes.push_back({Rational(1), Rational(1)});
        out.psis.push_back(CompactPL(std::move(nodes)));
        out.supports.push_back({lo, hi});
    }
    out.chain_ok = check_chain(out.supports);
    out.fast_ok = check_fast(out.psis, out.supports, &out.fast_x, &out.fast_y, &out.fast_image);
    if (!out.chain_ok || !out.fast_ok) fail(Err::Internal, "chain_generators invariants broken");
    return out;
}

// --- presentation generators -----------------------------------------------------

// f_0 maps [1-1/n, 1] linearly onto [1-n^-n, 1]; f_i is its copy in the
// rightmost depth-i cone (identity on [0, 1-n^-i]). These satisfy
// f_i^-1 f_j f_i = f_{j+n-1} for i < j.
inline CompactPL presentation_generator_map(long i, int n) {
    if (i < 0) fail(Err::IndexOutOfRange, "presentation generator index");
    Rational cut(Int(n - 1), Int(n));
    Rational image(ipow(n, static_cast<unsigned long>(n)) - 1, ipow(n, static_cast<unsigned long>(n)));
    std::vector<Point> nodes = cone_match(Rational(0), cut, Rational(0), image, n);
    nodes.push_back({Rational(1), Rational(1)});
    CompactPL f0(std::move(nodes));
    if (i == 0) return f0;
    Rational lo = Rational(1) - rat_pow(Int(n), -i);
    return cone_embed(f0, lo, Rational(1), n);
}

inline PairDiagram presentation_generator(long i, int n) {
    return map_to_pair(presentation_generator_map(i, n), n);
}

// --- derived-subgroup necessary condition ----------------------------------------

// Slope 1 at both ends and support closure inside (0,1): necessary for F_n'.
inline bool fprime_necessary(const CompactPL& f, int n) {
    if (!member_Fn(f, n)) fail(Err::NotInFn, "fprime_necessary input outside F_n");
    if (f.is_identity()) return true;
    if (f.one_sided_slope(Rational(0), Side::Right) != Rational(1)) return false;
    if (f.one_sided_slope(Rational(1), Side::Left) != Rational(1)) return false;
    SupportSet s = support(f);
    if (s.empty()) return true;
    return s.intervals.front().first > Rational(0) && s.intervals.back().second < Rational(1);
}

}  // namespace qn
