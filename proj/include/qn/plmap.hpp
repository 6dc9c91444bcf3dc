#pragma once

#include <algorithm>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qn/exact.hpp"

namespace qn {

struct Point {
    Rational x, y;
    bool operator==(const Point& o) const { return x == o.x && y == o.y; }
};

enum class Side { Left, Right };

namespace detail {

// Shared engine: the graph of a strictly increasing PL bijection between two
// intervals, stored as its node list. Interpolation between consecutive nodes.
inline void validate_monotone(const std::vector<Point>& pts, const char* what) {
    if (pts.size() < 2) fail(Err::DomainError, std::string(what) + ": needs at least two nodes");
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        if (!(pts[i].x < pts[i + 1].x) || !(pts[i].y < pts[i + 1].y))
            fail(Err::DomainError, std::string(what) + ": nodes not strictly increasing");
    }
}

inline Rational segment_slope(const Point& a, const Point& b) {
    return (b.y - a.y) / (b.x - a.x);
}

// Removes interior nodes where incoming and outgoing slopes agree. Nodes with
// x in `keep` survive regardless (periodic maps pin the 0/1 samples).
inline std::vector<Point> merge_collinear(std::vector<Point> pts,
                                          const std::vector<Rational>& keep = {}) {
    std::vector<Point> out;
    out.reserve(pts.size());
    for (size_t i = 0; i < pts.size(); ++i) {
        if (i == 0 || i + 1 == pts.size()) {
            out.push_back(pts[i]);
            continue;
        }
        bool pinned = false;
        for (const auto& k : keep) pinned = pinned || k == pts[i].x;
        if (!pinned && segment_slope(out.back(), pts[i]) == segment_slope(pts[i], pts[i + 1]))
            continue;
        out.push_back(pts[i]);
    }
    return out;
}

inline Rational eval_graph(const std::vector<Point>& pts, const Rational& x) {
    if (x < pts.front().x || x > pts.back().x)
        fail(Err::DomainError, "evaluation point " + x.str() + " outside graph domain");
    // Last node with node.x <= x.
    size_t lo = 0, hi = pts.size() - 1;
    while (lo + 1 < hi) {
        size_t mid = (lo + hi) / 2;
        if (pts[mid].x <= x)
            lo = mid;
        else
            hi = mid;
    }
    if (pts[hi].x <= x) lo = hi;
    if (pts[lo].x == x) return pts[lo].y;
    const Point& a = pts[lo];
    const Point& b = pts[lo + 1];
    return a.y + segment_slope(a, b) * (x - a.x);
}

inline std::vector<Point> swap_coords(const std::vector<Point>& pts) {
    std::vector<Point> out;
    out.reserve(pts.size());
    for (const auto& p : pts) out.push_back({p.y, p.x});
    return out;
}

inline void sort_unique(std::vector<Rational>& xs) {
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
}

}  // namespace detail

// Orientation-preserving PL self-homeomorphism of [0,1]. Canonical form: no
// interior node with equal adjacent slopes.
class CompactPL {
public:
    CompactPL() : pts_{{Rational(0), Rational(0)}, {Rational(1), Rational(1)}} {}

    explicit CompactPL(std::vector<Point> pts) {
        detail::validate_monotone(pts, "CompactPL");
        if (!(pts.front() == Point{Rational(0), Rational(0)}) ||
            !(pts.back() == Point{Rational(1), Rational(1)}))
            fail(Err::DomainError, "CompactPL must fix 0 and 1");
        pts_ = detail::merge_collinear(std::move(pts));
    }

    static CompactPL identity() { return CompactPL(); }

    const std::vector<Point>& nodes() const { return pts_; }
    bool is_identity() const { return pts_.size() == 2; }

    Rational evaluate(const Rational& x) const { return detail::eval_graph(pts_, x); }

    CompactPL inverse() const { return CompactPL(detail::swap_coords(pts_)); }

    // x.(fg) = (x.f).g
    CompactPL compose(const CompactPL& g) const {
        std::vector<Rational> xs;
        for (const auto& p : pts_) xs.push_back(p.x);
        CompactPL finv = inverse();
        for (const auto& p : g.pts_) xs.push_back(finv.evaluate(p.x));
        detail::sort_unique(xs);
        std::vector<Point> out;
        out.reserve(xs.size());
        for (const auto& x : xs) out.push_back({x, g.evaluate(evaluate(x))});
        return CompactPL(std::move(out));
    }

    Rational one_sided_slope(const Rational& x, Side side) const {
        if (x < Rational(0) || x > Rational(1))
            fail(Err::DomainError, "slope query outside [0,1]");
        if (side == Side::Left && x == Rational(0))
            fail(Err::SideUndefined, "no left slope at 0");
        if (side == Side::Right && x == Rational(1))
            fail(Err::SideUndefined, "no right slope at 1");
        for (size_t i = 0; i + 1 < pts_.size(); ++i) {
            const auto& a = pts_[i];
            const auto& b = pts_[i + 1];
            bool inside = side == Side::Left ? (a.x < x && x <= b.x) : (a.x <= x && x < b.x);
            if (inside) return detail::segment_slope(a, b);
        }
        fail(Err::Internal, "one_sided_slope: segment not found");
    }

    bool operator==(const CompactPL& o) const { return pts_ == o.pts_; }
    bool operator!=(const CompactPL& o) const { return !(*this == o); }

private:
    std::vector<Point> pts_;
};

// PL homeomorphism of the line commuting with t -> t+1, stored on the
// fundamental domain [0,1]. The 0 and 1 samples are always present even when
// not breakpoints; interior nodes are genuine breakpoints.
class PeriodicPL {
public:
    PeriodicPL()
        : pts_{{Rational(0), Rational(0)}, {Rational(1), Rational(1)}} {}

    explicit PeriodicPL(std::vector<Point> pts) {
        detail::validate_monotone(pts, "PeriodicPL");
        if (pts.front().x != Rational(0) || pts.back().x != Rational(1))
            fail(Err::DomainError, "PeriodicPL graph must span [0,1]");
        if (pts.back().y != pts.front().y + Rational(1))
            fail(Err::DomainError, "PeriodicPL needs y(1) = y(0) + 1");
        pts_ = detail::merge_collinear(std::move(pts), {Rational(0), Rational(1)});
    }

    static PeriodicPL identity() { return PeriodicPL(); }

    // Builds the canonical representative from any exact evaluator: samples at
    // 0, 1 and the given candidate breakpoints (reduced mod 1).
    template <typename F>
    static PeriodicPL from_function(std::vector<Rational> candidate_xs, F&& eval) {
        std::vector<Rational> xs{Rational(0), Rational(1)};
        for (auto& x : candidate_xs) {
            Rational r = x.frac();
            xs.push_back(r);
            if (r == Rational(0)) xs.push_back(Rational(1));
        }
        detail::sort_unique(xs);
        std::vector<Point> out;
        out.reserve(xs.size());
        for (const auto& x : xs) out.push_back({x, eval(x)});
        return PeriodicPL(std::move(out));
    }

    const std::vector<Point>& nodes() const { return pts_; }

    bool is_identity() const { return pts_.size() == 2 && pts_.front().y == Rational(0); }

    Rational evaluate(const Rational& x) const {
        Rational k(x.floor());
        return detail::eval_graph(pts_, x - k) + k;
    }

    PeriodicPL inverse() const {
        std::vector<Point> swapped = detail::swap_coords(pts_);
        std::vector<Rational> candidates;
        for (const auto& p : swapped) candidates.push_back(p.x);
        auto inv_eval = [&](const Rational& y) {
            // Shift y into the stored y-range [y0, y0+1), interpolate, shift back.
            Rational y0 = swapped.front().x;
            Rational k((y - y0).floor());
            return detail::eval_graph(swapped, y - k) + k;
        };
        return from_function(candidates, inv_eval);
    }

    PeriodicPL compose(const PeriodicPL& g) const {
        std::vector<Rational> xs;
        for (const auto& p : pts_) xs.push_back(p.x);
        Rational y0 = pts_.front().y;
        std::vector<Point> swapped = detail::swap_coords(pts_);
        for (const auto& p : g.pts_) {
            if (p.x == Rational(1)) continue;
            // Unique k with p.x + k in [y0, y0+1): breakpoint of g pulled back
            // through f lands in the fundamental domain.
            Rational k((y0 - p.x).ceil());
            if (p.x + k < y0) k += Rational(1);
            if (p.x + k >= y0 + Rational(1)) k -= Rational(1);
            xs.push_back(detail::eval_graph(swapped, p.x + k));
        }
        return from_function(std::move(xs),
                             [&](const Rational& x) { return g.evaluate(evaluate(x)); });
    }

    Rational one_sided_slope(const Rational& x, Side side) const {
        Rational u = x.frac();
        if (side == Side::Left && u == Rational(0)) {
            const auto& a = pts_[pts_.size() - 2];
            const auto& b = pts_.back();
            return detail::segment_slope(a, b);
        }
        for (size_t i = 0; i + 1 < pts_.size(); ++i) {
            const auto& a = pts_[i];
            const auto& b = pts_[i + 1];
            bool inside = side == Side::Left ? (a.x < u && u <= b.x) : (a.x <= u && u < b.x);
            if (inside) return detail::segment_slope(a, b);
        }
        fail(Err::Internal, "one_sided_slope: segment not found");
    }

    bool operator==(const PeriodicPL& o) const { return pts_ == o.pts_; }
    bool operator!=(const PeriodicPL& o) const { return !(*this == o); }

private:
    std::vector<Point> pts_;
};

// The open set where a map moves points. For periodic maps the intervals are
// per-period components (one may straddle an integer), the set itself being
// their Z-translates; whole_line marks empty fixed set.
struct SupportSet {
    std::vector<std::pair<Rational, Rational>> intervals;
    bool periodic = false;
    bool whole_line = false;

    bool empty() const { return !whole_line && intervals.empty(); }

    Rational total_length() const {
        Rational t(0);
        for (const auto& [a, b] : intervals) t += b - a;
        return t;
    }

    std::string str() const {
        if (whole_line) return periodic ? "R" : "(0,1)";
        if (intervals.empty()) return "{}";
        std::string s;
        for (size_t i = 0; i < intervals.size(); ++i) {
            if (i) s += " u ";
            s += "(" + intervals[i].first.str() + "," + intervals[i].second.str() + ")";
        }
        if (periodic) s += " + Z";
        return s;
    }

    bool operator==(const SupportSet& o) const {
        return intervals == o.intervals && periodic == o.periodic && whole_line == o.whole_line;
    }
};

namespace detail {

// Maximal open components of {x in [lo,hi] : f(x) != x} for a node graph,
// splitting segments at their interior fixed points.
inline std::vector<std::pair<Rational, Rational>> moved_components(
    const std::vector<Point>& pts) {
    // Collect fixed points / fixed subsegments in graph order, then take the
    // complementary open intervals.
    std::vector<std::pair<Rational, Rational>> fixed;  // closed intervals (may be points)
    auto add_fixed = [&](const Rational& a, const Rational& b) {
        if (!fixed.empty() && fixed.back().second == a)
            fixed.back().second = b;
        else
            fixed.push_back({a, b});
    };
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        const Point& a = pts[i];
        const Point& b = pts[i + 1];
        Rational s = segment_slope(a, b);
        if (s == Rational(1)) {
            if (a.y == a.x) add_fixed(a.x, b.x);
        } else {
            // Unique solution of y(x) = x on the closed segment, if any.
            Rational x0 = (a.y - s * a.x) / (Rational(1) - s);
            if (x0 >= a.x && x0 <= b.x) add_fixed(x0, x0);
        }
    }
    std::vector<std::pair<Rational, Rational>> moved;
    Rational cur = pts.front().x;
    for (const auto& [a, b] : fixed) {
        if (cur < a) moved.push_back({cur, a});
        cur = b;
    }
    if (cur < pts.back().x) moved.push_back({cur, pts.back().x});
    return moved;
}

}  // namespace detail

inline SupportSet support(const CompactPL& f) {
    SupportSet s;
    s.periodic = false;
    s.intervals = detail::moved_components(f.nodes());
    return s;
}

inline SupportSet support(const PeriodicPL& f) {
    SupportSet s;
    s.periodic = true;
    auto moved = detail::moved_components(f.nodes());
    if (moved.empty()) return s;
    if (moved.size() == 1 && moved[0].first == Rational(0) && moved[0].second == Rational(1)) {
        s.whole_line = true;
        return s;
    }
    // Wraparound: if 0 is moved then so is every integer, and the components
    // touching 0 and 1 are one interval of the line.
    bool moved_at_0 = f.evaluate(Rational(0)) != Rational(0);
    if (moved_at_0) {
        // Periodicity forces components at both ends of the fundamental domain.
        auto first = moved.front();
        auto last = moved.back();
        moved.erase(moved.begin());
        moved.pop_back();
        moved.push_back({last.first, first.second + Rational(1)});
    }
    std::sort(moved.begin(), moved.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    s.intervals = std::move(moved);
    return s;
}

// Exact agreement of two maps as functions on the closed interval I (for
// periodic maps: on I + Z). PL maps agree on I iff they agree at the interval
// endpoints and at every node of either map inside I.
inline bool agree_on(const CompactPL& f, const CompactPL& g, const Rational& a,
                     const Rational& b) {
    if (a > b) fail(Err::DomainError, "agree_on: empty interval");
    std::vector<Rational> xs{a, b};
    for (const auto& p : f.nodes())
        if (p.x > a && p.x < b) xs.push_back(p.x);
    for (const auto& p : g.nodes())
        if (p.x > a && p.x < b) xs.push_back(p.x);
    detail::sort_unique(xs);
    for (const auto& x : xs)
        if (f.evaluate(x) != g.evaluate(x)) return false;
    return true;
}

inline bool agree_on(const PeriodicPL& f, const PeriodicPL& g, const Rational& a,
                     const Rational& b) {
    if (a > b) fail(Err::DomainError, "agree_on: empty interval");
    if (b - a >= Rational(1)) return f == g;
    std::vector<Rational> xs{a, b};
    auto add_nodes = [&](const PeriodicPL& h) {
        for (const auto& p : h.nodes()) {
            if (p.x == Rational(1)) continue;
            // Translates of the node that land inside (a, b).
            Rational k((a - p.x).ceil());
            for (Rational c = p.x + k; c < b; c += Rational(1))
                if (c > a) xs.push_back(c);
        }
    };
    add_nodes(f);
    add_nodes(g);
    detail::sort_unique(xs);
    for (const auto& x : xs)
        if (f.evaluate(x) != g.evaluate(x)) return false;
    return true;
}

// --- Text interchange format -------------------------------------------------
//
//   plmap kind=compact|periodic n=<int>
//   <x_i> <y_i>        (canonical rationals, increasing x)
//
// Parsing validates all invariants and re-canonicalizes.

template <typename Map>
inline std::string encode_plmap(const Map& f, int n, const char* kind) {
    std::ostringstream os;
    os << "plmap kind=" << kind << " n=" << n << "\n";
    for (const auto& p : f.nodes()) os << p.x.str() << " " << p.y.str() << "\n";
    return os.str();
}

inline std::string encode(const CompactPL& f, int n) { return encode_plmap(f, n, "compact"); }
inline std::string encode(const PeriodicPL& f, int n) { return encode_plmap(f, n, "periodic"); }

struct ParsedPLMap {
    bool periodic = false;
    int n = 2;
    std::optional<CompactPL> compact;
    std::optional<PeriodicPL> per;
};

inline ParsedPLMap parse_plmap(std::istream& in) {
    std::string line;
    // Skip blank lines before the header.
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") != std::string::npos) break;
    }
    if (line.rfind("plmap", 0) != 0) fail(Err::ParseError, "expected 'plmap' header");
    ParsedPLMap out;
    {
        std::istringstream hs(line);
        std::string tok;
        hs >> tok;  // "plmap"
        bool kind_seen = false;
        while (hs >> tok) {
            if (tok.rfind("kind=", 0) == 0) {
                std::string k = tok.substr(5);
                if (k == "compact")
                    out.periodic = false;
                else if (k == "periodic")
                    out.periodic = true;
                else
                    fail(Err::ParseError, "unknown plmap kind '" + k + "'");
                kind_seen = true;
            } else if (tok.rfind("n=", 0) == 0) {
                out.n = std::stoi(tok.substr(2));
            } else {
                fail(Err::ParseError, "unknown plmap header token '" + tok + "'");
            }
        }
        if (!kind_seen) fail(Err::ParseError, "plmap header missing kind=");
    }
    std::vector<Point> pts;
    while (true) {
        std::streampos pos = in.tellg();
        if (!std::getline(in, line)) break;
        if (line.find_first_not_of(" \t\r") == std::string::npos) break;
        if (line.rfind("plmap", 0) == 0) {
            in.seekg(pos);
            break;
        }
        std::istringstream ls(line);
        std::string xs, ys;
        if (!(ls >> xs >> ys)) fail(Err::ParseError, "bad plmap node line '" + line + "'");
        pts.push_back({Rational::parse(xs), Rational::parse(ys)});
    }
    if (out.periodic)
        out.per = PeriodicPL(std::move(pts));
    else
        out.compact = CompactPL(std::move(pts));
    return out;
}

}  // namespace qn
