#pragma once

#include <array>
#include <cctype>
#include <memory>

#include "qn/thompson.hpp"

namespace qn {

// --- Gamma_n membership ------------------------------------------------------

// A membership-checked element of Gamma_n: periodic PL map with breakpoints in
// Z[1/eta], slopes n^i (n+1)^j, and the integer-crossing exponent condition
// i-j = |Z cap (x, x.f)| on every piece.
struct GammaElement {
    PeriodicPL map;
    int n = 2;
    bool membership_checked = false;

    int eta() const { return n * (n + 1); }
    Rational at_zero() const { return map.evaluate(Rational(0)); }
};

// Splits every linear segment of the period at integer preimages so the
// crossing count is constant per piece, then verifies all three conditions.
inline GammaElement member_gamma(const PeriodicPL& f, int n) {
    int eta = n * (n + 1);
    const auto& pts = f.nodes();
    for (size_t i = 1; i + 1 < pts.size(); ++i) {
        if (!in_ring(pts[i].x, eta))
            fail(Err::BreakpointNotInRing,
                 "breakpoint " + pts[i].x.str() + " outside Z[1/" + std::to_string(eta) + "]");
    }
    // Split points: nodes plus the preimage of the unique integer hit by one period.
    std::vector<Rational> xs;
    for (const auto& p : pts) xs.push_back(p.x);
    Rational y0 = pts.front().y;
    Rational c = y0.is_integer() ? y0 : Rational(y0.ceil());
    {
        auto swapped = detail::swap_coords(pts);
        Rational p = detail::eval_graph(swapped, c);
        if (p >= Rational(0) && p < Rational(1)) xs.push_back(p);
    }
    detail::sort_unique(xs);
    for (size_t i = 0; i + 1 < xs.size(); ++i) {
        const Rational& a = xs[i];
        const Rational& b = xs[i + 1];
        Rational xm = (a + b) / Rational(2);
        Rational ym = f.evaluate(xm);
        Rational slope = (f.evaluate(b) - f.evaluate(a)) / (b - a);
        SlopeExponents se;
        try {
            se = slope_factor(slope, n);
        } catch (const QnError&) {
            fail(Err::SlopeNotFactorable, "segment (" + a.str() + "," + b.str() + "): slope " +
                                              slope.str() + " is not n^i (n+1)^j");
        }
        long crossings;
        long want;
        if (xm <= ym) {
            crossings = static_cast<long>(ym.floor() - xm.floor());
            want = se.i - se.j;
        } else {
            crossings = static_cast<long>(xm.floor() - ym.floor());
            want = se.j - se.i;
        }
        if (want != crossings)
            fail(Err::CrossingCountMismatch,
                 "segment (" + a.str() + "," + b.str() + "): slope " + slope.str() + " gives " +
                     std::to_string(want) + " but |Z cap (x,x.f)| = " + std::to_string(crossings));
    }
    return GammaElement{f, n, true};
}

// --- diagonal copy of F_eta ---------------------------------------------------

// The diagonal action: apply f on every [m, m+1]. Fixes Z pointwise.
inline GammaElement diagonal_lift(const CompactPL& f, int n) {
    int eta = n * (n + 1);
    if (!member_Fn(f, eta))
        fail(Err::NotInFEta, "diagonal_lift input outside F_" + std::to_string(eta));
    std::vector<Point> nodes = f.nodes();
    PeriodicPL lifted(std::move(nodes));
    return member_gamma(lifted, n);
}

// The stabilizer of 0 in Gamma_n is exactly the diagonal F_eta; projects back
// to the standard action on [0,1].
inline CompactPL stab0_project(const PeriodicPL& g, int n) {
    int eta = n * (n + 1);
    if (g.evaluate(Rational(0)) != Rational(0))
        fail(Err::NotAStabilizer, "0.g = " + g.evaluate(Rational(0)).str() + " != 0");
    CompactPL res(std::vector<Point>(g.nodes()));
    if (!member_Fn(res, eta))
        fail(Err::NotInFEta, "stabilizer restriction leaves F_" + std::to_string(eta));
    return res;
}

inline CompactPL stab0_project(const GammaElement& g) { return stab0_project(g.map, g.n); }

// --- special elements ----------------------------------------------------------

inline long xi_default_depth(int n) {
    int eta = n * (n + 1);
    Rational third(Int(1), Int(3));
    long k = 1;
    while (!(Rational(Int(n) * eta, ipow(eta, static_cast<unsigned long>(k))) < third)) ++k;
    return k;
}

// The three-segment special element supported on [-eta/eta^k, n*eta/eta^k] + Z:
// slope eta, then slope n across 0, then slope 1/eta. Default depth keeps the
// support inside (-1/3, 1/3) + Z so it clears the middle chain generators.
inline GammaElement xi_build(int n, long k = -1) {
    if (n < 2) fail(Err::DomainError, "xi_build needs n >= 2");
    int eta = n * (n + 1);
    if (k < 0) k = xi_default_depth(n);
    Int q = ipow(eta, static_cast<unsigned long>(std::max(k, 0L)));
    if (k < 1 || !(Rational(Int(n + 1) * eta, q) < Rational(1)))
        fail(Err::DepthTooSmall, "support [-eta/eta^k, n*eta/eta^k] must have length < 1");
    Rational y0(Int(n) * (eta - 1), q);            // 0.xi = n(eta-1)/eta^k
    Rational sup_hi(Int(n) * eta, q);              // right end of support
    Rational sup_lo1 = Rational(1) - Rational(Int(eta), q);        // 1 - eta/eta^k
    Rational mid1 = Rational(1) - Rational(Int(eta - 1), q);       // 1 - (eta-1)/eta^k
    std::vector<Point> nodes{{Rational(0), y0},
                             {sup_hi, sup_hi},
                             {sup_lo1, sup_lo1},
                             {mid1, Rational(1)},
                             {Rational(1), y0 + Rational(1)}};
    return member_gamma(PeriodicPL(std::move(nodes)), n);
}

// Special: 0.f in (0,1) and slope exactly n throughout (0.f^{-1}, 0).
inline bool is_special(const GammaElement& f) {
    Rational y = f.at_zero();
    if (!(y > Rational(0) && y < Rational(1))) return false;
    Rational r = f.map.inverse().evaluate(Rational(0));
    std::vector<Rational> xs{r, Rational(0)};
    for (const auto& p : f.map.nodes()) {
        Rational shifted = p.x - Rational(1);
        if (shifted > r && shifted < Rational(0)) xs.push_back(shifted);
        if (p.x > r && p.x < Rational(0)) xs.push_back(p.x);
    }
    detail::sort_unique(xs);
    for (size_t i = 0; i + 1 < xs.size(); ++i) {
        Rational slope =
            (f.map.evaluate(xs[i + 1]) - f.map.evaluate(xs[i])) / (xs[i + 1] - xs[i]);
        if (slope != Rational(f.n)) return false;
    }
    return true;
}

// Corrects f on the window (0.f^{-1}, 0) by a diagonal element g whose slopes
// are eta^j where f has slope n*eta^j, so g^{-1} f is special.
inline CompactPL mush(const GammaElement& f) {
    int n = f.n;
    int eta = f.eta();
    Rational y = f.at_zero();
    if (!(y > Rational(0) && y < Rational(1)))
        fail(Err::NotInWindow, "0.f = " + y.str() + " not in (0,1)");
    Rational r = f.map.inverse().evaluate(Rational(0));  // in (-1, 0)
    std::vector<Rational> xs{r, Rational(0)};
    for (const auto& p : f.map.nodes()) {
        Rational shifted = p.x - Rational(1);
        if (shifted > r && shifted < Rational(0)) xs.push_back(shifted);
        if (p.x > r && p.x < Rational(0)) xs.push_back(p.x);
    }
    detail::sort_unique(xs);
    // Prescribed slopes on the shifted window [r+1, 1]; integrate from the
    // right anchor (1,1).
    std::vector<Point> partial(xs.size());
    partial.back() = {Rational(1), Rational(1)};
    for (size_t i = xs.size() - 1; i-- > 0;) {
        Rational a = xs[i], b = xs[i + 1];
        Rational slope = (f.map.evaluate(b) - f.map.evaluate(a)) / (b - a);
        SlopeExponents se = slope_factor(slope, n);
        if (se.i != se.j + 1) fail(Err::Internal, "mush: slope is not n*eta^j on the window");
        Rational gslope = rat_pow(Int(eta), se.j);
        partial[i] = {a + Rational(1), partial[i + 1].y - gslope * (b - a)};
    }
    if (partial.front().y != Rational(1) - y / Rational(n))
        fail(Err::Internal, "mush: window image has wrong length");
    std::vector<Point> nodes = cone_match(Rational(0), partial.front().x, Rational(0),
                                          partial.front().y, eta);
    nodes.insert(nodes.end(), partial.begin() + 1, partial.end());
    CompactPL g(std::move(nodes));
    if (!member_Fn(g, eta)) fail(Err::Internal, "mush left F_eta");
    GammaElement check = member_gamma(
        diagonal_lift(g, n).map.inverse().compose(f.map), n);
    if (!is_special(check)) fail(Err::Internal, "mush output is not special");
    return g;
}

// --- fixed generating set -------------------------------------------------------

// The ambient data everything else is factored over: the default special
// element xi and the chain generators of the diagonal F_eta, arranged so that
// Supp(xi) meets Supp(psi_i) exactly for i in {1, eta}.
struct GammaSystem {
    int n = 2;
    int eta = 6;
    long xi_depth = 3;
    GammaElement xi;
    Rational xi_at_zero;       // 0.xi
    Rational xi_inv_at_zero;   // 0.xi^{-1} in (-1,0)
    ChainSet chain;            // standard action of F_eta on [0,1]
};

inline GammaSystem make_system(int n) {
    if (n < 2) fail(Err::DomainError, "make_system needs n >= 2");
    GammaSystem sys;
    sys.n = n;
    sys.eta = n * (n + 1);
    sys.xi_depth = xi_default_depth(n);
    sys.xi = xi_build(n);
    sys.xi_at_zero = sys.xi.at_zero();
    sys.xi_inv_at_zero = sys.xi.map.inverse().evaluate(Rational(0));
    // Middle chain supports must clear the support of xi mod 1:
    // (0, n*eta/eta^k) on the left and (1 - eta/eta^k, 1) on the right.
    Int q = ipow(sys.eta, static_cast<unsigned long>(sys.xi_depth));
    Rational left_margin(Int(n) * sys.eta, q);
    Int N = ipow(sys.eta, 3);
    Rational cells = left_margin * Rational(N);
    long min_gap = static_cast<long>(cells.ceil());
    sys.chain = chain_generators(sys.eta, min_gap);
    Rational right_margin = Rational(1) - Rational(Int(sys.eta), q);
    for (size_t i = 1; i + 1 < sys.chain.supports.size(); ++i) {
        if (sys.chain.supports[i].first < left_margin ||
            sys.chain.supports[i].second > right_margin)
            fail(Err::Internal, "chain generator overlaps xi support");
    }
    return sys;
}

// --- words over {xi} and F_eta with commutator certificates ----------------------

struct Word;

struct Atom {
    enum class Kind { Xi, XiInv, F, Comm };
    Kind kind = Kind::Xi;
    CompactPL fmap;  // Kind::F
    std::shared_ptr<const std::pair<Word, Word>> comm;  // Kind::Comm
};

struct Word {
    int n = 2;
    std::vector<Atom> atoms;

    static Word empty(int n) { return Word{n, {}}; }

    static Atom xi_atom(int sign) {
        Atom a;
        a.kind = sign >= 0 ? Atom::Kind::Xi : Atom::Kind::XiInv;
        return a;
    }
    static Atom f_atom(const CompactPL& f) {
        Atom a;
        a.kind = Atom::Kind::F;
        a.fmap = f;
        return a;
    }
    static Atom comm_atom(Word lhs, Word rhs) {
        Atom a;
        a.kind = Atom::Kind::Comm;
        a.comm = std::make_shared<const std::pair<Word, Word>>(std::move(lhs), std::move(rhs));
        return a;
    }

    Word& append(Atom a) {
        atoms.push_back(std::move(a));
        return *this;
    }
    Word& append_word(const Word& w) {
        for (const auto& a : w.atoms) atoms.push_back(a);
        return *this;
    }

    bool all_commutators() const {
        for (const auto& a : atoms)
            if (a.kind != Atom::Kind::Comm) return false;
        return true;
    }

    Word inverse() const {
        Word w{n, {}};
        for (auto it = atoms.rbegin(); it != atoms.rend(); ++it) {
            switch (it->kind) {
                case Atom::Kind::Xi: w.append(xi_atom(-1)); break;
                case Atom::Kind::XiInv: w.append(xi_atom(+1)); break;
                case Atom::Kind::F: w.append(f_atom(it->fmap.inverse())); break;
                case Atom::Kind::Comm:
                    // [a,b]^{-1} = [b,a]
                    w.append(comm_atom(it->comm->second, it->comm->first));
                    break;
            }
        }
        return w;
    }
};

inline PeriodicPL eval_word(const Word& w);

inline PeriodicPL realize_atom(const Atom& a, int n) {
    switch (a.kind) {
        case Atom::Kind::Xi: return xi_build(n).map;
        case Atom::Kind::XiInv: return xi_build(n).map.inverse();
        case Atom::Kind::F: return diagonal_lift(a.fmap, n).map;
        case Atom::Kind::Comm: {
            PeriodicPL lhs = eval_word(a.comm->first);
            PeriodicPL rhs = eval_word(a.comm->second);
            return lhs.inverse().compose(rhs.inverse()).compose(lhs).compose(rhs);
        }
    }
    fail(Err::Internal, "unreachable atom kind");
}

inline PeriodicPL eval_word(const Word& w) {
    PeriodicPL f = PeriodicPL::identity();
    for (const auto& a : w.atoms) f = f.compose(realize_atom(a, w.n));
    return f;
}

// --- word serialization -----------------------------------------------------------
//
//   word n=<int>
//   XI | XI' | F{ <compact plmap block> } | COMM( <atoms> , <atoms> )
//
// Atoms are whitespace separated; a blank line at nesting depth 0 ends the word.

namespace detail {

inline void encode_atoms(std::ostream& os, const Word& w);

inline void encode_atom(std::ostream& os, const Atom& a, int n) {
    switch (a.kind) {
        case Atom::Kind::Xi: os << "XI\n"; break;
        case Atom::Kind::XiInv: os << "XI'\n"; break;
        case Atom::Kind::F:
            os << "F{\n" << encode(a.fmap, n) << "}\n";
            break;
        case Atom::Kind::Comm:
            os << "COMM(\n";
            encode_atoms(os, a.comm->first);
            os << ",\n";
            encode_atoms(os, a.comm->second);
            os << ")\n";
            break;
    }
}

inline void encode_atoms(std::ostream& os, const Word& w) {
    for (const auto& a : w.atoms) encode_atom(os, a, w.n);
}

struct WordCursor {
    const std::string& s;
    size_t i = 0;

    void skip_ws() {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    }
    bool at_end() {
        skip_ws();
        return i >= s.size();
    }
    bool peek_is(char c) {
        skip_ws();
        return i < s.size() && s[i] == c;
    }
    bool try_consume(const char* tok) {
        skip_ws();
        size_t len = std::string::traits_type::length(tok);
        if (s.compare(i, len, tok) == 0) {
            i += len;
            return true;
        }
        return false;
    }
};

inline std::vector<Atom> parse_atoms(WordCursor& cur, int n);

inline Atom parse_atom(WordCursor& cur, int n) {
    if (cur.try_consume("XI'")) return Word::xi_atom(-1);
    if (cur.try_consume("XI")) return Word::xi_atom(+1);
    if (cur.try_consume("F{")) {
        size_t close = cur.s.find('}', cur.i);
        if (close == std::string::npos) fail(Err::ParseError, "unterminated F{...}");
        std::string inner = cur.s.substr(cur.i, close - cur.i);
        cur.i = close + 1;
        std::istringstream is(inner);
        ParsedPLMap p = parse_plmap(is);
        if (p.periodic) fail(Err::ParseError, "F atom must hold a compact plmap");
        return Word::f_atom(*p.compact);
    }
    if (cur.try_consume("COMM(")) {
        Word lhs{n, parse_atoms(cur, n)};
        if (!cur.try_consume(",")) fail(Err::ParseError, "COMM missing ','");
        Word rhs{n, parse_atoms(cur, n)};
        if (!cur.try_consume(")")) fail(Err::ParseError, "COMM missing ')'");
        return Word::comm_atom(std::move(lhs), std::move(rhs));
    }
    fail(Err::ParseError, "unknown atom at offset " + std::to_string(cur.i));
}

inline std::vector<Atom> parse_atoms(WordCursor& cur, int n) {
    std::vector<Atom> atoms;
    while (!cur.at_end() && !cur.peek_is(',') && !cur.peek_is(')'))
        atoms.push_back(parse_atom(cur, n));
    return atoms;
}

}  // namespace detail

inline std::string encode(const Word& w) {
    std::ostringstream os;
    os << "word n=" << w.n << "\n";
    detail::encode_atoms(os, w);
    return os.str();
}

inline Word parse_word(std::istream& in) {
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") != std::string::npos) break;
    }
    if (line.rfind("word", 0) != 0) fail(Err::ParseError, "expected 'word' header");
    std::istringstream hs(line);
    std::string tok, ntok;
    hs >> tok >> ntok;
    if (ntok.rfind("n=", 0) != 0) fail(Err::ParseError, "word header missing n=");
    int n = std::stoi(ntok.substr(2));
    // Body: lines until a blank line at nesting depth 0.
    std::string body;
    long depth = 0;
    while (true) {
        std::streampos pos = in.tellg();
        if (!std::getline(in, line)) break;
        if (depth == 0 && line.find_first_not_of(" \t\r") == std::string::npos) break;
        if (depth == 0 && line.rfind("word", 0) == 0) {
            in.seekg(pos);
            break;
        }
        for (char ch : line) {
            if (ch == '(' || ch == '{') ++depth;
            if (ch == ')' || ch == '}') --depth;
        }
        body += line;
        body += "\n";
    }
    detail::WordCursor cur{body, 0};
    Word w{n, detail::parse_atoms(cur, n)};
    if (!cur.at_end()) fail(Err::ParseError, "trailing word content");
    return w;
}

// --- factorization over <xi, F_eta> ------------------------------------------

// Writes g as a word in xi and diagonal F_eta elements: first xi-steps walk
// 0.g into [0,1), then mushing makes the remainder special, an orbit transport
// aligns 0-images, and dividing by xi leaves a stabilizer of 0.
inline Word factor(const GammaElement& g, const GammaSystem& sys) {
    if (g.n != sys.n) fail(Err::DomainError, "factor: base mismatch");
    int n = sys.n;
    int eta = sys.eta;
    PeriodicPL h = g.map;
    std::vector<Atom> applied;
    auto apply = [&](Atom a) {
        h = h.compose(realize_atom(a, n));
        applied.push_back(std::move(a));
    };
    int guard = 0;
    while (true) {
        Rational y = h.evaluate(Rational(0));
        if (y >= Rational(0) && y < Rational(1)) break;
        if (++guard > 100000) fail(Err::Internal, "factor: move-in runaway");
        Rational fl(y.floor());
        if (fl >= Rational(1)) {
            if (!y.is_integer()) {
                Rational u = y - fl;
                Rational v =
                    class_point_in(Rational(0), sys.xi_at_zero, eta, residue_class(u, eta));
                apply(Word::f_atom(point_transport(u, v, eta)));
            }
            apply(Word::xi_atom(-1));
        } else {
            if (!y.is_integer()) {
                Rational u = y - fl;
                Rational w_lo = sys.xi_inv_at_zero + Rational(1);
                Rational v = class_point_in(w_lo, Rational(1), eta, residue_class(u, eta));
                apply(Word::f_atom(point_transport(u, v, eta)));
            }
            apply(Word::xi_atom(+1));
        }
    }
    Word core = Word::empty(n);
    Rational y = h.evaluate(Rational(0));
    if (y != Rational(0)) {
        CompactPL gm = mush(GammaElement{h, n, true});
        PeriodicPL h2 = diagonal_lift(gm, n).map.inverse().compose(h);
        Rational z = h2.evaluate(Rational(0));
        CompactPL l = z == sys.xi_at_zero ? CompactPL::identity()
                                          : point_transport(z, sys.xi_at_zero, eta);
        PeriodicPL h3 = h2.compose(diagonal_lift(l, n).map);
        PeriodicPL h4 = h3.compose(sys.xi.map.inverse());
        CompactPL p = stab0_project(h4, n);
        if (!gm.is_identity()) core.append(Word::f_atom(gm));
        if (!p.is_identity()) core.append(Word::f_atom(p));
        core.append(Word::xi_atom(+1));
        if (!l.is_identity()) core.append(Word::f_atom(l.inverse()));
    } else {
        CompactPL p = stab0_project(h, n);
        if (!p.is_identity()) core.append(Word::f_atom(p));
    }
    Word out = core;
    for (auto it = applied.rbegin(); it != applied.rend(); ++it) {
        switch (it->kind) {
            case Atom::Kind::Xi: out.append(Word::xi_atom(-1)); break;
            case Atom::Kind::XiInv: out.append(Word::xi_atom(+1)); break;
            case Atom::Kind::F: out.append(Word::f_atom(it->fmap.inverse())); break;
            case Atom::Kind::Comm: fail(Err::Internal, "factor: unexpected comm atom");
        }
    }
    if (eval_word(out) != g.map) fail(Err::Internal, "factor: recomposition mismatch");
    return out;
}

// --- contraction ---------------------------------------------------------------

namespace detail {

// True iff the closed interval [y1, y2] lies inside (v1, v2) + Z.
inline bool interval_in_VZ(const Rational& y1, const Rational& y2, const Rational& v1,
                           const Rational& v2) {
    if (v2 - v1 > Rational(1)) return true;
    Rational d = y1 - v1;
    Rational k = d.is_integer() ? Rational(d.floor() - 1) : Rational(d.floor());
    return y2 < v2 + k;
}

// Minimal covering arc [lo, hi] (hi - lo < 1) of a periodic support set, or
// nullopt when no period gap exists.
inline std::optional<std::pair<Rational, Rational>> support_hull(const SupportSet& s) {
    if (s.whole_line) return std::nullopt;
    if (s.intervals.empty()) return std::nullopt;
    size_t m = s.intervals.size();
    Rational best_gap(-1);
    size_t best_i = 0;
    for (size_t i = 0; i < m; ++i) {
        Rational nxt =
            (i + 1 == m) ? s.intervals[0].first + Rational(1) : s.intervals[i + 1].first;
        Rational gap = nxt - s.intervals[i].second;
        if (gap > best_gap) {
            best_gap = gap;
            best_i = i;
        }
    }
    if (!(best_gap > Rational(0))) return std::nullopt;
    size_t start = (best_i + 1) % m;
    Rational lo = s.intervals[start].first;
    return std::make_pair(lo, lo + (Rational(1) - best_gap));
}

}  // namespace detail

// Word whose evaluation carries (U + Z) into (V + Z), for |U| < 1 and V a
// nonempty open interval. Strategy: if U straddles an integer, squeeze U
// toward it with a diagonal element and push through with xi; then contract
// inside one period with a diagonal transport. Self-verifying.
inline Word contract(const Rational& u1, const Rational& u2, const Rational& v1,
                     const Rational& v2, const GammaSystem& sys) {
    if (u2 < u1) fail(Err::DomainError, "contract: empty U");
    if (!(u2 - u1 < Rational(1)))
        fail(Err::TooWide, "|U| = " + (u2 - u1).str() + " >= 1");
    if (!(v1 < v2)) fail(Err::DomainError, "contract: V is empty");
    int n = sys.n;
    int eta = sys.eta;
    Word out = Word::empty(n);
    Rational p1 = u1, p2 = u2;
    if (detail::interval_in_VZ(p1, p2, v1, v2)) return out;
    auto apply = [&](Atom a) {
        PeriodicPL am = realize_atom(a, n);
        p1 = am.evaluate(p1);
        p2 = am.evaluate(p2);
        out.append(std::move(a));
    };
    Rational m(p1.ceil());
    if (m <= p2) {
        // eta-adic hull of [p1, p2] inside (m-1, m+1).
        long r = 1;
        Rational e1, e2;
        while (true) {
            Rational step = rat_pow(Int(eta), -r);
            e1 = step * Rational((p1 / step).floor());
            e2 = step * Rational((p2 / step).ceil());
            if (e2 - e1 < Rational(1) && e1 > m - Rational(1) && e2 < m + Rational(1)) break;
            ++r;
        }
        Rational eps(Int(eta - 1), ipow(eta, static_cast<unsigned long>(sys.xi_depth + 1)));
        Rational a_pt = e1 + Rational(1) - m;  // in (0, 1]
        Rational b_pt = e2 - m;                // in [0, 1)
        std::vector<Rational> pts, tgt;
        if (b_pt > Rational(0)) {
            pts.push_back(b_pt);
            tgt.push_back(class_point_in(Rational(0), eps, eta, residue_class(b_pt, eta)));
        }
        if (a_pt < Rational(1)) {
            pts.push_back(a_pt);
            tgt.push_back(
                class_point_in(Rational(1) - eps, Rational(1), eta, residue_class(a_pt, eta)));
        }
        if (!pts.empty()) apply(Word::f_atom(tuple_transport_plain(pts, tgt, eta)));
        apply(Word::xi_atom(+1));
        if (p1.floor() != p2.floor() || p1.is_integer() || p2.is_integer())
            fail(Err::Internal, "contract: push through the integer failed");
    }
    if (!detail::interval_in_VZ(p1, p2, v1, v2)) {
        Rational mm(p1.floor());
        // Longest piece of (V+Z) inside the period (mm, mm+1).
        Rational best_a, best_b, best_len(-1);
        Rational base = mm - Rational(v1.floor());
        for (long dk = -1; dk <= 1; ++dk) {
            Rational k = base + Rational(dk);
            Rational a = std::max(v1 + k, mm);
            Rational b = std::min(v2 + k, mm + Rational(1));
            if (b - a > best_len) {
                best_len = b - a;
                best_a = a;
                best_b = b;
            }
        }
        if (!(best_len > Rational(0))) fail(Err::Internal, "contract: no target component");
        long r = 1;
        Rational P, Q;
        while (true) {
            Rational step = rat_pow(Int(eta), -r);
            P = step * Rational((p1 / step).floor());
            Q = step * Rational((p2 / step).ceil());
            if (P > mm && Q < mm + Rational(1)) break;
            ++r;
        }
        Rational Pf = P - mm, Qf = Q - mm, af = best_a - mm, bf = best_b - mm;
        if (Pf == Qf) {
            Rational w = class_point_in(af, bf, eta, residue_class(Pf, eta));
            apply(Word::f_atom(point_transport(Pf, w, eta)));
        } else {
            Rational w1 = class_point_in(af, bf, eta, residue_class(Pf, eta));
            Rational w2 = class_point_in(w1, bf, eta, residue_class(Qf, eta));
            apply(Word::f_atom(tuple_transport_plain({Pf, Qf}, {w1, w2}, eta)));
        }
    }
    if (!detail::interval_in_VZ(p1, p2, v1, v2))
        fail(Err::Internal, "contract: verification failed");
    return out;
}

// --- conjugation into Q_n --------------------------------------------------------

// Q_n word agreeing with the given word on (I + Z), built atom by atom with
// the commutator trick [k1, a] = (k1^-1 a^-1 k1) a where k1 contracts the
// support of a into the gap left by the image of I.
inline Word conj_in_q(const Word& g, const Rational& i1, const Rational& i2,
                      const GammaSystem& sys) {
    if (i2 < i1) fail(Err::DomainError, "conj_in_q: empty interval");
    if (!(i2 - i1 < Rational(1))) fail(Err::TooWide, "|I| >= 1");
    int n = sys.n;
    Word out = Word::empty(n);
    Rational j1 = i1, j2 = i2;
    for (const auto& a : g.atoms) {
        PeriodicPL am = realize_atom(a, n);
        if (am.is_identity()) continue;
        auto hull = detail::support_hull(support(am));
        if (!hull) fail(Err::TooWide, "atom support has no period gap");
        Word k1 = contract(hull->first, hull->second, j2, j1 + Rational(1), sys);
        Word aw = Word::empty(n);
        aw.append(a);
        out.append(Word::comm_atom(std::move(k1), std::move(aw)));
        j1 = am.evaluate(j1);
        j2 = am.evaluate(j2);
    }
    if (!agree_on(eval_word(out), eval_word(g), i1, i2))
        fail(Err::Internal, "conj_in_q: agreement failed");
    return out;
}

// --- special elements of Q_n ------------------------------------------------------

// The commutator [g, f1] with f1 special supported near 0 and g moving that
// support to 1/2: a special element of the derived subgroup.
inline Word special_in_q(const Rational& eps, const GammaSystem& sys) {
    if (!(eps > Rational(0) && eps < Rational(Int(1), Int(4))))
        fail(Err::DomainError, "special_in_q needs 0 < eps < 1/4");
    int n = sys.n;
    int eta = sys.eta;
    long k = 1;
    while (!(Rational(Int(n) * eta, ipow(eta, static_cast<unsigned long>(k))) < eps)) ++k;
    GammaElement f1 = xi_build(n, k);
    Word w1 = factor(f1, sys);
    Int q = ipow(eta, static_cast<unsigned long>(k));
    Rational half(Int(1), Int(2));
    Word gw =
        contract(Rational(-Int(eta), q), Rational(Int(n) * eta, q), half - eps, half + eps, sys);
    Word out = Word::empty(n);
    out.append(Word::comm_atom(std::move(gw), std::move(w1)));
    GammaElement check = member_gamma(eval_word(out), n);
    if (!is_special(check)) fail(Err::Internal, "special_in_q output not special");
    return out;
}

// --- translation number ------------------------------------------------------------

// The quasimorphism f -> lim 0.f^m / m, estimated by iteration and certified
// exactly when a periodic point x.f^p = x + q is found among the breakpoints.
struct RotationEstimate {
    Rational estimate;
    long iterations = 0;
    Rational error_bound;
    bool has_exact = false;
    Rational exact;
    long period = 0;
    Int translation;
    Rational witness;
};

inline RotationEstimate translation_number(const PeriodicPL& f, long m_max, long p_max = 16) {
    if (m_max < 1) fail(Err::DomainError, "translation_number needs m_max >= 1");
    RotationEstimate out;
    out.iterations = m_max;
    Rational x(0);
    for (long i = 0; i < m_max; ++i) x = f.evaluate(x);
    out.estimate = x / Rational(m_max);
    out.error_bound = Rational(Int(2), Int(m_max));
    std::vector<Rational> candidates{Rational(0)};
    for (const auto& p : f.nodes())
        if (p.x != Rational(1)) candidates.push_back(p.x);
    for (long p = 1; p <= p_max && !out.has_exact; ++p) {
        for (const auto& c : candidates) {
            Rational y = c;
            for (long i = 0; i < p; ++i) y = f.evaluate(y);
            if ((y - c).is_integer()) {
                out.has_exact = true;
                out.exact = (y - c) / Rational(p);
                out.period = p;
                out.translation = (y - c).num();
                out.witness = c;
                break;
            }
        }
    }
    return out;
}

// --- simplicity witness --------------------------------------------------------------

// For nontrivial f: finds x with fractional displacement, an interval U around
// it with (U+Z).f disjoint from U+Z, and two non-commuting commutator words
// supported in a deep cone inside U; then [h1,[f,h2]] = [h1,h2] exhibits a
// nontrivial element of F_eta' inside the normal closure of f.
inline std::pair<Word, Word> simplicity_witness(const Word& fword, const GammaSystem& sys) {
    int n = sys.n;
    int eta = sys.eta;
    PeriodicPL F = eval_word(fword);
    if (F.is_identity()) fail(Err::TrivialInput, "witness needs a nontrivial element");
    Rational x;
    bool found = false;
    const auto& pts = F.nodes();
    for (size_t i = 0; i + 1 < pts.size() && !found; ++i) {
        Rational xa = pts[i].x, xb = pts[i + 1].x;
        Rational da = pts[i].y - xa, db = pts[i + 1].y - xb;
        if (da == db) {
            if (!da.is_integer()) {
                x = (xa + xb) / Rational(2);
                found = true;
            }
        } else {
            Rational target = (da + db) / Rational(2);
            Rational offset = (db - da) / Rational(4);
            int guard = 0;
            while (target.is_integer()) {
                target += offset;
                offset /= Rational(2);
                if (++guard > 400) fail(Err::Internal, "witness: target search stuck");
            }
            x = xa + (target - da) / (db - da) * (xb - xa);
            found = true;
        }
    }
    if (!found) fail(Err::Internal, "witness: displacement is an integer constant");

    Rational theta = (F.evaluate(x) - x).frac();
    Rational dist = std::min(theta, Rational(1) - theta);
    Rational delta =
        std::min({dist / Rational(4), x / Rational(2), (Rational(1) - x) / Rational(2)});
    auto disjoint = [&](const Rational& dl) {
        Rational a1 = x - dl, a2 = x + dl;
        Rational b1 = F.evaluate(a1), b2 = F.evaluate(a2);
        for (Int k = (b1 - a2).floor() - 1; k <= (b2 - a1).ceil() + 1; ++k) {
            if (!(b2 - Rational(k) < a1 || a2 < b1 - Rational(k))) return false;
        }
        return true;
    };
    int guard = 0;
    while (!disjoint(delta)) {
        delta /= Rational(2);
        if (++guard > 1000) fail(Err::Internal, "witness: no disjoint interval");
    }

    // eta-cone inside (x - delta, x + delta).
    Rational lo = x - delta, hi = x + delta;
    Rational clo, chi;
    for (long d = 1;; ++d) {
        Rational step = rat_pow(Int(eta), -d);
        clo = step * Rational((lo / step).floor() + 1);
        chi = clo + step;
        if (clo > lo && chi < hi) break;
        if (d > 100000) fail(Err::Internal, "witness: cone search");
    }

    // A non-commuting pair of commutators of presentation generators.
    const std::vector<std::array<long, 4>> cands{{0, 1, 0, 2}, {0, 1, 1, 2}, {0, 2, 1, 3}};
    CompactPL A, B, C, D;
    bool chosen = false;
    for (const auto& cd : cands) {
        A = presentation_generator_map(cd[0], eta);
        B = presentation_generator_map(cd[1], eta);
        C = presentation_generator_map(cd[2], eta);
        D = presentation_generator_map(cd[3], eta);
        CompactPL H1 = Commutator{A, B}.value();
        CompactPL H2 = Commutator{C, D}.value();
        if (!Commutator{H1, H2}.value().is_identity()) {
            chosen = true;
            break;
        }
    }
    if (!chosen) fail(Err::Internal, "witness: no non-commuting commutator pair");

    auto embed_word = [&](const CompactPL& P, const CompactPL& Q) {
        Word wa = Word::empty(n);
        wa.append(Word::f_atom(cone_embed(P, clo, chi, eta)));
        Word wb = Word::empty(n);
        wb.append(Word::f_atom(cone_embed(Q, clo, chi, eta)));
        Word w = Word::empty(n);
        w.append(Word::comm_atom(std::move(wa), std::move(wb)));
        return w;
    };
    Word h1 = embed_word(A, B), h2 = embed_word(C, D);
    PeriodicPL H1 = eval_word(h1), H2 = eval_word(h2);
    auto commp = [](const PeriodicPL& P, const PeriodicPL& Q) {
        return P.inverse().compose(Q.inverse()).compose(P).compose(Q);
    };
    PeriodicPL c12 = commp(H1, H2);
    if (c12.is_identity()) fail(Err::Internal, "witness: embedded pair commutes");
    if (commp(H1, commp(F, H2)) != c12) fail(Err::Internal, "witness identity failed");
    return {h1, h2};
}

// --- normal generation -----------------------------------------------------------

// Z_n: all commutators of chain generators plus the two xi-commutators that
// survive the support arrangement. Every member is stably supported.
inline std::vector<Word> normal_gen_set(const GammaSystem& sys) {
    int n = sys.n;
    int eta = sys.eta;
    std::vector<Word> out;
    auto fword = [&](const CompactPL& f) {
        Word w = Word::empty(n);
        w.append(Word::f_atom(f));
        return w;
    };
    Word xiw = Word::empty(n);
    xiw.append(Word::xi_atom(+1));
    for (int i = 0; i < eta; ++i)
        for (int j = 0; j < eta; ++j) {
            Word w = Word::empty(n);
            w.append(Word::comm_atom(fword(sys.chain.psis[static_cast<size_t>(i)]),
                                     fword(sys.chain.psis[static_cast<size_t>(j)])));
            out.push_back(std::move(w));
        }
    for (int idx : {0, eta - 1}) {
        Word w = Word::empty(n);
        w.append(Word::comm_atom(xiw, fword(sys.chain.psis[static_cast<size_t>(idx)])));
        out.push_back(std::move(w));
    }
    for (const auto& w : out) {
        SupportSet s = support(eval_word(w));
        if (s.whole_line || !(s.total_length() < Rational(1)))
            fail(Err::Internal, "normal generator is not stably supported");
    }
    return out;
}

// --- the Belk picture (n = 2) ----------------------------------------------------

// kappa maps [2^k, 2^k+1] linearly onto [-(k+1), -k], reversing orientation;
// it conjugates t -> 2t to t -> t-1 and Gamma_2 to a group of maps of the
// positive reals commuting with doubling.
inline Rational belk_kappa(const Rational& x) {
    if (!(x > Rational(0))) fail(Err::DomainError, "kappa needs x > 0");
    long j = 0;
    while (rat_pow(Int(2), j) > x) --j;
    while (rat_pow(Int(2), j + 1) <= x) ++j;
    return Rational(1 - j) - x / rat_pow(Int(2), j);
}

inline Rational belk_kappa_inv(const Rational& y) {
    Rational ny = -y;
    long j = static_cast<long>(ny.is_integer() ? ny.num() : ny.floor());
    return rat_pow(Int(2), j) * (Rational(1 - j) - y);
}

struct BelkMap {
    long window = 3;
    std::vector<Point> pts;  // graph on [2^-K, 2^K]

    Rational evaluate(const Rational& x) const { return detail::eval_graph(pts, x); }

    std::string str() const {
        std::ostringstream os;
        os << "belk n=2 window=" << window << "\n";
        for (const auto& p : pts) os << p.x.str() << " " << p.y.str() << "\n";
        return os.str();
    }
};

inline BelkMap belk_transform(const GammaElement& g, long window = 3) {
    if (g.n != 2) fail(Err::UnsupportedBase, "the Belk conjugation is specific to n = 2");
    BelkMap out;
    out.window = window;
    Rational wlo = rat_pow(Int(2), -window), whi = rat_pow(Int(2), window);
    std::vector<Rational> xs;
    for (long j = -window; j <= window; ++j) xs.push_back(rat_pow(Int(2), j));
    auto push_from_line = [&](const Rational& b) {
        if (b >= Rational(-window) && b <= Rational(window)) {
            Rational x = belk_kappa_inv(b);
            if (x >= wlo && x <= whi) xs.push_back(x);
        }
    };
    // breakpoints of g, and preimages of integers (the breakpoints of kappa^-1).
    for (const auto& p : g.map.nodes()) {
        if (p.x == Rational(1)) continue;
        for (long m = -window - 1; m <= window + 1; ++m) push_from_line(p.x + Rational(m));
    }
    PeriodicPL ginv = g.map.inverse();
    for (long z = -window - 1; z <= window + 1; ++z) push_from_line(ginv.evaluate(Rational(z)));
    detail::sort_unique(xs);
    std::vector<Point> nodes;
    for (const auto& x : xs)
        nodes.push_back({x, belk_kappa_inv(g.map.evaluate(belk_kappa(x)))});
    for (size_t i = 0; i + 1 < nodes.size(); ++i)
        if (!(nodes[i].x < nodes[i + 1].x && nodes[i].y < nodes[i + 1].y))
            fail(Err::Internal, "belk transform graph not monotone");
    out.pts = detail::merge_collinear(std::move(nodes));
    return out;
}

// Slopes powers of 6 and breakpoints in Z[1/6] on the window.
inline bool belk_check(const BelkMap& b) {
    for (size_t i = 0; i + 1 < b.pts.size(); ++i) {
        if (i > 0 && !in_ring(b.pts[i].x, 6)) return false;
        Rational s = detail::segment_slope(b.pts[i], b.pts[i + 1]);
        if (s.num() != 1 && s.den() != 1) return false;
        for (Int v = s.num() == 1 ? s.den() : s.num(); v > 1; v /= 6)
            if (v % 6 != 0) return false;
    }
    return true;
}

// --- orbit signatures of tuples ----------------------------------------------------

// The class sequence of a circularly ordered tuple in Z[1/m] cap [0,1), in
// canonical (lexicographically least) rotation. The point 0 gets class m-1.
inline std::vector<OrbitClass> tuple_signature(const std::vector<Rational>& pts, int m) {
    std::vector<OrbitClass> cls;
    for (size_t i = 0; i < pts.size(); ++i) {
        const Rational& x = pts[i];
        if (!(x >= Rational(0) && x < Rational(1)))
            fail(Err::OutOfRange, x.str() + " not in [0,1)");
        if (!in_ring(x, m)) fail(Err::NotInRing, x.str());
        for (size_t j = i + 1; j < pts.size(); ++j)
            if (pts[j] == x) fail(Err::DuplicatePoint, x.str());
        long r = residue_class(x, m);
        cls.push_back(OrbitClass{r == 0 ? m - 1 : static_cast<int>(r)});
    }
    if (cls.size() > 1) {
        size_t best = 0;
        auto rot_less = [&](size_t a, size_t b) {
            for (size_t k = 0; k < cls.size(); ++k) {
                int u = cls[(a + k) % cls.size()].index;
                int v = cls[(b + k) % cls.size()].index;
                if (u != v) return u < v;
            }
            return false;
        };
        for (size_t i = 1; i < cls.size(); ++i)
            if (rot_less(i, best)) best = i;
        std::rotate(cls.begin(), cls.begin() + static_cast<long>(best), cls.end());
    }
    return cls;
}

}  // namespace qn
