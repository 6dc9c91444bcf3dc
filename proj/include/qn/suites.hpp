#pragma once

#include <chrono>
#include <random>
#include <set>

#include "qn/gammaq.hpp"

namespace qn {

// --- deterministic randomness for the verification suites ------------------------

constexpr uint64_t kDefaultSeed = 20240810;

struct SRng {
    std::mt19937_64 gen;
    explicit SRng(uint64_t seed) : gen(seed) {}

    size_t index(size_t bound) { return static_cast<size_t>(gen() % bound); }
    long range(long lo, long hi) {
        return lo + static_cast<long>(gen() % static_cast<uint64_t>(hi - lo + 1));
    }
    bool flip() { return (gen() & 1) != 0; }

    // Random point of Z[1/n] in (0,1) of depth <= maxdepth.
    Rational nadic(int n, long maxdepth) {
        long k = range(1, maxdepth);
        Int den = ipow(n, static_cast<unsigned long>(k));
        Int num = 1 + Int(gen() % static_cast<uint64_t>(static_cast<unsigned long>(den - 1)));
        return Rational(num, den);
    }
};

inline CompactPL random_fn_word(SRng& rng, const ChainSet& chain, int len) {
    CompactPL f = CompactPL::identity();
    for (int i = 0; i < len; ++i) {
        CompactPL g = chain.psis[rng.index(chain.psis.size())];
        f = f.compose(rng.flip() ? g.inverse() : g);
    }
    return f;
}

inline PeriodicPL random_gamma_elem(SRng& rng, const GammaSystem& sys, int len) {
    PeriodicPL f = PeriodicPL::identity();
    for (int i = 0; i < len; ++i) {
        PeriodicPL g;
        size_t pick = rng.index(sys.chain.psis.size() + 1);
        if (pick == sys.chain.psis.size())
            g = sys.xi.map;
        else
            g = diagonal_lift(sys.chain.psis[pick], sys.n).map;
        f = f.compose(rng.flip() ? g.inverse() : g);
    }
    return f;
}

inline Word random_gamma_atom_word(SRng& rng, const GammaSystem& sys, int len) {
    Word w = Word::empty(sys.n);
    for (int i = 0; i < len; ++i) {
        size_t pick = rng.index(sys.chain.psis.size() + 1);
        if (pick == sys.chain.psis.size()) {
            w.append(Word::xi_atom(rng.flip() ? 1 : -1));
        } else {
            CompactPL g = sys.chain.psis[pick];
            if (rng.flip()) g = g.inverse();
            w.append(Word::f_atom(g));
        }
    }
    return w;
}

// --- suite harness -----------------------------------------------------------------

struct SuiteReport {
    std::string name;
    long cases = 0;
    long failures = 0;
    std::vector<std::string> messages;
    double seconds = 0.0;

    bool ok() const { return failures == 0; }
};

struct SuiteOptions {
    uint64_t seed = kDefaultSeed;
    int n = 0;  // 0 = run the suite's own spread of bases
    long depth = 3;
    long m = 32;
    long max_index = 6;
};

namespace detail {

struct Checker {
    SuiteReport rep;

    void check(bool ok, const std::string& what) {
        ++rep.cases;
        if (!ok) {
            ++rep.failures;
            if (rep.messages.size() < 25) rep.messages.push_back(what);
        }
    }

    template <typename F>
    void check_run(F&& f, const std::string& what) {
        ++rep.cases;
        try {
            if (!f()) {
                ++rep.failures;
                if (rep.messages.size() < 25) rep.messages.push_back(what);
            }
        } catch (const std::exception& e) {
            ++rep.failures;
            if (rep.messages.size() < 25)
                rep.messages.push_back(what + ": " + std::string(e.what()));
        }
    }
};

inline std::vector<int> bases_or(const SuiteOptions& opt, std::vector<int> def) {
    if (opt.n != 0) return {opt.n};
    return def;
}

}  // namespace detail

// 1. exact/plmap algebra: group axioms, inverse round trips, canonical-form
//    idempotence over >= 1000 randomized words.
inline SuiteReport suite_axioms(const SuiteOptions& opt) {
    detail::Checker ck;
    SRng rng(opt.seed);
    for (int t = 0; t < 1000; ++t) {
        long p = rng.range(-1000, 1000);
        long q = rng.range(1, 999);
        long k = rng.range(1, 60);
        ck.check(Rational(Int(k * p), Int(k * q)) == Rational(Int(p), Int(q)),
                 "rational canonicalization");
    }
    for (int n : {2, 3, 4}) {
        for (long i = -20; i <= 20; ++i)
            for (long j = -20; j <= 20; ++j) {
                Rational q = rat_pow(Int(n), i) * rat_pow(Int(n + 1), j);
                SlopeExponents se = slope_factor(q, n);
                ck.check(se.i == i && se.j == j, "slope_factor round trip");
            }
    }
    ChainSet c2 = chain_generators(2), c3 = chain_generators(3);
    GammaSystem sys = make_system(2);
    for (int t = 0; t < 250; ++t) {
        const ChainSet& c = t % 2 ? c2 : c3;
        CompactPL f = random_fn_word(rng, c, 4);
        CompactPL g = random_fn_word(rng, c, 4);
        CompactPL h = random_fn_word(rng, c, 4);
        ck.check(f.compose(g).compose(h) == f.compose(g.compose(h)), "compact associativity");
        ck.check(f.compose(f.inverse()).is_identity() && f.inverse().compose(f).is_identity(),
                 "compact inverses");
        // canonical idempotence: insert a redundant collinear node
        if (f.nodes().size() >= 2) {
            std::vector<Point> pts = f.nodes();
            Rational mx = (pts[0].x + pts[1].x) / Rational(2);
            Rational my = f.evaluate(mx);
            pts.insert(pts.begin() + 1, Point{mx, my});
            ck.check(CompactPL(pts) == f, "compact canonicalization idempotence");
        }
    }
    for (int t = 0; t < 150; ++t) {
        PeriodicPL f = random_gamma_elem(rng, sys, 3);
        PeriodicPL g = random_gamma_elem(rng, sys, 3);
        PeriodicPL h = random_gamma_elem(rng, sys, 3);
        ck.check(f.compose(g).compose(h) == f.compose(g.compose(h)), "periodic associativity");
        ck.check(f.compose(f.inverse()).is_identity(), "periodic inverses");
        Rational x = rng.nadic(6, 3);
        ck.check(f.evaluate(x + Rational(1)) == f.evaluate(x) + Rational(1),
                 "commutes with translation");
        // support of a product is inside the closed union of supports
        SupportSet sf = support(f), sg = support(g), sfg = support(f.compose(g));
        if (!sf.whole_line && !sg.whole_line && !sfg.whole_line) {
            auto inside = [&](const Rational& pt) {
                for (const auto& s : {sf, sg})
                    for (const auto& [a, b] : s.intervals) {
                        Rational u = pt.frac();
                        if ((u >= a && u <= b) || (u + Rational(1) >= a && u + Rational(1) <= b))
                            return true;
                    }
                return false;
            };
            bool ok = true;
            for (const auto& [a, b] : sfg.intervals) {
                Rational mid = (a + b) / Rational(2);
                if (f.compose(g).evaluate(mid) != mid && !inside(mid)) ok = false;
            }
            ck.check(ok, "support of product inside union");
        }
        std::istringstream in(encode(f, 2));
        ck.check(*parse_plmap(in).per == f, "serialization round trip");
    }
    ck.rep.name = "axioms";
    return ck.rep;
}

// 2. Exhaustive verification of the breakpoint congruences over all
//    subdivisions reachable in <= depth tau-moves.
inline SuiteReport suite_breakpoints_mod(const SuiteOptions& opt) {
    detail::Checker ck;
    for (int n : detail::bases_or(opt, {2, 3})) {
        std::set<Subdivision> all;
        std::vector<Subdivision> frontier{Subdivision::trivial(n)};
        all.insert(frontier[0]);
        for (long step = 0; step < opt.depth; ++step) {
            std::vector<Subdivision> next;
            for (const auto& s : frontier)
                for (size_t k = 0; k < s.size(); ++k) {
                    Subdivision t = s.tau(k);
                    if (all.insert(t).second) next.push_back(t);
                }
            frontier = std::move(next);
        }
        long mm = n - 1;
        auto cls = [&](const Rational& x) {
            return x == Rational(1) ? 1 % mm : (x == Rational(0) ? 0 : residue_class(x, n));
        };
        std::vector<Subdivision> list(all.begin(), all.end());
        for (const auto& s : list) {
            auto b = s.boundaries();
            // (1) cone endpoints: m2 = m1 + 1
            for (size_t i = 0; i + 1 < b.size(); ++i)
                ck.check((cls(b[i]) + 1) % mm == cls(b[i + 1]) % mm, "part 1: " + s.str());
            // (2) breakpoint at position i lies in O_{i mod n-1}
            for (size_t i = 1; i + 1 < b.size(); ++i)
                ck.check(cls(b[i]) % mm == static_cast<long>(i) % mm, "part 2: " + s.str());
            // (3) contiguous runs: l = m2 - m1 mod n-1
            for (size_t i = 0; i < b.size(); ++i)
                for (size_t j = i + 1; j < b.size(); ++j)
                    ck.check((cls(b[j]) - cls(b[i]) - static_cast<long>(j - i)) % mm == 0,
                             "part 3: " + s.str());
        }
        // (4) positions of a shared breakpoint agree mod n-1
        for (const auto& s1 : list)
            for (const auto& s2 : list) {
                auto b1 = s1.boundaries(), b2 = s2.boundaries();
                for (size_t i = 1; i + 1 < b1.size(); ++i)
                    for (size_t j = 1; j + 1 < b2.size(); ++j)
                        if (b1[i] == b2[j])
                            ck.check((static_cast<long>(i) - static_cast<long>(j)) % mm == 0,
                                     "part 4");
            }
        // (5) pair-diagram images preserve the residue
        for (const auto& s1 : list)
            for (const auto& s2 : list) {
                if (s1.size() != s2.size()) continue;
                auto b1 = s1.boundaries(), b2 = s2.boundaries();
                for (size_t i = 1; i + 1 < b1.size(); ++i)
                    ck.check((cls(b1[i]) - cls(b2[i])) % mm == 0, "part 5");
            }
    }
    ck.rep.name = "breakpoints-mod";
    return ck.rep;
}

// 3. orbit_map lands on i/n for every point of depth <= 4; orbit classes are
//    invariant under random F_n words.
inline SuiteReport suite_orbits(const SuiteOptions& opt) {
    detail::Checker ck;
    SRng rng(opt.seed);
    for (int n : detail::bases_or(opt, {2, 3})) {
        for (long k = 1; k <= 4; ++k) {
            Int den = ipow(n, static_cast<unsigned long>(k));
            for (Int m = 1; m < den; ++m) {
                Rational x(m, den);
                int i = orbit_class(x, n).index;
                ck.check_run(
                    [&] { return orbit_map(x, n).evaluate(x) == Rational(Int(i), Int(n)); },
                    "orbit_map at " + x.str());
            }
        }
        ChainSet chain = chain_generators(n);
        for (int t = 0; t < 250; ++t) {
            CompactPL w = random_fn_word(rng, chain, 5);
            for (int s = 0; s < 4; ++s) {
                Rational x = rng.nadic(n, 4);
                ck.check(orbit_class(w.evaluate(x), n).index == orbit_class(x, n).index,
                         "class invariance at " + x.str());
            }
        }
    }
    ck.rep.name = "orbits";
    return ck.rep;
}

// 4. tuple_transport on random matching-signature tuple pairs: exact transport,
//    trivial germs, commutator certificates.
inline SuiteReport suite_transport(const SuiteOptions& opt) {
    detail::Checker ck;
    SRng rng(opt.seed);
    for (int n : detail::bases_or(opt, {2, 3})) {
        for (int t = 0; t < 100; ++t) {
            size_t len = 1 + rng.index(4);
            Int den = ipow(n, 4);
            long dmax = static_cast<long>(den);
            std::set<long> picks;
            while (picks.size() < len) picks.insert(rng.range(1, dmax - 1));
            std::vector<Rational> s, tt;
            for (long m : picks) s.push_back(Rational(Int(m), den));
            bool built = true;
            long prev = 0;
            for (size_t i = 0; i < len && built; ++i) {
                long want = residue_class(s[i], n);
                std::vector<long> cands;
                for (long m = prev + 1; m < dmax - static_cast<long>(len - 1 - i); ++m)
                    if ((m - want) % (n - 1) == 0) cands.push_back(m);
                if (cands.empty()) {
                    built = false;
                    break;
                }
                prev = cands[rng.index(cands.size())];
                tt.push_back(Rational(Int(prev), den));
            }
            if (!built) {
                --t;
                continue;
            }
            ck.check_run(
                [&] {
                    CertifiedMap cm = tuple_transport(s, tt, n);
                    for (size_t i = 0; i < len; ++i)
                        if (cm.map.evaluate(s[i]) != tt[i]) return false;
                    if (!fprime_necessary(cm.map, n)) return false;
                    if (cm.recompose() != cm.map) return false;
                    bool moved = false;
                    for (size_t i = 0; i < len; ++i) moved = moved || s[i] != tt[i];
                    if (moved && cm.factors.empty()) return false;
                    return true;
                },
                "tuple transport case");
        }
    }
    ck.rep.name = "transport";
    return ck.rep;
}

// 5. Gamma membership: the named accept/reject cases and closure under the
//    group operations.
inline SuiteReport suite_gamma_membership(const SuiteOptions& opt) {
    detail::Checker ck;
    SRng rng(opt.seed);
    ck.check_run([&] { return member_gamma(PeriodicPL::identity(), 2).membership_checked; },
                 "identity accepted");
    ck.check_run(
        [&] {
            GammaElement xi = xi_build(2, 2);
            if (xi.at_zero() != Rational::parse("5/18")) return false;
            if (xi.map.one_sided_slope(Rational::parse("-1/6"), Side::Right) != Rational(6))
                return false;
            if (xi.map.one_sided_slope(Rational(0), Side::Left) != Rational(2)) return false;
            if (xi.map.one_sided_slope(Rational(0), Side::Right) != Rational::parse("1/6"))
                return false;
            return true;
        },
        "xi accepted with segment data (6, 2, 1/6) and 0.xi = 5/18");
    ck.check_run(
        [&] {
            try {
                member_gamma(PeriodicPL({{Rational(0), Rational(1)}, {Rational(1), Rational(2)}}),
                             2);
                return false;
            } catch (const QnError& e) {
                return e.code() == Err::CrossingCountMismatch;
            }
        },
        "unit translation rejected with CrossingCountMismatch");
    GammaSystem sys = make_system(2);
    for (int t = 0; t < 250; ++t) {
        PeriodicPL f = random_gamma_elem(rng, sys, 4);
        PeriodicPL g = random_gamma_elem(rng, sys, 4);
        ck.check_run([&] { return member_gamma(f.compose(g), 2).membership_checked; },
                     "closure under composition");
        ck.check_run([&] { return member_gamma(f.inverse(), 2).membership_checked; },
                     "closure under inverse");
    }
    ck.rep.name = "gamma-membership";
    return ck.rep;
}

// 6. Special elements: xi_build and special_in_q are special; random special
//    elements land in O_{eta-1}.
inline SuiteReport suite_special(const SuiteOptions& opt) {
    detail::Checker ck;
    SRng rng(opt.seed);
    for (int n : {2, 3, 4})
        ck.check_run([&] { return is_special(xi_build(n)); },
                     "xi_build special for n=" + std::to_string(n));
    for (int n : {2, 3}) {
        GammaSystem sys = make_system(n);
        Word w = special_in_q(Rational(Int(1), Int(5)), sys);
        ck.check_run([&] { return is_special(member_gamma(eval_word(w), n)); },
                     "special_in_q special for n=" + std::to_string(n));
        ck.check(w.all_commutators(), "special_in_q certificate shape");
    }
    GammaSystem sys2 = make_system(2);
    long produced = 0;
    int guard = 0;
    while (produced < 200 && ++guard < 4000) {
        PeriodicPL f = random_gamma_elem(rng, sys2, 3);
        if (rng.flip()) f = f.compose(sys2.xi.map);
        Rational y = f.evaluate(Rational(0));
        if (!(y > Rational(0) && y < Rational(1))) continue;
        ++produced;
        ck.check_run(
            [&] {
                CompactPL g = mush(GammaElement{f, 2, true});
                GammaElement sp =
                    member_gamma(diagonal_lift(g, 2).map.inverse().compose(f), 2);
                if (!is_special(sp)) return false;
                return orbit_class(sp.at_zero(), 6).index == 5;
            },
            "special landing class");
    }
    ck.check(produced == 200, "generated 200 random special elements");
    ck.rep.name = "special";
    return ck.rep;
}

// 7. Factorization over <xi, F_eta>: exact round trip on random words.
inline SuiteReport suite_factorization(const SuiteOptions& opt) {
    detail::Checker ck;
    SRng rng(opt.seed);
    GammaSystem sys = make_system(opt.n == 0 ? 2 : opt.n);
    for (int t = 0; t < 500; ++t) {
        int len = 1 + static_cast<int>(rng.index(8));
        PeriodicPL g = random_gamma_elem(rng, sys, len);
        ck.check_run(
            [&] {
                Word w = factor(member_gamma(g, sys.n), sys);
                return eval_word(w) == g;
            },
            "factor round trip, word length " + std::to_string(len));
    }
    ck.rep.name = "factorization";
    return ck.rep;
}

// 8. The infinite-presentation relations f_i^-1 f_j f_i = f_{j+n-1}.
inline SuiteReport suite_relations(const SuiteOptions& opt) {
    detail::Checker ck;
    for (int n : detail::bases_or(opt, {2, 3})) {
        for (long i = 0; i <= opt.max_index; ++i)
            for (long j = i + 1; j <= opt.max_index; ++j) {
                ck.check_run(
                    [&] {
                        PairDiagram fi = presentation_generator(i, n);
                        PairDiagram fj = presentation_generator(j, n);
                        PairDiagram fi_inv = map_to_pair(pair_to_map(fi).inverse(), n);
                        return multiply_pairs(multiply_pairs(fi_inv, fj), fi) ==
                               presentation_generator(j + n - 1, n);
                    },
                    "relation i=" + std::to_string(i) + " j=" + std::to_string(j) +
                        " n=" + std::to_string(n));
            }
    }
    ck.rep.name = "relations";
    return ck.rep;
}

// 9. Rotation numbers: exact certificates at fixed points, the Cauchy bound,
//    homogeneity on certified cases, and the 2/m error bound.
inline SuiteReport suite_rotnum(const SuiteOptions& opt) {
    detail::Checker ck;
    SRng rng(opt.seed);
    GammaSystem sys = make_system(2);
    for (int n : {2, 3}) {
        GammaElement xi = xi_build(n);
        RotationEstimate r = translation_number(xi.map, opt.m, 8);
        ck.check(r.has_exact && r.exact == Rational(0) && r.period == 1,
                 "fixed point certifies 0 for xi, n=" + std::to_string(n));
    }
    std::vector<PeriodicPL> certified;
    std::vector<Rational> certified_tau;
    for (int t = 0; t < 100; ++t) {
        PeriodicPL f = random_gamma_elem(rng, sys, 3);
        for (long m : {8L, 16L, 32L}) {
            Rational a(0), b(0);
            for (long i = 0; i < m; ++i) a = f.evaluate(a);
            b = a;
            for (long i = 0; i < m; ++i) b = f.evaluate(b);
            Rational e1 = a / Rational(m), e2 = b / Rational(2 * m);
            ck.check((e1 - e2).abs() <= Rational(Int(3), Int(2 * m)), "Cauchy bound m=" +
                                                                           std::to_string(m));
        }
        RotationEstimate r = translation_number(f, opt.m, 6);
        if (r.has_exact) {
            ck.check((r.estimate - r.exact).abs() <= r.error_bound,
                     "estimate within 2/m of the certificate");
            certified.push_back(f);
            certified_tau.push_back(r.exact);
        }
    }
    ck.check(!certified.empty(), "some exact certificates found");
    for (size_t i = 0; i < certified.size() && i < 20; ++i) {
        for (long k : {2L, 3L}) {
            PeriodicPL fk = PeriodicPL::identity();
            for (long j = 0; j < k; ++j) fk = fk.compose(certified[i]);
            RotationEstimate rk = translation_number(fk, opt.m, 12);
            if (rk.has_exact)
                ck.check(rk.exact == certified_tau[i] * Rational(k),
                         "homogeneity tau(f^k) = k tau(f)");
        }
    }
    ck.rep.name = "rotnum";
    return ck.rep;
}

// 10. conj_in_q: exact agreement on I + Z with all-commutator certificates.
inline SuiteReport suite_conj_q(const SuiteOptions& opt) {
    detail::Checker ck;
    SRng rng(opt.seed);
    GammaSystem sys = make_system(opt.n == 0 ? 2 : opt.n);
    for (int t = 0; t < 100; ++t) {
        Word g = random_gamma_atom_word(rng, sys, 1 + static_cast<int>(rng.index(5)));
        Rational a = rng.nadic(sys.eta, 2);
        Rational b = a + Rational(Int(1 + static_cast<long>(rng.index(8))), ipow(sys.eta, 2));
        if (b >= a + Rational(1)) b = a + Rational(Int(1), Int(2));
        ck.check_run(
            [&] {
                Word h = conj_in_q(g, a, b, sys);
                if (!h.all_commutators()) return false;
                return agree_on(eval_word(h), eval_word(g), a, b);
            },
            "conj_in_q case " + std::to_string(t));
    }
    ck.rep.name = "conj-q";
    return ck.rep;
}

// 11. The simplicity witness identity [h1,[f,h2]] = [h1,h2] on random
//     certified nontrivial words.
inline SuiteReport suite_witness(const SuiteOptions& opt) {
    detail::Checker ck;
    SRng rng(opt.seed);
    GammaSystem sys = make_system(opt.n == 0 ? 2 : opt.n);
    std::vector<Word> pool;
    for (long d : {5L, 7L, 9L, 11L}) pool.push_back(special_in_q(Rational(Int(1), Int(d)), sys));
    {
        std::vector<Word> zs = normal_gen_set(sys);
        for (const auto& z : zs)
            if (!eval_word(z).is_identity()) pool.push_back(z);
    }
    long done = 0;
    int guard = 0;
    while (done < 50 && ++guard < 500) {
        Word f = Word::empty(sys.n);
        size_t parts = 1 + rng.index(2);
        for (size_t i = 0; i < parts; ++i) f.append_word(pool[rng.index(pool.size())]);
        PeriodicPL F = eval_word(f);
        if (F.is_identity()) continue;
        ++done;
        ck.check_run(
            [&] {
                auto [h1, h2] = simplicity_witness(f, sys);
                PeriodicPL H1 = eval_word(h1), H2 = eval_word(h2);
                auto comm = [](const PeriodicPL& a, const PeriodicPL& b) {
                    return a.inverse().compose(b.inverse()).compose(a).compose(b);
                };
                PeriodicPL c12 = comm(H1, H2);
                if (c12.is_identity()) return false;
                return comm(H1, comm(F, H2)) == c12;
            },
            "witness case " + std::to_string(done));
    }
    ck.check(done == 50, "generated 50 nontrivial certified words");
    ck.rep.name = "witness";
    return ck.rep;
}

// 12. The Belk conjugation: slopes in 6^Z, breakpoints in Z[1/6], commutation
//     with doubling at sampled points.
inline SuiteReport suite_belk(const SuiteOptions& opt) {
    detail::Checker ck;
    SRng rng(opt.seed);
    GammaSystem sys = make_system(2);
    long window = 3;
    Rational wlo = rat_pow(Int(2), -window), whi = rat_pow(Int(2), window);
    for (int t = 0; t < 20; ++t) {
        PeriodicPL g = random_gamma_elem(rng, sys, 3);
        ck.check_run(
            [&] {
                BelkMap b = belk_transform(GammaElement{g, 2, true}, window);
                if (!belk_check(b)) return false;
                long sampled = 0;
                for (long k = 1; sampled < 50 && k < 4000; ++k) {
                    Rational x(Int(k), Int(36));
                    if (x < wlo || x * Rational(2) > whi) continue;
                    ++sampled;
                    if (b.evaluate(x * Rational(2)) != b.evaluate(x) * Rational(2)) return false;
                }
                return sampled == 50;
            },
            "belk case " + std::to_string(t));
    }
    ck.rep.name = "belk";
    return ck.rep;
}

// 13. Chain generating sets: interval pattern and the fast inequality, exact.
inline SuiteReport suite_chain(const SuiteOptions& opt) {
    detail::Checker ck;
    for (int n : detail::bases_or(opt, {2, 3, 6})) {
        ck.check_run(
            [&] {
                ChainSet c = chain_generators(n);
                if (!c.chain_ok || !c.fast_ok) return false;
                for (const auto& f : c.psis)
                    if (!member_Fn(f, n)) return false;
                for (size_t i = 0; i < c.psis.size(); ++i) {
                    SupportSet s = support(c.psis[i]);
                    if (s.intervals.size() != 1 || !(s.intervals[0] == c.supports[i]))
                        return false;
                }
                return c.fast_image >= c.fast_y;
            },
            "chain set for n=" + std::to_string(n));
    }
    // The Gamma-arranged chains clear the support of xi.
    for (int n : {2, 3}) {
        ck.check_run(
            [&] {
                GammaSystem sys = make_system(n);
                SupportSet sxi = support(sys.xi.map);
                for (size_t i = 0; i < sys.chain.supports.size(); ++i) {
                    const auto& [a, b] = sys.chain.supports[i];
                    bool meets = false;
                    for (const auto& [xa, xb] : sxi.intervals) {
                        for (long shift : {0L, -1L, 1L}) {
                            Rational lo = xa + Rational(shift), hi = xb + Rational(shift);
                            if (a < hi && lo < b) meets = true;
                        }
                    }
                    bool should_meet = i == 0 || i + 1 == sys.chain.supports.size();
                    if (meets != should_meet) return false;
                }
                return true;
            },
            "Supp(xi) meets Supp(psi_i) exactly for i in {1, eta}, n=" + std::to_string(n));
    }
    ck.rep.name = "chain";
    return ck.rep;
}

inline std::vector<std::string> suite_names() {
    return {"axioms",   "breakpoints-mod", "orbits",  "transport", "gamma-membership",
            "special",  "factorization",   "relations", "rotnum",  "conj-q",
            "witness",  "belk",            "chain"};
}

inline SuiteReport run_suite(const std::string& name, const SuiteOptions& opt) {
    auto t0 = std::chrono::steady_clock::now();
    SuiteReport rep;
    if (name == "axioms")
        rep = suite_axioms(opt);
    else if (name == "breakpoints-mod")
        rep = suite_breakpoints_mod(opt);
    else if (name == "orbits")
        rep = suite_orbits(opt);
    else if (name == "transport")
        rep = suite_transport(opt);
    else if (name == "gamma-membership")
        rep = suite_gamma_membership(opt);
    else if (name == "special")
        rep = suite_special(opt);
    else if (name == "factorization")
        rep = suite_factorization(opt);
    else if (name == "relations")
        rep = suite_relations(opt);
    else if (name == "rotnum")
        rep = suite_rotnum(opt);
    else if (name == "conj-q")
        rep = suite_conj_q(opt);
    else if (name == "witness")
        rep = suite_witness(opt);
    else if (name == "belk")
        rep = suite_belk(opt);
    else if (name == "chain")
        rep = suite_chain(opt);
    else
        fail(Err::UnknownSuite, "no suite named '" + name + "'");
    rep.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

}  // namespace qn
