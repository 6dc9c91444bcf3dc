// qn: exact computation in the Higman-Thompson groups F_n, the periodic PL
// groups Gamma_n, and their derived subgroups Q_n. All machine output is in
// canonical rational text formats; no floating point anywhere.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "qn/suites.hpp"

using namespace qn;

namespace {

std::string slurp(const std::string& path) {
    if (path.empty()) {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream f(path);
    if (!f) fail(Err::ParseError, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::vector<Rational> parse_list(const std::string& s) {
    std::vector<Rational> out;
    size_t pos = 0;
    while (pos <= s.size()) {
        size_t c = s.find(',', pos);
        if (c == std::string::npos) c = s.size();
        std::string tok = s.substr(pos, c - pos);
        size_t a = tok.find_first_not_of(" \t");
        size_t b = tok.find_last_not_of(" \t");
        if (a != std::string::npos) out.push_back(Rational::parse(tok.substr(a, b - a + 1)));
        pos = c + 1;
        if (c == s.size()) break;
    }
    return out;
}

ParsedPLMap read_map(const std::string& in_path) {
    std::string text = slurp(in_path);
    std::istringstream is(text);
    return parse_plmap(is);
}

void require_interval(const std::vector<Rational>& v, const char* what) {
    if (v.size() != 2) fail(Err::ParseError, std::string(what) + " needs two rationals a,b");
}

std::string plot_csv(const std::vector<Point>& pts) {
    std::ostringstream os;
    for (const auto& p : pts)
        os << p.x.str() << " " << p.y.str() << " " << decimal_string(p.x, 10) << " "
           << decimal_string(p.y, 10) << "\n";
    return os.str();
}

std::string plot_svg(const std::vector<Point>& pts) {
    // Presentation only; exactness lives in the CSV.
    const int W = 480, H = 480, M = 40;
    Rational xmin = pts.front().x, xmax = pts.back().x;
    Rational ymin = pts.front().y, ymax = pts.back().y;
    auto sx = [&](const Rational& x) {
        return decimal_string(Rational(M) + Rational(W - 2 * M) * (x - xmin) / (xmax - xmin), 3);
    };
    auto sy = [&](const Rational& y) {
        return decimal_string(Rational(H - M) - Rational(H - 2 * M) * (y - ymin) / (ymax - ymin),
                              3);
    };
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    os << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "  <polyline fill=\"none\" stroke=\"black\" stroke-width=\"1.5\" points=\"";
    for (const auto& p : pts) os << sx(p.x) << "," << sy(p.y) << " ";
    os << "\"/>\n";
    for (const auto& p : pts) {
        os << "  <circle cx=\"" << sx(p.x) << "\" cy=\"" << sy(p.y)
           << "\" r=\"3\" fill=\"crimson\"><title>(" << p.x.str() << ", " << p.y.str()
           << ")</title></circle>\n";
    }
    os << "</svg>\n";
    return os.str();
}

Word certificate_word(const CertifiedMap& cm, int word_n) {
    Word w = Word::empty(word_n);
    for (const auto& c : cm.factors) {
        Word wa = Word::empty(word_n);
        wa.append(Word::f_atom(c.a));
        Word wb = Word::empty(word_n);
        wb.append(Word::f_atom(c.b));
        w.append(Word::comm_atom(std::move(wa), std::move(wb)));
    }
    return w;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "qn: exact arithmetic in the PL homeomorphism groups F_n, Gamma_n and Q_n"};
    app.require_subcommand(1);

    int n = 2;
    long depth = -1, miter = 32, piter = 16, max_index = 6, window = 3;
    uint64_t seed = kDefaultSeed;
    std::string in_path, xarg, sarg, targ, uarg, varg, iarg, format = "csv", suite;
    std::string eps_arg = "1/5";
    bool to_map = false;

    auto add_common = [&](CLI::App* sc, bool with_n = true) {
        if (with_n) sc->add_option("--n", n, "group parameter n >= 2");
        sc->add_option("--in", in_path, "read input from a file instead of stdin");
    };

    auto* c_eval = app.add_subcommand("eval", "evaluate a plmap block at a point");
    c_eval->add_option("x", xarg, "point")->required();
    add_common(c_eval);
    c_eval->callback([&] {
        ParsedPLMap p = read_map(in_path);
        Rational x = Rational::parse(xarg);
        std::cout << (p.periodic ? p.per->evaluate(x) : p.compact->evaluate(x)).str() << "\n";
    });

    auto* c_compose =
        app.add_subcommand("compose", "compose two plmap blocks (x.(fg) = (x.f).g)");
    add_common(c_compose);
    c_compose->callback([&] {
        std::string text = slurp(in_path);
        std::istringstream is(text);
        ParsedPLMap a = parse_plmap(is), b = parse_plmap(is);
        if (a.periodic != b.periodic) fail(Err::DomainError, "compose needs maps of one kind");
        if (a.periodic)
            std::cout << encode(a.per->compose(*b.per), a.n);
        else
            std::cout << encode(a.compact->compose(*b.compact), a.n);
    });

    auto* c_invert = app.add_subcommand("invert", "invert a plmap block");
    add_common(c_invert);
    c_invert->callback([&] {
        ParsedPLMap p = read_map(in_path);
        if (p.periodic)
            std::cout << encode(p.per->inverse(), p.n);
        else
            std::cout << encode(p.compact->inverse(), p.n);
    });

    auto* c_memf = app.add_subcommand("member-f", "test membership in F_n");
    add_common(c_memf);
    c_memf->callback([&] {
        ParsedPLMap p = read_map(in_path);
        if (p.periodic) fail(Err::DomainError, "member-f expects a compact map");
        if (!member_Fn(*p.compact, n))
            fail(Err::NotInFn, "slopes or breakpoints leave F_" + std::to_string(n));
        std::cout << "true\n";
    });

    auto* c_memg = app.add_subcommand("member-gamma", "test membership in Gamma_n");
    add_common(c_memg);
    c_memg->callback([&] {
        ParsedPLMap p = read_map(in_path);
        if (!p.periodic) fail(Err::DomainError, "member-gamma expects a periodic map");
        member_gamma(*p.per, n);
        std::cout << "accepted\n";
    });

    auto* c_pair = app.add_subcommand("pair", "convert between F_n maps and pair diagrams");
    add_common(c_pair);
    c_pair->add_flag("--to-map", to_map, "read two subdiv lines, emit the plmap block");
    c_pair->callback([&] {
        std::string text = slurp(in_path);
        if (to_map) {
            std::istringstream is(text);
            std::string l1, l2;
            if (!std::getline(is, l1) || !std::getline(is, l2))
                fail(Err::ParseError, "expected two subdiv lines");
            PairDiagram pd(Subdivision::parse(l1), Subdivision::parse(l2));
            std::cout << encode(pair_to_map(pd), pd.base_n());
        } else {
            std::istringstream is(text);
            ParsedPLMap p = parse_plmap(is);
            if (p.periodic) fail(Err::DomainError, "pair expects a compact map");
            std::cout << map_to_pair(*p.compact, n).str();
        }
    });

    auto* c_factor =
        app.add_subcommand("factor", "factor a Gamma_n element over {xi} u F_eta");
    add_common(c_factor);
    c_factor->callback([&] {
        ParsedPLMap p = read_map(in_path);
        if (!p.periodic) fail(Err::DomainError, "factor expects a periodic map");
        GammaSystem sys = make_system(n);
        std::cout << encode(factor(member_gamma(*p.per, n), sys));
    });

    auto* c_mush = app.add_subcommand(
        "mush", "diagonal correction g with g^-1 f special (needs 0.f in (0,1))");
    add_common(c_mush);
    c_mush->callback([&] {
        ParsedPLMap p = read_map(in_path);
        if (!p.periodic) fail(Err::DomainError, "mush expects a periodic map");
        CompactPL g = mush(member_gamma(*p.per, n));
        std::cout << encode(g, n * (n + 1));
    });

    auto* c_xi = app.add_subcommand("xi", "emit the special element xi for Gamma_n");
    add_common(c_xi);
    c_xi->add_option("--depth", depth, "support depth k (default: minimal with support < 1/3)");
    c_xi->callback([&] {
        GammaElement xi = xi_build(n, depth);
        std::cout << encode(xi.map, n);
    });

    auto* c_sq =
        app.add_subcommand("special-q", "special element of Q_n as a commutator word");
    add_common(c_sq);
    c_sq->add_option("--eps", eps_arg, "support radius (0 < eps < 1/4)");
    c_sq->callback([&] {
        GammaSystem sys = make_system(n);
        std::cout << encode(special_in_q(Rational::parse(eps_arg), sys));
    });

    auto* c_rot = app.add_subcommand("rotnum", "translation number of a Gamma_n element");
    add_common(c_rot);
    c_rot->add_option("--m", miter, "iterations for the estimate");
    c_rot->add_option("--p", piter, "max period searched for an exact certificate");
    c_rot->callback([&] {
        ParsedPLMap p = read_map(in_path);
        if (!p.periodic) fail(Err::DomainError, "rotnum expects a periodic map");
        RotationEstimate r = translation_number(*p.per, miter, piter);
        if (r.has_exact)
            std::cout << "exact " << r.exact.str() << " (p=" << r.period
                      << ",q=" << r.translation.str() << ")\n";
        else
            std::cout << "estimate " << r.estimate.str() << " error " << r.error_bound.str()
                      << " (m=" << r.iterations << ")\n";
    });

    auto* c_oc = app.add_subcommand("orbit-class", "orbit class O_i of a point of Z[1/n]");
    c_oc->add_option("--n", n, "base")->required();
    c_oc->add_option("x", xarg, "point in (0,1)")->required();
    c_oc->callback([&] { std::cout << orbit_class(Rational::parse(xarg), n).str() << "\n"; });

    auto* c_om = app.add_subcommand("orbit-map", "element of F_n carrying x to i/n");
    c_om->add_option("--n", n, "base")->required();
    c_om->add_option("x", xarg, "point in (0,1)")->required();
    c_om->callback([&] { std::cout << encode(orbit_map(Rational::parse(xarg), n), n); });

    auto* c_tr = app.add_subcommand(
        "transport", "F_n' transport between matching tuples, with commutator certificate");
    c_tr->add_option("--n", n, "base")->required();
    c_tr->add_option("--from", sarg, "comma-separated source tuple")->required();
    c_tr->add_option("--to", targ, "comma-separated target tuple")->required();
    c_tr->callback([&] {
        CertifiedMap cm = tuple_transport(parse_list(sarg), parse_list(targ), n);
        std::cout << encode(cm.map, n) << "\n" << encode(certificate_word(cm, n));
    });

    auto* c_ct = app.add_subcommand("contract", "word carrying (U+Z) into (V+Z)");
    c_ct->add_option("--n", n, "group parameter")->required();
    c_ct->add_option("--u", uarg, "closed interval a,b with |U| < 1")->required();
    c_ct->add_option("--v", varg, "open target interval c,d")->required();
    c_ct->callback([&] {
        auto u = parse_list(uarg), v = parse_list(varg);
        require_interval(u, "--u");
        require_interval(v, "--v");
        GammaSystem sys = make_system(n);
        std::cout << encode(contract(u[0], u[1], v[0], v[1], sys));
    });

    auto* c_cq = app.add_subcommand(
        "conj-q", "certified Q_n word agreeing with the input word on I+Z");
    c_cq->add_option("--n", n, "group parameter")->required();
    c_cq->add_option("--i", iarg, "closed interval a,b with |I| < 1")->required();
    add_common(c_cq, false);
    c_cq->callback([&] {
        auto I = parse_list(iarg);
        require_interval(I, "--i");
        std::string text = slurp(in_path);
        std::istringstream is(text);
        Word g = parse_word(is);
        GammaSystem sys = make_system(n);
        std::cout << encode(conj_in_q(g, I[0], I[1], sys));
    });

    auto* c_wit = app.add_subcommand(
        "witness", "simplicity witness pair (h1, h2) for a certified nontrivial word");
    c_wit->add_option("--n", n, "group parameter")->required();
    add_common(c_wit, false);
    c_wit->callback([&] {
        std::string text = slurp(in_path);
        std::istringstream is(text);
        Word f = parse_word(is);
        GammaSystem sys = make_system(n);
        auto [h1, h2] = simplicity_witness(f, sys);
        std::cout << encode(h1) << "\n" << encode(h2);
    });

    auto* c_belk =
        app.add_subcommand("belk", "conjugate a Gamma_2 element to the positive reals");
    add_common(c_belk);
    c_belk->add_option("--window", window, "periods 2^-K .. 2^K to materialize");
    c_belk->callback([&] {
        ParsedPLMap p = read_map(in_path);
        if (!p.periodic) fail(Err::DomainError, "belk expects a periodic map");
        BelkMap b = belk_transform(member_gamma(*p.per, p.n == 0 ? 2 : p.n), window);
        std::cout << b.str();
    });

    auto* c_sig = app.add_subcommand("signature", "orbit-class signature of a circular tuple");
    c_sig->add_option("--n", n, "base (use eta for Q_n tuples)")->required();
    c_sig->add_option("points", sarg, "comma-separated points of Z[1/n] in [0,1)");
    c_sig->callback([&] {
        auto sig = tuple_signature(sarg.empty() ? std::vector<Rational>{} : parse_list(sarg), n);
        for (size_t i = 0; i < sig.size(); ++i)
            std::cout << sig[i].str() << (i + 1 < sig.size() ? " " : "");
        std::cout << "\n";
    });

    auto* c_plot = app.add_subcommand("plot", "emit CSV (exact) or SVG (presentation) graph");
    add_common(c_plot);
    c_plot->add_option("--format", format, "csv|svg")->check(CLI::IsMember({"csv", "svg"}));
    c_plot->callback([&] {
        ParsedPLMap p = read_map(in_path);
        const std::vector<Point>& pts = p.periodic ? p.per->nodes() : p.compact->nodes();
        std::cout << (format == "svg" ? plot_svg(pts) : plot_csv(pts));
    });

    auto* c_ver = app.add_subcommand("verify", "run a named verification suite");
    c_ver->add_option("suite", suite,
                      "one of: axioms breakpoints-mod orbits transport gamma-membership "
                      "special factorization relations rotnum conj-q witness belk chain")
        ->required();
    c_ver->add_option("--n", n, "restrict to one base (default: the suite's spread)");
    c_ver->add_option("--seed", seed, "seed for the randomized cases");
    c_ver->add_option("--depth", depth, "tau-move depth (breakpoints-mod)");
    c_ver->add_option("--m", miter, "iteration count (rotnum)");
    c_ver->add_option("--max-index", max_index, "largest generator index (relations)");
    c_ver->callback([&] {
        SuiteOptions opt;
        opt.seed = seed;
        opt.n = c_ver->count("--n") ? n : 0;
        opt.depth = depth > 0 ? depth : 3;
        opt.m = miter;
        opt.max_index = max_index;
        SuiteReport rep = run_suite(suite, opt);
        std::cout << "suite " << rep.name << ": cases=" << rep.cases
                  << " failures=" << rep.failures << "\n";
        for (const auto& m : rep.messages) std::cout << "  " << m << "\n";
        std::cerr << "elapsed " << rep.seconds << "s\n";
        if (!rep.ok()) fail(Err::Internal, "suite reported failures");
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const QnError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "Internal: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
