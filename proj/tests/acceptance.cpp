// Acceptance harness: runs each named verification suite once with its
// default parameters and prints one pass/fail line per criterion.

#include <cstdio>
#include <string>

#include "qn/suites.hpp"

int main(int argc, char** argv) {
    qn::SuiteOptions opt;
    if (argc > 1) opt.seed = std::stoull(argv[1]);
    const std::vector<std::string> names = qn::suite_names();
    int failed = 0;
    for (size_t i = 0; i < names.size(); ++i) {
        qn::SuiteReport rep;
        bool threw = false;
        std::string err;
        try {
            rep = qn::run_suite(names[i], opt);
        } catch (const std::exception& e) {
            threw = true;
            err = e.what();
        }
        bool ok = !threw && rep.ok();
        std::printf("[%2zu/%zu] %s criterion '%s': %ld cases, %ld failures (%.2fs)\n", i + 1,
                    names.size(), ok ? "PASS" : "FAIL", names[i].c_str(), rep.cases,
                    rep.failures, rep.seconds);
        if (threw) std::printf("        aborted: %s\n", err.c_str());
        for (const auto& m : rep.messages) std::printf("        %s\n", m.c_str());
        if (!ok) ++failed;
    }
    if (failed == 0)
        std::printf("acceptance: all %zu criteria pass\n", names.size());
    else
        std::printf("acceptance: %d criteria FAILED\n", failed);
    return failed;
}
