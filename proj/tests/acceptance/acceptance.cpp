// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include "bpl/acceptance.hpp"
#include "bpl/parallel.hpp"

#include <iostream>

int main() {
    auto results = bpl::run_acceptance(bpl::default_threads(), [](const bpl::CriterionResult& r) {
        std::cout << bpl::format_criterion(r) << std::endl;
    });
    int failed = 0;
    for (const auto& r : results) failed += !r.pass;
    std::cout << (results.size() - failed) << "/" << results.size() << " criteria passed" << std::endl;
    return failed ? 1 : 0;
}
