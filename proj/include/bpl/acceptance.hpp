#pragma once

#include <functional>
#include <string>
#include <vector>

namespace bpl {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
};

// Runs the ten acceptance checks in order. `report` sees each result as soon
// as it is known. `threads` is used where work is chunked; check 10 always
// compares 1 and 8 threads.
std::vector<CriterionResult> run_acceptance(unsigned threads,
                                            const std::function<void(const CriterionResult&)>& report = {});

std::string format_criterion(const CriterionResult& r);

}  // namespace bpl
