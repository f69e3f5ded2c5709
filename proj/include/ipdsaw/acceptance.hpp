#pragma once

#include <string>
#include <vector>

#include "ipdsaw/experiments.hpp"

namespace ipdsaw {

struct AcceptanceResult {
    std::string id;
    std::string title;
    std::vector<Criterion> checks;
    double seconds = 0.0;

    bool pass() const;
};

std::vector<std::string> acceptance_ids();
std::vector<std::string> quick_acceptance_ids();

AcceptanceResult run_acceptance(const std::string& id, unsigned threads = 1);

// "A3 PASS|FAIL title (seconds)" followed by one indented line per check.
std::string format_result(const AcceptanceResult& r);

}  // namespace ipdsaw
