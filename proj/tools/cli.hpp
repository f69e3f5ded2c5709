#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "ipdsaw/polymer.hpp"

namespace ipdsaw::cli {

enum ExitCode : int {
    ok = 0,
    usage = 1,
    solver = 2,
    budget = 3,
    criteria_failed = 4,
};

// Everything needed to repeat a run. Zero means "use the command default".
struct RunConfig {
    std::string command;
    std::string target;  // sample kind or experiment name
    double beta = 0.0;
    std::vector<Int> L;
    double q = 0.0;
    int n = 0;
    std::size_t replicas = 0;
    std::uint64_t seed = 20240611;
    unsigned threads = 0;
    std::string out;
    std::string cache;
    std::uint64_t budget = 0;
    bool quick = false;
};

nlohmann::json to_json(const RunConfig& c);
RunConfig config_from_json(const nlohmann::json& j);

// Parses argv (flags override a --config file) and runs the command.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace ipdsaw::cli
