#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "ipdsaw/polymer.hpp"

namespace ipdsaw {

// Where a reference value comes from.
enum class ReferenceSource {
    limit_theorem,  // asymptotic statement; finite-size tolerance chosen here
    identity,       // exact closed form or defining property
    oracle,         // independent computation (enumeration, DP, quadrature)
};

std::string to_string(ReferenceSource s);

struct Criterion {
    std::string id;
    std::string description;
    double measured = std::numeric_limits<double>::quiet_NaN();
    double se = std::numeric_limits<double>::quiet_NaN();
    double reference = std::numeric_limits<double>::quiet_NaN();
    ReferenceSource source = ReferenceSource::identity;
    double threshold = 0.0;
    std::string rule;  // how measured, reference and threshold are compared
    bool pass = false;
    std::string note;
};

struct Curve {
    std::string name;
    std::vector<double> x, y, yerr;
};

struct ExperimentParams {
    double beta = 0.0;
    std::vector<Int> sizes;
    double q = 0.0;
    int n = 0;
    std::size_t replicas = 0;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::uint64_t budget = 0;
};

nlohmann::json to_json(const ExperimentParams& p);
ExperimentParams params_from_json(const nlohmann::json& j);

struct ExperimentReport {
    std::string name;
    ExperimentParams params;
    std::vector<Criterion> criteria;
    std::vector<Curve> curves;
    nlohmann::json extra = nlohmann::json::object();  // monitored quantities
    double wall_seconds = 0.0;                       // kept out of to_json

    bool passed() const;
    // Deterministic content; wall time lives in metadata_json.
    nlohmann::json to_json() const;
    nlohmann::json metadata_json() const;
};

// CSV with header x,y,yerr.
std::string curve_csv(const Curve& c);

// Criterion helpers. Relative rule: |m - r| / |r| < t. Absolute: |m - r| < t.
// Band: |m - r| <= t * se. Below: m < t.
Criterion relative_criterion(std::string id, std::string description, double measured, double reference,
                             double tolerance, ReferenceSource source);
Criterion absolute_criterion(std::string id, std::string description, double measured, double reference,
                             double tolerance, ReferenceSource source);
Criterion band_criterion(std::string id, std::string description, double measured, double se, double reference,
                         double k, ReferenceSource source);
Criterion below_criterion(std::string id, std::string description, double measured, double bound,
                          ReferenceSource source);

using ExperimentFn = std::function<ExperimentReport(const ExperimentParams&)>;

std::vector<std::string> experiment_names();
ExperimentParams default_params(const std::string& name);
ExperimentReport run_experiment(const std::string& name, const ExperimentParams& params);

ExperimentReport ext_lln(const ExperimentParams& p);
ExperimentReport crit_extension(const ExperimentParams& p);
ExperimentReport crit_prefactor(const ExperimentParams& p);
ExperimentReport collapsed_extension(const ExperimentParams& p);
ExperimentReport wulff_shape(const ExperimentParams& p);
ExperimentReport fluctuations(const ExperimentParams& p);
ExperimentReport renewal_tail(const ExperimentParams& p);

}  // namespace ipdsaw
