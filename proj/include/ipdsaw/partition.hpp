#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ipdsaw {

inline constexpr std::int64_t kEngineLimit = 2048;

// log Z~_L (excess partition function, Z~_L = e^{-beta L} Z_L) for all L <= l_max,
// the constrained version (last stretch zero), and per-extension contributions.
struct PartitionCurve {
    double beta = 0.0;
    std::int64_t l_max = 0;
    std::vector<double> log_z;                     // index L
    std::vector<double> log_zc;                    // index L
    std::vector<std::vector<double>> log_contrib;  // [L][N], N = 1..L
};

// One streaming sweep over extensions; cost ~ l_max^3 / 6 cells.
PartitionCurve partition_curve(double beta, std::int64_t l_max);
double excess_partition(double beta, std::int64_t L);  // log Z~_L

struct ExtensionLaw {
    std::int64_t L = 0;
    double beta = 0.0;
    std::vector<double> probs;        // index N, 0 unused
    std::vector<double> log_contrib;  // index N
    double log_z = 0.0;

    double mean() const;
    std::int64_t argmax() const;  // smallest N on ties
    std::vector<double> cdf() const;
};

ExtensionLaw extension_law(const PartitionCurve& curve, std::int64_t L);
ExtensionLaw extension_law(double beta, std::int64_t L);

// CSV with header L,beta,N,prob,log_contrib.
std::string extension_law_csv(const ExtensionLaw& law);

// Pattern partition function Z^_t = sum_N Gamma^N P(G_N = t - N, T = N) with
// per-(t, N) masses and conditional second moments of the pattern displacement.
struct PatternCurve {
    double beta = 0.0;
    std::int64_t t_max = 0;
    std::vector<double> log_zhat;                // index t
    std::vector<std::vector<double>> log_mass;   // [t][N]
    std::vector<std::vector<double>> y2;         // [t][N], E[y^2 | sigma = t, nu = N]
};

PatternCurve pattern_curve(double beta, std::int64_t t_max);
double log_pattern_partition(double beta, std::int64_t t);
double pattern_partition(double beta, std::int64_t t);

struct RegenerativeConstants {
    double beta = 0.0;
    double f_tilde = 0.0;
    double c_renewal = 0.0;   // 1 / E sigma
    double e_beta = 0.0;      // E nu / E sigma
    double sigma_beta = 0.0;  // sqrt(E y^2 / E nu)
    double mean_sigma = 0.0;
    double mean_nu = 0.0;
    double mean_y2 = 0.0;
    double phi_at_root = 0.0;
    std::int64_t t_max = 0;
    double tail_bound = 0.0;
};

inline constexpr std::int64_t kDefaultPatternTmax = 768;

RegenerativeConstants extended_constants(double beta, std::int64_t t_max = kDefaultPatternTmax);
RegenerativeConstants extended_constants(const PatternCurve& curve);

}  // namespace ipdsaw
