#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "ipdsaw/rng.hpp"

namespace ipdsaw::stats {

struct Estimate {
    double value = 0.0;
    double se = 0.0;
};

Estimate mean_se(const std::vector<double>& xs);
double variance(const std::vector<double>& xs);
// Pearson correlation of consecutive entries with its null standard error 1/sqrt(n).
Estimate lag1_correlation(const std::vector<double>& xs);

// Kolmogorov-Smirnov distance between two discrete laws on a common sorted support.
double ks_discrete(const std::vector<double>& support_a, const std::vector<double>& prob_a,
                   const std::vector<double>& support_b, const std::vector<double>& prob_b);
double ks_two_sample(std::vector<double> a, std::vector<double> b);

// Total variation distance; shorter vector padded with zeros.
double total_variation(const std::vector<double>& p, const std::vector<double>& q);

struct ChiSquare {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 0.0;
};

// Pearson chi-square of counts against expected probabilities; adjacent cells are
// pooled until every expected count reaches min_expected. Unlisted mass and the
// `overflow` observations outside the listed cells form a final cell.
ChiSquare chi_square(const std::vector<double>& counts, const std::vector<double>& probs, double overflow = 0.0,
                     double min_expected = 5.0);

struct Slope {
    double slope = 0.0;
    double se = 0.0;
    double intercept = 0.0;
};

Slope linear_fit(const std::vector<double>& x, const std::vector<double>& y);
Slope loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct Covariance {
    Eigen::MatrixXd cov;
    Eigen::MatrixXd se;  // entrywise standard error
    std::size_t samples = 0;
};

// Rows are samples, columns are coordinates. `centered` treats the mean as known zero.
Covariance emp_cov(const Eigen::MatrixXd& samples, bool centered = false);
// Cross covariance between column blocks a and b (same sample rows).
Covariance emp_cross_cov(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

double sup_distance(const std::vector<double>& a, const std::vector<double>& b);

struct MutualInformation {
    double estimate = 0.0;
    double null_q99 = 0.0;
    bool below = false;
};

// Plug-in mutual information of two discrete labels against a permutation null.
MutualInformation mi_permutation_test(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b,
                                      int permutations, RngStream& rng);

}  // namespace ipdsaw::stats
