#include <doctest.h>

#include <cmath>

#include "ipdsaw/rng.hpp"
#include "ipdsaw/stats.hpp"

using namespace ipdsaw;

TEST_CASE("distances") {
    const std::vector<double> s{1, 2, 3}, p{0.2, 0.5, 0.3}, q{0.5, 0.2, 0.3};
    CHECK(stats::ks_discrete(s, p, s, p) == 0.0);
    CHECK(stats::ks_discrete(s, p, s, q) == doctest::Approx(0.3));
    CHECK(stats::ks_discrete({1.0}, {1.0}, {2.0}, {1.0}) == doctest::Approx(1.0));
    CHECK(stats::total_variation(p, q) == doctest::Approx(0.3));
    CHECK(stats::total_variation({0.5, 0.5}, {0.5, 0.25, 0.25}) == doctest::Approx(0.25));
    CHECK(stats::ks_two_sample({1, 2, 3}, {3, 2, 1}) == 0.0);
    CHECK(stats::ks_two_sample({1, 2}, {3, 4}) == doctest::Approx(1.0));
    CHECK(stats::sup_distance({0, 1, 2}, {0, 1.5, 2}) == doctest::Approx(0.5));
}

TEST_CASE("chi-square") {
    const auto exact = stats::chi_square({25, 50, 25}, {0.25, 0.5, 0.25});
    CHECK(exact.statistic == doctest::Approx(0.0));
    CHECK(exact.p_value == doctest::Approx(1.0));
    const auto off = stats::chi_square({50, 50}, {0.25, 0.75});
    CHECK(off.statistic == doctest::Approx(25.0 + 625.0 / 75.0));
    CHECK(off.dof == 1);
    CHECK(off.p_value < 1e-6);
    // observations outside the listed cells are counted
    const auto spill = stats::chi_square({50, 50}, {0.5, 0.5}, 20);
    CHECK(spill.p_value < 1e-6);
}

TEST_CASE("fits") {
    std::vector<double> n, y, line;
    for (double v : {64.0, 128.0, 256.0, 512.0}) {
        n.push_back(v);
        y.push_back(0.7 * std::pow(v, -4.0 / 3.0));
        line.push_back(2.0 * v - 3.0);
    }
    const auto s = stats::loglog_slope(n, y);
    CHECK(std::abs(s.slope + 4.0 / 3.0) < 1e-12);
    CHECK(std::exp(s.intercept) == doctest::Approx(0.7));
    const auto f = stats::linear_fit(n, line);
    CHECK(f.slope == doctest::Approx(2.0));
    CHECK(f.intercept == doctest::Approx(-3.0));
    CHECK(f.se < 1e-10);
}

TEST_CASE("sample moments") {
    RngStream rng(12, 0);
    const int m = 1000000;
    Eigen::MatrixXd xs(m, 2);
    std::vector<double> z(m);
    for (int i = 0; i < m; ++i) {
        const double a = rng.normal(), b = rng.normal();
        xs(i, 0) = a;
        xs(i, 1) = 0.5 * a + std::sqrt(0.75) * b;
        z[static_cast<std::size_t>(i)] = a;
    }
    const auto c = stats::emp_cov(xs);
    CHECK(std::abs(c.cov(0, 0) - 1.0) < 4.0 * c.se(0, 0));
    CHECK(std::abs(c.cov(0, 1) - 0.5) < 4.0 * c.se(0, 1));
    CHECK(std::abs(c.cov(1, 1) - 1.0) < 4.0 * c.se(1, 1));
    CHECK(c.samples == static_cast<std::size_t>(m));
    const auto cross = stats::emp_cross_cov(xs.col(0), xs.col(1));
    CHECK(std::abs(cross.cov(0, 0) - 0.5) < 4.0 * cross.se(0, 0));
    const auto mean = stats::mean_se(z);
    CHECK(std::abs(mean.value) < 4.0 * mean.se);
    CHECK(mean.se == doctest::Approx(1e-3).epsilon(0.01));
    const auto r = stats::lag1_correlation(z);
    CHECK(std::abs(r.value) < 4.0 * r.se);
    std::vector<double> walk(10000);
    double s = 0.0;
    for (auto& v : walk) v = (s += rng.normal());
    CHECK(stats::lag1_correlation(walk).value > 0.9);
}
