#include <doctest.h>

#include "ipdsaw/errors.hpp"
#include "ipdsaw/gaussian_field.hpp"
#include "ipdsaw/stats.hpp"

using namespace ipdsaw;

namespace {

std::vector<double> grid(int m) {
    std::vector<double> g;
    for (int i = 1; i <= m; ++i) g.push_back(static_cast<double>(i) / m);
    return g;
}

}  // namespace

TEST_CASE("field covariance") {
    const double beta = 2.0, q = 0.54;
    const auto spec = xi_field(beta, q, {0.001, 0.2, 0.5, 0.9}, false);
    const auto t0 = solve_tilt(beta, q);
    // midpoint rule for k(u) / u at small u
    CHECK(spec.covariance(0, 3) / 0.001 ==
          doctest::Approx(log_mgf(beta, (1.0 - 0.0005) * t0.h0 + t0.h1, 2)).epsilon(1e-4));
    for (Eigen::Index i = 0; i < 4; ++i)
        for (Eigen::Index j = 0; j < 4; ++j) {
            CHECK(spec.covariance(i, j) == spec.covariance(j, i));
            CHECK(spec.covariance(i, j) == spec.covariance(std::min(i, j), std::min(i, j)));
        }
    // k(u) against the integral of L'' along the tilt path
    const auto t = solve_tilt(beta, q);
    std::vector<double> nodes, weights;
    gauss_legendre_unit(64, nodes, weights);
    for (double u : {0.2, 0.5, 0.9}) {
        double s = 0.0;
        for (std::size_t k = 0; k < nodes.size(); ++k) s += u * weights[k] * log_mgf(beta, (1.0 - u * nodes[k]) * t.h0 + t.h1, 2);
        CHECK(field_variance(beta, t, u) == doctest::Approx(s).epsilon(1e-12));
    }
    CHECK_THROWS_AS(xi_field(beta, q, {0.0, 0.5}, false), DomainError);
    CHECK_THROWS_AS(xi_field(beta, q, {0.5, 0.4}, false), DomainError);
    CHECK_THROWS_AS(xi_field(beta, q, {0.2, 0.5}, true), DomainError);
}

TEST_CASE("conditioned field") {
    const auto spec = xi_field(2.0, 0.54, grid(50), true);
    // Schur complement of the augmented covariance of (xi, C xi)
    const Eigen::MatrixXd& K = spec.base_covariance;
    const Eigen::MatrixXd& C = spec.constraints;
    const Eigen::MatrixXd S = C * K * C.transpose();
    const Eigen::MatrixXd schur = K - K * C.transpose() * S.inverse() * C * K;
    CHECK((schur - spec.covariance).cwiseAbs().maxCoeff() < 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(spec.covariance);
    CHECK(es.eigenvalues().minCoeff() > -1e-10);
    FieldSampler sampler(spec);
    RngStream rng(3, 0);
    for (int i = 0; i < 200; ++i) {
        const auto xi = sampler.sample(rng);
        CHECK(std::abs(xi(xi.size() - 1)) < 1e-12);
        CHECK(std::abs((C.row(1) * xi)(0)) < 1e-12);
    }
}

TEST_CASE("unconditioned samples reproduce the covariance") {
    const auto spec = xi_field(2.0, 0.54, {0.1, 0.3, 0.5, 0.7, 0.9}, false);
    FieldSampler sampler(spec);
    RngStream rng(5, 0);
    Eigen::MatrixXd xs(100000, 5);
    for (Eigen::Index i = 0; i < xs.rows(); ++i) xs.row(i) = sampler.sample(rng).transpose();
    const auto ec = stats::emp_cov(xs, true);
    for (Eigen::Index i = 0; i < 5; ++i)
        for (Eigen::Index j = 0; j < 5; ++j) CHECK(std::abs(ec.cov(i, j) - spec.covariance(i, j)) <= 3.0 * ec.se(i, j));
    RngStream a(9, 1), b(9, 1);
    CHECK(sample_xi(spec, a) == sample_xi(spec, b));
}
