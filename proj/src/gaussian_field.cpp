#include "ipdsaw/gaussian_field.hpp"

#include <cmath>
#include <string>

#include "ipdsaw/errors.hpp"

namespace ipdsaw {

double field_variance(double beta, const Tilt& tilt, double u) {
    if (std::abs(tilt.h0) < 1e-14) return u * log_mgf(beta, tilt.h1, 2);
    return (log_mgf(beta, tilt.h0 + tilt.h1, 1) - log_mgf(beta, (1.0 - u) * tilt.h0 + tilt.h1, 1)) / tilt.h0;
}

GaussianFieldSpec xi_field(double beta, double q, const std::vector<double>& grid, bool conditioned) {
    return xi_field_from_tilt(beta, solve_tilt(beta, q), grid, conditioned);
}

GaussianFieldSpec xi_field_from_tilt(double beta, const Tilt& tilt, const std::vector<double>& grid,
                                     bool conditioned) {
    if (grid.empty()) throw DomainError("empty field grid");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 0.0 && grid[i] <= 1.0)) throw DomainError("field grid must lie in (0,1]");
        if (i > 0 && !(grid[i] > grid[i - 1])) throw DomainError("field grid must be increasing");
    }
    if (conditioned && grid.back() != 1.0) throw DomainError("conditioned field grid must end at 1");
    GaussianFieldSpec spec;
    spec.tilt = tilt;
    spec.beta = beta;
    spec.grid = grid;
    spec.conditioned = conditioned;
    const auto m = static_cast<Eigen::Index>(grid.size());
    std::vector<double> k(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) k[i] = field_variance(beta, tilt, grid[i]);
    spec.base_covariance.resize(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j)
            spec.base_covariance(i, j) = k[static_cast<std::size_t>(std::min(i, j))];
    spec.covariance = spec.base_covariance;
    if (!conditioned) return spec;

    // trapezoid rule on {0} U grid with xi(0) = 0
    spec.constraints = Eigen::MatrixXd::Zero(2, m);
    spec.constraints(0, m - 1) = 1.0;
    double prev = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
        const double t = grid[static_cast<std::size_t>(i)];
        const double next = (i + 1 < m) ? grid[static_cast<std::size_t>(i + 1)] : t;
        spec.constraints(1, i) = 0.5 * (next - prev);
        prev = t;
    }
    const Eigen::MatrixXd& K = spec.base_covariance;
    const Eigen::MatrixXd& C = spec.constraints;
    const Eigen::MatrixXd KCt = K * C.transpose();
    const Eigen::Matrix2d S = C * KCt;
    spec.covariance = K - KCt * S.ldlt().solve(KCt.transpose());
    spec.covariance = 0.5 * (spec.covariance + spec.covariance.transpose());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(spec.covariance, Eigen::EigenvaluesOnly);
    const double smallest = es.eigenvalues().minCoeff();
    const double tol = 1e-10 * std::max(1.0, es.eigenvalues().maxCoeff());
    if (smallest < -tol)
        throw SolverError("conditioned covariance not PSD, smallest eigenvalue " + std::to_string(smallest),
                          smallest);
    return spec;
}

FieldSampler::FieldSampler(const GaussianFieldSpec& spec) : conditioned_(spec.conditioned) {
    Eigen::LLT<Eigen::MatrixXd> llt(spec.base_covariance);
    if (llt.info() != Eigen::Success) {
        // fall back to a symmetric square root
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(spec.base_covariance);
        const double smallest = es.eigenvalues().minCoeff();
        if (smallest < -1e-10 * std::max(1.0, es.eigenvalues().maxCoeff()))
            throw SolverError("covariance not PSD, smallest eigenvalue " + std::to_string(smallest), smallest);
        factor_ = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
    } else {
        factor_ = llt.matrixL();
    }
    if (conditioned_) {
        const Eigen::MatrixXd& K = spec.base_covariance;
        const Eigen::MatrixXd& C = spec.constraints;
        const Eigen::MatrixXd KCt = K * C.transpose();
        const Eigen::Matrix2d S = C * KCt;
        const auto m = K.rows();
        projection_ = Eigen::MatrixXd::Identity(m, m) - KCt * S.ldlt().solve(C);
    }
}

Eigen::VectorXd FieldSampler::sample(RngStream& rng) const {
    Eigen::VectorXd z(factor_.cols());
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
    Eigen::VectorXd x = factor_ * z;
    if (conditioned_) x = projection_ * x;
    return x;
}

Eigen::VectorXd sample_xi(const GaussianFieldSpec& spec, RngStream& rng) {
    return FieldSampler(spec).sample(rng);
}

}  // namespace ipdsaw
