#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ipdsaw/rng.hpp"
#include "ipdsaw/thermo.hpp"

namespace ipdsaw {

// Centered Gaussian field on a grid with covariance k(min(s,t)),
// k(u) = int_0^u L''((1-x) h0 + h1) dx, optionally conditioned on
// xi(1) = 0 and a zero trapezoid integral over [0,1].
struct GaussianFieldSpec {
    Tilt tilt;
    double beta = 0.0;
    std::vector<double> grid;
    bool conditioned = false;
    Eigen::MatrixXd covariance;       // law of the (possibly conditioned) field
    Eigen::MatrixXd base_covariance;  // unconditioned covariance
    Eigen::MatrixXd constraints;      // rows: evaluation at 1, trapezoid weights
};

// k(u) in closed form.
double field_variance(double beta, const Tilt& tilt, double u);

GaussianFieldSpec xi_field(double beta, double q, const std::vector<double>& grid, bool conditioned);
GaussianFieldSpec xi_field_from_tilt(double beta, const Tilt& tilt, const std::vector<double>& grid,
                                     bool conditioned);

// Reusable sampler: Cholesky factor of the unconditioned covariance, plus the
// conditioning projection so constraints hold to rounding.
class FieldSampler {
public:
    explicit FieldSampler(const GaussianFieldSpec& spec);
    Eigen::VectorXd sample(RngStream& rng) const;

private:
    Eigen::MatrixXd factor_;
    Eigen::MatrixXd projection_;  // identity minus kriging map, when conditioned
    bool conditioned_;
};

Eigen::VectorXd sample_xi(const GaussianFieldSpec& spec, RngStream& rng);

}  // namespace ipdsaw
