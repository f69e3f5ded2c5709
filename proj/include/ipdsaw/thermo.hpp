#pragma once

#include <Eigen/Dense>
#include <vector>

namespace ipdsaw {

struct ModelParams {
    double beta;
    double x;           // e^{-beta/2}
    double c_beta;      // (1+x)/(1-x)
    double gamma_beta;  // c_beta e^{-beta}
};

ModelParams model_params(double beta);

// Critical inverse temperature: Gamma_beta = 1.
double beta_c();

// Log moment generating function of one increment and its h-derivatives.
double log_mgf(double beta, double h, int order);

enum class MgfPart { value, gradient, hessian };

struct Tilt {
    double h0 = 0.0;
    double h1 = 0.0;
    double residual = 0.0;
    int iterations = 0;
};

struct MixedMgf {
    double value = 0.0;
    Eigen::Vector2d gradient = Eigen::Vector2d::Zero();
    Eigen::Matrix2d hessian = Eigen::Matrix2d::Zero();
};

inline constexpr int kQuadratureNodes = 64;

// Integral over u in [0,1] of log_mgf(u h0 + h1), with gradient and Hessian in (h0, h1).
MixedMgf log_mgf_mixed(double beta, const Tilt& tilt, int nodes = kQuadratureNodes);
// Gauss-Legendre nodes and weights mapped to [0,1].
void gauss_legendre_unit(int n, std::vector<double>& nodes, std::vector<double>& weights);

struct TiltOptions {
    double tolerance = 1e-11;  // on |grad - (q, 0)|, scaled by 1 + q
    int max_iterations = 200;
    int nodes = kQuadratureNodes;
};

// Solves grad L_Lambda(H) = (q, 0).
Tilt solve_tilt(double beta, double q, const TiltOptions& opts = {});
// Discrete version with step tilts h_i = (1 - i/n) h0 + h1, i = 1..n.
Tilt solve_tilt_discrete(double beta, int n, double q, const TiltOptions& opts = {});
// Per-step tilts h_1..h_n of a discrete tilt.
std::vector<double> step_tilts(const Tilt& tilt, int n);

// rho_beta(q) = q h0 - L_Lambda(H(q,0)).
double rho(double beta, double q);
// G(a) = a (log Gamma_beta - rho(1/a^2)) and its derivative.
double g_tilde(double beta, double a);
double g_tilde_prime(double beta, double a);
double a_beta(double beta);

enum class RateKind { rho, gtilde };
double collapse_rate(double beta, double a_or_q, RateKind which);

// Profile Wulff shape gamma*_q(t); the envelope shape is half of it.
double wulff(double beta, double q, double t);
double wulff_from_tilt(double beta, const Tilt& tilt, double t);
std::vector<double> wulff_profile(double beta, double q, const std::vector<double>& ts);

}  // namespace ipdsaw
