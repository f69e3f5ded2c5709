#pragma once

#include <cstdint>

#include "ipdsaw/rng.hpp"

namespace ipdsaw {

struct CritConstants {
    double beta = 0.0;
    double var_v1 = 0.0;          // E V_1^2 = 2x/(1-x)^2
    double c_big = 0.0;           // var_v1^{-1/2}
    double airy_integral = 0.0;   // int_0^inf u^{-3} w(u^{-3/2}) du
    double c_tail = 0.0;          // n^{4/3} P(X = n) -> c_tail
    double z_prefactor = 0.0;     // L^{2/3} Z_L -> z_prefactor
    double c_tau = 0.0;           // n^{3/2} P_mu(tau = n) -> c_tau

    // Same limits recomputed through the harmonic function h(v) = v + x/(1-x)
    // of the walk killed at a sign change (E_mu h = c_beta).
    double c_tau_ladder = 0.0;        // c_beta / sqrt(2 pi E V_1^2)
    double c_tail_ladder = 0.0;       // c_tau_ladder * airy_integral
    double z_prefactor_ladder = 0.0;  // (1 + x) / (sqrt(12 pi x) * airy_integral)
};

// Density of the Brownian excursion area (Airy distribution).
double airy_density(double a);
// E[A^p] under the Airy distribution, by quadrature of the density.
double airy_moment(double p);

double excursion_area_density(double beta, double t);
CritConstants crit_constants(double beta);

// Invariant law of the walk value at sign-change times.
double mu_beta(double beta, std::int64_t k);
std::int64_t sample_mu_beta(double beta, RngStream& rng);

}  // namespace ipdsaw
