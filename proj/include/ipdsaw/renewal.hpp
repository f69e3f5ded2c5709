#pragma once

#include <cstdint>
#include <vector>

namespace ipdsaw {

// Exact laws of the excursion renewal structure at criticality.
//
// An excursion runs from a start value until the first step i with V_{i-1} != 0
// and V_{i-1} V_i <= 0; X = number of steps + sum of |V| over the visited values.
struct CritRenewal {
    double beta = 0.0;
    std::int64_t n_max = 0;
    std::vector<double> p_x_mu;      // P_mu(X = n), index n
    std::vector<double> p_x_zero;    // P_0(X = n)
    std::vector<double> u_mu;        // P_mu(n in renewal set), u_mu[0] = 1
    std::vector<double> u_zero;      // delayed renewal started from 0
    std::vector<double> p_tau_mu;    // P_mu(tau = n)
    std::vector<double> log_z;       // renewal-form log Z~_L, index L <= n_max - 1; only at beta_c
    double tail_mu = 0.0;            // P_mu(X > n_max) from mass conservation
    std::vector<double> vtau_law;    // P_mu(|V_tau| = k | X <= n_max), k = 0..
};

CritRenewal crit_renewal(std::int64_t n_max, double beta = 0.0);

}  // namespace ipdsaw
