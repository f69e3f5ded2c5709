#pragma once

#include <cstdint>
#include <vector>

#include "ipdsaw/dp.hpp"
#include "ipdsaw/polymer.hpp"
#include "ipdsaw/rng.hpp"

namespace ipdsaw {

// Exact draws from the polymer measure for any length up to `l_max`, by
// backward sampling through a walk-area table with n + g <= l_max.
class ExactSampler {
public:
    ExactSampler(double beta, Int l_max, std::size_t memory_budget = std::size_t{2} << 30);
    // Adopts a free table with n_max = g_max = length_cap = l_max, e.g. from the disk cache.
    explicit ExactSampler(DpTable table);

    PolymerPath sample(Int L, RngStream& rng) const;
    // log Z~_L and the normalized extension law P(N_l = N), index N.
    double log_z(Int L) const;
    std::vector<double> extension_probs(Int L) const;
    // Probability of one configuration computed from the table.
    double path_probability(const PolymerPath& path) const;

    double beta() const noexcept { return table_.beta(); }
    Int l_max() const noexcept { return l_max_; }

private:
    std::vector<double> log_weights(Int L) const;  // per N, log of Gamma^N sum_v mass x^{|v|}
    DpTable table_;
    Int l_max_;
    double log_gamma_;
    double log_x_;
};

PolymerPath exact_sampler(double beta, Int L, RngStream& rng);

struct MixtureWindow {
    Int lo = 0;
    Int hi = 0;
    Int epsilon = 0;
    std::vector<double> weights;  // P(L' = lo + k)
};

// eps(L) = min(floor((log L)^6), floor(L/4), limit - L); K_L = [L - eps, L + eps].
Int mixture_epsilon(Int L, Int limit);
MixtureWindow mixture_window(double beta, Int L, Int limit);

struct MixtureDraw {
    Int length;
    PolymerPath path;
};

// Mixture over K_L with weights proportional to Z~_{L'}; reuses one table for the window.
class MixtureSampler {
public:
    MixtureSampler(double beta, Int L, Int limit);
    MixtureDraw sample(RngStream& rng) const;
    const MixtureWindow& window() const noexcept { return window_; }

private:
    MixtureWindow window_;
    ExactSampler exact_;
};

MixtureDraw mixture_sampler(double beta, Int L, RngStream& rng);

}  // namespace ipdsaw
