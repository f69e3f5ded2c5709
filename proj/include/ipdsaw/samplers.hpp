#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ipdsaw/polymer.hpp"
#include "ipdsaw/rng.hpp"
#include "ipdsaw/thermo.hpp"

namespace ipdsaw {

// Two-sided geometric increment P(U = k) proportional to x^{|k|} e^{h k}.
class IncrementSampler {
public:
    IncrementSampler(double beta, double h);
    Int operator()(RngStream& rng) const;
    double mean() const;

private:
    double p_zero_;
    double p_up_;  // cumulative P(U <= 0) + P(U > 0) split point
    double inv_log_a_;
    double inv_log_b_;
};

Int sample_increment(double beta, RngStream& rng);
Int sample_tilted_increment(double beta, double h, RngStream& rng);

struct PerfectSample {
    PolymerPath path;
    std::uint64_t trials;
};

// Acceptance-reject at beta_c: exact draw from the polymer measure of length L.
PerfectSample perfect_critical_sample(Int L, RngStream& rng, std::uint64_t max_trials);

// Same construction with a geometric lifetime of survival probability Gamma_beta < 1.
std::optional<PerfectSample> lifetime_sample(double beta, Int L, RngStream& rng, std::uint64_t budget);

// Walk with independent tilted increments, step i tilted by (1 - i/n) h0 + h1.
class TiltedWalker {
public:
    TiltedWalker(double beta, int n, const Tilt& tilt);
    TiltedWalker(double beta, int n, double q);
    AuxWalk sample(RngStream& rng) const;
    // Fills values V_0..V_n and returns (A_n, V_n) without building an AuxWalk.
    void fill(RngStream& rng, std::vector<Int>& values) const;
    const Tilt& tilt() const { return tilt_; }
    int steps() const { return n_; }

private:
    int n_;
    Tilt tilt_;
    std::vector<IncrementSampler> steps_;
};

AuxWalk tilted_walk_sample(double beta, int n, double q, RngStream& rng);

struct BeadWindow {
    double area = -1.0;   // |A_n - q n^2| <= area; negative means n^{3/4}
    double value = -1.0;  // |V_n| <= value; negative means n^{1/4}
};

struct BeadSample {
    AuxWalk walk;
    std::uint64_t trials;
};

// Accept-reject of tilted walks onto the area and endpoint window.
std::optional<BeadSample> conditioned_bead_sample(const TiltedWalker& walker, double q, const BeadWindow& window,
                                                  RngStream& rng, std::uint64_t budget);
std::optional<BeadSample> conditioned_bead_sample(double beta, int n, double q, const BeadWindow& window,
                                                  RngStream& rng, std::uint64_t budget);

struct ExcursionRecord {
    Int extension = 0;  // number of steps
    Int area = 0;       // sum of |V| over the visited values
    Int vtau = 0;       // terminal value
    Int start = 0;
    bool censored = false;  // stopped at the step cap; vtau then meaningless

    Int x() const { return extension + area; }
};

enum class ExcursionStart { zero, mu_beta };

struct ExcursionOptions {
    double beta = 0.0;          // 0 means beta_c
    Int step_cap = 100000;      // censor longer excursions and restart from mu_beta
};

std::vector<ExcursionRecord> critical_excursions(std::size_t count, RngStream& rng, ExcursionStart start,
                                                 const ExcursionOptions& opts = {});

}  // namespace ipdsaw
