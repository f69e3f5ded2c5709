#include "ipdsaw/samplers.hpp"

#include <cassert>
#include <cmath>
#include <cstdlib>
#include <string>

#include "ipdsaw/critical_constants.hpp"
#include "ipdsaw/errors.hpp"

namespace ipdsaw {

IncrementSampler::IncrementSampler(double beta, double h) {
    const auto p = model_params(beta);
    if (!(std::abs(h) < beta / 2.0)) throw DomainError("tilt outside (-beta/2, beta/2)");
    const double a = p.x * std::exp(h);
    const double b = p.x * std::exp(-h);
    const double up = a / (1.0 - a);
    const double down = b / (1.0 - b);
    const double f = 1.0 + up + down;
    p_zero_ = 1.0 / f;
    p_up_ = (1.0 + up) / f;
    inv_log_a_ = 1.0 / std::log(a);
    inv_log_b_ = 1.0 / std::log(b);
}

Int IncrementSampler::operator()(RngStream& rng) const {
    const double u = rng.uniform();
    if (u < p_zero_) return 0;
    const double g = rng.uniform_open();
    if (u < p_up_) return 1 + static_cast<Int>(std::log(g) * inv_log_a_);
    return -1 - static_cast<Int>(std::log(g) * inv_log_b_);
}

double IncrementSampler::mean() const {
    const double a = std::exp(1.0 / inv_log_a_), b = std::exp(1.0 / inv_log_b_);
    const double up = (p_up_ - p_zero_) / (1.0 - a);     // P(U>0) E[U | U>0]
    const double down = (1.0 - p_up_) / (1.0 - b);
    return up - down;
}

Int sample_increment(double beta, RngStream& rng) { return IncrementSampler(beta, 0.0)(rng); }

Int sample_tilted_increment(double beta, double h, RngStream& rng) { return IncrementSampler(beta, h)(rng); }

namespace {

PolymerPath path_from_values(const std::vector<Int>& v, std::size_t n) {
    std::vector<Int> l(n);
    for (std::size_t i = 0; i < n; ++i) l[i] = (i % 2 == 0) ? v[i + 1] : -v[i + 1];
    return PolymerPath(std::move(l));
}

// One acceptance-reject trial; `survive` < 1 adds a geometric lifetime.
bool trial(const IncrementSampler& inc, Int L, double survive, RngStream& rng, std::vector<Int>& values,
           std::size_t& n_out) {
    values.assign(1, 0);
    Int v = 0;
    Int s = 0;  // G_n + n
    for (;;) {
        if (survive < 1.0 && rng.uniform() >= survive) return false;
        v += inc(rng);
        values.push_back(v);
        const Int next = s + std::llabs(v) + 1;
        assert(next > s);
        s = next;
        if (s > L) return false;
        if (s == L) {
            // unique candidate N: the step after must close at zero
            n_out = values.size() - 1;
            return v + inc(rng) == 0;
        }
    }
}

}  // namespace

PerfectSample perfect_critical_sample(Int L, RngStream& rng, std::uint64_t max_trials) {
    if (L < 1) throw DomainError("L must be positive");
    const IncrementSampler inc(beta_c(), 0.0);
    std::vector<Int> values;
    std::size_t n = 0;
    for (std::uint64_t t = 1; t <= max_trials; ++t)
        if (trial(inc, L, 1.0, rng, values, n)) return {path_from_values(values, n), t};
    throw BudgetError("perfect sampler exceeded " + std::to_string(max_trials) + " trials", max_trials);
}

std::optional<PerfectSample> lifetime_sample(double beta, Int L, RngStream& rng, std::uint64_t budget) {
    const auto p = model_params(beta);
    if (!(p.gamma_beta < 1.0)) throw DomainError("lifetime sampler needs Gamma_beta < 1 (beta > beta_c)");
    if (L < 1) throw DomainError("L must be positive");
    const IncrementSampler inc(beta, 0.0);
    std::vector<Int> values;
    std::size_t n = 0;
    for (std::uint64_t t = 1; t <= budget; ++t)
        if (trial(inc, L, p.gamma_beta, rng, values, n)) return PerfectSample{path_from_values(values, n), t};
    return std::nullopt;
}

TiltedWalker::TiltedWalker(double beta, int n, const Tilt& tilt) : n_(n), tilt_(tilt) {
    if (n < 1) throw DomainError("walk length must be positive");
    steps_.reserve(static_cast<std::size_t>(n));
    for (double h : step_tilts(tilt, n)) steps_.emplace_back(beta, h);
}

TiltedWalker::TiltedWalker(double beta, int n, double q) : TiltedWalker(beta, n, solve_tilt_discrete(beta, n, q)) {}

void TiltedWalker::fill(RngStream& rng, std::vector<Int>& values) const {
    values.resize(static_cast<std::size_t>(n_) + 1);
    values[0] = 0;
    Int v = 0;
    for (int i = 0; i < n_; ++i) {
        v += steps_[static_cast<std::size_t>(i)](rng);
        values[static_cast<std::size_t>(i) + 1] = v;
    }
}

AuxWalk TiltedWalker::sample(RngStream& rng) const {
    std::vector<Int> values;
    fill(rng, values);
    return AuxWalk::from_values(std::move(values), static_cast<std::size_t>(n_));
}

AuxWalk tilted_walk_sample(double beta, int n, double q, RngStream& rng) {
    return TiltedWalker(beta, n, q).sample(rng);
}

std::optional<BeadSample> conditioned_bead_sample(const TiltedWalker& walker, double q, const BeadWindow& window,
                                                  RngStream& rng, std::uint64_t budget) {
    const double n = walker.steps();
    const double wa = window.area < 0.0 ? std::pow(n, 0.75) : window.area;
    const double wv = window.value < 0.0 ? std::pow(n, 0.25) : window.value;
    const double target = q * n * n;
    std::vector<Int> values;
    for (std::uint64_t t = 1; t <= budget; ++t) {
        walker.fill(rng, values);
        if (std::abs(static_cast<double>(values.back())) > wv) continue;
        Int area = 0;
        for (std::size_t i = 1; i < values.size(); ++i) area += values[i];
        if (std::abs(static_cast<double>(area) - target) > wa) continue;
        return BeadSample{AuxWalk::from_values(values, values.size() - 1), t};
    }
    return std::nullopt;
}

std::optional<BeadSample> conditioned_bead_sample(double beta, int n, double q, const BeadWindow& window,
                                                  RngStream& rng, std::uint64_t budget) {
    return conditioned_bead_sample(TiltedWalker(beta, n, q), q, window, rng, budget);
}

std::vector<ExcursionRecord> critical_excursions(std::size_t count, RngStream& rng, ExcursionStart start,
                                                 const ExcursionOptions& opts) {
    const double beta = opts.beta == 0.0 ? beta_c() : opts.beta;
    const IncrementSampler inc(beta, 0.0);
    std::vector<ExcursionRecord> out;
    out.reserve(count);
    Int v = start == ExcursionStart::zero ? 0 : sample_mu_beta(beta, rng);
    while (out.size() < count) {
        ExcursionRecord rec;
        rec.start = v;
        for (;;) {
            rec.area += std::llabs(v);
            rec.extension += 1;
            const Int next = v + inc(rng);
            if (v != 0 && ((v > 0 && next <= 0) || (v < 0 && next >= 0))) {
                rec.vtau = next;
                v = next;
                break;
            }
            v = next;
            if (rec.extension >= opts.step_cap) {
                rec.censored = true;
                // the terminal value is independent of the excursion and mu_beta distributed
                v = sample_mu_beta(beta, rng);
                break;
            }
        }
        out.push_back(rec);
    }
    return out;
}

}  // namespace ipdsaw
