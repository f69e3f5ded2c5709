#include "ipdsaw/exact_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "ipdsaw/errors.hpp"
#include "ipdsaw/partition.hpp"
#include "ipdsaw/thermo.hpp"

namespace ipdsaw {

namespace {

std::size_t draw_log_weighted(const std::vector<double>& logw, RngStream& rng) {
    const double top = *std::max_element(logw.begin(), logw.end());
    if (top == kNegInf) throw SolverError("no mass to sample from", 0.0);
    double total = 0.0;
    for (double l : logw) total += std::exp(l - top);
    double u = rng.uniform() * total;
    std::size_t last = 0;
    for (std::size_t i = 0; i < logw.size(); ++i) {
        if (logw[i] == kNegInf) continue;
        last = i;
        u -= std::exp(logw[i] - top);
        if (u < 0.0) return i;
    }
    return last;
}

DpTable build_table(double beta, Int l_max, std::size_t budget) {
    if (l_max < 1) throw DomainError("length must be positive");
    if (l_max > kEngineLimit) throw DomainError("length beyond the engine limit");
    DpBuildOptions opts;
    opts.length_cap = l_max;
    opts.memory_budget = budget;
    return DpTable::build(beta, l_max, l_max, Constraint::free, opts);
}

}  // namespace

ExactSampler::ExactSampler(double beta, Int l_max, std::size_t memory_budget)
    : table_(build_table(beta, l_max, memory_budget)), l_max_(l_max) {
    const auto p = model_params(beta);
    log_gamma_ = std::log(p.gamma_beta);
    log_x_ = std::log(p.x);
}

ExactSampler::ExactSampler(DpTable table) : table_(std::move(table)), l_max_(table_.n_max()) {
    if (table_.constraint() != Constraint::free || table_.g_max() != l_max_ || table_.length_cap() != l_max_)
        throw DomainError("exact sampler needs a free table with n_max = g_max = length cap");
    const auto p = model_params(table_.beta());
    log_gamma_ = std::log(p.gamma_beta);
    log_x_ = std::log(p.x);
}

std::vector<double> ExactSampler::log_weights(Int L) const {
    if (L < 1 || L > l_max_) throw DomainError("length outside the sampler range");
    std::vector<double> w(static_cast<std::size_t>(L + 1), kNegInf);
    for (Int n = 1; n <= L; ++n) {
        const Int g = L - n;
        double acc = kNegInf;
        for (Int v = 0; v <= g; ++v) {
            const double m = table_.log_mass(n, v, g);
            if (m == kNegInf) continue;
            const double both = v == 0 ? m : m + std::log(2.0);
            acc = log_add(acc, both + log_x_ * static_cast<double>(v));
        }
        if (acc != kNegInf) w[static_cast<std::size_t>(n)] = acc + log_gamma_ * static_cast<double>(n);
    }
    return w;
}

double ExactSampler::log_z(Int L) const {
    double acc = kNegInf;
    for (double l : log_weights(L)) acc = log_add(acc, l);
    return acc;
}

std::vector<double> ExactSampler::extension_probs(Int L) const {
    const auto w = log_weights(L);
    double acc = kNegInf;
    for (double l : w) acc = log_add(acc, l);
    std::vector<double> p(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) p[i] = std::exp(w[i] - acc);
    return p;
}

PolymerPath ExactSampler::sample(Int L, RngStream& rng) const {
    const auto n = static_cast<Int>(draw_log_weighted(log_weights(L), rng));
    std::vector<Int> values(static_cast<std::size_t>(n) + 2, 0);
    Int g = L - n;
    // V_N given G_N = g and V_{N+1} = 0
    {
        std::vector<double> lw(static_cast<std::size_t>(2 * g + 1), kNegInf);
        for (Int v = -g; v <= g; ++v)
            lw[static_cast<std::size_t>(v + g)] = table_.log_mass(n, v, g) + log_x_ * static_cast<double>(std::llabs(v));
        values[static_cast<std::size_t>(n)] = static_cast<Int>(draw_log_weighted(lw, rng)) - g;
    }
    for (Int k = n; k >= 2; --k) {
        const Int v = values[static_cast<std::size_t>(k)];
        g -= std::llabs(v);
        std::vector<double> lw(static_cast<std::size_t>(2 * g + 1), kNegInf);
        for (Int u = -g; u <= g; ++u)
            lw[static_cast<std::size_t>(u + g)] =
                table_.log_mass(k - 1, u, g) + log_x_ * static_cast<double>(std::llabs(v - u));
        values[static_cast<std::size_t>(k - 1)] = static_cast<Int>(draw_log_weighted(lw, rng)) - g;
    }
    auto walk = AuxWalk::from_values(std::move(values), static_cast<std::size_t>(n));
    return from_aux_walk(walk, static_cast<std::size_t>(n));
}

double ExactSampler::path_probability(const PolymerPath& path) const {
    const Int L = path.total_length();
    const auto walk = to_aux_walk(path);
    const auto n = static_cast<Int>(path.size());
    // P_beta(V_1..V_{N+1}) Gamma^N / Z~ with the c prefactor of Z~
    double lp = log_gamma_ * static_cast<double>(n) + std::log(model_params(beta()).c_beta);
    const double log_c = std::log(model_params(beta()).c_beta);
    for (Int i = 1; i <= n + 1; ++i)
        lp += log_x_ * static_cast<double>(std::llabs(walk.values[static_cast<std::size_t>(i)] -
                                                       walk.values[static_cast<std::size_t>(i - 1)])) -
              log_c;
    return std::exp(lp - log_z(L));
}

PolymerPath exact_sampler(double beta, Int L, RngStream& rng) { return ExactSampler(beta, L).sample(L, rng); }

Int mixture_epsilon(Int L, Int limit) {
    if (L < 1) throw DomainError("length must be positive");
    if (L > limit) throw DomainError("length beyond the engine limit");
    const double lg = std::log(static_cast<double>(L));
    const double raw = std::floor(std::pow(lg, 6.0));
    return std::max<Int>(0, std::min<Int>({static_cast<Int>(std::min(raw, 1e15)), L / 4, limit - L}));
}

MixtureWindow mixture_window(double beta, Int L, Int limit) {
    MixtureWindow w;
    w.epsilon = mixture_epsilon(L, limit);
    w.lo = L - w.epsilon;
    w.hi = L + w.epsilon;
    const auto curve = partition_curve(beta, w.hi);
    std::vector<double> lz;
    double acc = kNegInf;
    for (Int k = w.lo; k <= w.hi; ++k) {
        lz.push_back(curve.log_z[static_cast<std::size_t>(k)]);
        acc = log_add(acc, lz.back());
    }
    for (double l : lz) w.weights.push_back(std::exp(l - acc));
    return w;
}

MixtureSampler::MixtureSampler(double beta, Int L, Int limit)
    : window_(mixture_window(beta, L, limit)), exact_(beta, window_.hi) {}

MixtureDraw MixtureSampler::sample(RngStream& rng) const {
    std::vector<double> lw(window_.weights.size());
    for (std::size_t i = 0; i < lw.size(); ++i) lw[i] = window_.weights[i] > 0.0 ? std::log(window_.weights[i]) : kNegInf;
    const Int len = window_.lo + static_cast<Int>(draw_log_weighted(lw, rng));
    return {len, exact_.sample(len, rng)};
}

MixtureDraw mixture_sampler(double beta, Int L, RngStream& rng) {
    return MixtureSampler(beta, L, kEngineLimit).sample(rng);
}

}  // namespace ipdsaw
