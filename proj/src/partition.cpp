#include "ipdsaw/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ipdsaw/dp.hpp"
#include "ipdsaw/errors.hpp"
#include "ipdsaw/thermo.hpp"

namespace ipdsaw {

namespace {

double log_sum(const std::vector<double>& v) {
    double big = kNegInf;
    for (double a : v) big = std::max(big, a);
    if (big == kNegInf) return kNegInf;
    double s = 0.0;
    for (double a : v)
        if (a != kNegInf) s += std::exp(a - big);
    return big + std::log(s);
}

// log sum_{v in Z} P(V_n = v, G_n = g) x^{|v|} from a folded row, optionally without v = 0.
double closing_row(const DpLayer& layer, std::int64_t g, double log_x, bool include_zero) {
    const double* lm = &layer.log_mass[cell_index(0, g)];
    double big = include_zero ? lm[0] : kNegInf;
    for (std::int64_t v = 1; v <= g; ++v)
        if (lm[v] != kNegInf) big = std::max(big, lm[v] + static_cast<double>(v) * log_x);
    if (big == kNegInf) return kNegInf;
    double s = include_zero && lm[0] != kNegInf ? std::exp(lm[0] - big) : 0.0;
    for (std::int64_t v = 1; v <= g; ++v)
        if (lm[v] != kNegInf) s += 2.0 * std::exp(lm[v] + static_cast<double>(v) * log_x - big);
    return big + std::log(s);
}

void check_length(std::int64_t L) {
    if (L < 1) throw DomainError("L must be positive");
    if (L > kEngineLimit) throw DomainError("L beyond the engine limit " + std::to_string(kEngineLimit));
}

}  // namespace

PartitionCurve partition_curve(double beta, std::int64_t l_max) {
    check_length(l_max);
    const auto p = model_params(beta);
    const double log_gamma = std::log(p.gamma_beta);
    const StepKernel k = make_kernel(beta, Constraint::free, false);
    PartitionCurve c;
    c.beta = beta;
    c.l_max = l_max;
    c.log_z.assign(static_cast<std::size_t>(l_max + 1), kNegInf);
    c.log_zc.assign(static_cast<std::size_t>(l_max + 1), kNegInf);
    c.log_contrib.resize(static_cast<std::size_t>(l_max + 1));
    for (std::int64_t L = 1; L <= l_max; ++L)
        c.log_contrib[static_cast<std::size_t>(L)].assign(static_cast<std::size_t>(L + 1), kNegInf);

    DpLayer cur, next;
    init_layer(cur, 0, false);
    for (std::int64_t n = 1; n <= l_max; ++n) {
        step_layer(k, cur, n - 1, next, l_max - n);
        std::swap(cur, next);
        const double weight = static_cast<double>(n) * log_gamma;
        for (std::int64_t g = 0; g <= cur.cap; ++g) {
            const auto L = static_cast<std::size_t>(n + g);
            c.log_contrib[L][static_cast<std::size_t>(n)] = weight + closing_row(cur, g, k.log_x, true);
            const double z0 = cur.at(0, g);
            if (z0 != kNegInf) c.log_zc[L] = log_add(c.log_zc[L], weight + z0);
        }
    }
    for (std::int64_t L = 1; L <= l_max; ++L)
        c.log_z[static_cast<std::size_t>(L)] = log_sum(c.log_contrib[static_cast<std::size_t>(L)]);
    return c;
}

double excess_partition(double beta, std::int64_t L) {
    return partition_curve(beta, L).log_z[static_cast<std::size_t>(L)];
}

double ExtensionLaw::mean() const {
    double m = 0.0;
    for (std::size_t n = 1; n < probs.size(); ++n) m += static_cast<double>(n) * probs[n];
    return m;
}

std::int64_t ExtensionLaw::argmax() const {
    std::size_t best = 1;
    for (std::size_t n = 2; n < probs.size(); ++n)
        if (probs[n] > probs[best]) best = n;
    return static_cast<std::int64_t>(best);
}

std::vector<double> ExtensionLaw::cdf() const {
    std::vector<double> c(probs.size(), 0.0);
    double s = 0.0;
    for (std::size_t n = 1; n < probs.size(); ++n) {
        s += probs[n];
        c[n] = s;
    }
    return c;
}

ExtensionLaw extension_law(const PartitionCurve& curve, std::int64_t L) {
    if (L < 1 || L > curve.l_max) throw DomainError("L outside the computed curve");
    ExtensionLaw law;
    law.L = L;
    law.beta = curve.beta;
    law.log_contrib = curve.log_contrib[static_cast<std::size_t>(L)];
    law.log_z = curve.log_z[static_cast<std::size_t>(L)];
    law.probs.assign(law.log_contrib.size(), 0.0);
    for (std::size_t n = 1; n < law.probs.size(); ++n)
        law.probs[n] = law.log_contrib[n] == kNegInf ? 0.0 : std::exp(law.log_contrib[n] - law.log_z);
    return law;
}

ExtensionLaw extension_law(double beta, std::int64_t L) { return extension_law(partition_curve(beta, L), L); }

std::string extension_law_csv(const ExtensionLaw& law) {
    std::ostringstream out;
    out.precision(17);
    out << "L,beta,N,prob,log_contrib\n";
    for (std::size_t n = 1; n < law.probs.size(); ++n)
        out << law.L << ',' << law.beta << ',' << n << ',' << law.probs[n] << ',' << law.log_contrib[n] << '\n';
    return out.str();
}

PatternCurve pattern_curve(double beta, std::int64_t t_max) {
    check_length(t_max);
    const auto p = model_params(beta);
    const double log_gamma = std::log(p.gamma_beta);
    const StepKernel k = make_kernel(beta, Constraint::nonzero, true);
    PatternCurve c;
    c.beta = beta;
    c.t_max = t_max;
    c.log_zhat.assign(static_cast<std::size_t>(t_max + 1), kNegInf);
    c.log_mass.resize(static_cast<std::size_t>(t_max + 1));
    c.y2.resize(static_cast<std::size_t>(t_max + 1));
    for (std::int64_t t = 1; t <= t_max; ++t) {
        c.log_mass[static_cast<std::size_t>(t)].assign(static_cast<std::size_t>(t + 1), kNegInf);
        c.y2[static_cast<std::size_t>(t)].assign(static_cast<std::size_t>(t + 1), 0.0);
    }
    // N = 1: the single zero stretch
    c.log_mass[1][1] = log_gamma - k.log_c;

    DpLayer cur, next;
    init_layer(cur, 0, true);
    const double log_two_over_c = std::log(2.0) - k.log_c;
    for (std::int64_t n = 1; n + 2 <= t_max; ++n) {
        step_layer(k, cur, n - 1, next, t_max - n - 1);
        std::swap(cur, next);
        // pattern of extension N = n + 1 closes with V_{n+1} = 0
        const double weight = static_cast<double>(n + 1) * log_gamma + log_two_over_c;
        for (std::int64_t g = 0; g <= cur.cap; ++g) {
            const double* lm = &cur.log_mass[cell_index(0, g)];
            const double* m2 = &cur.mu2[cell_index(0, g)];
            double big = kNegInf;
            for (std::int64_t u = 1; u <= g; ++u)
                if (lm[u] != kNegInf) big = std::max(big, lm[u] + static_cast<double>(u) * k.log_x);
            if (big == kNegInf) continue;
            double s = 0.0, s2 = 0.0;
            for (std::int64_t u = 1; u <= g; ++u) {
                if (lm[u] == kNegInf) continue;
                const double e = std::exp(lm[u] + static_cast<double>(u) * k.log_x - big);
                s += e;
                s2 += e * m2[u];
            }
            const auto t = static_cast<std::size_t>(n + 1 + g);
            c.log_mass[t][static_cast<std::size_t>(n + 1)] = weight + big + std::log(s);
            c.y2[t][static_cast<std::size_t>(n + 1)] = s2 / s;
        }
    }
    for (std::int64_t t = 1; t <= t_max; ++t)
        c.log_zhat[static_cast<std::size_t>(t)] = log_sum(c.log_mass[static_cast<std::size_t>(t)]);
    return c;
}

double log_pattern_partition(double beta, std::int64_t t) {
    return pattern_curve(beta, t).log_zhat[static_cast<std::size_t>(t)];
}

double pattern_partition(double beta, std::int64_t t) { return std::exp(log_pattern_partition(beta, t)); }

RegenerativeConstants extended_constants(double beta, std::int64_t t_max) {
    if (!(beta < beta_c())) throw DomainError("regenerative constants need beta < beta_c");
    return extended_constants(pattern_curve(beta, t_max));
}

RegenerativeConstants extended_constants(const PatternCurve& curve) {
    if (!(curve.beta < beta_c())) throw DomainError("regenerative constants need beta < beta_c");
    const std::int64_t T = curve.t_max;
    auto phi = [&](double a) {
        double s = 0.0;
        for (std::int64_t t = 1; t <= T; ++t) {
            const double l = curve.log_zhat[static_cast<std::size_t>(t)];
            if (l != kNegInf) s += std::exp(l - a * static_cast<double>(t));
        }
        return s;
    };
    double lo = 0.0, hi = 1.0;
    if (!(phi(lo) > 1.0)) throw SolverError("phi(0) <= 1: no positive excess free energy", phi(lo));
    while (phi(hi) > 1.0) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (phi(mid) > 1.0 ? lo : hi) = mid;
    }
    RegenerativeConstants r;
    r.beta = curve.beta;
    r.t_max = T;
    r.f_tilde = 0.5 * (lo + hi);
    r.phi_at_root = phi(r.f_tilde);
    for (std::int64_t t = 1; t <= T; ++t) {
        const auto ts = static_cast<std::size_t>(t);
        for (std::size_t n = 1; n < curve.log_mass[ts].size(); ++n) {
            const double l = curve.log_mass[ts][n];
            if (l == kNegInf) continue;
            const double w = std::exp(l - r.f_tilde * static_cast<double>(t));
            r.mean_sigma += static_cast<double>(t) * w;
            r.mean_nu += static_cast<double>(n) * w;
            r.mean_y2 += curve.y2[ts][n] * w;
        }
    }
    // geometric extrapolation of the neglected tail of phi
    const std::int64_t t1 = T - std::max<std::int64_t>(T / 4, 2);
    auto term = [&](std::int64_t t) {
        double best = kNegInf;
        for (std::int64_t s = std::max<std::int64_t>(1, t - 4); s <= t; ++s)
            best = std::max(best, curve.log_zhat[static_cast<std::size_t>(s)] - r.f_tilde * static_cast<double>(s));
        return best;
    };
    const double la = term(T), lb = term(t1);
    const double rate = (la - lb) / static_cast<double>(T - t1);
    r.tail_bound = rate < 0.0 ? std::exp(la) * std::exp(rate) / (1.0 - std::exp(rate)) * static_cast<double>(T)
                              : std::numeric_limits<double>::infinity();
    if (r.tail_bound > 1e-9)
        throw SolverError("pattern series truncation too coarse; raise t_max", r.tail_bound);
    r.c_renewal = 1.0 / r.mean_sigma;
    r.e_beta = r.mean_nu / r.mean_sigma;
    r.sigma_beta = std::sqrt(r.mean_y2 / r.mean_nu);
    return r;
}

}  // namespace ipdsaw
