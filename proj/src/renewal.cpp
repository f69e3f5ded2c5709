#include "ipdsaw/renewal.hpp"

#include <algorithm>
#include <cmath>

#include "ipdsaw/dp.hpp"
#include "ipdsaw/errors.hpp"
#include "ipdsaw/partition.hpp"
#include "ipdsaw/thermo.hpp"

namespace ipdsaw {

namespace {

struct ExcursionLaw {
    std::vector<double> p_x;
    double tail = 0.0;
    std::vector<double> vtau;
};

// DP over s = steps + accumulated |V| so far; f[s][v] is the mass alive at
// value +-v (both signs together) with that running total.
ExcursionLaw excursion_law(double x, double c, std::int64_t n_max, bool from_mu, std::int64_t vtau_len) {
    ExcursionLaw out;
    out.p_x.assign(static_cast<std::size_t>(n_max + 1), 0.0);
    out.vtau.assign(static_cast<std::size_t>(vtau_len), 0.0);
    // row s keeps v with s + 1 + v <= n_max
    std::vector<std::vector<double>> f(static_cast<std::size_t>(n_max));
    for (std::int64_t s = 0; s < n_max; ++s) f[static_cast<std::size_t>(s)].assign(static_cast<std::size_t>(n_max - s), 0.0);
    double placed_outside = 0.0;  // start mass that cannot finish within n_max
    if (from_mu) {
        f[0][0] = 1.0 - x;
        double pk = (1.0 - x) * x;
        for (std::int64_t v = 1; v < n_max; ++v, pk *= x) f[0][static_cast<std::size_t>(v)] = pk;
        placed_outside = std::pow(x, static_cast<double>(n_max));  // P(|V_0| >= n_max)
    } else {
        f[0][0] = 1.0;
    }
    double cont_total = 0.0, placed_total = 0.0;
    const double end_scale = 1.0 / (c * (1.0 - x));
    std::vector<double> a;  // a[v] = f[s' - 1 - v][v]
    for (std::int64_t sp = 1; sp <= n_max; ++sp) {
        // sources that finish their step at running total sp
        a.assign(static_cast<std::size_t>(sp), 0.0);
        for (std::int64_t v = 0; v < sp; ++v) {
            const std::int64_t s = sp - 1 - v;
            const auto& row = f[static_cast<std::size_t>(s)];
            if (static_cast<std::size_t>(v) < row.size()) a[static_cast<std::size_t>(v)] = row[static_cast<std::size_t>(v)];
        }
        // endings from v >= 1
        double xv = x, ended = 0.0;
        for (std::int64_t v = 1; v < sp; ++v, xv *= x) {
            const double m = a[static_cast<std::size_t>(v)];
            if (m == 0.0) continue;
            const double e = m * xv * end_scale;
            ended += e;
            // |V_tau| = k with weight x^{v+k}/c
            double w = m * xv / c;
            for (std::int64_t k = 0; k < vtau_len; ++k, w *= x) out.vtau[static_cast<std::size_t>(k)] += w;
        }
        out.p_x[static_cast<std::size_t>(sp)] = ended;
        // continuing mass: from 0 (all targets) and from v >= 1 (same side)
        for (std::int64_t v = 0; v < sp; ++v) {
            const double m = a[static_cast<std::size_t>(v)];
            if (v == 0) cont_total += m;
            else cont_total += m * (1.0 - std::pow(x, static_cast<double>(v)) * end_scale);
        }
        if (sp >= n_max) continue;
        auto& dst = f[static_cast<std::size_t>(sp)];
        const std::int64_t w_hi = static_cast<std::int64_t>(dst.size()) - 1;
        // target w >= 1: (1/c) sum_{v>=1} a_v x^{|w-v|} + a_0 * 2 x^w / c ; target 0: a_0 / c
        std::vector<double> left(static_cast<std::size_t>(w_hi + 1), 0.0), right(static_cast<std::size_t>(w_hi + 1), 0.0);
        double acc = 0.0;
        for (std::int64_t w = 1; w <= w_hi; ++w) {
            acc *= x;
            if (w < sp) acc += a[static_cast<std::size_t>(w)];
            left[static_cast<std::size_t>(w)] = acc;
        }
        acc = 0.0;
        const std::int64_t top = std::max<std::int64_t>(sp - 1, w_hi);
        for (std::int64_t w = top - 1; w >= 1; --w) {
            if (w + 1 < sp) acc += a[static_cast<std::size_t>(w + 1)];
            acc *= x;
            if (w <= w_hi) right[static_cast<std::size_t>(w)] = acc;
        }
        dst[0] += a[0] / c;
        placed_total += a[0] / c;
        double xw = x;
        for (std::int64_t w = 1; w <= w_hi; ++w, xw *= x) {
            const double val = (left[static_cast<std::size_t>(w)] + right[static_cast<std::size_t>(w)] + 2.0 * a[0] * xw) / c;
            dst[static_cast<std::size_t>(w)] += val;
            placed_total += val;
        }
    }
    // start rows beyond reach also count as surviving
    double start_tail = 0.0;
    if (from_mu) start_tail = placed_outside;
    out.tail = cont_total - placed_total + start_tail;
    return out;
}

std::vector<double> renewal_masses(const std::vector<double>& first, const std::vector<double>& inter) {
    const std::size_t n = first.size();
    std::vector<double> u(n, 0.0);
    for (std::size_t k = 1; k < n; ++k) {
        double s = first[k];
        for (std::size_t m = 1; m < k; ++m) s += u[m] * inter[k - m];
        u[k] = s;
    }
    return u;
}

}  // namespace

CritRenewal crit_renewal(std::int64_t n_max, double beta) {
    if (beta == 0.0) beta = beta_c();
    if (n_max < 2) throw DomainError("crit_renewal needs n_max >= 2");
    if (n_max > 4 * kEngineLimit) throw DomainError("n_max beyond the engine limit");
    const auto p = model_params(beta);
    const double x = p.x, c = p.c_beta;
    CritRenewal r;
    r.beta = beta;
    r.n_max = n_max;
    const std::int64_t vlen = 64;
    auto mu = excursion_law(x, c, n_max, true, vlen);
    auto zero = excursion_law(x, c, n_max, false, 1);
    r.p_x_mu = mu.p_x;
    r.p_x_zero = zero.p_x;
    r.tail_mu = mu.tail;
    double ended = 0.0;
    for (double v : mu.vtau) ended += v;
    r.vtau_law = mu.vtau;
    for (auto& v : r.vtau_law) v /= ended;

    r.u_mu = renewal_masses(r.p_x_mu, r.p_x_mu);
    r.u_mu[0] = 1.0;
    r.u_zero = renewal_masses(r.p_x_zero, r.p_x_mu);

    // Z~_L / c = c^{-(L+1)} + (1-x) sum_{r=0}^{L-1} c^{-r} P_0(L - r + 1 in renewal set),
    // valid when Gamma_beta = 1
    if (beta == beta_c()) r.log_z.assign(static_cast<std::size_t>(n_max), kNegInf);
    for (std::int64_t L = 1; L + 1 <= n_max && !r.log_z.empty(); ++L) {
        double s = 0.0, cr = 1.0;
        for (std::int64_t k = 0; k <= L - 1; ++k, cr /= c) s += cr * r.u_zero[static_cast<std::size_t>(L - k + 1)];
        const double z = std::pow(c, -static_cast<double>(L + 1)) + (1.0 - x) * s;
        r.log_z[static_cast<std::size_t>(L)] = std::log(c * z);
    }

    // P_mu(tau = n) by a time-indexed DP on the value alone
    const std::int64_t vmax = std::min<std::int64_t>(n_max, 4000);
    r.p_tau_mu.assign(static_cast<std::size_t>(n_max + 1), 0.0);
    std::vector<double> g(static_cast<std::size_t>(vmax + 1), 0.0), h(g.size(), 0.0);
    g[0] = 1.0 - x;
    double pk = (1.0 - x) * x;
    for (std::int64_t v = 1; v <= vmax; ++v, pk *= x) g[static_cast<std::size_t>(v)] = pk;
    const double end_scale = 1.0 / (c * (1.0 - x));
    for (std::int64_t t = 1; t <= n_max; ++t) {
        double ended_t = 0.0, xv = x;
        for (std::int64_t v = 1; v <= vmax; ++v, xv *= x) ended_t += g[static_cast<std::size_t>(v)] * xv * end_scale;
        r.p_tau_mu[static_cast<std::size_t>(t)] = ended_t;
        std::fill(h.begin(), h.end(), 0.0);
        double acc = 0.0;
        for (std::int64_t w = 1; w <= vmax; ++w) {
            acc = acc * x + g[static_cast<std::size_t>(w)];
            h[static_cast<std::size_t>(w)] += acc;
        }
        acc = 0.0;
        for (std::int64_t w = vmax - 1; w >= 1; --w) {
            acc = (acc + g[static_cast<std::size_t>(w + 1)]) * x;
            h[static_cast<std::size_t>(w)] += acc;
        }
        double xw = x;
        for (std::int64_t w = 1; w <= vmax; ++w, xw *= x) h[static_cast<std::size_t>(w)] = (h[static_cast<std::size_t>(w)] + 2.0 * g[0] * xw) / c;
        h[0] = g[0] / c;
        std::swap(g, h);
    }
    return r;
}

}  // namespace ipdsaw
