#include "ipdsaw/thermo.hpp"

#include <boost/math/tools/roots.hpp>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "ipdsaw/errors.hpp"

namespace ipdsaw {

ModelParams model_params(double beta) {
    if (!(beta > 0.0)) throw DomainError("beta must be positive");
    ModelParams p;
    p.beta = beta;
    p.x = std::exp(-beta / 2.0);
    p.c_beta = (1.0 + p.x) / (1.0 - p.x);
    p.gamma_beta = p.c_beta * std::exp(-beta);
    return p;
}

double beta_c() {
    // x^3 + x^2 + x - 1 = 0 on (0,1): bisection to the last bit, then one Newton polish
    double lo = 0.0, hi = 1.0;
    while (hi - lo > 0.0) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double f = ((mid + 1.0) * mid + 1.0) * mid - 1.0;
        (f < 0.0 ? lo : hi) = mid;
    }
    double x = 0.5 * (lo + hi);
    x -= (((x + 1.0) * x + 1.0) * x - 1.0) / ((3.0 * x + 2.0) * x + 1.0);
    return -2.0 * std::log(x);
}

namespace {

// Derivatives of y/(1-y) with respect to log y, given y and 1 - y.
inline double d1(double y, double c) { return y / (c * c); }
inline double d2(double y, double c) { return y * (1.0 + y) / (c * c * c); }
inline double d3(double y, double c) { return y * (1.0 + 4.0 * y + y * y) / (c * c * c * c); }

struct MgfDerivs {
    double l0, l1, l2, l3;
};

MgfDerivs mgf_all(const ModelParams& p, double h, int max_order) {
    if (!(std::abs(h) < p.beta / 2.0))
        throw DomainError("tilt h = " + std::to_string(h) + " outside (-beta/2, beta/2)");
    // 1 - x e^{+-h} without cancellation near the boundary
    const double lx = -p.beta / 2.0;
    const double a = std::exp(lx + h), ca = -std::expm1(lx + h);
    const double b = std::exp(lx - h), cb = -std::expm1(lx - h);
    const double f = 1.0 + a / ca + b / cb;
    MgfDerivs out{std::log(f / p.c_beta), 0.0, 0.0, 0.0};
    if (max_order >= 1) {
        const double r1 = (d1(a, ca) - d1(b, cb)) / f;
        out.l1 = r1;
        if (max_order >= 2) {
            const double r2 = (d2(a, ca) + d2(b, cb)) / f;
            out.l2 = r2 - r1 * r1;
            if (max_order >= 3) {
                const double r3 = (d3(a, ca) - d3(b, cb)) / f;
                out.l3 = r3 - 3.0 * r2 * r1 + 2.0 * r1 * r1 * r1;
            }
        }
    }
    return out;
}

}  // namespace

double log_mgf(double beta, double h, int order) {
    if (order < 0 || order > 3) throw DomainError("log_mgf order must be 0..3");
    const auto d = mgf_all(model_params(beta), h, order);
    switch (order) {
        case 0: return d.l0;
        case 1: return d.l1;
        case 2: return d.l2;
        default: return d.l3;
    }
}

void gauss_legendre_unit(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(static_cast<std::size_t>(n), 0.0);
    weights.assign(static_cast<std::size_t>(n), 0.0);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
            }
            dp = n * (z * p1 - p2) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[static_cast<std::size_t>(i)] = 0.5 * (1.0 - z);
        nodes[static_cast<std::size_t>(n - 1 - i)] = 0.5 * (1.0 + z);
        weights[static_cast<std::size_t>(i)] = weights[static_cast<std::size_t>(n - 1 - i)] = 0.5 * w;
    }
}

namespace {

struct Rule {
    std::vector<double> u, w;
};

const Rule& rule(int n) {
    static thread_local std::vector<std::pair<int, Rule>> cache;
    for (const auto& [k, r] : cache)
        if (k == n) return r;
    Rule r;
    gauss_legendre_unit(n, r.u, r.w);
    cache.emplace_back(n, std::move(r));
    return cache.back().second;
}

void check_domain(const ModelParams& p, double h0, double h1) {
    const double half = p.beta / 2.0;
    if (!(std::abs(h1) < half) || !(std::abs(h0 + h1) < half))
        throw DomainError("tilt outside the admissible domain");
}

}  // namespace

namespace {

// Breakpoints of [0, 1]: halving panels toward an end whose tilt comes within
// `scale` (in u units) of the boundary, where L' behaves like 1 / (distance).
std::vector<double> graded_breaks(double scale0, double scale1) {
    std::vector<double> lo{0.0}, hi{1.0};
    for (double e = 0.25; scale0 < 0.05 && e > 0.25 * scale0; e *= 0.5) lo.push_back(e);
    for (double e = 0.25; scale1 < 0.05 && e > 0.25 * scale1; e *= 0.5) hi.push_back(1.0 - e);
    std::vector<double> out;
    out.push_back(0.0);
    for (std::size_t i = lo.size(); i-- > 1;) out.push_back(lo[i]);
    if (lo.size() > 1 || hi.size() > 1) out.push_back(0.5);
    for (std::size_t i = 1; i < hi.size(); ++i) out.push_back(hi[i]);
    out.push_back(1.0);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace

MixedMgf log_mgf_mixed(double beta, const Tilt& tilt, int nodes) {
    const auto p = model_params(beta);
    check_domain(p, tilt.h0, tilt.h1);
    const Rule& r = rule(nodes);
    const double half = beta / 2.0;
    const double slope = std::max(std::abs(tilt.h0), 1e-300);
    const auto breaks = graded_breaks((half - std::abs(tilt.h1)) / slope, (half - std::abs(tilt.h0 + tilt.h1)) / slope);
    MixedMgf out;
    for (std::size_t j = 0; j + 1 < breaks.size(); ++j) {
        const double a = breaks[j], len = breaks[j + 1] - breaks[j];
        for (std::size_t k = 0; k < r.u.size(); ++k) {
            const double u = a + len * r.u[k], w = len * r.w[k];
            const auto d = mgf_all(p, u * tilt.h0 + tilt.h1, 2);
            out.value += w * d.l0;
            out.gradient(0) += w * u * d.l1;
            out.gradient(1) += w * d.l1;
            out.hessian(0, 0) += w * u * u * d.l2;
            out.hessian(0, 1) += w * u * d.l2;
            out.hessian(1, 1) += w * d.l2;
        }
    }
    out.hessian(1, 0) = out.hessian(0, 1);
    return out;
}

namespace {

// Gradient and Hessian of the discrete average (1/n) sum L(h_i).
MixedMgf discrete_mixed(const ModelParams& p, int n, double h0, double h1) {
    MixedMgf out;
    for (int i = 1; i <= n; ++i) {
        const double wi = 1.0 - static_cast<double>(i) / n;
        const auto d = mgf_all(p, wi * h0 + h1, 2);
        out.value += d.l0;
        out.gradient(0) += wi * d.l1;
        out.gradient(1) += d.l1;
        out.hessian(0, 0) += wi * wi * d.l2;
        out.hessian(0, 1) += wi * d.l2;
        out.hessian(1, 1) += d.l2;
    }
    out.value /= n;
    out.gradient /= n;
    out.hessian /= n;
    out.hessian(1, 0) = out.hessian(0, 1);
    return out;
}

// Newton minimization of the convex f(H) - q h0, whose stationary point solves
// grad f(H) = (q, 0). Steps backtrack until they stay inside the domain and give
// sufficient decrease. `reach` is the largest coefficient of h0 among the tilts
// entering f (1 for the continuous integral, 1 - 1/n for the sum).
template <class Eval>
Tilt newton_tilt(const ModelParams& p, double q, double reach, Eval eval, const TiltOptions& opts) {
    const double half = p.beta / 2.0;
    auto inside = [&](const Eigen::Vector2d& h) {
        return std::abs(h(1)) < half && std::abs(reach * h(0) + h(1)) < half;
    };
    const Eigen::Vector2d target(q, 0.0);
    Tilt t;
    if (q == 0.0) return t;
    const double curv = mgf_all(p, 0.0, 2).l2;
    // linear response guess, shrunk into the domain
    Eigen::Vector2d h(12.0 * q / curv, -6.0 * q / curv);
    while (!inside(h)) h *= 0.5;
    MixedMgf m = eval(h(0), h(1));
    double obj = m.value - q * h(0);
    double res = (m.gradient - target).norm();
    // relative to the target so large areas are not held to an absolute bound
    const double tol = opts.tolerance * (1.0 + q);
    int it = 0;
    for (; it < opts.max_iterations && res > tol; ++it) {
        const Eigen::Vector2d g = m.gradient - target;
        const Eigen::Vector2d step = m.hessian.ldlt().solve(-g);
        const double slope = g.dot(step);
        double s = 1.0;
        bool moved = false;
        for (int ls = 0; ls < 80; ++ls, s *= 0.5) {
            const Eigen::Vector2d cand = h + s * step;
            if (!inside(cand)) continue;
            const MixedMgf mc = eval(cand(0), cand(1));
            const double oc = mc.value - q * cand(0);
            const double rc = (mc.gradient - target).norm();
            // near the optimum the objective is flat to rounding; accept residual decrease then
            if (oc <= obj + 1e-4 * s * slope || rc < res) {
                h = cand;
                m = mc;
                obj = oc;
                res = rc;
                moved = true;
                break;
            }
        }
        if (!moved) break;
    }
    t.h0 = h(0);
    t.h1 = h(1);
    t.residual = res;
    t.iterations = it;
    if (!(res <= tol))
        throw SolverError("tilt solver did not converge for q = " + std::to_string(q), res);
    return t;
}

}  // namespace

Tilt solve_tilt(double beta, double q, const TiltOptions& opts) {
    const auto p = model_params(beta);
    auto eval = [&](double h0, double h1) { return log_mgf_mixed(beta, Tilt{h0, h1}, opts.nodes); };
    return newton_tilt(p, q, 1.0, eval, opts);
}

Tilt solve_tilt_discrete(double beta, int n, double q, const TiltOptions& opts) {
    if (n < 2) throw DomainError("discrete tilt needs n >= 2");
    const auto p = model_params(beta);
    auto eval = [&](double h0, double h1) { return discrete_mixed(p, n, h0, h1); };
    return newton_tilt(p, q, 1.0 - 1.0 / n, eval, opts);
}

std::vector<double> step_tilts(const Tilt& tilt, int n) {
    std::vector<double> h(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i)
        h[static_cast<std::size_t>(i - 1)] = (1.0 - static_cast<double>(i) / n) * tilt.h0 + tilt.h1;
    return h;
}

double rho(double beta, double q) {
    if (q == 0.0) return 0.0;
    const Tilt t = solve_tilt(beta, q);
    return q * t.h0 - log_mgf_mixed(beta, t).value;
}

double g_tilde(double beta, double a) {
    if (!(a > 0.0)) throw DomainError("a must be positive");
    return a * (std::log(model_params(beta).gamma_beta) - rho(beta, 1.0 / (a * a)));
}

double g_tilde_prime(double beta, double a) {
    if (!(a > 0.0)) throw DomainError("a must be positive");
    const double q = 1.0 / (a * a);
    const Tilt t = solve_tilt(beta, q);
    const double r = q * t.h0 - log_mgf_mixed(beta, t).value;
    return std::log(model_params(beta).gamma_beta) - r + 2.0 * q * t.h0;
}

double a_beta(double beta) {
    if (!(beta > beta_c())) throw DomainError("a(beta) exists only for beta > beta_c");
    auto fp = [&](double a) { return g_tilde_prime(beta, a); };
    double lo = 0.05, hi = 20.0;
    double flo = std::numeric_limits<double>::quiet_NaN();
    // very small a means an area the tilt cannot reach inside the safeguarded domain
    while (lo < hi) {
        try {
            flo = fp(lo);
            break;
        } catch (const SolverError&) {
            lo *= 1.25;
        }
    }
    if (!(flo > 0.0)) throw SolverError("no positive bracket end for G'(a)", flo);
    double fhi = fp(hi);
    for (int k = 0; k < 40 && fhi > 0.0; ++k) {
        lo = hi;
        flo = fhi;
        hi *= 2.0;
        fhi = fp(hi);
    }
    if (fhi > 0.0) throw SolverError("no sign change of G'(a)", fhi);
    boost::uintmax_t iters = 200;
    auto [a, b] = boost::math::tools::toms748_solve(fp, lo, hi, flo, fhi,
                                                    boost::math::tools::eps_tolerance<double>(50), iters);
    return 0.5 * (a + b);
}

double collapse_rate(double beta, double a_or_q, RateKind which) {
    return which == RateKind::rho ? rho(beta, a_or_q) : g_tilde(beta, a_or_q);
}

double wulff_from_tilt(double beta, const Tilt& tilt, double t) {
    if (t < 0.0 || t > 1.0) throw DomainError("wulff time outside [0,1]");
    if (std::abs(tilt.h0) < 1e-14) return t * log_mgf(beta, tilt.h1, 1);
    return (log_mgf(beta, tilt.h0 + tilt.h1, 0) - log_mgf(beta, (1.0 - t) * tilt.h0 + tilt.h1, 0)) / tilt.h0;
}

double wulff(double beta, double q, double t) {
    if (!(q > 0.0)) throw DomainError("wulff needs q > 0");
    return wulff_from_tilt(beta, solve_tilt(beta, q), t);
}

std::vector<double> wulff_profile(double beta, double q, const std::vector<double>& ts) {
    if (!(q > 0.0)) throw DomainError("wulff needs q > 0");
    const Tilt tilt = solve_tilt(beta, q);
    std::vector<double> out;
    out.reserve(ts.size());
    for (double t : ts) out.push_back(wulff_from_tilt(beta, tilt, t));
    return out;
}

}  // namespace ipdsaw
