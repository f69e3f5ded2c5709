#include "ipdsaw/critical_constants.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/airy.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <mutex>
#include <numbers>
#include <vector>

#include "ipdsaw/errors.hpp"
#include "ipdsaw/thermo.hpp"

namespace ipdsaw {

namespace {

// Tricomi U(-5/6, 4/3, z) = (z-1) U(1/6, 4/3, z) + U(7/6, 4/3, z)/36, with both
// terms from the integral representation after t = s^6, which removes the
// endpoint singularity.
double tricomi_u_airy(double z) {
    static thread_local std::vector<double> nodes, weights;
    if (nodes.empty()) gauss_legendre_unit(96, nodes, weights);
    static const double g1 = std::tgamma(1.0 / 6.0);
    static const double g7 = std::tgamma(7.0 / 6.0);
    const double top = std::pow(60.0 / z, 1.0 / 6.0);
    double s1 = 0.0, s7 = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const double u = top * nodes[k];
        const double u3 = u * u * u;
        const double u6 = u3 * u3;
        const double e = weights[k] * std::exp(-z * u6);
        const double r = std::pow(1.0 + u6, 1.0 / 6.0);
        s1 += e * r;
        s7 += e * u6 * r / (1.0 + u6);
    }
    const double u1 = 6.0 * top * s1 / g1;
    const double u7 = 6.0 * top * s7 / g7;
    return (z - 1.0) * u1 + u7 / 36.0;
}

const std::vector<double>& airy_zero_moduli() {
    static const std::vector<double> zeros = [] {
        std::vector<double> z;
        for (int j = 1; j <= 400; ++j) z.push_back(-boost::math::airy_ai_zero<double>(j));
        return z;
    }();
    return zeros;
}

}  // namespace

double airy_density(double a) {
    if (!(a > 0.0)) throw DomainError("airy density needs a positive argument");
    if (a < 0.03) return 0.0;  // below e^{-700}
    if (a > 2.5) {
        // leading right tail; the series loses all digits to cancellation here
        return 72.0 * std::sqrt(6.0 / std::numbers::pi) * a * a * std::exp(-6.0 * a * a);
    }
    const auto& zeros = airy_zero_moduli();
    double s = 0.0;
    for (double r : zeros) {
        const double v = 2.0 * r * r * r / (27.0 * a * a);
        if (v > 700.0) break;
        s += std::pow(v, 2.0 / 3.0) * std::exp(-v) * tricomi_u_airy(v);
    }
    return 2.0 * std::sqrt(6.0) / (a * a) * s;
}

double airy_moment(double p) {
    auto f = [p](double a) { return std::pow(a, p) * airy_density(a); };
    using boost::math::quadrature::gauss_kronrod;
    double total = 0.0;
    const double cuts[] = {0.03, 0.2, 0.4, 0.7, 1.0, 1.5, 2.0, 2.5, 4.5};
    for (std::size_t i = 0; i + 1 < std::size(cuts); ++i)
        total += gauss_kronrod<double, 31>::integrate(f, cuts[i], cuts[i + 1], 6, 1e-13);
    return total;
}

double excursion_area_density(double beta, double t) {
    if (!(t > 0.0)) throw DomainError("excursion area density needs t > 0");
    const auto p = model_params(beta);
    const double var = 2.0 * p.x / ((1.0 - p.x) * (1.0 - p.x));
    const double c = 1.0 / std::sqrt(var);
    return c * airy_density(c * t);
}

namespace {

double airy_cube_root_moment() {
    static std::once_flag once;
    static double value = 0.0;
    std::call_once(once, [] { value = airy_moment(1.0 / 3.0); });
    return value;
}

}  // namespace

CritConstants crit_constants(double beta) {
    const auto p = model_params(beta);
    CritConstants c;
    c.beta = beta;
    c.var_v1 = 2.0 * p.x / ((1.0 - p.x) * (1.0 - p.x));
    c.c_big = 1.0 / std::sqrt(c.var_v1);
    // (2/3) int t^{1/3} C f(C t) dt = (2/3) C^{-1/3} E[A^{1/3}]
    c.airy_integral = (2.0 / 3.0) * std::pow(c.c_big, -1.0 / 3.0) * airy_cube_root_moment();
    const double pre = 1.0 + std::exp(beta / 2.0);
    c.c_tau = pre * std::sqrt(c.var_v1 / (2.0 * std::numbers::pi));
    c.c_tail = c.c_tau * c.airy_integral;
    c.z_prefactor = pre / (std::sqrt(24.0 * std::numbers::pi * c.var_v1) * c.airy_integral);
    c.c_tau_ladder = p.c_beta / std::sqrt(2.0 * std::numbers::pi * c.var_v1);
    c.c_tail_ladder = c.c_tau_ladder * c.airy_integral;
    c.z_prefactor_ladder = (1.0 + p.x) / (std::sqrt(12.0 * std::numbers::pi * p.x) * c.airy_integral);
    return c;
}

double mu_beta(double beta, std::int64_t k) {
    const double x = model_params(beta).x;
    if (k == 0) return 1.0 - x;
    return 0.5 * (1.0 - x) * std::pow(x, static_cast<double>(std::llabs(k)));
}

std::int64_t sample_mu_beta(double beta, RngStream& rng) {
    const double x = model_params(beta).x;
    const double u = rng.uniform();
    if (u < 1.0 - x) return 0;
    // |k| - 1 is geometric with ratio x
    const double g = std::floor(std::log(rng.uniform_open()) / std::log(x));
    const auto k = static_cast<std::int64_t>(1.0 + g);
    return rng.uniform() < 0.5 ? k : -k;
}

}  // namespace ipdsaw
