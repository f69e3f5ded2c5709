#include <doctest.h>

#include <cmath>

#include "ipdsaw/critical_constants.hpp"
#include "ipdsaw/errors.hpp"
#include "ipdsaw/partition.hpp"
#include "ipdsaw/renewal.hpp"
#include "ipdsaw/samplers.hpp"
#include "ipdsaw/stats.hpp"
#include "ipdsaw/thermo.hpp"

using namespace ipdsaw;

TEST_CASE("renewal form of the partition function") {
    const auto r = crit_renewal(257);
    const auto curve = partition_curve(beta_c(), 256);
    for (Int L = 1; L <= 256; ++L)
        CHECK(std::abs(r.log_z[static_cast<std::size_t>(L)] - curve.log_z[static_cast<std::size_t>(L)]) < 1e-10);
    const auto off = crit_renewal(400, 1.6);
    CHECK(off.log_z.empty());
    double total = off.tail_mu;
    for (double p : off.p_x_mu) total += p;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(crit_renewal(1), DomainError);
}

TEST_CASE("excursion laws") {
    const auto r = crit_renewal(2048);
    double total = 0.0;
    for (double p : r.p_x_mu) total += p;
    CHECK(std::abs(total + r.tail_mu - 1.0) < 1e-12);
    CHECK(r.tail_mu > 0.0);
    CHECK(r.u_mu[0] == 1.0);
    const auto cc = crit_constants(beta_c());
    const double n = 2000.0;
    CHECK(std::pow(n, 4.0 / 3.0) * r.p_x_mu[2000] == doctest::Approx(cc.c_tail_ladder).epsilon(0.02));
    CHECK(std::pow(n, 1.5) * r.p_tau_mu[2000] == doctest::Approx(cc.c_tau_ladder).epsilon(0.02));
    // |V_tau| follows the folded invariant law
    const double x = model_params(beta_c()).x;
    double tv = 0.0;
    for (std::size_t k = 0; k < r.vtau_law.size(); ++k) {
        const double want = k == 0 ? 1.0 - x : (1.0 - x) * std::pow(x, static_cast<double>(k));
        tv += 0.5 * std::abs(r.vtau_law[k] - want);
    }
    CHECK(tv < 1e-3);
}

TEST_CASE("excursion sampler matches the exact laws") {
    const auto r = crit_renewal(64);
    RngStream rng(77, 0);
    const auto ex = critical_excursions(200000, rng, ExcursionStart::mu_beta);
    std::vector<double> cx(64, 0.0), ct(64, 0.0), cv(8, 0.0);
    double ox = 0.0, ot = 0.0, ov = 0.0, finished = 0.0;
    for (const auto& e : ex) {
        // censored excursions are longer than any listed cell
        if (e.censored) {
            ox += 1;
            ot += 1;
            continue;
        }
        finished += 1;
        if (e.x() < 64) cx[static_cast<std::size_t>(e.x())] += 1;
        else ox += 1;
        if (e.extension < 64) ct[static_cast<std::size_t>(e.extension)] += 1;
        else ot += 1;
        const auto a = std::llabs(e.vtau);
        if (a < 8) cv[static_cast<std::size_t>(a)] += 1;
        else ov += 1;
    }
    std::vector<double> px(r.p_x_mu.begin(), r.p_x_mu.begin() + 64), pt(r.p_tau_mu.begin(), r.p_tau_mu.begin() + 64);
    CHECK(stats::chi_square(cx, px, ox).p_value > 1e-3);
    CHECK(stats::chi_square(ct, pt, ot).p_value > 1e-3);
    std::vector<double> pv(8);
    const double x = model_params(beta_c()).x;
    for (std::size_t k = 0; k < 8; ++k) pv[k] = k == 0 ? 1.0 - x : (1.0 - x) * std::pow(x, static_cast<double>(k));
    // V_tau of finished excursions; censoring removes well under 1% of them
    for (auto& v : cv) v /= finished;
    CHECK(stats::total_variation(cv, pv) < 0.01);
    CHECK(ov / finished < 0.01);

    std::vector<double> c0(64, 0.0);
    double o0 = 0.0;
    for (int i = 0; i < 50000; ++i) {
        const auto e = critical_excursions(1, rng, ExcursionStart::zero).front();
        CHECK(e.start == 0);
        if (e.x() < 64) c0[static_cast<std::size_t>(e.x())] += 1;
        else o0 += 1;
    }
    std::vector<double> p0(r.p_x_zero.begin(), r.p_x_zero.begin() + 64);
    CHECK(stats::chi_square(c0, p0, o0).p_value > 1e-3);
}

TEST_CASE("excursions chain their start values") {
    RngStream rng(3, 0);
    const auto ex = critical_excursions(1000, rng, ExcursionStart::zero);
    for (std::size_t i = 1; i < ex.size(); ++i)
        if (!ex[i - 1].censored) CHECK(ex[i].start == ex[i - 1].vtau);
    RngStream rng2(4, 0);
    const auto capped = critical_excursions(500, rng2, ExcursionStart::mu_beta, {.step_cap = 5});
    bool any = false;
    for (const auto& e : capped) {
        CHECK(e.extension <= 5);
        any = any || e.censored;
    }
    CHECK(any);
}
