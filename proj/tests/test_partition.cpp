#include <doctest.h>

#include <cmath>

#include "ipdsaw/dp.hpp"
#include "ipdsaw/errors.hpp"
#include "ipdsaw/partition.hpp"
#include "ipdsaw/polymer.hpp"
#include "ipdsaw/thermo.hpp"

using namespace ipdsaw;

TEST_CASE("excess partition against enumeration") {
    for (double beta : {0.5, beta_c(), 2.0}) {
        const auto curve = partition_curve(beta, 12);
        for (Int L = 1; L <= 12; ++L) {
            const auto e = enumerate_Z(L, beta);
            double zc = 0.0;
            std::vector<double> by_n(static_cast<std::size_t>(L + 1), 0.0);
            for (const auto& c : e.configs) {
                if (c.path.stretches().back() == 0) zc += c.weight;
                by_n[c.path.size()] += c.prob;
            }
            const double scale = std::exp(-beta * static_cast<double>(L));
            CHECK(std::abs(std::exp(curve.log_z[static_cast<std::size_t>(L)]) / (e.z * scale) - 1.0) < 1e-10);
            CHECK(std::abs(std::exp(curve.log_zc[static_cast<std::size_t>(L)]) / (zc * scale) - 1.0) < 1e-10);
            const auto law = extension_law(curve, L);
            for (Int n = 1; n <= L; ++n) CHECK(std::abs(law.probs[static_cast<std::size_t>(n)] - by_n[static_cast<std::size_t>(n)]) < 1e-12);
        }
    }
    CHECK(excess_partition(2.0, 5) == doctest::Approx(partition_curve(2.0, 5).log_z[5]));
}

TEST_CASE("extension law") {
    for (double beta : {0.3, 1.0, 3.0}) {
        const auto law = extension_law(beta, 2);
        CHECK(law.probs[1] == doctest::Approx(2.0 / 3.0));
        CHECK(law.probs[2] == doctest::Approx(1.0 / 3.0));
    }
    const auto law = extension_law(2.0, 200);
    double total = 0.0, mean = 0.0;
    for (std::size_t n = 1; n < law.probs.size(); ++n) {
        total += law.probs[n];
        mean += static_cast<double>(n) * law.probs[n];
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(law.mean() == doctest::Approx(mean));
    const auto cdf = law.cdf();
    CHECK(cdf.back() == doctest::Approx(1.0));
    const auto arg = static_cast<std::size_t>(law.argmax());
    for (std::size_t n = 1; n < law.probs.size(); ++n) CHECK(law.probs[n] <= law.probs[arg]);
    const auto csv = extension_law_csv(extension_law(2.0, 3));
    CHECK(csv.rfind("L,beta,N,prob,log_contrib\n", 0) == 0);
    CHECK_THROWS_AS(partition_curve(2.0, 0), DomainError);
    CHECK_THROWS_AS(partition_curve(2.0, kEngineLimit + 1), DomainError);
    CHECK_THROWS_AS(extension_law(partition_curve(2.0, 5), 6), DomainError);
}

TEST_CASE("pattern partition against enumeration") {
    const double beta = 0.8;
    const auto pc = pattern_curve(beta, 10);
    for (Int t = 1; t <= 10; ++t) {
        double w = 0.0;
        for (const auto& c : enumerate_Z(t, beta).configs) {
            const auto d = decompose_patterns(c.path);
            if (d.patterns.size() == 1 && !d.trailing_remainder) w += c.weight;
        }
        w *= std::exp(-beta * static_cast<double>(t));
        if (w == 0.0) CHECK(pc.log_zhat[static_cast<std::size_t>(t)] == kNegInf);
        else CHECK(std::abs(std::exp(pc.log_zhat[static_cast<std::size_t>(t)]) / w - 1.0) < 1e-10);
    }
    CHECK(pattern_partition(beta, 2) == 0.0);
    CHECK(pattern_partition(beta, 1) == doctest::Approx(model_params(beta).gamma_beta / model_params(beta).c_beta));
}

TEST_CASE("renewal decomposition into patterns") {
    // Z~_L = R_L + sum_t Zhat_t Z~_{L-t}, where R_L collects paths without a zero stretch
    const double beta = 0.8;
    const Int top = 40;
    const auto p = model_params(beta);
    const auto curve = partition_curve(beta, top);
    const auto pc = pattern_curve(beta, top);
    const auto nz = DpTable::build(beta, top, top, Constraint::nonzero, {.length_cap = top});
    for (Int L = 1; L <= top; ++L) {
        double r = 0.0;
        for (Int n = 1; n <= L; ++n) {
            const Int g = L - n;
            for (Int u = -g; u <= g; ++u) {
                if (u == 0) continue;
                const double lm = nz.log_mass(n, u, g);
                if (lm != kNegInf) r += std::exp(lm + static_cast<double>(n) * std::log(p.gamma_beta)) * std::pow(p.x, std::abs(u));
            }
        }
        double s = r;
        for (Int t = 1; t <= L; ++t) {
            const double zprev = t == L ? 1.0 : std::exp(curve.log_z[static_cast<std::size_t>(L - t)]);
            s += std::exp(pc.log_zhat[static_cast<std::size_t>(t)]) * zprev;
        }
        CHECK(s == doctest::Approx(std::exp(curve.log_z[static_cast<std::size_t>(L)])).epsilon(1e-11));
    }
}

TEST_CASE("regenerative constants in the extended phase") {
    const double beta = 0.8;
    const auto rc = extended_constants(beta);
    CHECK(std::abs(rc.phi_at_root - 1.0) < 1e-9);
    CHECK(rc.f_tilde > 0.0);
    CHECK(rc.e_beta > 0.0);
    CHECK(rc.e_beta < 1.0);
    CHECK(rc.sigma_beta > 0.0);
    CHECK(rc.tail_bound < 1e-9);
    CHECK(rc.c_renewal == doctest::Approx(1.0 / rc.mean_sigma));
    // free energy and mean extension per unit length from exact curves
    const auto curve = partition_curve(beta, 512);
    const double f = (curve.log_z[512] - curve.log_z[256]) / 256.0;
    CHECK(f == doctest::Approx(rc.f_tilde).epsilon(1e-8));
    const double e = (extension_law(curve, 512).mean() - extension_law(curve, 256).mean()) / 256.0;
    CHECK(e == doctest::Approx(rc.e_beta).epsilon(1e-6));
    // exp(-f L) Z~_L converges to exp(beta + f) / E sigma
    const double lim = std::exp(curve.log_z[512] - rc.f_tilde * 512.0);
    CHECK(lim == doctest::Approx(std::exp(beta + rc.f_tilde) * rc.c_renewal).epsilon(1e-8));
    CHECK_THROWS_AS(extended_constants(2.0), DomainError);
    CHECK_THROWS_AS(extended_constants(beta_c()), DomainError);
}

TEST_CASE("critical and collapsed curves") {
    const auto crit = partition_curve(beta_c(), 256);
    const auto coll = partition_curve(2.0, 256);
    for (Int L = 20; L < 256; ++L) {
        CHECK(crit.log_z[static_cast<std::size_t>(L + 1)] < crit.log_z[static_cast<std::size_t>(L)]);
        CHECK(coll.log_z[static_cast<std::size_t>(L + 1)] < coll.log_z[static_cast<std::size_t>(L)]);
    }
    CHECK(crit.log_z[256] > coll.log_z[256]);
}
