#include <doctest.h>

#include <cmath>
#include <map>

#include "ipdsaw/errors.hpp"
#include "ipdsaw/exact_sampler.hpp"
#include "ipdsaw/partition.hpp"
#include "ipdsaw/polymer.hpp"
#include "ipdsaw/stats.hpp"
#include "ipdsaw/thermo.hpp"

using namespace ipdsaw;

TEST_CASE("configuration probabilities") {
    for (double beta : {0.8, beta_c(), 2.0}) {
        ExactSampler s(beta, 10);
        const auto curve = partition_curve(beta, 10);
        for (Int L = 1; L <= 10; ++L) {
            CHECK(s.log_z(L) == doctest::Approx(curve.log_z[static_cast<std::size_t>(L)]).epsilon(1e-12));
            const auto probs = s.extension_probs(L);
            const auto law = extension_law(curve, L);
            for (std::size_t n = 1; n < law.probs.size(); ++n) CHECK(std::abs(probs[n] - law.probs[n]) < 1e-12);
            for (const auto& c : enumerate_Z(L, beta).configs)
                CHECK(std::abs(s.path_probability(c.path) - c.prob) < 1e-12);
        }
    }
}

TEST_CASE("exact draws follow the polymer measure") {
    const double beta = 2.0;
    const Int L = 7;
    ExactSampler s(beta, 12);
    const auto e = enumerate_Z(L, beta);
    std::map<std::vector<Int>, std::size_t> index;
    std::vector<double> probs, counts(e.configs.size(), 0.0);
    for (const auto& c : e.configs) {
        index[c.path.stretches()] = probs.size();
        probs.push_back(c.prob);
    }
    RngStream rng(5, 0);
    for (int i = 0; i < 60000; ++i) {
        const auto p = s.sample(L, rng);
        CHECK(p.total_length() == L);
        counts[index.at(p.stretches())] += 1.0;
    }
    CHECK(stats::chi_square(counts, probs).p_value > 1e-3);
}

TEST_CASE("extension and energy histograms at a larger length") {
    const double beta = 0.8;
    const Int L = 40;
    ExactSampler s(beta, L);
    const auto probs = s.extension_probs(L);
    std::vector<double> counts(probs.size(), 0.0);
    RngStream rng(6, 0);
    std::vector<double> energies;
    for (int i = 0; i < 20000; ++i) {
        const auto p = s.sample(L, rng);
        counts[p.size()] += 1.0;
        energies.push_back(hamiltonian(p, beta));
    }
    CHECK(stats::chi_square(counts, probs).p_value > 1e-3);
    // d/dbeta log Z_L = E[H / beta]
    const double h = 1e-5;
    const double dlogz = (partition_curve(beta + h, L).log_z[L] - partition_curve(beta - h, L).log_z[L]) / (2 * h) +
                         static_cast<double>(L);
    for (auto& v : energies) v /= beta;
    const auto m = stats::mean_se(energies);
    CHECK(std::abs(m.value - dlogz) < 4.0 * m.se);
}

TEST_CASE("sampler range") {
    ExactSampler s(2.0, 10);
    RngStream rng(1, 0);
    CHECK_THROWS_AS(s.sample(11, rng), DomainError);
    CHECK_THROWS_AS(s.sample(0, rng), DomainError);
    CHECK_THROWS_AS(ExactSampler(2.0, kEngineLimit + 1), DomainError);
    CHECK(exact_sampler(2.0, 9, rng).total_length() == 9);
}

TEST_CASE("mixture window") {
    CHECK(mixture_epsilon(3, kEngineLimit) == 0);
    CHECK(mixture_epsilon(1000, kEngineLimit) == 250);
    CHECK(mixture_epsilon(2000, kEngineLimit) == 48);
    const auto w3 = mixture_window(2.0, 3, kEngineLimit);
    CHECK(w3.lo == 3);
    CHECK(w3.hi == 3);
    CHECK(w3.weights.size() == 1);
    CHECK(w3.weights[0] == 1.0);

    const auto w = mixture_window(2.0, 20, kEngineLimit);
    CHECK(w.epsilon == 5);
    CHECK(w.lo == 15);
    CHECK(w.hi == 25);
    const auto curve = partition_curve(2.0, 25);
    double total = 0.0;
    for (Int k = w.lo; k <= w.hi; ++k) total += std::exp(curve.log_z[static_cast<std::size_t>(k)]);
    for (Int k = w.lo; k <= w.hi; ++k)
        CHECK(w.weights[static_cast<std::size_t>(k - w.lo)] ==
              doctest::Approx(std::exp(curve.log_z[static_cast<std::size_t>(k)]) / total).epsilon(1e-12));

    MixtureSampler ms(2.0, 20, kEngineLimit);
    RngStream rng(3, 0);
    std::vector<double> counts(w.weights.size(), 0.0);
    for (int i = 0; i < 20000; ++i) {
        const auto d = ms.sample(rng);
        REQUIRE(d.length >= w.lo);
        REQUIRE(d.length <= w.hi);
        CHECK(d.path.total_length() == d.length);
        counts[static_cast<std::size_t>(d.length - w.lo)] += 1.0;
    }
    CHECK(stats::chi_square(counts, w.weights).p_value > 1e-3);
    CHECK(mixture_sampler(2.0, 3, rng).length == 3);
}
