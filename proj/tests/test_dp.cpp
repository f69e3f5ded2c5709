#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <array>
#include <map>

#include "ipdsaw/dp.hpp"
#include "ipdsaw/errors.hpp"
#include "ipdsaw/thermo.hpp"

using namespace ipdsaw;

namespace {

using Joint = std::map<std::pair<long, long>, double>;

// Law of (V_n, G_n) by explicit convolution of the increment law.
std::vector<Joint> convolve(double beta, int n_max, long g_max, Constraint constraint) {
    const auto p = model_params(beta);
    std::vector<Joint> out(static_cast<std::size_t>(n_max + 1));
    out[0][{0, 0}] = 1.0;
    for (int n = 1; n <= n_max; ++n)
        for (const auto& [key, m] : out[static_cast<std::size_t>(n - 1)]) {
            const auto [v, g] = key;
            for (long u = -g_max - 1; u <= g_max + 1; ++u) {
                const long w = v + u;
                if (constraint == Constraint::positive && w <= 0) continue;
                if (constraint == Constraint::nonzero && w == 0) continue;
                const long h = g + std::labs(w);
                if (h > g_max) continue;
                out[static_cast<std::size_t>(n)][{w, h}] += m * std::pow(p.x, std::labs(u)) / p.c_beta;
            }
        }
    return out;
}

void compare(double beta, Constraint constraint) {
    const int n_max = 6;
    const long g_max = 30;
    const auto table = DpTable::build(beta, n_max, g_max, constraint);
    const auto ref = convolve(beta, n_max, g_max, constraint);
    for (int n = 0; n <= n_max; ++n) {
        for (long g = 0; g <= g_max; ++g)
            for (long v = -g; v <= g; ++v) {
                const auto it = ref[static_cast<std::size_t>(n)].find({v, g});
                const double want = it == ref[static_cast<std::size_t>(n)].end() ? 0.0 : it->second;
                const double got = std::exp(table.log_mass(n, v, g));
                INFO("n=" << n << " v=" << v << " g=" << g << " c=" << int(constraint));
                CHECK(std::abs(got - want) <= 1e-13 * std::max(1.0, want));
            }
    }
}

}  // namespace

TEST_CASE("one step masses") {
    const auto table = DpTable::build(2.0, 1, 20, Constraint::free);
    const auto p = model_params(2.0);
    for (long v = -20; v <= 20; ++v)
        CHECK(std::exp(table.log_mass(1, v, std::labs(v))) ==
              doctest::Approx(std::pow(p.x, std::labs(v)) / p.c_beta).epsilon(1e-14));
    CHECK(table.log_mass(1, 3, 4) == kNegInf);
    CHECK(table.log_mass(0, 0, 0) == 0.0);
}

TEST_CASE("table against explicit convolution") {
    compare(2.0, Constraint::free);
    compare(0.8, Constraint::free);
    compare(2.0, Constraint::positive);
    compare(beta_c(), Constraint::nonzero);
}

TEST_CASE("conditional moments of the alternating sum") {
    const auto table = DpTable::build(1.5, 4, 12, Constraint::free, {.moments = true});
    const auto p = model_params(1.5);
    // brute force over all increment sequences; G_4 <= 12 forces |U| <= 24
    std::map<std::pair<long, long>, std::array<double, 3>> acc;
    const long r = 24;
    std::vector<double> wt(2 * r + 1);
    for (long u = -r; u <= r; ++u) wt[static_cast<std::size_t>(u + r)] = std::pow(p.x, std::labs(u)) / p.c_beta;
    auto rec = [&](auto&& self, int i, long v, long g, long y, double w) -> void {
        if (g > 12) return;
        if (i == 4) {
            auto& a = acc[{v, g}];
            a[0] += w;
            a[1] += w * y;
            a[2] += w * y * y;
            return;
        }
        for (long u = -r; u <= r; ++u) {
            const long nv = v + u;
            self(self, i + 1, nv, g + std::labs(nv), y + (i % 2 == 0 ? nv : -nv), w * wt[static_cast<std::size_t>(u + r)]);
        }
    };
    rec(rec, 0, 0, 0, 0, 1.0);
    for (const auto& [key, a] : acc) {
        CHECK(std::exp(table.log_mass(4, key.first, key.second)) == doctest::Approx(a[0]).epsilon(1e-12));
        CHECK(table.moment1(4, key.first, key.second) == doctest::Approx(a[1] / a[0]).epsilon(1e-10).scale(1.0));
        CHECK(table.moment2(4, key.first, key.second) == doctest::Approx(a[2] / a[0]).epsilon(1e-10).scale(1.0));
    }
    const auto plain = DpTable::build(1.5, 2, 4, Constraint::free);
    CHECK_THROWS_AS(plain.moment1(1, 0, 0), DomainError);
}

TEST_CASE("length cap") {
    const auto full = DpTable::build(2.0, 10, 10, Constraint::free);
    const auto capped = DpTable::build(2.0, 10, 10, Constraint::free, {.length_cap = 10});
    for (int n = 0; n <= 10; ++n) {
        if (n > 0) CHECK(capped.g_cap(n) == 10 - n);
        for (long g = 0; g <= 10 - n; ++g)
            for (long v = -g; v <= g; ++v) CHECK(capped.log_mass(n, v, g) == full.log_mass(n, v, g));
    }
}

TEST_CASE("memory budget") {
    CHECK_THROWS_AS(DpTable::build(2.0, 2000, 2000, Constraint::free, {.memory_budget = 1 << 20}), BudgetError);
    CHECK_THROWS_AS(DpTable::build(2.0, -1, 10, Constraint::free), DomainError);
    CHECK(DpTable::estimate_bytes(10, 10, -1, false) < DpTable::estimate_bytes(10, 10, -1, true));
}

TEST_CASE("cache round trip") {
    const auto path = (std::filesystem::temp_directory_path() / "ipdsaw_test_cache.bin").string();
    const auto table = DpTable::build(1.7, 12, 25, Constraint::nonzero, {.length_cap = 30});
    table.save(path);
    const auto back = DpTable::load(path);
    CHECK(back.beta() == table.beta());
    CHECK(back.n_max() == 12);
    CHECK(back.g_max() == 25);
    CHECK(back.length_cap() == 30);
    CHECK(back.constraint() == Constraint::nonzero);
    for (int n = 0; n <= 12; ++n) CHECK(back.layer(n).log_mass == table.layer(n).log_mass);
    {
        std::FILE* f = std::fopen(path.c_str(), "r+b");
        REQUIRE(f != nullptr);
        std::fputs("XXXX", f);
        std::fclose(f);
    }
    CHECK_THROWS_AS(DpTable::load(path), DomainError);
    std::filesystem::resize_file(path, 10);
    CHECK_THROWS_AS(DpTable::load(path), DomainError);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(DpTable::load(path), DomainError);
}

TEST_CASE("log_add") {
    CHECK(log_add(std::log(2.0), std::log(3.0)) == doctest::Approx(std::log(5.0)));
    CHECK(log_add(kNegInf, 1.5) == 1.5);
    CHECK(log_add(kNegInf, kNegInf) == kNegInf);
}

TEST_CASE("table cache directory") {
    const auto dir = (std::filesystem::temp_directory_path() / "ipdsaw_cache_test").string();
    std::filesystem::remove_all(dir);
    const auto a = cached_table(dir, 2.0, 8, 8, Constraint::free, {.length_cap = 8});
    const auto file = std::filesystem::path(dir) / cache_file_name(2.0, 8, 8, Constraint::free, 8);
    CHECK(std::filesystem::exists(file));
    const auto b = cached_table(dir, 2.0, 8, 8, Constraint::free, {.length_cap = 8});
    for (int n = 0; n <= 8; ++n) CHECK(a.layer(n).log_mass == b.layer(n).log_mass);
    CHECK(cache_file_name(2.0, 8, 8, Constraint::free, 8) != cache_file_name(2.0, 8, 8, Constraint::positive, 8));
    CHECK(cache_file_name(2.0, 8, 8, Constraint::free, 8) != cache_file_name(std::nextafter(2.0, 3.0), 8, 8, Constraint::free, 8));
    std::filesystem::remove_all(dir);
}
