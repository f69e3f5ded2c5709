#include "ipdsaw/dp.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "ipdsaw/errors.hpp"
#include "ipdsaw/thermo.hpp"

namespace ipdsaw {

void DpLayer::reset(std::int64_t new_cap, bool moments) {
    cap = new_cap;
    const std::size_t n = layer_cells(new_cap);
    log_mass.assign(n, kNegInf);
    if (moments) {
        mu1.assign(n, 0.0);
        mu2.assign(n, 0.0);
    } else {
        mu1.clear();
        mu2.clear();
    }
}

StepKernel make_kernel(double beta, Constraint constraint, bool moments) {
    const auto p = model_params(beta);
    return StepKernel{-beta / 2.0, p.x, std::log(p.c_beta), constraint, moments};
}

void init_layer(DpLayer& layer, std::int64_t cap, bool moments) {
    layer.reset(std::max<std::int64_t>(cap, 0), moments);
    layer.log_mass[cell_index(0, 0)] = 0.0;
}

namespace {

// Scaled accumulator: value = m * exp(base); a1, a2 carry moment-weighted sums.
struct Acc {
    double base = kNegInf;
    double m = 0.0;
    double a1 = 0.0;
    double a2 = 0.0;

    template <bool M>
    void add(double l, double u1, double u2) {
        if (l == kNegInf) return;
        if (l > base) {
            const double s = (base == kNegInf) ? 0.0 : std::exp(base - l);
            m = m * s + 1.0;
            if constexpr (M) {
                a1 = a1 * s + u1;
                a2 = a2 * s + u2;
            }
            base = l;
        } else {
            const double e = std::exp(l - base);
            m += e;
            if constexpr (M) {
                a1 += e * u1;
                a2 += e * u2;
            }
        }
    }

    template <bool M>
    void scale(double x) {
        m *= x;
        if constexpr (M) {
            a1 *= x;
            a2 *= x;
        }
        if (m < 1e-250) {
            if (m > 0.0) {
                base += std::log(m);
                if constexpr (M) {
                    a1 /= m;
                    a2 /= m;
                }
                m = 1.0;
            } else {
                *this = Acc{};
            }
        }
    }
};

template <bool M>
void step_impl(const StepKernel& k, const DpLayer& src, std::int64_t n, DpLayer& dst, std::int64_t dst_cap) {
    dst.reset(dst_cap, M);
    if (dst_cap < 0 || src.cap < 0) return;
    const bool reflect = k.constraint != Constraint::positive;
    const std::int64_t v_min = k.constraint == Constraint::free ? 0 : 1;
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;  // coefficient of V_{n+1} in Y_{n+1}
    static thread_local std::vector<Acc> left, right;
    const std::int64_t src_top = std::min(src.cap, dst_cap);
    for (std::int64_t g = 0; g <= src_top; ++g) {
        const std::int64_t v_hi = dst_cap - g;
        if (v_hi < v_min) continue;
        const double* lm = &src.log_mass[cell_index(0, g)];
        const double* m1 = M ? &src.mu1[cell_index(0, g)] : nullptr;
        const double* m2 = M ? &src.mu2[cell_index(0, g)] : nullptr;
        bool any = false;
        for (std::int64_t u = 0; u <= g; ++u)
            if (lm[u] != kNegInf) {
                any = true;
                break;
            }
        if (!any) continue;
        left.resize(static_cast<std::size_t>(v_hi + 1));
        right.resize(static_cast<std::size_t>(v_hi + 1));

        Acc acc;
        for (std::int64_t v = 0; v <= v_hi; ++v) {
            if (v > 0) acc.scale<M>(k.x);
            if (v <= g) acc.add<M>(lm[v], M ? m1[v] : 0.0, M ? m2[v] : 0.0);
            left[static_cast<std::size_t>(v)] = acc;
        }
        acc = Acc{};
        const std::int64_t top = std::max(g, v_hi);
        if (top <= v_hi) right[static_cast<std::size_t>(top)] = acc;
        for (std::int64_t w = top - 1; w >= 0; --w) {
            if (w + 1 <= g) acc.add<M>(lm[w + 1], M ? m1[w + 1] : 0.0, M ? m2[w + 1] : 0.0);
            acc.scale<M>(k.x);
            if (w <= v_hi) right[static_cast<std::size_t>(w)] = acc;
        }
        Acc refl;
        if (reflect)
            for (std::int64_t u = 1; u <= g; ++u)
                refl.add<M>(lm[u] + static_cast<double>(u) * k.log_x, M ? -m1[u] : 0.0, M ? m2[u] : 0.0);

        for (std::int64_t v = v_min; v <= v_hi; ++v) {
            const Acc& a = left[static_cast<std::size_t>(v)];
            const Acc& b = right[static_cast<std::size_t>(v)];
            const double fb = refl.base == kNegInf ? kNegInf : refl.base + static_cast<double>(v) * k.log_x;
            const double big = std::max({a.base, b.base, fb});
            if (big == kNegInf) continue;
            const double wa = a.base == kNegInf ? 0.0 : std::exp(a.base - big);
            const double wb = b.base == kNegInf ? 0.0 : std::exp(b.base - big);
            const double wf = fb == kNegInf ? 0.0 : std::exp(fb - big);
            const double total = wa * a.m + wb * b.m + wf * refl.m;
            if (!(total > 0.0)) continue;
            const std::size_t idx = cell_index(v, g + v);
            dst.log_mass[idx] = big + std::log(total) - k.log_c;
            if constexpr (M) {
                const double r1 = (wa * a.a1 + wb * b.a1 + wf * refl.a1) / total;
                const double r2 = (wa * a.a2 + wb * b.a2 + wf * refl.a2) / total;
                const double sv = sign * static_cast<double>(v);
                dst.mu1[idx] = r1 + sv;
                dst.mu2[idx] = r2 + 2.0 * sv * r1 + sv * sv;
            }
        }
    }
}

}  // namespace

void step_layer(const StepKernel& k, const DpLayer& src, std::int64_t n, DpLayer& dst, std::int64_t dst_cap) {
    if (k.moments)
        step_impl<true>(k, src, n, dst, dst_cap);
    else
        step_impl<false>(k, src, n, dst, dst_cap);
}

std::int64_t DpTable::g_cap(std::int64_t n) const {
    if (n == 0) return 0;
    std::int64_t cap = g_max_;
    if (length_cap_ >= 0) cap = std::min(cap, length_cap_ - n);
    return cap;
}

std::size_t DpTable::estimate_bytes(std::int64_t n_max, std::int64_t g_max, std::int64_t length_cap,
                                    bool moments) {
    std::size_t cells = 1;
    for (std::int64_t n = 1; n <= n_max; ++n) {
        std::int64_t cap = g_max;
        if (length_cap >= 0) cap = std::min(cap, length_cap - n);
        cells += layer_cells(cap);
    }
    return cells * sizeof(double) * (moments ? 3 : 1);
}

DpTable DpTable::build(double beta, std::int64_t n_max, std::int64_t g_max, Constraint constraint,
                       const DpBuildOptions& opts) {
    if (n_max < 0 || g_max < 0) throw DomainError("table dimensions must be non-negative");
    const std::size_t bytes = estimate_bytes(n_max, g_max, opts.length_cap, opts.moments);
    if (bytes > opts.memory_budget)
        throw BudgetError("walk-area table needs " + std::to_string(bytes) + " bytes, budget " +
                              std::to_string(opts.memory_budget),
                          bytes);
    DpTable t;
    t.beta_ = beta;
    t.n_max_ = n_max;
    t.g_max_ = g_max;
    t.length_cap_ = opts.length_cap;
    t.constraint_ = constraint;
    t.moments_ = opts.moments;
    const StepKernel k = make_kernel(beta, constraint, opts.moments);
    t.layers_.resize(static_cast<std::size_t>(n_max + 1));
    init_layer(t.layers_[0], 0, opts.moments);
    for (std::int64_t n = 0; n < n_max; ++n)
        step_layer(k, t.layers_[static_cast<std::size_t>(n)], n, t.layers_[static_cast<std::size_t>(n + 1)],
                   t.g_cap(n + 1));
    return t;
}

double DpTable::log_mass(std::int64_t n, std::int64_t v, std::int64_t g) const {
    if (n < 0 || n > n_max_ || g < 0) return kNegInf;
    if (constraint_ == Constraint::positive && v < 0) return kNegInf;
    return layers_[static_cast<std::size_t>(n)].at(v < 0 ? -v : v, g);
}

double DpTable::moment1(std::int64_t n, std::int64_t v, std::int64_t g) const {
    if (!moments_) throw DomainError("table built without moments");
    const auto& L = layers_.at(static_cast<std::size_t>(n));
    const std::int64_t a = v < 0 ? -v : v;
    if (g > L.cap || a > g) return 0.0;
    const double m = L.mu1[cell_index(a, g)];
    return v < 0 ? -m : m;
}

double DpTable::moment2(std::int64_t n, std::int64_t v, std::int64_t g) const {
    if (!moments_) throw DomainError("table built without moments");
    const auto& L = layers_.at(static_cast<std::size_t>(n));
    const std::int64_t a = v < 0 ? -v : v;
    if (g > L.cap || a > g) return 0.0;
    return L.mu2[cell_index(a, g)];
}

namespace {

template <class T>
void put(std::ofstream& out, T value) {
    static_assert(std::endian::native == std::endian::little, "cache writer assumes little-endian host");
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T get(std::ifstream& in) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) throw DomainError("truncated table cache");
    return value;
}

}  // namespace

void DpTable::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DomainError("cannot write table cache " + path);
    out.write("IPDW", 4);
    put<std::uint32_t>(out, kCacheVersion);
    put<double>(out, beta_);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(n_max_));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(g_max_));
    put<std::uint8_t>(out, static_cast<std::uint8_t>(constraint_));
    put<std::int64_t>(out, length_cap_);
    for (const auto& layer : layers_)
        out.write(reinterpret_cast<const char*>(layer.log_mass.data()),
                  static_cast<std::streamsize>(layer.log_mass.size() * sizeof(double)));
    if (!out) throw DomainError("failed writing table cache " + path);
}

DpTable DpTable::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DomainError("cannot open table cache " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "IPDW", 4) != 0) throw DomainError("not a table cache: " + path);
    if (get<std::uint32_t>(in) != kCacheVersion) throw DomainError("table cache version mismatch");
    DpTable t;
    t.beta_ = get<double>(in);
    t.n_max_ = get<std::uint32_t>(in);
    t.g_max_ = get<std::uint32_t>(in);
    const auto c = get<std::uint8_t>(in);
    if (c > 2) throw DomainError("unknown constraint in table cache");
    t.constraint_ = static_cast<Constraint>(c);
    t.length_cap_ = get<std::int64_t>(in);
    t.layers_.resize(static_cast<std::size_t>(t.n_max_ + 1));
    for (std::int64_t n = 0; n <= t.n_max_; ++n) {
        auto& layer = t.layers_[static_cast<std::size_t>(n)];
        layer.reset(t.g_cap(n), false);
        in.read(reinterpret_cast<char*>(layer.log_mass.data()),
                static_cast<std::streamsize>(layer.log_mass.size() * sizeof(double)));
        if (!in) throw DomainError("truncated table cache");
    }
    return t;
}

std::string cache_file_name(double beta, std::int64_t n_max, std::int64_t g_max, Constraint constraint,
                            std::int64_t length_cap) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "ipdw_b%016llx_N%lld_G%lld_c%d_cap%lld_v%u.bin",
                  static_cast<unsigned long long>(std::bit_cast<std::uint64_t>(beta)), static_cast<long long>(n_max),
                  static_cast<long long>(g_max), static_cast<int>(constraint), static_cast<long long>(length_cap),
                  kCacheVersion);
    return buf;
}

DpTable cached_table(const std::string& dir, double beta, std::int64_t n_max, std::int64_t g_max,
                     Constraint constraint, const DpBuildOptions& opts) {
    // moments are never cached
    if (dir.empty() || opts.moments) return DpTable::build(beta, n_max, g_max, constraint, opts);
    namespace fs = std::filesystem;
    const fs::path file = fs::path(dir) / cache_file_name(beta, n_max, g_max, constraint, opts.length_cap);
    if (fs::exists(file)) {
        auto t = DpTable::load(file.string());
        if (t.beta() == beta && t.n_max() == n_max && t.g_max() == g_max && t.constraint() == constraint &&
            t.length_cap() == opts.length_cap)
            return t;
    }
    auto t = DpTable::build(beta, n_max, g_max, constraint, opts);
    fs::create_directories(dir);
    const fs::path tmp = file.string() + ".tmp";
    t.save(tmp.string());
    fs::rename(tmp, file);
    return t;
}

}  // namespace ipdsaw
