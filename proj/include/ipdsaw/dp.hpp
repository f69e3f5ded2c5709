#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace ipdsaw {

// Constraint on V_1..V_n carried by a walk-area table.
enum class Constraint : std::uint8_t {
    free = 0,
    positive = 1,  // V_i > 0 for 1 <= i <= n
    nonzero = 2,   // V_i != 0 for 1 <= i <= n
};

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Offset of cell (v, g) in a layer; row g holds v = 0..g.
inline std::size_t cell_index(std::int64_t v, std::int64_t g) {
    return static_cast<std::size_t>(g) * static_cast<std::size_t>(g + 1) / 2 + static_cast<std::size_t>(v);
}
inline std::size_t layer_cells(std::int64_t cap) {
    return cap < 0 ? 0 : static_cast<std::size_t>(cap + 1) * static_cast<std::size_t>(cap + 2) / 2;
}

// One layer of sign-folded log masses log P(V_n = v, G_n = g, constraint), v >= 0,
// with optional conditional moments E[Y_n | V_n = v, G_n = g] and E[Y_n^2 | ...]
// of the alternating sum Y_n = sum (-1)^{i-1} V_i (value for the state +v).
struct DpLayer {
    std::int64_t cap = -1;  // largest stored g
    std::vector<double> log_mass;
    std::vector<double> mu1;
    std::vector<double> mu2;

    void reset(std::int64_t new_cap, bool moments);
    double at(std::int64_t v, std::int64_t g) const {
        return (g > cap || v > g) ? kNegInf : log_mass[cell_index(v, g)];
    }
};

struct StepKernel {
    double log_x;
    double x;
    double log_c;
    Constraint constraint;
    bool moments;
};

StepKernel make_kernel(double beta, Constraint constraint, bool moments);

// Initial layer (n = 0): all mass at (v, g) = (0, 0).
void init_layer(DpLayer& layer, std::int64_t cap, bool moments);

// Advances `src` (step n) to `dst` (step n + 1) keeping rows g <= dst_cap.
void step_layer(const StepKernel& k, const DpLayer& src, std::int64_t n, DpLayer& dst, std::int64_t dst_cap);

struct DpBuildOptions {
    bool moments = false;
    std::int64_t length_cap = -1;  // keep only n + g <= length_cap when >= 0
    std::size_t memory_budget = std::size_t{2} << 30;
};

// Full table of layers 0..n_max.
class DpTable {
public:
    static DpTable build(double beta, std::int64_t n_max, std::int64_t g_max, Constraint constraint,
                         const DpBuildOptions& opts = {});

    double beta() const noexcept { return beta_; }
    std::int64_t n_max() const noexcept { return n_max_; }
    std::int64_t g_max() const noexcept { return g_max_; }
    std::int64_t length_cap() const noexcept { return length_cap_; }
    Constraint constraint() const noexcept { return constraint_; }
    bool has_moments() const noexcept { return moments_; }
    std::int64_t g_cap(std::int64_t n) const;

    // Log mass at signed v (the sign-mirrored state has the same mass, except
    // under the positive constraint where negative v carries none).
    double log_mass(std::int64_t n, std::int64_t v, std::int64_t g) const;
    double moment1(std::int64_t n, std::int64_t v, std::int64_t g) const;
    double moment2(std::int64_t n, std::int64_t v, std::int64_t g) const;
    const DpLayer& layer(std::int64_t n) const { return layers_.at(static_cast<std::size_t>(n)); }

    // Binary cache: "IPDW", version, beta, N_max, G_max, constraint, length cap,
    // then the log masses of each layer in (g, v) order, little-endian f64.
    void save(const std::string& path) const;
    static DpTable load(const std::string& path);
    static std::size_t estimate_bytes(std::int64_t n_max, std::int64_t g_max, std::int64_t length_cap,
                                      bool moments);

private:
    double beta_ = 0.0;
    std::int64_t n_max_ = 0;
    std::int64_t g_max_ = 0;
    std::int64_t length_cap_ = -1;
    Constraint constraint_ = Constraint::free;
    bool moments_ = false;
    std::vector<DpLayer> layers_;
};

inline constexpr std::uint32_t kCacheVersion = 1;

// File name keyed by (beta, N_max, G_max, constraint, length cap, version).
std::string cache_file_name(double beta, std::int64_t n_max, std::int64_t g_max, Constraint constraint,
                            std::int64_t length_cap);
// Loads the table from `dir` when present, otherwise builds and stores it.
// An empty `dir` disables caching.
DpTable cached_table(const std::string& dir, double beta, std::int64_t n_max, std::int64_t g_max,
                     Constraint constraint, const DpBuildOptions& opts = {});

// Stable log(exp(a) + exp(b)).
inline double log_add(double a, double b) {
    if (a < b) std::swap(a, b);
    if (b == kNegInf) return a;
    return a + std::log1p(std::exp(b - a));
}

}  // namespace ipdsaw
