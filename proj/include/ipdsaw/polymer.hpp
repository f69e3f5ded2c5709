#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace ipdsaw {

using Int = std::int64_t;

// A configuration: N signed vertical stretches with sum |l_n| + N = L.
class PolymerPath {
public:
    explicit PolymerPath(std::vector<Int> stretches);
    // Validates that the given total length matches the stretches.
    PolymerPath(std::vector<Int> stretches, Int total_length);

    const std::vector<Int>& stretches() const noexcept { return stretches_; }
    Int total_length() const noexcept { return total_length_; }
    std::size_t size() const noexcept { return stretches_.size(); }
    Int operator[](std::size_t i) const { return stretches_[i]; }

    bool operator==(const PolymerPath&) const = default;

private:
    std::vector<Int> stretches_;
    Int total_length_ = 0;
};

// Walk V_0..V_m together with its areas over steps 1..horizon.
struct AuxWalk {
    std::vector<Int> values;
    std::vector<Int> increments;  // U_1..U_m
    std::size_t horizon = 0;
    Int geo_area = 0;  // sum_{i=1}^{horizon} |V_i|
    Int alg_area = 0;  // sum_{i=1}^{horizon} V_i

    // Builds increments and areas; rejects V_0 != 0 or horizon >= size.
    static AuxWalk from_values(std::vector<Int> values, std::size_t horizon);
};

Int wedge(Int x, Int y);

double hamiltonian(const PolymerPath& path, double beta);
// Same energy through beta*sum|l_n| - (beta/2)*sum|l_n + l_{n+1}| with zero boundaries.
double hamiltonian_ls(const PolymerPath& path, double beta);

// l_i = (-1)^{i-1} V_i; values run V_0..V_{N+1} with V_{N+1} = 0.
AuxWalk to_aux_walk(const PolymerPath& path);
PolymerPath from_aux_walk(const AuxWalk& walk, std::size_t n);

// Envelopes, doubled middle line and profile at indices 0..N+1.
struct PathGeometry {
    std::vector<Int> upper;
    std::vector<Int> lower;
    std::vector<Int> middle2;  // 2*M_i, exact
    std::vector<Int> profile;

    double middle(std::size_t i) const { return 0.5 * static_cast<double>(middle2[i]); }
};

PathGeometry geometry(const PolymerPath& path);

// Stretch indices [first, last] (0-based, inclusive) with the pattern statistics.
struct Pattern {
    std::size_t first = 0;
    std::size_t last = 0;
    Int extension = 0;     // number of stretches
    Int length = 0;        // extension + sum |l|
    Int displacement = 0;  // sum l
};

struct PatternDecomposition {
    std::vector<Pattern> patterns;
    bool trailing_remainder = false;
    Pattern remainder;  // meaningful only when trailing_remainder
};

PatternDecomposition decompose_patterns(const PolymerPath& path);

// Sub-path spanning a pattern or remainder.
PolymerPath slice(const PolymerPath& path, const Pattern& piece);

// Half-open index range [begin, end) of stretches.
struct IndexRange {
    std::size_t begin = 0;
    std::size_t end = 0;
    bool operator==(const IndexRange&) const = default;
};

std::vector<IndexRange> decompose_beads(const PolymerPath& path);

// Calls fn on every configuration of total length L.
void for_each_path(Int L, const std::function<void(const PolymerPath&)>& fn);

struct WeightedPath {
    PolymerPath path;
    double weight;  // e^{H}
    double prob;    // weight / Z
};

struct Enumeration {
    Int L = 0;
    double beta = 0.0;
    double z = 0.0;
    std::vector<WeightedPath> configs;
};

inline constexpr Int kEnumerationLimit = 14;

Enumeration enumerate_Z(Int L, double beta);

// One JSON array of stretches per line.
std::string path_to_json(const PolymerPath& path);
PolymerPath path_from_json(const std::string& line, std::optional<Int> expected_length = {});

}  // namespace ipdsaw
