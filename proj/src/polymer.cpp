#include "ipdsaw/polymer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <json.hpp>

#include "ipdsaw/errors.hpp"

namespace ipdsaw {

namespace {

Int length_of(const std::vector<Int>& stretches) {
    Int total = static_cast<Int>(stretches.size());
    for (Int l : stretches) total += std::llabs(l);
    return total;
}

}  // namespace

PolymerPath::PolymerPath(std::vector<Int> stretches) : stretches_(std::move(stretches)) {
    if (stretches_.empty()) throw DomainError("polymer path needs at least one stretch");
    total_length_ = length_of(stretches_);
}

PolymerPath::PolymerPath(std::vector<Int> stretches, Int total_length)
    : PolymerPath(std::move(stretches)) {
    if (total_length_ != total_length)
        throw DomainError("stretches give length " + std::to_string(total_length_) +
                          ", expected " + std::to_string(total_length));
}

AuxWalk AuxWalk::from_values(std::vector<Int> values, std::size_t horizon) {
    if (values.empty() || values.front() != 0) throw DomainError("walk must start at V_0 = 0");
    if (horizon >= values.size()) throw DomainError("area horizon beyond walk length");
    AuxWalk w;
    w.values = std::move(values);
    w.horizon = horizon;
    w.increments.resize(w.values.size() - 1);
    for (std::size_t i = 1; i < w.values.size(); ++i) w.increments[i - 1] = w.values[i] - w.values[i - 1];
    for (std::size_t i = 1; i <= horizon; ++i) {
        w.geo_area += std::llabs(w.values[i]);
        w.alg_area += w.values[i];
    }
    return w;
}

Int wedge(Int x, Int y) {
    if ((x < 0 && y > 0) || (x > 0 && y < 0)) return std::min(std::llabs(x), std::llabs(y));
    return 0;
}

double hamiltonian(const PolymerPath& path, double beta) {
    Int s = 0;
    const auto& l = path.stretches();
    for (std::size_t n = 0; n + 1 < l.size(); ++n) s += wedge(l[n], l[n + 1]);
    return beta * static_cast<double>(s);
}

double hamiltonian_ls(const PolymerPath& path, double beta) {
    const auto& l = path.stretches();
    Int abs_sum = 0;
    Int pair_sum = std::llabs(l.front()) + std::llabs(l.back());  // boundary pairs with l_0 = l_{N+1} = 0
    for (std::size_t n = 0; n < l.size(); ++n) {
        abs_sum += std::llabs(l[n]);
        if (n + 1 < l.size()) pair_sum += std::llabs(l[n] + l[n + 1]);
    }
    // 2*sum|l| - sum over all adjacent pairs |l_n + l_{n+1}| is even; halve exactly
    return beta * static_cast<double>(2 * abs_sum - pair_sum) / 2.0;
}

AuxWalk to_aux_walk(const PolymerPath& path) {
    const auto& l = path.stretches();
    std::vector<Int> v(l.size() + 2, 0);
    for (std::size_t i = 0; i < l.size(); ++i) v[i + 1] = (i % 2 == 0) ? l[i] : -l[i];
    return AuxWalk::from_values(std::move(v), l.size());
}

PolymerPath from_aux_walk(const AuxWalk& walk, std::size_t n) {
    if (walk.values.empty() || walk.values.front() != 0) throw DomainError("walk must start at V_0 = 0");
    if (n == 0 || walk.values.size() < n + 1) throw DomainError("walk shorter than requested extension");
    if (walk.values.size() >= n + 2 && walk.values[n + 1] != 0)
        throw DomainError("walk does not close to zero at step N+1");
    std::vector<Int> l(n);
    for (std::size_t i = 0; i < n; ++i) l[i] = (i % 2 == 0) ? walk.values[i + 1] : -walk.values[i + 1];
    return PolymerPath(std::move(l));
}

PathGeometry geometry(const PolymerPath& path) {
    const auto& l = path.stretches();
    const std::size_t n = l.size();
    PathGeometry g;
    g.upper.assign(n + 2, 0);
    g.lower.assign(n + 2, 0);
    g.middle2.assign(n + 2, 0);
    g.profile.assign(n + 2, 0);
    Int prefix = 0;
    for (std::size_t i = 1; i <= n; ++i) {
        const Int li = l[i - 1];
        g.upper[i] = std::max(prefix, prefix + li);
        g.lower[i] = std::min(prefix, prefix + li);
        g.middle2[i] = 2 * prefix + li;
        g.profile[i] = std::llabs(li);
        prefix += li;
    }
    g.upper[n + 1] = g.lower[n + 1] = prefix;
    g.middle2[n + 1] = 2 * prefix;
    return g;
}

PatternDecomposition decompose_patterns(const PolymerPath& path) {
    const auto& l = path.stretches();
    PatternDecomposition out;
    Pattern cur;
    bool open = false;
    for (std::size_t j = 0; j < l.size(); ++j) {
        if (!open) {
            cur = Pattern{};
            cur.first = j;
            open = true;
        }
        cur.last = j;
        cur.extension += 1;
        cur.length += 1 + std::llabs(l[j]);
        cur.displacement += l[j];
        if (l[j] == 0) {
            out.patterns.push_back(cur);
            open = false;
        }
    }
    if (open) {
        out.trailing_remainder = true;
        out.remainder = cur;
    }
    return out;
}

PolymerPath slice(const PolymerPath& path, const Pattern& piece) {
    const auto& l = path.stretches();
    return PolymerPath(std::vector<Int>(l.begin() + static_cast<std::ptrdiff_t>(piece.first),
                                        l.begin() + static_cast<std::ptrdiff_t>(piece.last) + 1));
}

std::vector<IndexRange> decompose_beads(const PolymerPath& path) {
    const auto& l = path.stretches();
    std::vector<IndexRange> beads;
    std::size_t start = 0;
    bool open = false;
    for (std::size_t j = 0; j < l.size(); ++j) {
        if (l[j] == 0) {
            if (open) beads.push_back({start, j});
            open = false;
            continue;
        }
        if (open && ((l[j] > 0) == (l[j - 1] > 0))) {
            beads.push_back({start, j});
            open = false;
        }
        if (!open) {
            start = j;
            open = true;
        }
    }
    if (open) beads.push_back({start, l.size()});
    return beads;
}

namespace {

// Signed compositions of `remaining` into the slots from `pos` on.
void compose(std::vector<Int>& l, std::size_t pos, Int remaining,
             const std::function<void(const PolymerPath&)>& fn) {
    if (pos + 1 == l.size()) {
        l[pos] = remaining;
        fn(PolymerPath(l));
        if (remaining != 0) {
            l[pos] = -remaining;
            fn(PolymerPath(l));
        }
        return;
    }
    for (Int a = 0; a <= remaining; ++a) {
        l[pos] = a;
        compose(l, pos + 1, remaining - a, fn);
        if (a != 0) {
            l[pos] = -a;
            compose(l, pos + 1, remaining - a, fn);
        }
    }
}

}  // namespace

void for_each_path(Int L, const std::function<void(const PolymerPath&)>& fn) {
    if (L < 1) throw DomainError("L must be positive");
    for (Int n = 1; n <= L; ++n) {
        std::vector<Int> l(static_cast<std::size_t>(n), 0);
        compose(l, 0, L - n, fn);
    }
}

Enumeration enumerate_Z(Int L, double beta) {
    if (L > kEnumerationLimit)
        throw DomainError("enumeration limited to L <= " + std::to_string(kEnumerationLimit));
    Enumeration e;
    e.L = L;
    e.beta = beta;
    for_each_path(L, [&](const PolymerPath& p) {
        const double w = std::exp(hamiltonian(p, beta));
        e.z += w;
        e.configs.push_back({p, w, 0.0});
    });
    for (auto& c : e.configs) c.prob = c.weight / e.z;
    return e;
}

std::string path_to_json(const PolymerPath& path) { return nlohmann::json(path.stretches()).dump(); }

PolymerPath path_from_json(const std::string& line, std::optional<Int> expected_length) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        throw DomainError(std::string("malformed path line: ") + e.what());
    }
    if (j.is_object()) j = j.at("stretches");
    if (!j.is_array()) throw DomainError("path line must be a JSON array of integers");
    std::vector<Int> l;
    for (const auto& x : j) {
        if (!x.is_number_integer()) throw DomainError("path stretches must be integers");
        l.push_back(x.get<Int>());
    }
    if (expected_length) return PolymerPath(std::move(l), *expected_length);
    return PolymerPath(std::move(l));
}

}  // namespace ipdsaw
