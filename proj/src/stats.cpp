#include "ipdsaw/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <limits>
#include <numeric>

#include <boost/math/special_functions/gamma.hpp>

#include "ipdsaw/errors.hpp"

namespace ipdsaw::stats {

namespace {

void need(std::size_t n, std::size_t at_least) {
    if (n < at_least) throw DomainError("not enough samples");
}

double plugin_mi(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b) {
    std::map<std::int64_t, double> pa, pb;
    std::map<std::pair<std::int64_t, std::int64_t>, double> pab;
    const double w = 1.0 / static_cast<double>(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        pa[a[i]] += w;
        pb[b[i]] += w;
        pab[{a[i], b[i]}] += w;
    }
    double mi = 0.0;
    for (const auto& [k, p] : pab) mi += p * std::log(p / (pa[k.first] * pb[k.second]));
    return mi;
}

}  // namespace

Estimate mean_se(const std::vector<double>& xs) {
    need(xs.size(), 2);
    const double n = static_cast<double>(xs.size());
    const double m = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    return {m, std::sqrt(variance(xs) / n)};
}

double variance(const std::vector<double>& xs) {
    need(xs.size(), 2);
    const double n = static_cast<double>(xs.size());
    const double m = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    double s = 0.0;
    for (double v : xs) s += (v - m) * (v - m);
    return s / (n - 1.0);
}

Estimate lag1_correlation(const std::vector<double>& xs) {
    need(xs.size(), 3);
    const std::size_t n = xs.size() - 1;
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += xs[i];
        mb += xs[i + 1];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = xs[i] - ma, db = xs[i + 1] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0.0 || sbb == 0.0) throw DomainError("constant sequence");
    return {sab / std::sqrt(saa * sbb), 1.0 / std::sqrt(static_cast<double>(n))};
}

double ks_discrete(const std::vector<double>& sa, const std::vector<double>& pa, const std::vector<double>& sb,
                   const std::vector<double>& pb) {
    if (sa.size() != pa.size() || sb.size() != pb.size()) throw DomainError("support and weights differ in size");
    std::size_t i = 0, j = 0;
    double fa = 0.0, fb = 0.0, d = 0.0;
    while (i < sa.size() || j < sb.size()) {
        double t;
        if (j >= sb.size() || (i < sa.size() && sa[i] <= sb[j])) t = sa[i];
        else t = sb[j];
        while (i < sa.size() && sa[i] <= t) fa += pa[i++];
        while (j < sb.size() && sb[j] <= t) fb += pb[j++];
        d = std::max(d, std::abs(fa - fb));
    }
    return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    need(a.size(), 1);
    need(b.size(), 1);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::vector<double> wa(a.size(), 1.0 / static_cast<double>(a.size()));
    std::vector<double> wb(b.size(), 1.0 / static_cast<double>(b.size()));
    return ks_discrete(a, wa, b, wb);
}

double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
    const std::size_t n = std::max(p.size(), q.size());
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = i < p.size() ? p[i] : 0.0;
        const double b = i < q.size() ? q[i] : 0.0;
        s += std::abs(a - b);
    }
    return 0.5 * s;
}

ChiSquare chi_square(const std::vector<double>& counts, const std::vector<double>& probs, double overflow,
                     double min_expected) {
    if (counts.size() != probs.size()) throw DomainError("counts and probabilities differ in size");
    const double total = std::accumulate(counts.begin(), counts.end(), 0.0) + overflow;
    const double listed = std::accumulate(probs.begin(), probs.end(), 0.0);
    if (total <= 0.0) throw DomainError("no counts");
    // observations where the law puts no mass reject outright
    bool impossible = listed >= 1.0 && overflow > 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) impossible = impossible || (probs[i] == 0.0 && counts[i] > 0.0);
    std::vector<double> obs, expct;
    double co = 0.0, ce = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        co += counts[i];
        ce += probs[i] * total;
        if (ce >= min_expected) {
            obs.push_back(co);
            expct.push_back(ce);
            co = ce = 0.0;
        }
    }
    // leftover listed cells plus unlisted mass form one more cell
    const double rest_e = ce + std::max(0.0, 1.0 - listed) * total;
    const double rest_o = co + overflow;
    if (rest_e >= min_expected || expct.empty()) {
        obs.push_back(rest_o);
        expct.push_back(rest_e);
    } else {
        obs.back() += rest_o;
        expct.back() += rest_e;
    }
    if (expct.size() < 2) throw DomainError("chi-square needs at least two cells");
    ChiSquare r;
    for (std::size_t i = 0; i < obs.size(); ++i) r.statistic += (obs[i] - expct[i]) * (obs[i] - expct[i]) / expct[i];
    r.dof = static_cast<int>(obs.size()) - 1;
    if (impossible) {
        r.statistic = std::numeric_limits<double>::infinity();
        r.p_value = 0.0;
        return r;
    }
    r.p_value = boost::math::gamma_q(0.5 * r.dof, 0.5 * r.statistic);
    return r;
}

Slope linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw DomainError("x and y differ in size");
    need(x.size(), 2);
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw DomainError("degenerate abscissae");
    Slope s;
    s.slope = sxy / sxx;
    s.intercept = my - s.slope * mx;
    if (x.size() > 2) {
        double rss = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double r = y[i] - s.intercept - s.slope * x[i];
            rss += r * r;
        }
        s.se = std::sqrt(rss / (n - 2.0) / sxx);
    }
    return s;
}

Slope loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> lx(x.size()), ly(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(i < y.size() && y[i] > 0.0)) throw DomainError("log-log fit needs positive data");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    return linear_fit(lx, ly);
}

Covariance emp_cross_cov(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    if (a.rows() != b.rows()) throw DomainError("sample counts differ");
    need(static_cast<std::size_t>(a.rows()), 2);
    const double n = static_cast<double>(a.rows());
    const Eigen::MatrixXd ca = a.rowwise() - a.colwise().mean();
    const Eigen::MatrixXd cb = b.rowwise() - b.colwise().mean();
    Covariance r;
    r.samples = static_cast<std::size_t>(a.rows());
    r.cov = ca.transpose() * cb / (n - 1.0);
    // SE of a mean of products: sd of (ca_i cb_j) / sqrt(n)
    const Eigen::MatrixXd m2 = ca.cwiseAbs2().transpose() * cb.cwiseAbs2() / n;
    const Eigen::MatrixXd c2 = r.cov.cwiseAbs2();
    r.se = ((m2 - c2).cwiseMax(0.0) / n).cwiseSqrt();
    return r;
}

Covariance emp_cov(const Eigen::MatrixXd& samples, bool centered) {
    if (!centered) return emp_cross_cov(samples, samples);
    need(static_cast<std::size_t>(samples.rows()), 2);
    const double n = static_cast<double>(samples.rows());
    Covariance r;
    r.samples = static_cast<std::size_t>(samples.rows());
    r.cov = samples.transpose() * samples / n;
    const Eigen::MatrixXd m2 = samples.cwiseAbs2().transpose() * samples.cwiseAbs2() / n;
    r.se = ((m2 - r.cov.cwiseAbs2()).cwiseMax(0.0) / n).cwiseSqrt();
    return r;
}

double sup_distance(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw DomainError("profiles differ in size");
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

MutualInformation mi_permutation_test(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b,
                                      int permutations, RngStream& rng) {
    if (a.size() != b.size()) throw DomainError("label vectors differ in size");
    need(a.size(), 2);
    if (permutations < 1) throw DomainError("need at least one permutation");
    MutualInformation r;
    r.estimate = plugin_mi(a, b);
    std::vector<double> null(static_cast<std::size_t>(permutations));
    std::vector<std::int64_t> perm = b;
    for (auto& v : null) {
        for (std::size_t i = perm.size() - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
        v = plugin_mi(a, perm);
    }
    std::sort(null.begin(), null.end());
    const auto k = static_cast<std::size_t>(std::ceil(0.99 * static_cast<double>(permutations))) - 1;
    r.null_q99 = null[std::min(k, null.size() - 1)];
    r.below = r.estimate <= r.null_q99;
    return r;
}

}  // namespace ipdsaw::stats
