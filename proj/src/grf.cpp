#include "spikelab/grf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace spikelab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_abs_domain(const Spectrum& s, double ax, const char* who) {
    if (std::isnan(ax)) throw std::domain_error(std::string(who) + ": x is NaN");
    if (ax > s.eta_max()) {
        throw std::domain_error(std::string(who) + ": |x| exceeds eta_max");
    }
}

}  // namespace

GrfPoint grf(const Spectrum& s, double x) {
    const double ax = std::abs(x);
    check_abs_domain(s, ax, "grf");
    if (ax == 0.0) {
        return GrfPoint{x, 0.0, 0, 0.0};  // continuous extension at the origin
    }
    const int k = interval_index(s, x);
    double head = 0.0;      // sum_{i<=k} lambda_i^2
    double log_prod = 0.0;  // sum_{i<=k} log lambda_i^2
    for (int i = 0; i < k; ++i) {
        const double sq = s.value(i) * s.value(i);
        head += sq;
        log_prod += std::log(sq);
    }
    // The k-th branch evaluated in log space: the bracketed power
    // [(head-|x|)/k]^k underflows near eta_max if formed directly.
    const double level = (head - ax) / k;
    const double neg = 2.0 * (k * std::log(level) - log_prod);
    const double ub = ax < s.eta_max() ? std::log1p(-ax / s.eta_max()) : -kInf;
    return GrfPoint{x, neg, k, ub};
}

GrfCurve grf_curve(const Spectrum& s, const std::vector<double>& grid) {
    GrfCurve curve;
    curve.reserve(grid.size());
    for (double x : grid) curve.push_back(grf(s, x));
    return curve;
}

WaterfillSolution waterfill(const Spectrum& s, double x) {
    if (!(x > 0.0)) throw std::domain_error("waterfill: x must be strictly positive");
    check_abs_domain(s, x, "waterfill");
    const int r = s.rank();
    const int active = interval_index(s, x);
    double head = 0.0;
    for (int i = 0; i < active; ++i) head += s.value(i) * s.value(i);

    WaterfillSolution sol;
    sol.active_count = active;
    sol.mu_inv = (head - x) / active;
    sol.p.assign(static_cast<std::size_t>(r), 0.0);
    sol.j_value = 0.0;
    for (int i = 0; i < active; ++i) {
        const double sq = s.value(i) * s.value(i);
        sol.p[static_cast<std::size_t>(i)] = 1.0 - sol.mu_inv / sq;
        sol.j_value += std::log1p(-sol.p[static_cast<std::size_t>(i)]);
    }
    return sol;
}

double waterfill_kkt_residual(const Spectrum& s, const WaterfillSolution& sol) {
    double worst = 0.0;
    for (int i = 0; i < s.rank(); ++i) {
        const double sq = s.value(i) * s.value(i);
        if (i < sol.active_count) {
            const double target = sq / sol.mu_inv;
            const double res = std::abs(1.0 / (1.0 - sol.p[static_cast<std::size_t>(i)]) - target);
            worst = std::max(worst, res / std::max(1.0, target));
        } else {
            worst = std::max(worst, std::max(0.0, sq - sol.mu_inv) / std::max(1.0, sq));
        }
    }
    return worst;
}

double upper_bound(const Spectrum& s, double x) {
    const double ax = std::abs(x);
    if (!(ax < s.eta_max())) {
        throw std::domain_error("upper_bound: |x| must be strictly below eta_max");
    }
    return std::log1p(-ax / s.eta_max());
}

double rate_gap_sup(const Spectrum& s, double epsilon) {
    if (!(epsilon > 0.0) || !(epsilon < s.eta_max())) {
        throw std::domain_error("rate_gap_sup: epsilon must lie in (0, eta_max)");
    }
    const IntervalDecomposition d = intervals(s);
    double best = -kInf;
    double head = 0.0;
    double log_prod = 0.0;
    for (int k = 1; k <= s.rank(); ++k) {
        const double sq = s.value(k - 1) * s.value(k - 1);
        head += sq;
        log_prod += std::log(sq);
        const double lo = std::max(d.boundaries[static_cast<std::size_t>(k) - 1], epsilon);
        const double hi = d.boundaries[static_cast<std::size_t>(k)];
        if (!(lo < hi)) continue;  // empty cell, or entirely below epsilon

        const auto gap = [&](double x) {
            return 2.0 * x + 2.0 * (k * std::log((head - x) / k) - log_prod);
        };
        // d/dx [2x + neg_grf] = 2 - 2k/(head - x), decreasing on the cell, so
        // the map is concave: the sup sits at the interior stationary point
        // head - k when it falls inside, else at the nearer endpoint.
        const double stationary = head - k;
        double cand;
        if (stationary > lo && stationary < hi) {
            cand = gap(stationary);
        } else if (stationary <= lo) {
            cand = gap(lo);  // decreasing throughout: supremum at the left edge
        } else {
            cand = gap(hi);
        }
        best = std::max(best, cand);
    }
    return best;
}

double moment_bound(const Spectrum& s) {
    const double l1 = s.value(0);
    if (!(l1 < 1.0)) {
        throw std::domain_error("moment_bound: requires lambda_1 < 1");
    }
    const double r = static_cast<double>(s.rank());
    return std::pow(1.0 / (1.0 - l1 * l1 * l1 * l1), r * r);
}

double concentration_moment_bound(const Spectrum& s, double delta) {
    const double l1 = s.value(0);
    if (!(l1 < 1.0)) {
        throw std::domain_error("concentration_moment_bound: requires lambda_1 < 1");
    }
    if (!(delta > 0.0 && delta < 1.0)) {
        throw std::domain_error("concentration_moment_bound: requires delta in (0, 1)");
    }
    const double r = static_cast<double>(s.rank());
    const double beta = 0.5 * std::sqrt(r) * delta * (2.0 + delta) * l1 * l1;
    if (!(beta < 1.0)) {
        throw std::domain_error(
            "concentration_moment_bound: beta = (sqrt(r)/2) delta (2+delta) lambda_1^2 "
            "must be < 1");
    }
    const double margin = (1.0 - beta) * (1.0 - beta);
    const double l4 = l1 * l1 * l1 * l1;
    if (!(margin > l4)) {
        throw std::domain_error(
            "concentration_moment_bound: (1-beta)^2 must exceed lambda_1^4");
    }
    return std::pow(1.0 / (margin - l4), r * r);
}

}  // namespace spikelab
