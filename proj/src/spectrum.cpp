#include "spikelab/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spikelab {

Spectrum::Spectrum(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) {
        throw std::invalid_argument("spectrum: needs at least one singular value");
    }
    for (double v : values_) {
        if (!std::isfinite(v) || v <= 0.0) {
            throw std::invalid_argument(
                "spectrum: singular values must be finite and strictly positive");
        }
    }
    std::sort(values_.begin(), values_.end(), std::greater<double>());
    // Fixed ascending-index summation order keeps boundary arithmetic
    // bit-reproducible across call sites.
    eta_max_ = 0.0;
    for (double v : values_) eta_max_ += v * v;
}

IntervalDecomposition intervals(const Spectrum& s) {
    const int r = s.rank();
    IntervalDecomposition d;
    d.boundaries.resize(static_cast<std::size_t>(r) + 1);
    d.boundaries[0] = 0.0;
    for (int k = 1; k < r; ++k) {
        // b_k = sum_{i=1}^{k+1} (lambda_i^2 - lambda_{k+1}^2)
        const double edge = s.value(k) * s.value(k);
        double b = 0.0;
        for (int i = 0; i <= k; ++i) b += s.value(i) * s.value(i) - edge;
        d.boundaries[static_cast<std::size_t>(k)] = b;
    }
    d.boundaries[static_cast<std::size_t>(r)] = s.eta_max();
    return d;
}

int interval_index(const Spectrum& s, double x) {
    const double ax = std::abs(x);
    if (!(ax > 0.0)) {
        throw std::domain_error("interval_index: |x| must be strictly positive");
    }
    if (ax > s.eta_max()) {
        throw std::domain_error("interval_index: |x| exceeds eta_max");
    }
    const IntervalDecomposition d = intervals(s);
    // Smallest k with b_k >= |x|. Because the boundaries are non-decreasing,
    // that k automatically satisfies b_{k-1} < |x|, so empty cells are skipped.
    const auto it = std::lower_bound(d.boundaries.begin() + 1, d.boundaries.end(), ax);
    return static_cast<int>(it - d.boundaries.begin());
}

}  // namespace spikelab
