#ifndef SPIKELAB_SPECTRUM_HPP
#define SPIKELAB_SPECTRUM_HPP

#include <vector>

namespace spikelab {

/**
 * Ordered singular values of the spike, the sole parameter of every
 * closed form in this project. Values are sorted in non-increasing order,
 * strictly positive and finite; the rank r is fixed and independent of the
 * ambient matrix dimension.
 */
class Spectrum {
public:
    /// Sorts the values in descending order; rejects values that are not
    /// strictly positive and finite.
    explicit Spectrum(std::vector<double> values);

    int rank() const noexcept { return static_cast<int>(values_.size()); }
    const std::vector<double>& values() const noexcept { return values_; }
    double value(int i) const { return values_.at(static_cast<std::size_t>(i)); }

    /// Sum of squared singular values; the largest attainable overlap.
    double eta_max() const noexcept { return eta_max_; }

    bool operator==(const Spectrum&) const = default;

private:
    std::vector<double> values_;
    double eta_max_ = 0.0;
};

/**
 * Partition of (0, eta_max] into r half-open cells (b_{k-1}, b_k].
 * Equal singular values produce empty cells, which lookups skip.
 */
struct IntervalDecomposition {
    std::vector<double> boundaries;  // r+1 values, 0 = b_0 <= ... <= b_r = eta_max

    int count() const noexcept { return static_cast<int>(boundaries.size()) - 1; }
};

IntervalDecomposition intervals(const Spectrum& s);

/// 1-based index k of the cell containing |x|. Throws std::domain_error for
/// |x| = 0 or |x| > eta_max; empty cells are never selected.
int interval_index(const Spectrum& s, double x);

}  // namespace spikelab

#endif
