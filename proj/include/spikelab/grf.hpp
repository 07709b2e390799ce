#ifndef SPIKELAB_GRF_HPP
#define SPIKELAB_GRF_HPP

#include <vector>

#include "spikelab/spectrum.hpp"

namespace spikelab {

/**
 * Water-filling optimum for the allocation problem
 *   maximize sum_i log(1 - p_i)  subject to  0 <= p_i <= 1, sum_i lambda_i^2 p_i = x.
 * The level mu_inv fills the strongest modes first; active_count is the
 * number of strictly positive allocations.
 */
struct WaterfillSolution {
    std::vector<double> p;  // descending, p[active_count..] == 0
    int active_count = 0;
    double mu_inv = 0.0;  // water level 1/mu*
    double j_value = 0.0;  // optimal objective J(x); -inf at x == eta_max
};

/**
 * One sample of the large-deviation rate curve. neg_grf is -I(x), the
 * log-rate at which the overlap concentrates near x; upper_bound is the
 * dimension-agnostic envelope log(1 - |x|/eta_max) that dominates it.
 * k is the interval index of |x|; k == 0 marks the continuous extension
 * at x == 0 where the rate vanishes.
 */
struct GrfPoint {
    double x = 0.0;
    double neg_grf = 0.0;
    int k = 0;
    double upper_bound = 0.0;
};

using GrfCurve = std::vector<GrfPoint>;

/// Closed-form rate point at x. Domain: |x| <= eta_max (finite only below
/// eta_max); even in x; returns the flagged zero point at x == 0.
GrfPoint grf(const Spectrum& s, double x);

/// grf evaluated pointwise over a grid, grid order preserved.
GrfCurve grf_curve(const Spectrum& s, const std::vector<double>& grid);

/// Closed-form water-filling solution. Domain: 0 < x <= eta_max.
WaterfillSolution waterfill(const Spectrum& s, double x);

/// Max stationarity violation of a solution: 1/(1-p_i) = lambda_i^2/mu_inv
/// on active modes, lambda_i^2 <= mu_inv on inactive ones (both scale-normalized).
double waterfill_kkt_residual(const Spectrum& s, const WaterfillSolution& sol);

/// log(1 - |x|/eta_max). Domain: |x| < eta_max.
double upper_bound(const Spectrum& s, double x);

/// sup over x in (epsilon, eta_max] of 2x + neg_grf(x), evaluated exactly
/// per interval (interior stationary point or endpoint). Negative for every
/// epsilon iff the leading singular value is below 1.
double rate_gap_sup(const Spectrum& s, double epsilon);

/// Limsup bound on the second moment of the likelihood ratio,
/// (1/(1 - lambda_1^4))^{r^2}. Domain: lambda_1 < 1.
double moment_bound(const Spectrum& s);

/// Small-overlap moment bound after Gram-matrix concentration at margin
/// delta: (1/((1-beta)^2 - lambda_1^4))^{r^2} with
/// beta = (sqrt(r)/2) * delta * (2 + delta) * lambda_1^2.
/// Tends to moment_bound as delta -> 0 and increases with delta.
double concentration_moment_bound(const Spectrum& s, double delta);

}  // namespace spikelab

#endif
