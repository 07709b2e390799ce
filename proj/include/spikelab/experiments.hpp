#ifndef SPIKELAB_EXPERIMENTS_HPP
#define SPIKELAB_EXPERIMENTS_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "spikelab/grf.hpp"
#include "spikelab/sampling.hpp"
#include "spikelab/spectrum.hpp"

namespace spikelab {

/**
 * Monte Carlo experiment drivers. Work is cut into fixed tasks, each task
 * owns its own RngStream (derived from the seed, an experiment tag and the
 * task index), and partial results merge in task order. Output is therefore
 * byte-identical for any worker count.
 */

struct EnvelopeReport {
    std::vector<EtaSample> samples;
    GrfCurve curve;
    long violations = 0;   // samples with y > neg_grf(|x|) + 1e-9
    double min_gap = 0.0;  // smallest neg_grf(|x|) - y over the cloud
};

enum class Hypothesis { H0, H1 };

struct DetectionTrial {
    Hypothesis hypothesis = Hypothesis::H0;
    double statistic = 0.0;  // largest singular value of the observation
    Hypothesis decision = Hypothesis::H0;
    int n = 0;
};

struct DetectionSummary {
    int n = 0;
    long trials_per_hypothesis = 0;
    double threshold = 0.0;
    double false_alarm_rate = 0.0;
    double miss_rate = 0.0;
    double h0_mean_statistic = 0.0;
    double h0_stddev_statistic = 0.0;
    double h1_mean_statistic = 0.0;
};

struct DetectionReport {
    std::vector<DetectionTrial> trials;  // H0 block first, then H1
    DetectionSummary summary;
};

struct MomentEstimate {
    int n = 0;
    long samples = 0;
    double mean = 0.0;     // empirical E[exp(2 n eta)], always e1_part + e2_part
    double e1_part = 0.0;  // contribution of samples with x > epsilon
    double e2_part = 0.0;  // contribution of samples with x <= epsilon
    double epsilon = 0.0;
    long clamp_count = 0;  // draws where exp(2 n x) had to be clamped
};

/// Draws the overlap cloud at block dimension n_block, counts envelope
/// violations against the rate curve, and attaches the curve (with its upper
/// bound) on a uniform grid over (0, eta_max).
EnvelopeReport run_envelope(const Spectrum& s, int n_block, long num_samples,
                            int grid_points, std::uint64_t seed, int jobs = 0);

/// Runs `trials` observations per hypothesis at dimension n; each H1 trial
/// gets a fresh spike direction. Decides H1 when the top singular value
/// exceeds the threshold; calibrate_quantile, when set, replaces the fixed
/// threshold with the empirical (1 - q) quantile of the H0 statistics.
DetectionReport run_detection(const Spectrum& s, int n, long trials, double threshold,
                              std::uint64_t seed, int jobs = 0,
                              std::optional<double> calibrate_quantile = {});

/// Estimates E[exp(2 n eta)] at block dimension n and reports the split of
/// the mean at the overlap threshold epsilon.
MomentEstimate run_moment(const Spectrum& s, int n, long num_samples, double epsilon,
                          std::uint64_t seed, int jobs = 0);

}  // namespace spikelab

#endif
