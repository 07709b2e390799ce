#include "spikelab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <thread>

namespace spikelab {

namespace {

constexpr double kEnvelopeTol = 1e-9;
constexpr long kChunk = 8192;  // samples per task

// Experiment tags keep the stream spaces of different drivers disjoint.
constexpr std::uint64_t kStreamEnvelope = 1;
constexpr std::uint64_t kStreamDetectH0 = 2;
constexpr std::uint64_t kStreamDetectH1 = 3;
constexpr std::uint64_t kStreamMoment = 4;

std::uint64_t stream_id(std::uint64_t tag, std::uint64_t task) {
    return (tag << 56) | task;
}

int resolve_jobs(int jobs) {
    if (jobs > 0) return jobs;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs fn(0..num_tasks-1) on `jobs` workers. Tasks must write only to their
/// own slots; merging is the caller's job and happens in index order.
void for_each_task(long num_tasks, int jobs, const std::function<void(long)>& fn) {
    jobs = resolve_jobs(jobs);
    if (num_tasks <= 0) return;
    if (jobs == 1 || num_tasks == 1) {
        for (long t = 0; t < num_tasks; ++t) fn(t);
        return;
    }
    std::atomic<long> next{0};
    auto worker = [&] {
        for (long t; (t = next.fetch_add(1)) < num_tasks;) fn(t);
    };
    std::vector<std::thread> pool;
    const int spawned = static_cast<int>(std::min<long>(jobs, num_tasks)) - 1;
    pool.reserve(static_cast<std::size_t>(spawned));
    for (int i = 0; i < spawned; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
}

std::vector<double> uniform_grid(double eta_max, int points) {
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(std::max(points, 0)));
    for (int j = 1; j <= points; ++j) {
        grid.push_back(eta_max * j / (points + 1.0));
    }
    return grid;
}

}  // namespace

EnvelopeReport run_envelope(const Spectrum& s, int n_block, long num_samples,
                            int grid_points, std::uint64_t seed, int jobs) {
    if (n_block < s.rank()) {
        throw std::invalid_argument("run_envelope: n_block must be >= rank");
    }
    if (num_samples < 0) {
        throw std::invalid_argument("run_envelope: num_samples must be >= 0");
    }
    EnvelopeReport report;
    report.samples.resize(static_cast<std::size_t>(num_samples));
    const long tasks = (num_samples + kChunk - 1) / kChunk;
    for_each_task(tasks, jobs, [&](long t) {
        RngStream rng(seed, stream_id(kStreamEnvelope, static_cast<std::uint64_t>(t)));
        const long begin = t * kChunk;
        const long end = std::min(begin + kChunk, num_samples);
        for (long i = begin; i < end; ++i) {
            report.samples[static_cast<std::size_t>(i)] = sample_eta(s, n_block, rng);
        }
    });

    report.min_gap = std::numeric_limits<double>::infinity();
    for (const EtaSample& sample : report.samples) {
        // |x| = eta_max has probability zero but rounding may graze it.
        const double ax = std::min(std::abs(sample.x), s.eta_max());
        const double envelope = grf(s, ax).neg_grf;
        const double gap = envelope - sample.y;
        report.min_gap = std::min(report.min_gap, gap);
        if (gap < -kEnvelopeTol) ++report.violations;
    }
    report.curve = grf_curve(s, uniform_grid(s.eta_max(), grid_points));
    return report;
}

DetectionReport run_detection(const Spectrum& s, int n, long trials, double threshold,
                              std::uint64_t seed, int jobs,
                              std::optional<double> calibrate_quantile) {
    if (n < s.rank()) throw std::invalid_argument("run_detection: n must be >= rank");
    if (trials < 1) throw std::invalid_argument("run_detection: trials must be >= 1");
    if (calibrate_quantile && !(*calibrate_quantile > 0.0 && *calibrate_quantile < 1.0)) {
        throw std::invalid_argument("run_detection: calibration quantile must be in (0,1)");
    }

    DetectionReport report;
    report.trials.resize(static_cast<std::size_t>(2 * trials));
    const double noise_var = 1.0 / static_cast<double>(n);

    for_each_task(trials, jobs, [&](long t) {
        RngStream rng(seed, stream_id(kStreamDetectH0, static_cast<std::uint64_t>(t)));
        const Eigen::MatrixXcd y = sample_gaussian(n, n, noise_var, rng);
        report.trials[static_cast<std::size_t>(t)] =
            DetectionTrial{Hypothesis::H0, largest_singular_value(y), Hypothesis::H0, n};
    });
    for_each_task(trials, jobs, [&](long t) {
        RngStream rng(seed, stream_id(kStreamDetectH1, static_cast<std::uint64_t>(t)));
        Eigen::MatrixXcd y = build_spike(s, n, rng);  // fresh directions per trial
        y += sample_gaussian(n, n, noise_var, rng);
        report.trials[static_cast<std::size_t>(trials + t)] =
            DetectionTrial{Hypothesis::H1, largest_singular_value(y), Hypothesis::H0, n};
    });

    double thr = threshold;
    if (calibrate_quantile) {
        std::vector<double> h0_stats(static_cast<std::size_t>(trials));
        for (long t = 0; t < trials; ++t) {
            h0_stats[static_cast<std::size_t>(t)] = report.trials[static_cast<std::size_t>(t)].statistic;
        }
        std::sort(h0_stats.begin(), h0_stats.end());
        // Empirical (1 - q) quantile: targets false-alarm rate ~= q.
        const long rank = std::clamp<long>(
            static_cast<long>(std::ceil((1.0 - *calibrate_quantile) * trials)) - 1, 0,
            trials - 1);
        thr = h0_stats[static_cast<std::size_t>(rank)];
    }

    long false_alarms = 0;
    long misses = 0;
    double h0_sum = 0.0, h0_sumsq = 0.0, h1_sum = 0.0;
    for (long t = 0; t < 2 * trials; ++t) {
        DetectionTrial& trial = report.trials[static_cast<std::size_t>(t)];
        trial.decision = trial.statistic > thr ? Hypothesis::H1 : Hypothesis::H0;
        if (trial.hypothesis == Hypothesis::H0) {
            h0_sum += trial.statistic;
            h0_sumsq += trial.statistic * trial.statistic;
            if (trial.decision == Hypothesis::H1) ++false_alarms;
        } else {
            h1_sum += trial.statistic;
            if (trial.decision == Hypothesis::H0) ++misses;
        }
    }
    const double tn = static_cast<double>(trials);
    report.summary.n = n;
    report.summary.trials_per_hypothesis = trials;
    report.summary.threshold = thr;
    report.summary.false_alarm_rate = static_cast<double>(false_alarms) / tn;
    report.summary.miss_rate = static_cast<double>(misses) / tn;
    report.summary.h0_mean_statistic = h0_sum / tn;
    report.summary.h0_stddev_statistic =
        std::sqrt(std::max(0.0, h0_sumsq / tn - (h0_sum / tn) * (h0_sum / tn)));
    report.summary.h1_mean_statistic = h1_sum / tn;
    return report;
}

MomentEstimate run_moment(const Spectrum& s, int n, long num_samples, double epsilon,
                          std::uint64_t seed, int jobs) {
    if (n < s.rank()) throw std::invalid_argument("run_moment: n must be >= rank");
    if (num_samples < 1) {
        throw std::invalid_argument("run_moment: num_samples must be >= 1");
    }
    if (!(epsilon > 0.0 && epsilon < s.eta_max())) {
        throw std::domain_error("run_moment: epsilon must lie in (0, eta_max)");
    }

    struct Partial {
        double e1 = 0.0;
        double e2 = 0.0;
        long clamps = 0;
    };
    const long tasks = (num_samples + kChunk - 1) / kChunk;
    std::vector<Partial> partials(static_cast<std::size_t>(tasks));
    const double scale = 2.0 * static_cast<double>(n);

    for_each_task(tasks, jobs, [&](long t) {
        RngStream rng(seed, stream_id(kStreamMoment, static_cast<std::uint64_t>(t)));
        Partial acc;
        const long begin = t * kChunk;
        const long end = std::min(begin + kChunk, num_samples);
        for (long i = begin; i < end; ++i) {
            const EtaSample sample = sample_eta(s, n, rng);
            double exponent = scale * sample.x;
            if (exponent > 700.0) {  // exp overflows past ~709
                exponent = 700.0;
                ++acc.clamps;
            }
            const double w = std::exp(exponent);
            if (sample.x > epsilon) {
                acc.e1 += w;
            } else {
                acc.e2 += w;
            }
        }
        partials[static_cast<std::size_t>(t)] = acc;
    });

    MomentEstimate est;
    est.n = n;
    est.samples = num_samples;
    est.epsilon = epsilon;
    double e1 = 0.0, e2 = 0.0;
    for (const Partial& acc : partials) {  // fixed merge order
        e1 += acc.e1;
        e2 += acc.e2;
        est.clamp_count += acc.clamps;
    }
    est.e1_part = e1 / static_cast<double>(num_samples);
    est.e2_part = e2 / static_cast<double>(num_samples);
    est.mean = est.e1_part + est.e2_part;
    return est;
}

}  // namespace spikelab
