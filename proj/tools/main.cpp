// Command-line front end: parses a RunConfig, dispatches the experiment,
// and emits the CSV/JSON artifacts plus a manifest.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "spikelab/config.hpp"
#include "spikelab/experiments.hpp"
#include "spikelab/grf.hpp"
#include "spikelab/io.hpp"
#include "spikelab/oracle.hpp"
#include "spikelab/spectrum.hpp"

namespace {

using namespace spikelab;

/// Verify-mode gap above tolerance; maps to exit code 3.
struct VerificationFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<double> curve_grid(const Spectrum& s, long points) {
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(points));
    for (long j = 1; j <= points; ++j) {
        grid.push_back(s.eta_max() * static_cast<double>(j) /
                       static_cast<double>(points + 1));
    }
    return grid;
}

/// Representative x values: a few interior fractions of every non-empty cell.
std::vector<double> verify_points(const Spectrum& s) {
    const IntervalDecomposition d = intervals(s);
    std::vector<double> xs;
    for (int k = 1; k <= d.count(); ++k) {
        const double lo = d.boundaries[static_cast<std::size_t>(k) - 1];
        const double hi = d.boundaries[static_cast<std::size_t>(k)];
        if (!(lo < hi)) continue;
        for (double frac : {0.2, 0.45, 0.7}) {
            xs.push_back(lo + frac * (hi - lo));
        }
    }
    return xs;
}

int run_command(const RunConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    const Spectrum s(cfg.spectrum);
    bool verify_failed = false;

    switch (cfg.command) {
        case Command::Grf: {
            const GrfCurve curve = grf_curve(s, curve_grid(s, cfg.grid));
            emit_curve_csv(curve, cfg.out + ".curve.csv");
            std::printf("grf: %ld points on (0, %s)\n", cfg.grid,
                        format_double(s.eta_max()).c_str());
            break;
        }
        case Command::Waterfill: {
            const WaterfillSolution sol = waterfill(s, *cfg.x);
            emit_waterfill_json(sol, cfg.out + ".waterfill.json");
            std::printf("waterfill: x=%s active=%d j=%s\n", format_double(*cfg.x).c_str(),
                        sol.active_count, format_double(sol.j_value).c_str());
            break;
        }
        case Command::Envelope: {
            const long n_block = cfg.n_block ? *cfg.n_block : 2L * s.rank();
            const EnvelopeReport report = run_envelope(
                s, static_cast<int>(n_block), cfg.samples, static_cast<int>(cfg.grid),
                cfg.seed, cfg.jobs);
            emit_envelope(report, cfg.out);
            std::printf("envelope: %zu samples, violations=%ld, min_gap=%s\n",
                        report.samples.size(), report.violations,
                        format_double(report.min_gap).c_str());
            break;
        }
        case Command::Detect: {
            std::optional<double> quantile = cfg.calibrate;
            const double threshold = cfg.threshold ? *cfg.threshold : 2.05;
            const DetectionReport report =
                run_detection(s, static_cast<int>(cfg.n), cfg.trials, threshold,
                              cfg.seed, cfg.jobs, quantile);
            emit_detection(report, cfg.out);
            std::printf("detect: n=%ld fa=%s miss=%s\n", cfg.n,
                        format_double(report.summary.false_alarm_rate).c_str(),
                        format_double(report.summary.miss_rate).c_str());
            break;
        }
        case Command::Moment: {
            const double epsilon = cfg.epsilon ? *cfg.epsilon : s.eta_max() / 4.0;
            const MomentEstimate est = run_moment(s, static_cast<int>(cfg.n),
                                                  cfg.samples, epsilon, cfg.seed, cfg.jobs);
            emit_moment_json(est, cfg.out + ".moment.json");
            std::printf("moment: n=%ld mean=%s clamps=%ld\n", cfg.n,
                        format_double(est.mean).c_str(), est.clamp_count);
            break;
        }
        case Command::Verify: {
            std::vector<VerifyRecord> records;
            RngStream rng(cfg.seed, 0);
            for (double x : verify_points(s)) {
                const double closed_neg = grf(s, x).neg_grf;
                const double closed_j = waterfill(s, x).j_value;

                const OracleResult p1 = solve_problem1(s, x, cfg.budget, rng);
                records.push_back({"logdet_pair", x, closed_neg, p1.value,
                                   p1.value - closed_neg, p1.converged});
                const OracleResult p3 =
                    solve_problem3_grid(s, x, static_cast<int>(cfg.grid_steps));
                records.push_back({"allocation_grid", x, closed_j, p3.value,
                                   p3.value - closed_j, p3.converged});
                const OracleResult p4 = solve_problem4_search(s, x, cfg.budget, rng);
                records.push_back({"majorization_relaxation", x, closed_j, p4.value,
                                   p4.value - closed_j, p4.converged});
            }
            emit_verify_json(records, cfg.out + ".verify.json");
            for (const VerifyRecord& r : records) {
                const bool ok = r.converged && std::abs(r.gap) <= cfg.tol;
                if (!ok) verify_failed = true;
                std::printf("%s %s x=%s gap=%s\n", ok ? "ok  " : "FAIL",
                            r.problem.c_str(), format_double(r.x).c_str(),
                            format_double(r.gap).c_str());
            }
            break;
        }
    }

    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    emit_manifest(cfg, elapsed, cfg.out + ".manifest.json");
    if (verify_failed) {
        throw VerificationFailure("verify: oracle gap exceeds tolerance");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    RunConfig cfg;
    try {
        cfg = parse_config(args);
    } catch (const UsageError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 1;
    }
    try {
        return run_command(cfg);
    } catch (const VerificationFailure& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 3;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "domain error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
