#ifndef SPIKELAB_IO_HPP
#define SPIKELAB_IO_HPP

#include <string>
#include <vector>

#include "spikelab/config.hpp"
#include "spikelab/experiments.hpp"
#include "spikelab/grf.hpp"

namespace spikelab {

/// One closed-form-vs-oracle comparison emitted by the verify command.
struct VerifyRecord {
    std::string problem;
    double x = 0.0;
    double closed_form = 0.0;
    double oracle_value = 0.0;
    double gap = 0.0;  // oracle_value - closed_form
    bool converged = false;
};

/// %.17g with fixed spellings "inf"/"-inf"/"nan"; byte-stable round trips.
std::string format_double(double v);

/// File writers. Every experiment writes <prefix>.<kind>.<ext> plus a
/// manifest; data files depend only on the config, never on timing.
void emit_curve_csv(const GrfCurve& curve, const std::string& path);
void emit_samples_csv(const std::vector<EtaSample>& samples, const std::string& path);
void emit_waterfill_json(const WaterfillSolution& sol, const std::string& path);
void emit_envelope(const EnvelopeReport& report, const std::string& prefix);
void emit_detection(const DetectionReport& report, const std::string& prefix);
void emit_moment_json(const MomentEstimate& est, const std::string& path);
void emit_verify_json(const std::vector<VerifyRecord>& records, const std::string& path);
void emit_manifest(const RunConfig& config, double elapsed_seconds,
                   const std::string& path);

}  // namespace spikelab

#endif
