#include "spikelab/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace spikelab {

namespace {

using nlohmann::ordered_json;

std::string hypothesis_name(Hypothesis h) { return h == Hypothesis::H0 ? "H0" : "H1"; }

/// Non-finite doubles become strings; JSON has no literal for them.
ordered_json json_number(double v) {
    if (std::isfinite(v)) return v;
    return format_double(v);
}

void write_file(const std::string& path, const std::string& content) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(p.parent_path(), ec);
        if (ec) {
            throw std::runtime_error("cannot create directory '" +
                                     p.parent_path().string() + "': " + ec.message());
        }
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

void write_json(const ordered_json& j, const std::string& path) {
    write_file(path, j.dump(2) + "\n");
}

}  // namespace

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void emit_curve_csv(const GrfCurve& curve, const std::string& path) {
    std::string body = "x,neg_grf,k,upper_bound\n";
    for (const GrfPoint& pt : curve) {
        body += format_double(pt.x);
        body += ',';
        body += format_double(pt.neg_grf);
        body += ',';
        body += std::to_string(pt.k);
        body += ',';
        body += format_double(pt.upper_bound);
        body += '\n';
    }
    write_file(path, body);
}

void emit_samples_csv(const std::vector<EtaSample>& samples, const std::string& path) {
    std::string body = "sample_id,x,y\n";
    long id = 0;
    for (const EtaSample& s : samples) {
        body += std::to_string(id++);
        body += ',';
        body += format_double(s.x);
        body += ',';
        body += format_double(s.y);
        body += '\n';
    }
    write_file(path, body);
}

void emit_waterfill_json(const WaterfillSolution& sol, const std::string& path) {
    ordered_json j;
    j["p"] = ordered_json::array();
    for (double v : sol.p) j["p"].push_back(json_number(v));
    j["active_count"] = sol.active_count;
    j["mu_inv"] = json_number(sol.mu_inv);
    j["j_value"] = json_number(sol.j_value);
    write_json(j, path);
}

void emit_envelope(const EnvelopeReport& report, const std::string& prefix) {
    emit_samples_csv(report.samples, prefix + ".samples.csv");
    emit_curve_csv(report.curve, prefix + ".curve.csv");
}

void emit_detection(const DetectionReport& report, const std::string& prefix) {
    std::string body = "trial,hypothesis,lambda1,decision\n";
    long id = 0;
    for (const DetectionTrial& t : report.trials) {
        body += std::to_string(id++);
        body += ',';
        body += hypothesis_name(t.hypothesis);
        body += ',';
        body += format_double(t.statistic);
        body += ',';
        body += hypothesis_name(t.decision);
        body += '\n';
    }
    write_file(prefix + ".trials.csv", body);

    const DetectionSummary& s = report.summary;
    ordered_json j;
    j["n"] = s.n;
    j["trials_per_hypothesis"] = s.trials_per_hypothesis;
    j["threshold"] = json_number(s.threshold);
    j["false_alarm_rate"] = json_number(s.false_alarm_rate);
    j["miss_rate"] = json_number(s.miss_rate);
    j["h0_mean_statistic"] = json_number(s.h0_mean_statistic);
    j["h0_stddev_statistic"] = json_number(s.h0_stddev_statistic);
    j["h1_mean_statistic"] = json_number(s.h1_mean_statistic);
    write_json(j, prefix + ".summary.json");
}

void emit_moment_json(const MomentEstimate& est, const std::string& path) {
    ordered_json j;
    j["n"] = est.n;
    j["samples"] = est.samples;
    j["mean"] = json_number(est.mean);
    j["e1_part"] = json_number(est.e1_part);
    j["e2_part"] = json_number(est.e2_part);
    j["epsilon"] = json_number(est.epsilon);
    j["clamp_count"] = est.clamp_count;
    write_json(j, path);
}

void emit_verify_json(const std::vector<VerifyRecord>& records, const std::string& path) {
    ordered_json arr = ordered_json::array();
    for (const VerifyRecord& r : records) {
        ordered_json j;
        j["problem"] = r.problem;
        j["x"] = json_number(r.x);
        j["closed_form"] = json_number(r.closed_form);
        j["oracle_value"] = json_number(r.oracle_value);
        j["gap"] = json_number(r.gap);
        j["converged"] = r.converged;
        arr.push_back(std::move(j));
    }
    write_json(arr, path);
}

void emit_manifest(const RunConfig& config, double elapsed_seconds,
                   const std::string& path) {
    ordered_json cfg;
    cfg["command"] = command_name(config.command);
    cfg["spectrum"] = config.spectrum;
    cfg["n"] = config.n;
    cfg["samples"] = config.samples;
    cfg["trials"] = config.trials;
    cfg["seed"] = config.seed;
    if (config.epsilon) cfg["epsilon"] = json_number(*config.epsilon);
    if (config.threshold) cfg["threshold"] = json_number(*config.threshold);
    if (config.n_block) cfg["n_block"] = *config.n_block;
    cfg["grid"] = config.grid;
    if (config.x) cfg["x"] = json_number(*config.x);
    cfg["budget"] = config.budget;
    cfg["grid_steps"] = config.grid_steps;
    cfg["tol"] = json_number(config.tol);
    if (config.calibrate) cfg["calibrate"] = json_number(*config.calibrate);
    cfg["jobs"] = config.jobs;
    cfg["out"] = config.out;

    ordered_json j;
    j["config"] = std::move(cfg);
    j["version"] = kArtifactVersion;
    j["elapsed_seconds"] = json_number(elapsed_seconds);
    write_json(j, path);
}

}  // namespace spikelab
