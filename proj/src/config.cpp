#include "spikelab/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "spikelab/io.hpp"
#include "spikelab/spectrum.hpp"

namespace spikelab {

namespace {

using nlohmann::json;

struct CommandSpec {
    Command command;
    const char* name;
    const char* help;
};

constexpr CommandSpec kCommands[] = {
    {Command::Grf, "grf", "Tabulate the rate curve and its upper bound"},
    {Command::Waterfill, "waterfill", "Solve the allocation problem at one point"},
    {Command::Envelope, "envelope", "Monte Carlo overlap cloud vs. the rate curve"},
    {Command::Detect, "detect", "Top-singular-value detection experiment"},
    {Command::Moment, "moment", "Empirical second-moment estimate with split"},
    {Command::Verify, "verify", "Brute-force verification of the closed forms"},
};

/// Fields each subcommand accepts (everything shares spectrum/seed/jobs/out).
bool command_has(Command c, const std::string& field) {
    static const std::map<std::string, std::vector<Command>> table = {
        {"grid", {Command::Grf, Command::Envelope}},
        {"x", {Command::Waterfill}},
        {"samples", {Command::Envelope, Command::Moment}},
        {"n_block", {Command::Envelope}},
        {"n", {Command::Detect, Command::Moment}},
        {"trials", {Command::Detect}},
        {"threshold", {Command::Detect}},
        {"calibrate", {Command::Detect}},
        {"epsilon", {Command::Moment}},
        {"budget", {Command::Verify}},
        {"grid_steps", {Command::Verify}},
        {"tol", {Command::Verify}},
    };
    const auto it = table.find(field);
    if (it == table.end()) return true;  // common field
    return std::find(it->second.begin(), it->second.end(), c) != it->second.end();
}

json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("config: cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw UsageError("config: '" + path + "' is not valid JSON: " + e.what());
    }
    // A manifest can be fed back directly; its config lives under "config".
    if (j.is_object() && j.contains("config") && j["config"].is_object()) {
        j = j["config"];
    }
    if (!j.is_object()) throw UsageError("config: '" + path + "' must hold an object");
    return j;
}

template <typename T>
T field_as(const json& j, const std::string& key) {
    try {
        return j.get<T>();
    } catch (const json::exception&) {
        throw UsageError("config: field '" + key + "' has the wrong type");
    }
}

void apply_json(const json& j, Command command, RunConfig& cfg) {
    for (const auto& [key, value] : j.items()) {
        if (key == "command") {
            const std::string name = field_as<std::string>(value, key);
            if (name != command_name(command)) {
                throw UsageError("config: command '" + name +
                                 "' conflicts with subcommand '" +
                                 command_name(command) + "'");
            }
        } else if (key == "spectrum") {
            if (value.is_string()) {
                cfg.spectrum = parse_spectrum_flag(field_as<std::string>(value, key));
            } else {
                cfg.spectrum = field_as<std::vector<double>>(value, key);
            }
        } else if (key == "n") {
            cfg.n = field_as<long>(value, key);
        } else if (key == "samples") {
            cfg.samples = field_as<long>(value, key);
        } else if (key == "trials") {
            cfg.trials = field_as<long>(value, key);
        } else if (key == "seed") {
            cfg.seed = field_as<std::uint64_t>(value, key);
        } else if (key == "epsilon") {
            cfg.epsilon = field_as<double>(value, key);
        } else if (key == "threshold") {
            cfg.threshold = field_as<double>(value, key);
        } else if (key == "n_block") {
            cfg.n_block = field_as<long>(value, key);
        } else if (key == "grid") {
            cfg.grid = field_as<long>(value, key);
        } else if (key == "x") {
            cfg.x = field_as<double>(value, key);
        } else if (key == "budget") {
            cfg.budget = field_as<long>(value, key);
        } else if (key == "grid_steps") {
            cfg.grid_steps = field_as<long>(value, key);
        } else if (key == "tol") {
            cfg.tol = field_as<double>(value, key);
        } else if (key == "calibrate") {
            cfg.calibrate = field_as<double>(value, key);
        } else if (key == "jobs") {
            cfg.jobs = field_as<int>(value, key);
        } else if (key == "out") {
            cfg.out = field_as<std::string>(value, key);
        } else {
            throw UsageError("config: unknown field '" + key + "'");
        }
        if (key != "command" && !command_has(command, key)) {
            throw UsageError("config: field '" + key + "' does not apply to command '" +
                             std::string(command_name(command)) + "'");
        }
    }
}

void validate(RunConfig& cfg) {
    if (cfg.spectrum.empty()) throw UsageError("spectrum: required");
    try {
        Spectrum probe(cfg.spectrum);
        if (cfg.command == Command::Envelope && cfg.n_block && *cfg.n_block < probe.rank()) {
            throw UsageError("n_block: must be at least the spectrum rank");
        }
        if ((cfg.command == Command::Detect || cfg.command == Command::Moment) &&
            cfg.n < probe.rank()) {
            throw UsageError("n: must be at least the spectrum rank");
        }
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());  // the Spectrum message already names the field
    }
    // Dense-SVD experiments are capped to keep desk runtimes in minutes.
    if ((cfg.command == Command::Detect || cfg.command == Command::Moment) &&
        cfg.n > 2000) {
        throw UsageError("n: capped at 2000");
    }
    if (cfg.samples < 0) throw UsageError("samples: must be >= 0");
    if (cfg.command == Command::Moment && cfg.samples < 1) {
        throw UsageError("samples: must be >= 1 for moment");
    }
    if (cfg.trials < 1) throw UsageError("trials: must be >= 1");
    if (cfg.grid < 0) throw UsageError("grid: must be >= 0");
    if (cfg.budget < 1) throw UsageError("budget: must be >= 1");
    if (cfg.grid_steps < 2) throw UsageError("grid_steps: must be >= 2");
    if (!(cfg.tol > 0)) throw UsageError("tol: must be > 0");
    if (cfg.jobs < 0) throw UsageError("jobs: must be >= 0");
    if (cfg.calibrate && !(*cfg.calibrate > 0.0 && *cfg.calibrate < 1.0)) {
        throw UsageError("calibrate: quantile must lie in (0, 1)");
    }
    if (cfg.command == Command::Waterfill && !cfg.x) {
        throw UsageError("x: required for waterfill");
    }
}

}  // namespace

const char* command_name(Command c) {
    for (const CommandSpec& spec : kCommands) {
        if (spec.command == c) return spec.name;
    }
    return "?";
}

std::vector<double> parse_spectrum_flag(const std::string& text) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            const double v = std::stod(item, &used);
            while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
            if (used != item.size()) throw std::invalid_argument(item);
            values.push_back(v);
        } catch (const std::exception&) {
            throw UsageError("spectrum: malformed entry '" + item + "'");
        }
    }
    if (values.empty()) throw UsageError("spectrum: empty list");
    return values;
}

RunConfig parse_config(const std::vector<std::string>& args) {
    CLI::App app{"Numerical laboratory for low-rank detection in Gaussian noise"};
    app.name("spikelab");
    app.require_subcommand(1);

    struct SubState {
        CLI::App* sub = nullptr;
        std::string spectrum_str;
        std::string config_path;
    };
    std::map<Command, SubState> subs;
    RunConfig cfg;

    for (const CommandSpec& spec : kCommands) {
        CLI::App* sub = app.add_subcommand(spec.name, spec.help);
        SubState& state = subs[spec.command];
        state.sub = sub;
        sub->add_option("--spectrum", state.spectrum_str,
                        "Spike singular values, comma separated");
        sub->add_option("--config", state.config_path,
                        "JSON config file; explicit flags win");
        sub->add_option("--seed", cfg.seed, "RNG seed (fixed default, never wall-clock)");
        sub->add_option("--jobs", cfg.jobs, "Worker threads; 0 = available parallelism");
        sub->add_option("--out", cfg.out, "Output path prefix");
        const Command c = spec.command;
        if (command_has(c, "grid")) sub->add_option("--grid", cfg.grid, "Grid points");
        if (command_has(c, "x")) sub->add_option("--x", cfg.x, "Evaluation point");
        if (command_has(c, "samples")) sub->add_option("--samples", cfg.samples);
        if (command_has(c, "n_block")) sub->add_option("--n-block", cfg.n_block);
        if (command_has(c, "n")) sub->add_option("--n", cfg.n, "Matrix dimension");
        if (command_has(c, "trials")) sub->add_option("--trials", cfg.trials);
        if (command_has(c, "threshold")) sub->add_option("--threshold", cfg.threshold);
        if (command_has(c, "calibrate")) {
            sub->add_option("--calibrate", cfg.calibrate,
                            "Calibrate threshold to this H0 false-alarm quantile");
        }
        if (command_has(c, "epsilon")) sub->add_option("--epsilon", cfg.epsilon);
        if (command_has(c, "budget")) sub->add_option("--budget", cfg.budget);
        if (command_has(c, "grid_steps")) {
            sub->add_option("--grid-steps", cfg.grid_steps);
        }
        if (command_has(c, "tol")) sub->add_option("--tol", cfg.tol);
    }

    // First pass: only to learn the subcommand and the config path.
    {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        try {
            app.parse(reversed);
        } catch (const CLI::ParseError& e) {
            throw UsageError(e.what());
        }
    }
    Command command = Command::Grf;
    const SubState* active = nullptr;
    for (const CommandSpec& spec : kCommands) {
        const SubState& state = subs.at(spec.command);
        if (state.sub->parsed()) {
            command = spec.command;
            active = &state;
            break;
        }
    }
    cfg.command = command;

    // Merge: config-file values become the new baseline, then the command
    // line is replayed on top so explicit flags win.
    if (active != nullptr && !active->config_path.empty()) {
        RunConfig from_file;
        from_file.command = command;
        apply_json(load_config_file(active->config_path), command, from_file);
        cfg = from_file;
        cfg.command = command;
        app.clear();
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        try {
            app.parse(reversed);
        } catch (const CLI::ParseError& e) {
            throw UsageError(e.what());
        }
    }
    if (active != nullptr && !active->spectrum_str.empty()) {
        cfg.spectrum = parse_spectrum_flag(active->spectrum_str);
    }

    validate(cfg);
    return cfg;
}

std::vector<std::string> render_config(const RunConfig& cfg) {
    std::vector<std::string> args;
    args.emplace_back(command_name(cfg.command));
    std::string spectrum;
    for (std::size_t i = 0; i < cfg.spectrum.size(); ++i) {
        if (i > 0) spectrum += ',';
        spectrum += format_double(cfg.spectrum[i]);
    }
    args.insert(args.end(), {"--spectrum", spectrum});
    args.insert(args.end(), {"--seed", std::to_string(cfg.seed)});
    args.insert(args.end(), {"--jobs", std::to_string(cfg.jobs)});
    args.insert(args.end(), {"--out", cfg.out});
    const Command c = cfg.command;
    if (command_has(c, "grid")) {
        args.insert(args.end(), {"--grid", std::to_string(cfg.grid)});
    }
    if (command_has(c, "x") && cfg.x) {
        args.insert(args.end(), {"--x", format_double(*cfg.x)});
    }
    if (command_has(c, "samples")) {
        args.insert(args.end(), {"--samples", std::to_string(cfg.samples)});
    }
    if (command_has(c, "n_block") && cfg.n_block) {
        args.insert(args.end(), {"--n-block", std::to_string(*cfg.n_block)});
    }
    if (command_has(c, "n")) {
        args.insert(args.end(), {"--n", std::to_string(cfg.n)});
    }
    if (command_has(c, "trials")) {
        args.insert(args.end(), {"--trials", std::to_string(cfg.trials)});
    }
    if (command_has(c, "threshold") && cfg.threshold) {
        args.insert(args.end(), {"--threshold", format_double(*cfg.threshold)});
    }
    if (command_has(c, "calibrate") && cfg.calibrate) {
        args.insert(args.end(), {"--calibrate", format_double(*cfg.calibrate)});
    }
    if (command_has(c, "epsilon") && cfg.epsilon) {
        args.insert(args.end(), {"--epsilon", format_double(*cfg.epsilon)});
    }
    if (command_has(c, "budget")) {
        args.insert(args.end(), {"--budget", std::to_string(cfg.budget)});
    }
    if (command_has(c, "grid_steps")) {
        args.insert(args.end(), {"--grid-steps", std::to_string(cfg.grid_steps)});
    }
    if (command_has(c, "tol")) {
        args.insert(args.end(), {"--tol", format_double(cfg.tol)});
    }
    return args;
}

}  // namespace spikelab
