// interfero command-line front end. Talks to the core library exclusively
// through its C API.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "interfero/interfero.h"

namespace {

int fail_with(itf_status status) {
    std::fprintf(stderr, "error: %s\n", itf_last_error());
    return itf_status_exit_code(status);
}

bool parse_phase_grid(const std::string& text, itf_sweep_plan& plan, std::string& error) {
    const auto first = text.find(':');
    const auto second = text.find(':', first == std::string::npos ? first : first + 1);
    if (first == std::string::npos || second == std::string::npos) {
        error = "--phases expects start:stop:steps";
        return false;
    }
    try {
        std::size_t used = 0;
        plan.phase_start = std::stod(text.substr(0, first), &used);
        plan.phase_stop = std::stod(text.substr(first + 1, second - first - 1), &used);
        plan.phase_steps = std::stoi(text.substr(second + 1), &used);
    } catch (const std::exception&) {
        error = "--phases expects numeric start:stop:steps";
        return false;
    }
    return true;
}

bool parse_timeline(const std::string& text, itf_timeline& timeline, std::string& error) {
    std::vector<double> values;
    std::size_t begin = 0;
    while (begin <= text.size()) {
        const auto comma = text.find(',', begin);
        const std::string piece =
            text.substr(begin, comma == std::string::npos ? std::string::npos : comma - begin);
        try {
            values.push_back(std::stod(piece));
        } catch (const std::exception&) {
            error = "--timeline expects length_m,tof_ns,delay_ns,switch_ns";
            return false;
        }
        if (comma == std::string::npos) break;
        begin = comma + 1;
    }
    if (values.size() != 4) {
        error = "--timeline expects exactly four comma-separated values";
        return false;
    }
    timeline.interferometer_length_m = values[0];
    timeline.time_of_flight_ns = values[1];
    timeline.electronic_delay_ns = values[2];
    timeline.switch_duration_ns = values[3];
    return true;
}

uint64_t default_seed() {
    if (const char* env = std::getenv("INTERFERO_SEED")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end && *end == '\0') return static_cast<uint64_t>(v);
        std::fprintf(stderr, "warning: ignoring non-numeric INTERFERO_SEED='%s'\n", env);
    }
    return 42;
}

int run_check(const std::string& circuit_path) {
    itf_circuit* circuit = nullptr;
    itf_status status = itf_circuit_parse_file(circuit_path.c_str(), &circuit);
    if (status != ITF_OK) return fail_with(status);
    char* report = nullptr;
    status = itf_circuit_check(circuit, &report);
    itf_circuit_free(circuit);
    if (status != ITF_OK) return fail_with(status);
    std::fputs(report, stdout);
    itf_string_free(report);
    return 0;
}

int run_sweep_cmd(const std::string& circuit_path, const itf_sweep_plan& plan,
                  const itf_timeline& timeline, const std::string& out_dir) {
    char* summary = nullptr;
    const itf_status status =
        itf_sweep_run(circuit_path.c_str(), &plan, &timeline, out_dir.c_str(), &summary);
    if (status != ITF_OK) return fail_with(status);
    std::fputs(summary, stdout);
    itf_string_free(summary);
    return 0;
}

int run_analyze(const std::string& log_path, std::string csv_path) {
    if (csv_path.empty()) {
        csv_path = (std::filesystem::path(log_path).parent_path() / "fringe.csv").string();
    }
    char* report = nullptr;
    const itf_status status = itf_analyze_log(log_path.c_str(), csv_path.c_str(), &report);
    if (report) {
        std::fputs(report, stdout);
        itf_string_free(report);
    }
    if (status != ITF_OK && status != ITF_E_STATS) return fail_with(status);
    return itf_status_exit_code(status);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string("interfero ") + itf_version() +
                 " - delayed-choice Mach-Zehnder simulator"};
    app.require_subcommand(1);

    std::string circuit_path;
    auto* check = app.add_subcommand("check", "Parse a circuit and verify its transfer matrix");
    check->add_option("circuit", circuit_path, "circuit file (.circ)")->required();

    itf_sweep_plan plan = itf_sweep_plan_default();
    itf_timeline timeline = itf_timeline_default();
    std::string sweep_circuit;
    std::string policy = "random";
    std::string phases;
    std::string timeline_text;
    std::string out_dir = ".";
    uint64_t seed = 0;
    auto* sweep = app.add_subcommand("sweep", "Run a phase sweep and log every trial");
    sweep->add_option("circuit", sweep_circuit, "circuit file (.circ)")->required();
    sweep->add_option("--policy", policy, "fixed-open|fixed-closed|random")
        ->check(CLI::IsMember({"fixed-open", "fixed-closed", "random"}));
    sweep->add_option("--phases", phases, "phase grid start:stop:steps (radians)");
    sweep->add_option("--trials", plan.trials_per_point, "trials per phase point");
    auto* seed_opt = sweep->add_option("--seed", seed, "master seed (or INTERFERO_SEED)");
    sweep->add_option("--out", out_dir, "output directory");
    sweep->add_option("--timeline", timeline_text,
                      "length_m,tof_ns,delay_ns,switch_ns (defaults 48,160,80,40)");

    std::string log_path;
    std::string fringe_csv;
    auto* analyze = app.add_subcommand("analyze", "Sort a log's events and report fringes");
    analyze->add_option("log", log_path, "event log (.jsonl)")->required();
    analyze->add_option("--csv", fringe_csv, "fringe statistics CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    if (check->parsed()) return run_check(circuit_path);

    if (sweep->parsed()) {
        if (policy == "fixed-open") {
            plan.policy = ITF_POLICY_FIXED_OPEN;
        } else if (policy == "fixed-closed") {
            plan.policy = ITF_POLICY_FIXED_CLOSED;
        } else {
            plan.policy = ITF_POLICY_RANDOM;
        }
        std::string error;
        if (!phases.empty() && !parse_phase_grid(phases, plan, error)) {
            std::fprintf(stderr, "error: %s\n", error.c_str());
            return 2;
        }
        if (!timeline_text.empty() && !parse_timeline(timeline_text, timeline, error)) {
            std::fprintf(stderr, "error: %s\n", error.c_str());
            return 2;
        }
        plan.master_seed = seed_opt->count() > 0 ? seed : default_seed();
        return run_sweep_cmd(sweep_circuit, plan, timeline, out_dir);
    }

    return run_analyze(log_path, fringe_csv);
}
