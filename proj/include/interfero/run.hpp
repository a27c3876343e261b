#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "interfero/analysis.hpp"
#include "interfero/circuit.hpp"
#include "interfero/experiment.hpp"

namespace interfero {

/// Reproducibility envelope written as line 1 of every event log. `created`
/// is the only field excluded from the determinism hash.
struct RunManifest {
    std::string tool_version;
    std::string created;  // ISO-8601 UTC
    std::string circuit_path;
    std::string circuit_hash;  // "fnv1a64:<16 hex>" over the circuit text
    std::string circuit_text;
    SweepPlan plan;
    TimelineParams timeline;
};

std::uint64_t fnv1a64(std::string_view bytes);
std::string fnv1a64_hex(std::string_view bytes);

std::string manifest_to_json_line(const RunManifest& manifest);
RunManifest manifest_from_json_line(const std::string& line);

/// Fixed-key-order single-line JSON; doubles use shortest round-trip form.
std::string trial_to_json_line(const TrialRecord& record);
TrialRecord trial_from_json_line(const std::string& line, std::size_t line_number);

struct LoadedLog {
    RunManifest manifest;
    std::vector<TrialRecord> records;
};

/// Reads an event log; throws CorruptRecord when the manifest is missing or a
/// record line is malformed (naming the trial where possible).
LoadedLog read_event_log(const std::filesystem::path& path);

/// FNV-1a over the log with the manifest's `created` field normalized away.
/// Byte-identical reruns at the same seed share this hash.
std::string log_determinism_hash(const std::filesystem::path& path);

/// Counts CSV, one row per (configuration, phase):
///   config,phase_index,phase_rad,n_d1,n_d2,total,freq_d1,analytic_d1
void write_counts_csv(const std::filesystem::path& path, const CountsSummary& summary);

/// Per-configuration fringe statistics CSV.
void write_fringe_csv(const std::filesystem::path& path, const FringeReport& report);

/// Dry-run elaboration with unit bindings (parameters at 0, removable
/// splitters both on and off); reports wiring and unitarity residuals.
std::string check_report_text(const CircuitDescription& desc);

/// `check`: parse a circuit file and produce the dry-run report.
struct CheckReport {
    std::string text;
};
CheckReport command_check(const std::filesystem::path& circuit_path);

/// `sweep`: run the plan against a circuit file; writes events.jsonl and
/// counts.csv under out_dir.
struct SweepOutputs {
    std::filesystem::path events_path;
    std::filesystem::path counts_path;
    std::string determinism_hash;
    std::string summary;
};
SweepOutputs command_sweep(const std::filesystem::path& circuit_path, const SweepPlan& plan,
                           const TimelineParams& timeline, const std::filesystem::path& out_dir);

/// `analyze`: sort a log's events, compare against the analytic model from
/// the embedded circuit, and judge the documented acceptance thresholds.
struct AnalyzeResult {
    FringeReport report;
    CountsSummary summary;
    std::string text;
    bool accepted = false;
};
AnalyzeResult command_analyze(const std::filesystem::path& log_path,
                              const std::optional<std::filesystem::path>& fringe_csv_path);

}  // namespace interfero
