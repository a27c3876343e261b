#include "interfero/run.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "interfero/version.hpp"

namespace interfero {

namespace {

using nlohmann::json;

std::string fmt_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

std::string iso8601_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read '" + path.string() + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Config config_from_string(const std::string& s, const std::string& where) {
    if (s == "open") return Config::open;
    if (s == "closed") return Config::closed;
    throw CorruptRecord(where + ": unknown configuration '" + s + "'");
}

const json& require_field(const json& j, const char* key, const std::string& where) {
    const auto it = j.find(key);
    if (it == j.end()) throw CorruptRecord(where + ": missing field '" + key + "'");
    return *it;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (const unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string fnv1a64_hex(std::string_view bytes) {
    static const char* hex = "0123456789abcdef";
    const std::uint64_t h = fnv1a64(bytes);
    std::string out(16, '0');
    for (int i = 0; i < 16; ++i) {
        out[static_cast<std::size_t>(i)] = hex[(h >> (60 - 4 * i)) & 0xF];
    }
    return out;
}

std::string manifest_to_json_line(const RunManifest& m) {
    json j;
    j["record"] = "manifest";
    j["tool_version"] = m.tool_version;
    j["created"] = m.created;
    j["circuit_path"] = m.circuit_path;
    j["circuit_hash"] = m.circuit_hash;
    j["circuit_text"] = m.circuit_text;
    j["plan"] = {
        {"phase_start", m.plan.phase_start},
        {"phase_stop", m.plan.phase_stop},
        {"phase_steps", m.plan.phase_steps},
        {"trials_per_point", m.plan.trials_per_point},
        {"policy", to_string(m.plan.policy)},
        {"master_seed", m.plan.master_seed},
    };
    j["timeline"] = {
        {"interferometer_length_m", m.timeline.interferometer_length_m},
        {"time_of_flight_ns", m.timeline.time_of_flight_ns},
        {"electronic_delay_ns", m.timeline.electronic_delay_ns},
        {"switch_duration_ns", m.timeline.switch_duration_ns},
        {"speed_of_light_m_per_ns", m.timeline.speed_of_light_m_per_ns},
    };
    return j.dump();
}

RunManifest manifest_from_json_line(const std::string& line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception& e) {
        throw CorruptRecord(std::string("manifest line is not valid JSON: ") + e.what());
    }
    const std::string where = "manifest";
    if (!j.is_object() || require_field(j, "record", where) != "manifest") {
        throw CorruptRecord("event log does not start with a manifest record");
    }
    RunManifest m;
    m.tool_version = require_field(j, "tool_version", where).get<std::string>();
    m.created = require_field(j, "created", where).get<std::string>();
    m.circuit_path = require_field(j, "circuit_path", where).get<std::string>();
    m.circuit_hash = require_field(j, "circuit_hash", where).get<std::string>();
    m.circuit_text = require_field(j, "circuit_text", where).get<std::string>();
    const json& plan = require_field(j, "plan", where);
    m.plan.phase_start = require_field(plan, "phase_start", where).get<double>();
    m.plan.phase_stop = require_field(plan, "phase_stop", where).get<double>();
    m.plan.phase_steps = require_field(plan, "phase_steps", where).get<int>();
    m.plan.trials_per_point = require_field(plan, "trials_per_point", where).get<std::int64_t>();
    m.plan.policy = policy_from_string(require_field(plan, "policy", where).get<std::string>());
    m.plan.master_seed = require_field(plan, "master_seed", where).get<std::uint64_t>();
    const json& tl = require_field(j, "timeline", where);
    m.timeline.interferometer_length_m =
        require_field(tl, "interferometer_length_m", where).get<double>();
    m.timeline.time_of_flight_ns = require_field(tl, "time_of_flight_ns", where).get<double>();
    m.timeline.electronic_delay_ns = require_field(tl, "electronic_delay_ns", where).get<double>();
    m.timeline.switch_duration_ns = require_field(tl, "switch_duration_ns", where).get<double>();
    m.timeline.speed_of_light_m_per_ns =
        require_field(tl, "speed_of_light_m_per_ns", where).get<double>();
    return m;
}

std::string trial_to_json_line(const TrialRecord& r) {
    // Hand-formatted with a fixed key order: event logs are large and must be
    // byte-stable across runs.
    std::string out;
    out.reserve(192);
    out += "{\"record\":\"trial\",\"trial_id\":";
    out += std::to_string(r.trial_id);
    out += ",\"config\":\"";
    out += to_string(r.config);
    out += "\",\"phase_index\":";
    out += std::to_string(r.phase_index);
    out += ",\"phase_setting\":";
    out += fmt_double(r.phase_setting);
    out += ",\"detector\":\"";
    out += r.detector;
    out += "\",\"choice_complete_time\":";
    out += fmt_double(r.choice_complete_ns());
    out += ",\"spacelike\":";
    out += r.spacelike ? "true" : "false";
    out += ",\"rng_seed\":";
    out += std::to_string(r.rng_seed);
    out += "}";
    return out;
}

TrialRecord trial_from_json_line(const std::string& line, std::size_t line_number) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception& e) {
        throw CorruptRecord("line " + std::to_string(line_number) + ": not valid JSON: " +
                            e.what());
    }
    std::string where = "line " + std::to_string(line_number);
    if (j.contains("trial_id") && j["trial_id"].is_number()) {
        where = "trial " + std::to_string(j["trial_id"].get<std::uint64_t>());
    }
    try {
        if (require_field(j, "record", where) != "trial") {
            throw CorruptRecord(where + ": unexpected record type");
        }
        TrialRecord r;
        r.trial_id = require_field(j, "trial_id", where).get<std::uint64_t>();
        r.config = config_from_string(require_field(j, "config", where).get<std::string>(), where);
        r.phase_index = require_field(j, "phase_index", where).get<int>();
        r.phase_setting = require_field(j, "phase_setting", where).get<double>();
        r.detector = require_field(j, "detector", where).get<std::string>();
        r.choice_complete_ps =
            ns_to_ps(require_field(j, "choice_complete_time", where).get<double>());
        r.spacelike = require_field(j, "spacelike", where).get<bool>();
        r.rng_seed = require_field(j, "rng_seed", where).get<std::uint64_t>();
        return r;
    } catch (const json::exception& e) {
        throw CorruptRecord(where + ": malformed field: " + e.what());
    }
}

LoadedLog read_event_log(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line)) throw CorruptRecord("event log is empty (no manifest)");
    LoadedLog log;
    log.manifest = manifest_from_json_line(line);
    std::size_t line_number = 1;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        log.records.push_back(trial_from_json_line(line, line_number));
    }
    return log;
}

std::string log_determinism_hash(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read '" + path.string() + "'");
    std::string first;
    if (!std::getline(in, first)) throw CorruptRecord("event log is empty (no manifest)");
    json manifest;
    try {
        manifest = json::parse(first);
    } catch (const json::exception& e) {
        throw CorruptRecord(std::string("manifest line is not valid JSON: ") + e.what());
    }
    if (!manifest.is_object()) {
        throw CorruptRecord("event log does not start with a manifest record");
    }
    manifest.erase("created");
    std::ostringstream rest;
    rest << in.rdbuf();
    const std::string normalized = manifest.dump() + "\n" + rest.str();
    return "fnv1a64:" + fnv1a64_hex(normalized);
}

void write_counts_csv(const std::filesystem::path& path, const CountsSummary& summary) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << "config,phase_index,phase_rad,n_d1,n_d2,total,freq_d1,analytic_d1\n";
    for (const auto& [config, buckets] : summary.per_config) {
        for (const auto& [index, b] : buckets) {
            out << to_string(config) << "," << index << "," << fmt_double(b.phase) << ","
                << fmt_double(b.n_d1) << "," << fmt_double(b.n_d2) << "," << fmt_double(b.total)
                << "," << fmt_double(b.freq_d1()) << ","
                << (std::isnan(b.analytic_d1) ? std::string("nan") : fmt_double(b.analytic_d1))
                << "\n";
        }
    }
    if (!out) throw IoError("failed while writing '" + path.string() + "'");
}

namespace {

void write_fringe_row(std::ostream& out, const char* config, const ConfigFringe& f) {
    out << config << "," << f.points << "," << fmt_double(f.trials) << ","
        << fmt_double(f.visibility) << "," << fmt_double(f.analytic_visibility) << ","
        << fmt_double(f.fit_offset) << "," << fmt_double(f.fit_amplitude) << ","
        << fmt_double(f.chi2) << "," << f.dof << "," << fmt_double(f.p_value) << ","
        << fmt_double(f.flatness_chi2) << "," << f.flatness_dof << ","
        << fmt_double(f.flatness_p) << "\n";
}

}  // namespace

void write_fringe_csv(const std::filesystem::path& path, const FringeReport& report) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << "config,points,trials,visibility,analytic_visibility,fit_offset,fit_amplitude,"
           "chi2,dof,p_value,flatness_chi2,flatness_dof,flatness_p\n";
    if (report.closed) write_fringe_row(out, "closed", *report.closed);
    if (report.open) write_fringe_row(out, "open", *report.open);
    if (!out) throw IoError("failed while writing '" + path.string() + "'");
}

namespace {

std::string residual_line(const TransferMatrix& m) {
    std::ostringstream os;
    os.setf(std::ios::scientific);
    os.precision(1);
    os << "unitary OK (residual " << m.unitarity_residual() << " <= 1e-12)";
    return os.str();
}

std::string join_labels(const std::vector<std::string>& labels) {
    std::string out;
    for (const auto& l : labels) {
        if (!out.empty()) out += " ";
        out += l;
    }
    return out;
}

}  // namespace

std::string check_report_text(const CircuitDescription& desc) {
    ElaborationConfig unit;
    for (const auto& p : desc.parameters) unit.parameters[p] = 0.0;
    const auto removables = desc.removable_names();

    std::ostringstream os;
    os << "circuit " << desc.source_name << "\n";
    os << "  input modes : " << join_labels(desc.input_modes) << "\n";
    if (!desc.parameters.empty()) {
        os << "  parameters  : " << join_labels(desc.parameters) << "\n";
    }
    os << "  elements    : " << desc.elements.size();
    if (!removables.empty()) {
        os << " (" << removables.size() << " removable: " << join_labels(removables) << ")";
    }
    os << "\n";
    os << "  final modes : " << join_labels(desc.final_modes()) << "\n";
    if (!desc.detectors.empty()) {
        os << "  detectors   :";
        bool first = true;
        for (const auto& d : desc.detectors) {
            os << (first ? " " : ", ") << d.detector << " <- " << d.mode;
            first = false;
        }
        os << "\n";
    }
    if (removables.empty()) {
        os << "  transfer    : " << residual_line(elaborate(desc, unit)) << "\n";
    } else {
        ElaborationConfig on = unit, off = unit;
        for (const auto& name : removables) {
            on.removable_on[name] = true;
            off.removable_on[name] = false;
        }
        os << "  closed (removable on)  : " << residual_line(elaborate(desc, on)) << "\n";
        os << "  open   (removable off) : " << residual_line(elaborate(desc, off)) << "\n";
    }
    return os.str();
}

CheckReport command_check(const std::filesystem::path& circuit_path) {
    const std::string text = read_text_file(circuit_path);
    return CheckReport{check_report_text(parse_circuit(text, circuit_path.string()))};
}

SweepOutputs command_sweep(const std::filesystem::path& circuit_path, const SweepPlan& plan,
                           const TimelineParams& timeline, const std::filesystem::path& out_dir) {
    plan.validate();
    timeline.validate();
    const std::string circuit_text = read_text_file(circuit_path);
    const CircuitDescription desc = parse_circuit(circuit_text, circuit_path.string());

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory '" + out_dir.string() + "'");

    RunManifest manifest;
    manifest.tool_version = kVersion;
    manifest.created = iso8601_now();
    manifest.circuit_path = circuit_path.string();
    manifest.circuit_hash = "fnv1a64:" + fnv1a64_hex(circuit_text);
    manifest.circuit_text = circuit_text;
    manifest.plan = plan;
    manifest.timeline = timeline;

    SweepOutputs outputs;
    outputs.events_path = out_dir / "events.jsonl";
    outputs.counts_path = out_dir / "counts.csv";

    std::ofstream events(outputs.events_path, std::ios::binary);
    if (!events) throw IoError("cannot write '" + outputs.events_path.string() + "'");
    events << manifest_to_json_line(manifest) << "\n";

    CountsSummary summary;
    summary.detector_names = {desc.detectors.size() > 0 ? desc.detectors[0].detector : "D1",
                              desc.detectors.size() > 1 ? desc.detectors[1].detector : "D2"};
    std::string line;
    run_sweep(desc, plan, timeline, [&](const TrialRecord& r) {
        line = trial_to_json_line(r);
        line += "\n";
        events.write(line.data(), static_cast<std::streamsize>(line.size()));
        summary.add(r);
    });
    events.flush();
    if (!events) throw IoError("failed while writing '" + outputs.events_path.string() + "'");
    events.close();

    attach_analytic(summary, desc);
    write_counts_csv(outputs.counts_path, summary);
    outputs.determinism_hash = log_determinism_hash(outputs.events_path);

    const SpacelikeReport spacelike = spacelike_check(timeline);
    std::ostringstream os;
    os << "sweep " << circuit_path.string() << " policy=" << to_string(plan.policy) << " phases=["
       << fmt_double(plan.phase_start) << "," << fmt_double(plan.phase_stop) << "]x"
       << plan.phase_steps << " trials=" << plan.trials_per_point << " seed=" << plan.master_seed
       << "\n";
    os << "  spacelike choice : " << (spacelike.spacelike ? "yes" : "NO") << " (margin "
       << spacelike.margin_m << " m), complete at " << spacelike.choice_complete_ns() << " ns"
       << (spacelike.choice_in_flight ? " < " : " >= NOT in flight, ")
       << timeline.time_of_flight_ns << " ns flight\n";
    os << "  events  : " << outputs.events_path.string() << "\n";
    os << "  counts  : " << outputs.counts_path.string() << "\n";
    os << "  determinism hash : " << outputs.determinism_hash << "\n";
    outputs.summary = os.str();
    return outputs;
}

namespace {

void describe_config(std::ostream& os, const char* name, const ConfigFringe& f, bool with_flatness) {
    os << "  " << name << " : points=" << f.points << " trials=" << fmt_double(f.trials)
       << " visibility=" << fmt_double(f.visibility) << " (analytic "
       << fmt_double(f.analytic_visibility) << ")"
       << " chi2=" << fmt_double(f.chi2) << "/" << f.dof << " p=" << fmt_double(f.p_value);
    if (with_flatness) os << " flatness_p=" << fmt_double(f.flatness_p);
    os << "\n";
}

}  // namespace

AnalyzeResult command_analyze(const std::filesystem::path& log_path,
                              const std::optional<std::filesystem::path>& fringe_csv_path) {
    const LoadedLog log = read_event_log(log_path);
    const CircuitDescription desc = parse_circuit(log.manifest.circuit_text,
                                                  log.manifest.circuit_path);
    std::array<std::string, 2> names{"D1", "D2"};
    if (desc.detectors.size() == 2) {
        names = {desc.detectors[0].detector, desc.detectors[1].detector};
    }

    AnalyzeResult result;
    result.summary = sort_events(log.records, names);
    attach_analytic(result.summary, desc);
    result.report = fringe_report(result.summary);
    result.accepted = result.report.accepted();

    if (fringe_csv_path) write_fringe_csv(*fringe_csv_path, result.report);

    std::ostringstream os;
    os << "analyze " << log_path.string() << " (" << log.records.size() << " records, circuit "
       << log.manifest.circuit_path << ")\n";
    if (result.report.closed) describe_config(os, "closed", *result.report.closed, false);
    if (result.report.open) describe_config(os, "open  ", *result.report.open, true);
    os << "  acceptance : " << (result.accepted ? "PASS" : "FAIL")
       << " (|visibility - analytic| <= " << kVisibilityTol << ", model p > " << kMinPValue
       << ", open flatness p > " << kMinPValue << ")\n";
    result.text = os.str();
    return result;
}

}  // namespace interfero
