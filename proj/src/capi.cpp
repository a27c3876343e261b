#include "interfero/interfero.h"

#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "interfero/run.hpp"
#include "interfero/version.hpp"

struct itf_circuit {
    interfero::CircuitDescription desc;
};

struct itf_matrix {
    interfero::TransferMatrix matrix;
};

namespace {

thread_local std::string g_last_error;

itf_status status_of(const interfero::Error& e) {
    using interfero::ErrorCode;
    switch (e.code()) {
        case ErrorCode::syntax: return ITF_E_SYNTAX;
        case ErrorCode::semantic: return ITF_E_SEMANTIC;
        case ErrorCode::lossless_violation: return ITF_E_LOSSLESS;
        case ErrorCode::mode_mismatch: return ITF_E_MODE_MISMATCH;
        case ErrorCode::not_normalized: return ITF_E_NOT_NORMALIZED;
        case ErrorCode::unbound_parameter: return ITF_E_UNBOUND_PARAM;
        case ErrorCode::truncation_too_small: return ITF_E_TRUNCATION;
        case ErrorCode::corrupt_record: return ITF_E_CORRUPT_RECORD;
        case ErrorCode::insufficient_data: return ITF_E_INSUFFICIENT_DATA;
        case ErrorCode::invalid_argument: return ITF_E_INVALID_ARGUMENT;
        case ErrorCode::config: return ITF_E_CONFIG;
        case ErrorCode::io: return ITF_E_IO;
        case ErrorCode::stats_acceptance: return ITF_E_STATS;
    }
    return ITF_E_INTERNAL;
}

template <typename Fn>
itf_status guarded(Fn&& fn) {
    try {
        g_last_error.clear();
        return fn();
    } catch (const interfero::Error& e) {
        g_last_error = e.what();
        return status_of(e);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return ITF_E_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return ITF_E_INTERNAL;
    }
}

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.data(), s.size() + 1);
    return out;
}

interfero::TimelineParams to_timeline(const itf_timeline& t) {
    interfero::TimelineParams params;
    params.interferometer_length_m = t.interferometer_length_m;
    params.time_of_flight_ns = t.time_of_flight_ns;
    params.electronic_delay_ns = t.electronic_delay_ns;
    params.switch_duration_ns = t.switch_duration_ns;
    params.speed_of_light_m_per_ns = t.speed_of_light_m_per_ns;
    return params;
}

interfero::SweepPlan to_plan(const itf_sweep_plan& p) {
    interfero::SweepPlan plan;
    plan.phase_start = p.phase_start;
    plan.phase_stop = p.phase_stop;
    plan.phase_steps = p.phase_steps;
    plan.trials_per_point = p.trials_per_point;
    plan.master_seed = p.master_seed;
    switch (p.policy) {
        case ITF_POLICY_FIXED_OPEN: plan.policy = interfero::Policy::fixed_open; break;
        case ITF_POLICY_FIXED_CLOSED: plan.policy = interfero::Policy::fixed_closed; break;
        case ITF_POLICY_RANDOM: plan.policy = interfero::Policy::qrng_random; break;
        default: throw interfero::ConfigError("unknown policy value");
    }
    return plan;
}

}  // namespace

extern "C" {

const char* itf_version(void) {
    return interfero::kVersion;
}

const char* itf_last_error(void) {
    return g_last_error.c_str();
}

void itf_string_free(char* s) {
    delete[] s;
}

int itf_status_exit_code(itf_status status) {
    switch (status) {
        case ITF_OK: return 0;
        case ITF_E_IO: return 3;
        case ITF_E_STATS: return 4;
        default: return 2;
    }
}

itf_status itf_circuit_parse_file(const char* path, itf_circuit** out) {
    return guarded([&]() {
        if (!path || !out) throw interfero::InvalidArgument("null argument");
        std::ifstream in(path, std::ios::binary);
        if (!in) throw interfero::IoError(std::string("cannot read '") + path + "'");
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        *out = new itf_circuit{interfero::parse_circuit(text, path)};
        return ITF_OK;
    });
}

itf_status itf_circuit_parse_text(const char* text, const char* source_name, itf_circuit** out) {
    return guarded([&]() {
        if (!text || !out) throw interfero::InvalidArgument("null argument");
        *out = new itf_circuit{
            interfero::parse_circuit(text, source_name ? source_name : "<memory>")};
        return ITF_OK;
    });
}

void itf_circuit_free(itf_circuit* circuit) {
    delete circuit;
}

itf_status itf_circuit_check(const itf_circuit* circuit, char** report) {
    return guarded([&]() {
        if (!circuit || !report) throw interfero::InvalidArgument("null argument");
        *report = dup_string(interfero::check_report_text(circuit->desc));
        return ITF_OK;
    });
}

itf_status itf_circuit_elaborate(const itf_circuit* circuit, int removable_on,
                                 const char* const* param_names, const double* param_values,
                                 size_t n_params, itf_matrix** out) {
    return guarded([&]() {
        if (!circuit || !out) throw interfero::InvalidArgument("null argument");
        if (n_params > 0 && (!param_names || !param_values)) {
            throw interfero::InvalidArgument("parameter arrays are null");
        }
        interfero::ElaborationConfig config;
        for (const auto& name : circuit->desc.removable_names()) {
            config.removable_on[name] = removable_on != 0;
        }
        for (size_t i = 0; i < n_params; ++i) {
            config.parameters[param_names[i]] = param_values[i];
        }
        *out = new itf_matrix{interfero::elaborate(circuit->desc, config)};
        return ITF_OK;
    });
}

size_t itf_matrix_dim(const itf_matrix* matrix) {
    return matrix ? static_cast<size_t>(matrix->matrix.dim()) : 0;
}

void itf_matrix_entry(const itf_matrix* matrix, size_t row, size_t col, double* re, double* im) {
    if (!matrix || row >= itf_matrix_dim(matrix) || col >= itf_matrix_dim(matrix)) {
        if (re) *re = 0.0;
        if (im) *im = 0.0;
        return;
    }
    const auto v = matrix->matrix.entries()(static_cast<Eigen::Index>(row),
                                            static_cast<Eigen::Index>(col));
    if (re) *re = v.real();
    if (im) *im = v.imag();
}

const char* itf_matrix_input_mode(const itf_matrix* matrix, size_t index) {
    if (!matrix || index >= itf_matrix_dim(matrix)) return nullptr;
    return matrix->matrix.input_modes()[index].c_str();
}

const char* itf_matrix_output_mode(const itf_matrix* matrix, size_t index) {
    if (!matrix || index >= itf_matrix_dim(matrix)) return nullptr;
    return matrix->matrix.output_modes()[index].c_str();
}

double itf_matrix_unitarity_residual(const itf_matrix* matrix) {
    return matrix ? matrix->matrix.unitarity_residual() : -1.0;
}

void itf_matrix_free(itf_matrix* matrix) {
    delete matrix;
}

itf_timeline itf_timeline_default(void) {
    const interfero::TimelineParams d;
    return itf_timeline{d.interferometer_length_m, d.time_of_flight_ns, d.electronic_delay_ns,
                        d.switch_duration_ns, d.speed_of_light_m_per_ns};
}

itf_status itf_spacelike_check(const itf_timeline* timeline, itf_spacelike_report* out) {
    return guarded([&]() {
        if (!timeline || !out) throw interfero::InvalidArgument("null argument");
        const interfero::SpacelikeReport r = interfero::spacelike_check(to_timeline(*timeline));
        out->spacelike = r.spacelike ? 1 : 0;
        out->margin_m = r.margin_m;
        out->choice_complete_ns = r.choice_complete_ns();
        out->choice_in_flight = r.choice_in_flight ? 1 : 0;
        return ITF_OK;
    });
}

itf_sweep_plan itf_sweep_plan_default(void) {
    const interfero::SweepPlan d;
    return itf_sweep_plan{d.phase_start,      d.phase_stop,       d.phase_steps,
                          d.trials_per_point, ITF_POLICY_RANDOM, d.master_seed};
}

itf_status itf_sweep_run(const char* circuit_path, const itf_sweep_plan* plan,
                         const itf_timeline* timeline, const char* out_dir, char** summary) {
    return guarded([&]() {
        if (!circuit_path || !plan || !timeline || !out_dir) {
            throw interfero::InvalidArgument("null argument");
        }
        const interfero::SweepOutputs outputs = interfero::command_sweep(
            circuit_path, to_plan(*plan), to_timeline(*timeline), out_dir);
        if (summary) *summary = dup_string(outputs.summary);
        return ITF_OK;
    });
}

itf_status itf_analyze_log(const char* log_path, const char* fringe_csv_path, char** report) {
    return guarded([&]() {
        if (!log_path) throw interfero::InvalidArgument("null argument");
        std::optional<std::filesystem::path> csv;
        if (fringe_csv_path) csv = std::filesystem::path(fringe_csv_path);
        const interfero::AnalyzeResult result = interfero::command_analyze(log_path, csv);
        if (report) *report = dup_string(result.text);
        if (!result.accepted) {
            g_last_error = "statistical acceptance thresholds not met";
            return ITF_E_STATS;
        }
        return ITF_OK;
    });
}

itf_status itf_log_determinism_hash(const char* log_path, char** hex) {
    return guarded([&]() {
        if (!log_path || !hex) throw interfero::InvalidArgument("null argument");
        *hex = dup_string(interfero::log_determinism_hash(log_path));
        return ITF_OK;
    });
}

}  // extern "C"
