/* C API for the interfero shared library.
 *
 * All functions return itf_status; on failure itf_last_error() holds a
 * thread-local message. Objects returned through out-parameters are owned by
 * the caller and released with the matching *_free function. Strings returned
 * through char** out-parameters are released with itf_string_free.
 */
#ifndef INTERFERO_INTERFERO_H
#define INTERFERO_INTERFERO_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum itf_status {
    ITF_OK = 0,
    ITF_E_SYNTAX = 1,
    ITF_E_SEMANTIC = 2,
    ITF_E_LOSSLESS = 3,
    ITF_E_MODE_MISMATCH = 4,
    ITF_E_NOT_NORMALIZED = 5,
    ITF_E_UNBOUND_PARAM = 6,
    ITF_E_TRUNCATION = 7,
    ITF_E_CORRUPT_RECORD = 8,
    ITF_E_INSUFFICIENT_DATA = 9,
    ITF_E_INVALID_ARGUMENT = 10,
    ITF_E_CONFIG = 11,
    ITF_E_IO = 12,
    ITF_E_STATS = 13,
    ITF_E_INTERNAL = 14
} itf_status;

const char* itf_version(void);

/* Message for the most recent failure on this thread; empty when none. */
const char* itf_last_error(void);

void itf_string_free(char* s);

/* Process exit code for a status: 0 ok, 3 I/O, 4 statistical acceptance,
 * 2 anything else. */
int itf_status_exit_code(itf_status status);

/* ---- circuits ---------------------------------------------------------- */

typedef struct itf_circuit itf_circuit;

itf_status itf_circuit_parse_file(const char* path, itf_circuit** out);
itf_status itf_circuit_parse_text(const char* text, const char* source_name, itf_circuit** out);
void itf_circuit_free(itf_circuit* circuit);

/* Wiring and unitarity report (the `check` subcommand body). */
itf_status itf_circuit_check(const itf_circuit* circuit, char** report);

/* ---- transfer matrices ------------------------------------------------- */

typedef struct itf_matrix itf_matrix;

/* Elaborates with every removable element set on (nonzero) or off, and the
 * given parameter bindings. */
itf_status itf_circuit_elaborate(const itf_circuit* circuit, int removable_on,
                                 const char* const* param_names, const double* param_values,
                                 size_t n_params, itf_matrix** out);

size_t itf_matrix_dim(const itf_matrix* matrix);
void itf_matrix_entry(const itf_matrix* matrix, size_t row, size_t col, double* re, double* im);
const char* itf_matrix_input_mode(const itf_matrix* matrix, size_t index);
const char* itf_matrix_output_mode(const itf_matrix* matrix, size_t index);
double itf_matrix_unitarity_residual(const itf_matrix* matrix);
void itf_matrix_free(itf_matrix* matrix);

/* ---- timing ------------------------------------------------------------ */

typedef struct itf_timeline {
    double interferometer_length_m;
    double time_of_flight_ns;
    double electronic_delay_ns;
    double switch_duration_ns;
    double speed_of_light_m_per_ns;
} itf_timeline;

itf_timeline itf_timeline_default(void);

typedef struct itf_spacelike_report {
    int spacelike;
    double margin_m;
    double choice_complete_ns;
    int choice_in_flight;
} itf_spacelike_report;

itf_status itf_spacelike_check(const itf_timeline* timeline, itf_spacelike_report* out);

/* ---- sweeps and analysis ----------------------------------------------- */

enum {
    ITF_POLICY_FIXED_OPEN = 0,
    ITF_POLICY_FIXED_CLOSED = 1,
    ITF_POLICY_RANDOM = 2
};

typedef struct itf_sweep_plan {
    double phase_start;
    double phase_stop;
    int phase_steps;
    int64_t trials_per_point;
    int policy;
    uint64_t master_seed;
} itf_sweep_plan;

itf_sweep_plan itf_sweep_plan_default(void);

/* Runs the plan against the circuit at `circuit_path`, writing events.jsonl
 * and counts.csv under out_dir. On success *summary receives a human-readable
 * run summary including the determinism hash. */
itf_status itf_sweep_run(const char* circuit_path, const itf_sweep_plan* plan,
                         const itf_timeline* timeline, const char* out_dir, char** summary);

/* Sorts a log's events and checks them against the analytic model embedded in
 * its manifest. *report is filled on ITF_OK and on ITF_E_STATS (thresholds
 * not met). fringe_csv_path may be NULL. */
itf_status itf_analyze_log(const char* log_path, const char* fringe_csv_path, char** report);

/* Determinism hash of an event log (manifest timestamp excluded). */
itf_status itf_log_determinism_hash(const char* log_path, char** hex);

#ifdef __cplusplus
}
#endif

#endif /* INTERFERO_INTERFERO_H */
