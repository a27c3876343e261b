#pragma once

#include <array>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>

#include "interfero/experiment.hpp"

namespace interfero {
namespace stats {

/// Upper regularized incomplete gamma Q(a, x).
double regularized_gamma_q(double a, double x);

/// Survival function of the chi-square distribution with `dof` degrees of
/// freedom: P(X >= chi2).
double chi2_sf(double chi2, int dof);

}  // namespace stats

/// Counts for one (configuration, phase) cell. Counts are reals so analytic
/// (infinite-N) expectations can flow through the same pipeline.
struct PhaseBucket {
    double phase = 0.0;
    double n_d1 = 0.0;
    double n_d2 = 0.0;
    double total = 0.0;
    /// Model probability that detector 1 fires; NaN until attached.
    double analytic_d1 = std::numeric_limits<double>::quiet_NaN();

    double freq_d1() const { return total > 0.0 ? n_d1 / total : 0.0; }
};

/// Complete partition of a record stream by configuration and phase index.
struct CountsSummary {
    std::array<std::string, 2> detector_names{"D1", "D2"};
    std::map<Config, std::map<int, PhaseBucket>> per_config;

    bool has(Config c) const { return per_config.count(c) != 0; }
    double total_records() const;

    /// Folds one record in; commutative and associative across records.
    void add(const TrialRecord& record);
};

/// Sorts events into per-(configuration, phase) buckets. Every record is
/// counted exactly once; the fold is commutative, so any permutation of the
/// stream yields the same summary. A detector name outside `detector_names`
/// raises CorruptRecord naming the trial.
CountsSummary sort_events(std::span<const TrialRecord> records,
                          const std::array<std::string, 2>& detector_names = {"D1", "D2"});

/// Attaches model probabilities from the circuit that generated the data.
void attach_analytic(CountsSummary& summary, const CircuitDescription& desc);

/// Attaches the ideal Mach-Zehnder expectations for detector 1:
///   closed: |R|^4 + |T|^4 - 2 |R|^2 |T|^2 cos(phi)
///   open:   |T|^2 (phase independent).
void attach_analytic(CountsSummary& summary, const BeamSplitterSpec& spec);

double analytic_closed_d1(const BeamSplitterSpec& spec, double phase);
double analytic_open_d1(const BeamSplitterSpec& spec);

/// Fringe statistics for one configuration.
struct ConfigFringe {
    int points = 0;
    double trials = 0.0;
    /// Least-squares fit of freq_d1 to offset + amplitude * cos(phase).
    double fit_offset = 0.0;
    double fit_amplitude = 0.0;
    /// (max - min) / (max + min) of the fitted curve, clamped to [0, 1].
    double visibility = 0.0;
    double analytic_visibility = 0.0;
    /// Pearson chi-square of D1 counts against the analytic model
    /// (binomial variances).
    double chi2 = 0.0;
    int dof = 0;
    double p_value = 0.0;
    /// Pearson chi-square of D1 counts against the pooled frequency.
    double flatness_chi2 = 0.0;
    int flatness_dof = 0;
    double flatness_p = 0.0;
};

/// Acceptance thresholds applied by fringe analysis: each configuration's
/// fitted visibility must sit within kVisibilityTol of the analytic value,
/// its chi-square p-value against the analytic model must exceed kMinPValue,
/// and the open configuration must additionally pass the flatness test at
/// kMinPValue.
inline constexpr double kVisibilityTol = 0.01;
inline constexpr double kMinPValue = 0.01;

struct FringeReport {
    std::optional<ConfigFringe> closed;
    std::optional<ConfigFringe> open;

    /// True when every configuration present meets the documented thresholds.
    bool accepted() const;
};

/// Computes per-configuration visibility, model goodness-of-fit and flatness.
/// Requires analytic expectations to be attached and at least 3 phase points
/// per configuration (InsufficientData otherwise).
FringeReport fringe_report(const CountsSummary& summary);

/// Convenience overload: attaches the ideal Mach-Zehnder expectations for
/// `spec`, then analyzes.
FringeReport fringe_report(const CountsSummary& summary, const BeamSplitterSpec& spec);

}  // namespace interfero
