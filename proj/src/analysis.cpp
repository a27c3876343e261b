#include "interfero/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace interfero {

namespace stats {

namespace {

// Lower-tail series and upper-tail continued fraction for the regularized
// incomplete gamma function (Lentz's algorithm for the latter).
double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int n = 0; n < 500; ++n) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double regularized_gamma_q(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw InvalidArgument("gamma_q requires a > 0 and x >= 0");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

double chi2_sf(double chi2, int dof) {
    if (dof < 1) throw InvalidArgument("chi-square needs at least one degree of freedom");
    if (chi2 <= 0.0) return 1.0;
    return regularized_gamma_q(0.5 * static_cast<double>(dof), 0.5 * chi2);
}

}  // namespace stats

double CountsSummary::total_records() const {
    double total = 0.0;
    for (const auto& [config, buckets] : per_config) {
        for (const auto& [index, bucket] : buckets) total += bucket.total;
    }
    return total;
}

void CountsSummary::add(const TrialRecord& r) {
    PhaseBucket& bucket = per_config[r.config][r.phase_index];
    bucket.phase = r.phase_setting;
    bucket.total += 1.0;
    if (r.detector == detector_names[0]) {
        bucket.n_d1 += 1.0;
    } else if (r.detector == detector_names[1]) {
        bucket.n_d2 += 1.0;
    } else {
        throw CorruptRecord("trial " + std::to_string(r.trial_id) + ": unknown detector '" +
                            r.detector + "'");
    }
}

CountsSummary sort_events(std::span<const TrialRecord> records,
                          const std::array<std::string, 2>& detector_names) {
    CountsSummary summary;
    summary.detector_names = detector_names;
    for (const auto& r : records) summary.add(r);
    return summary;
}

void attach_analytic(CountsSummary& summary, const CircuitDescription& desc) {
    for (auto& [config, buckets] : summary.per_config) {
        for (auto& [index, bucket] : buckets) {
            const ConfiguredPhasePoint point = configure_phase_point(desc, bucket.phase);
            bucket.analytic_d1 = point.detector1_prob(config);
        }
    }
}

double analytic_closed_d1(const BeamSplitterSpec& spec, double phase) {
    const double r2 = spec.r_mag * spec.r_mag;
    const double t2 = spec.t_mag * spec.t_mag;
    return r2 * r2 + t2 * t2 - 2.0 * r2 * t2 * std::cos(phase);
}

double analytic_open_d1(const BeamSplitterSpec& spec) {
    return spec.t_mag * spec.t_mag;
}

void attach_analytic(CountsSummary& summary, const BeamSplitterSpec& spec) {
    for (auto& [config, buckets] : summary.per_config) {
        for (auto& [index, bucket] : buckets) {
            bucket.analytic_d1 = (config == Config::closed) ? analytic_closed_d1(spec, bucket.phase)
                                                            : analytic_open_d1(spec);
        }
    }
}

namespace {

struct CosineFit {
    double offset = 0.0;
    double amplitude = 0.0;
};

// Linear least squares on the basis {1, cos(phase)}; phases are exact knowns.
CosineFit fit_cosine(const std::map<int, PhaseBucket>& buckets, bool analytic) {
    double n = 0.0, sc = 0.0, scc = 0.0, sy = 0.0, scy = 0.0;
    for (const auto& [index, b] : buckets) {
        const double c = std::cos(b.phase);
        const double y = analytic ? b.analytic_d1 : b.freq_d1();
        n += 1.0;
        sc += c;
        scc += c * c;
        sy += y;
        scy += c * y;
    }
    const double det = n * scc - sc * sc;
    if (std::abs(det) < 1e-12 * std::max(1.0, n * scc)) {
        throw InsufficientData("phase grid is degenerate for the fringe fit");
    }
    CosineFit fit;
    fit.offset = (scc * sy - sc * scy) / det;
    fit.amplitude = (n * scy - sc * sy) / det;
    return fit;
}

// (max - min) / (max + min) of offset + amplitude * cos, i.e. |A| / m.
// Amplitudes within 1e-9 (relative) of zero or of the offset snap to the
// exact endpoints so ideal inputs report exactly 0 or 1.
double fit_visibility(const CosineFit& fit) {
    constexpr double snap = 1e-9;
    const double a = std::abs(fit.amplitude);
    const double m = fit.offset;
    if (a <= snap * std::max(std::abs(m), 1.0)) return 0.0;
    if (m <= 0.0) return 1.0;
    const double ratio = a / m;
    if (std::abs(ratio - 1.0) <= snap) return 1.0;
    return std::clamp(ratio, 0.0, 1.0);
}

ConfigFringe analyze_config(const std::map<int, PhaseBucket>& buckets) {
    ConfigFringe out;
    out.points = static_cast<int>(buckets.size());
    if (out.points < 3) {
        throw InsufficientData("fringe analysis needs at least 3 phase points, got " +
                               std::to_string(out.points));
    }
    for (const auto& [index, b] : buckets) {
        if (std::isnan(b.analytic_d1)) {
            throw InvalidArgument("analytic expectations are not attached");
        }
        out.trials += b.total;
    }

    const CosineFit empirical = fit_cosine(buckets, /*analytic=*/false);
    out.fit_offset = empirical.offset;
    out.fit_amplitude = empirical.amplitude;
    out.visibility = fit_visibility(empirical);
    out.analytic_visibility = fit_visibility(fit_cosine(buckets, /*analytic=*/true));

    // Goodness of fit against the analytic model, binomial variances.
    bool exact_mismatch = false;
    for (const auto& [index, b] : buckets) {
        const double expected = b.total * b.analytic_d1;
        const double variance = b.total * b.analytic_d1 * (1.0 - b.analytic_d1);
        if (variance <= 0.0) {
            // Deterministic point: counts must match exactly.
            if (b.n_d1 != expected) exact_mismatch = true;
            continue;
        }
        const double dev = b.n_d1 - expected;
        out.chi2 += dev * dev / variance;
        out.dof += 1;
    }
    if (exact_mismatch) {
        out.chi2 = std::numeric_limits<double>::infinity();
        out.p_value = 0.0;
    } else {
        out.p_value = out.dof > 0 ? stats::chi2_sf(out.chi2, out.dof) : 1.0;
    }

    // Flatness against the pooled frequency.
    double pooled_hits = 0.0, pooled_total = 0.0;
    for (const auto& [index, b] : buckets) {
        pooled_hits += b.n_d1;
        pooled_total += b.total;
    }
    const double pooled = pooled_total > 0.0 ? pooled_hits / pooled_total : 0.0;
    out.flatness_dof = out.points - 1;
    if (pooled <= 0.0 || pooled >= 1.0) {
        out.flatness_p = 1.0;  // all hits on one detector: perfectly flat
    } else {
        for (const auto& [index, b] : buckets) {
            const double dev = b.n_d1 - b.total * pooled;
            out.flatness_chi2 += dev * dev / (b.total * pooled * (1.0 - pooled));
        }
        out.flatness_p = stats::chi2_sf(out.flatness_chi2, out.flatness_dof);
    }
    return out;
}

bool config_accepted(const ConfigFringe& fringe, bool require_flat) {
    if (std::abs(fringe.visibility - fringe.analytic_visibility) > kVisibilityTol) return false;
    if (!(fringe.p_value > kMinPValue)) return false;
    if (require_flat && !(fringe.flatness_p > kMinPValue)) return false;
    return true;
}

}  // namespace

bool FringeReport::accepted() const {
    if (!closed && !open) return false;
    if (closed && !config_accepted(*closed, /*require_flat=*/false)) return false;
    if (open && !config_accepted(*open, /*require_flat=*/true)) return false;
    return true;
}

FringeReport fringe_report(const CountsSummary& summary) {
    FringeReport report;
    if (auto it = summary.per_config.find(Config::closed); it != summary.per_config.end()) {
        report.closed = analyze_config(it->second);
    }
    if (auto it = summary.per_config.find(Config::open); it != summary.per_config.end()) {
        report.open = analyze_config(it->second);
    }
    return report;
}

FringeReport fringe_report(const CountsSummary& summary, const BeamSplitterSpec& spec) {
    CountsSummary with_model = summary;
    attach_analytic(with_model, spec);
    return fringe_report(with_model);
}

}  // namespace interfero
