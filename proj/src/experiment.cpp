#include "interfero/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace interfero {

const char* to_string(Config c) {
    return c == Config::open ? "open" : "closed";
}

const char* to_string(Policy p) {
    switch (p) {
        case Policy::fixed_open: return "fixed-open";
        case Policy::fixed_closed: return "fixed-closed";
        default: return "random";
    }
}

Policy policy_from_string(const std::string& s) {
    if (s == "fixed-open") return Policy::fixed_open;
    if (s == "fixed-closed") return Policy::fixed_closed;
    if (s == "random") return Policy::qrng_random;
    throw ConfigError("unknown policy '" + s + "' (fixed-open|fixed-closed|random)");
}

std::int64_t ns_to_ps(double ns) {
    return std::llround(ns * 1000.0);
}

std::int64_t TimelineParams::time_of_flight_ps() const { return ns_to_ps(time_of_flight_ns); }
std::int64_t TimelineParams::electronic_delay_ps() const { return ns_to_ps(electronic_delay_ns); }
std::int64_t TimelineParams::switch_duration_ps() const { return ns_to_ps(switch_duration_ns); }

void TimelineParams::validate() const {
    if (interferometer_length_m < 0.0) throw ConfigError("interferometer length must be >= 0");
    if (time_of_flight_ns < 0.0 || electronic_delay_ns < 0.0 || switch_duration_ns < 0.0) {
        throw ConfigError("durations must be >= 0");
    }
    if (speed_of_light_m_per_ns <= 0.0) throw ConfigError("speed of light must be positive");
    if (time_of_flight_ns > 0.0) {
        // Quoted flight times are typically rounded; allow 1% over the vacuum
        // speed before calling the pair inconsistent.
        const double implied = interferometer_length_m / time_of_flight_ns;
        if (implied > speed_of_light_m_per_ns * 1.01) {
            std::ostringstream os;
            os << "length " << interferometer_length_m << " m over " << time_of_flight_ns
               << " ns implies " << implied << " m/ns, faster than light";
            throw ConfigError(os.str());
        }
    } else if (interferometer_length_m > 0.0) {
        throw ConfigError("nonzero length with zero time of flight");
    }
}

SpacelikeReport spacelike_check(const TimelineParams& params) {
    params.validate();
    SpacelikeReport report;
    report.choice_complete_ps = params.electronic_delay_ps() + params.switch_duration_ps();
    const double light_distance_m =
        params.speed_of_light_m_per_ns * report.choice_complete_ns();
    report.margin_m = params.interferometer_length_m - light_distance_m;
    report.spacelike = params.interferometer_length_m > light_distance_m;
    report.choice_in_flight = report.choice_complete_ps < params.time_of_flight_ps();
    return report;
}

void SweepPlan::validate() const {
    if (phase_steps < 1) throw ConfigError("phase steps must be >= 1");
    if (trials_per_point < 1) throw ConfigError("trials must be >= 1");
    if (!std::isfinite(phase_start) || !std::isfinite(phase_stop)) {
        throw ConfigError("phase grid endpoints must be finite");
    }
}

double SweepPlan::phase_at(int index) const {
    if (phase_steps == 1) return phase_start;
    return phase_start +
           (phase_stop - phase_start) * static_cast<double>(index) /
               static_cast<double>(phase_steps - 1);
}

std::uint64_t derive_trial_seed(std::uint64_t master_seed, std::uint64_t trial_id) {
    std::uint64_t z = master_seed + (trial_id + 1) * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

ConfiguredPhasePoint configure_phase_point(const CircuitDescription& desc, double phase) {
    const auto removables = desc.removable_names();
    if (removables.size() != 1) {
        throw ConfigError("the protocol needs exactly one removable output splitter; circuit has " +
                          std::to_string(removables.size()));
    }
    if (desc.parameters.size() > 1) {
        throw ConfigError("the sweep binds at most one phase parameter; circuit declares " +
                          std::to_string(desc.parameters.size()));
    }
    if (desc.detectors.size() != 2) {
        throw ConfigError("the protocol needs exactly two detectors; circuit binds " +
                          std::to_string(desc.detectors.size()));
    }

    ElaborationConfig closed_cfg;
    closed_cfg.removable_on[removables[0]] = true;
    if (!desc.parameters.empty()) closed_cfg.parameters[desc.parameters[0]] = phase;
    ElaborationConfig open_cfg = closed_cfg;
    open_cfg.removable_on[removables[0]] = false;

    TransferMatrix closed = elaborate(desc, closed_cfg);
    TransferMatrix open = elaborate(desc, open_cfg);

    auto d1_prob = [&](const TransferMatrix& m) {
        // Photon enters the first declared mode. |entry|^2 can stray an ulp
        // past the unit interval; probabilities may not.
        const Eigen::Index row = m.output_index(desc.detectors[0].mode);
        return std::clamp(std::norm(m.entries()(row, 0)), 0.0, 1.0);
    };
    ConfiguredPhasePoint point{phase,
                               std::move(closed),
                               std::move(open),
                               {desc.detectors[0].detector, desc.detectors[1].detector},
                               0.0,
                               0.0};
    point.p_d1_closed = d1_prob(point.closed);
    point.p_d1_open = d1_prob(point.open);
    return point;
}

TrialRecord run_trial(const ConfiguredPhasePoint& point, int phase_index, Policy policy,
                      std::uint64_t master_seed, std::uint64_t trial_id,
                      const SpacelikeReport& spacelike) {
    const std::uint64_t seed = derive_trial_seed(master_seed, trial_id);
    SplitMix64 rng(seed);
    // The QRNG bit is always drawn so the detector draw sits at a fixed
    // stream position whatever the policy; 1 selects the closed configuration.
    const int bit = rng.next_bit();
    Config config = Config::closed;
    switch (policy) {
        case Policy::fixed_open: config = Config::open; break;
        case Policy::fixed_closed: config = Config::closed; break;
        case Policy::qrng_random: config = bit ? Config::closed : Config::open; break;
    }
    const double p_d1 = point.detector1_prob(config);
    const double u = rng.next_unit();
    TrialRecord record;
    record.trial_id = trial_id;
    record.config = config;
    record.phase_index = phase_index;
    record.phase_setting = point.phase;
    record.detector = (u <= p_d1) ? point.detector_names[0] : point.detector_names[1];
    record.choice_complete_ps = spacelike.choice_complete_ps;
    record.spacelike = spacelike.spacelike;
    record.rng_seed = seed;
    return record;
}

void run_sweep(const CircuitDescription& desc, const SweepPlan& plan,
               const TimelineParams& timeline, const RecordSink& sink) {
    plan.validate();
    const SpacelikeReport spacelike = spacelike_check(timeline);
    for (int pi = 0; pi < plan.phase_steps; ++pi) {
        const ConfiguredPhasePoint point = configure_phase_point(desc, plan.phase_at(pi));
        for (std::int64_t k = 0; k < plan.trials_per_point; ++k) {
            const std::uint64_t trial_id =
                static_cast<std::uint64_t>(pi) * static_cast<std::uint64_t>(plan.trials_per_point) +
                static_cast<std::uint64_t>(k);
            sink(run_trial(point, pi, plan.policy, plan.master_seed, trial_id, spacelike));
        }
    }
}

}  // namespace interfero
