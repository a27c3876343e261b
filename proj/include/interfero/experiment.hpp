#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <numbers>
#include <string>

#include "interfero/circuit.hpp"

namespace interfero {

enum class Config { open, closed };
enum class Policy { fixed_open, fixed_closed, qrng_random };

const char* to_string(Config c);
const char* to_string(Policy p);
Policy policy_from_string(const std::string& s);  // "fixed-open" | "fixed-closed" | "random"

/// Geometry and timing of one protocol run. Times are accepted in ns and held
/// internally as integer picoseconds (round-to-nearest) so comparisons are
/// exact. The length and time of flight are independent: the quoted flight
/// time may include slower-than-vacuum propagation, so consistency is only
/// enforced up to a 1% slack on the implied speed.
struct TimelineParams {
    double interferometer_length_m = 48.0;
    double time_of_flight_ns = 160.0;
    double electronic_delay_ns = 80.0;
    double switch_duration_ns = 40.0;
    double speed_of_light_m_per_ns = 0.299792458;

    void validate() const;

    std::int64_t time_of_flight_ps() const;
    std::int64_t electronic_delay_ps() const;
    std::int64_t switch_duration_ps() const;
};

std::int64_t ns_to_ps(double ns);

/// Causal relation between the configuration choice and the photon's entry.
struct SpacelikeReport {
    bool spacelike = false;       // length exceeds c * choice-completion time
    double margin_m = 0.0;        // length - c * t_choice
    std::int64_t choice_complete_ps = 0;
    bool choice_in_flight = false;  // choice completes before the photon exits

    double choice_complete_ns() const { return static_cast<double>(choice_complete_ps) / 1000.0; }
};

/// The choice completes after the electronic delay plus the switch duration.
/// It is space-like separated from the photon's entry when the interferometer
/// length exceeds the vacuum-light distance covered in that time (the
/// strictest reading: straight-line length against vacuum c).
SpacelikeReport spacelike_check(const TimelineParams& params);

/// One logged photon.
struct TrialRecord {
    std::uint64_t trial_id = 0;
    Config config = Config::closed;
    int phase_index = 0;
    double phase_setting = 0.0;
    std::string detector;
    std::int64_t choice_complete_ps = 0;
    bool spacelike = false;
    std::uint64_t rng_seed = 0;

    double choice_complete_ns() const { return static_cast<double>(choice_complete_ps) / 1000.0; }
};

/// Phase grid and trial budget for a sweep.
struct SweepPlan {
    double phase_start = 0.0;
    double phase_stop = 2.0 * std::numbers::pi;
    int phase_steps = 17;
    std::int64_t trials_per_point = 100000;
    Policy policy = Policy::qrng_random;
    std::uint64_t master_seed = 42;

    void validate() const;
    /// Inclusive endpoints; a single step sits at phase_start.
    double phase_at(int index) const;
};

/// SplitMix64 stream (Steele, Lea & Flood). Used both as the per-trial
/// generator and, via derive_trial_seed, as the splitting scheme that makes
/// trials order-independent.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        state += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform in (0, 1], 53-bit resolution. The open lower end keeps
    /// zero-probability outcomes at exactly zero frequency.
    double next_unit() { return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; }

    int next_bit() { return static_cast<int>(next() >> 63); }
};

/// Jumps the master SplitMix64 stream to the trial's slot and mixes once:
/// trials draw from disjoint, order-independent streams.
std::uint64_t derive_trial_seed(std::uint64_t master_seed, std::uint64_t trial_id);

/// Both configurations of a circuit elaborated at one phase value, with the
/// detector-1 probability for the photon entering the first declared mode.
/// Requires exactly one removable element (the output splitter), at most one
/// named parameter (the swept phase), and exactly two detectors.
struct ConfiguredPhasePoint {
    double phase = 0.0;
    TransferMatrix closed;
    TransferMatrix open;
    std::array<std::string, 2> detector_names;
    double p_d1_closed = 0.0;
    double p_d1_open = 0.0;

    double detector1_prob(Config c) const {
        return c == Config::closed ? p_d1_closed : p_d1_open;
    }
};

ConfiguredPhasePoint configure_phase_point(const CircuitDescription& desc, double phase);

/// One photon: the configuration bit is drawn (and used under the random
/// policy), then the detector is sampled from the chosen configuration's
/// detection probabilities. Fully reproducible from (master_seed, trial_id).
TrialRecord run_trial(const ConfiguredPhasePoint& point, int phase_index, Policy policy,
                      std::uint64_t master_seed, std::uint64_t trial_id,
                      const SpacelikeReport& spacelike);

using RecordSink = std::function<void(const TrialRecord&)>;

/// Runs the full plan, emitting records in trial_id order
/// (trial_id = phase_index * trials_per_point + k). Trials are independent
/// given their derived seeds, so any execution order reproduces this stream.
void run_sweep(const CircuitDescription& desc, const SweepPlan& plan,
               const TimelineParams& timeline, const RecordSink& sink);

}  // namespace interfero
