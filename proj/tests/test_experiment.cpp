#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "interfero/experiment.hpp"
#include "test_support.hpp"

using namespace interfero;
using testsupport::kPi;

namespace {

// The protocol circuit: one removable output splitter, one swept phase.
CircuitDescription golden_closed() {
    return parse_circuit(testsupport::slurp(std::string(INTERFERO_CIRCUITS_DIR) +
                                            "/mzi_closed.circ"),
                         "mzi_closed.circ");
}

}  // namespace

TEST_CASE("spacelike check with the protocol defaults") {
    const SpacelikeReport report = spacelike_check(TimelineParams{});
    CHECK(report.spacelike);
    CHECK(report.choice_complete_ps == 120000);
    CHECK(report.choice_complete_ns() == 120.0);
    CHECK(report.margin_m == doctest::Approx(12.02490504).epsilon(1e-12));
    CHECK(report.choice_in_flight);  // 120 ns < 160 ns flight
}

TEST_CASE("late electronics are flagged as not in flight") {
    TimelineParams params;
    params.electronic_delay_ns = 200.0;
    const SpacelikeReport report = spacelike_check(params);
    CHECK_FALSE(report.choice_in_flight);  // 240 ns >= 160 ns
}

TEST_CASE("zero separation is time-like") {
    TimelineParams params;
    params.interferometer_length_m = 0.0;
    params.time_of_flight_ns = 0.0;
    const SpacelikeReport report = spacelike_check(params);
    CHECK_FALSE(report.spacelike);
    CHECK(report.margin_m < 0.0);
}

TEST_CASE("spacelike is monotone in the interferometer length") {
    TimelineParams params;
    bool seen_true = false;
    for (double length = 0.0; length <= 100.0; length += 2.5) {
        params.interferometer_length_m = length;
        params.time_of_flight_ns = std::max(160.0, length / 0.25);
        if (spacelike_check(params).spacelike) {
            seen_true = true;
        } else {
            CHECK_FALSE(seen_true);  // never flips back
        }
    }
    CHECK(seen_true);
}

TEST_CASE("timeline validation") {
    TimelineParams faster_than_light;
    faster_than_light.time_of_flight_ns = 10.0;
    CHECK_THROWS_AS(faster_than_light.validate(), ConfigError);

    TimelineParams negative;
    negative.switch_duration_ns = -1.0;
    CHECK_THROWS_AS(negative.validate(), ConfigError);

    CHECK_NOTHROW(TimelineParams{}.validate());  // 48 m over 160 ns sits in the 1% slack
}

TEST_CASE("nanosecond inputs are held as rounded picoseconds") {
    CHECK(ns_to_ps(80.0) == 80000);
    CHECK(ns_to_ps(0.0004) == 0);
    CHECK(ns_to_ps(0.0006) == 1);
    CHECK(ns_to_ps(-1.25) == -1250);
}

TEST_CASE("trial seeds derive deterministically and spread") {
    CHECK(derive_trial_seed(42, 0) == derive_trial_seed(42, 0));
    CHECK(derive_trial_seed(42, 0) != derive_trial_seed(42, 1));
    CHECK(derive_trial_seed(42, 7) != derive_trial_seed(43, 7));
}

TEST_CASE("plan validation and grid") {
    SweepPlan plan;
    plan.phase_steps = 0;
    CHECK_THROWS_AS(plan.validate(), ConfigError);
    plan.phase_steps = 17;
    plan.trials_per_point = 0;
    CHECK_THROWS_AS(plan.validate(), ConfigError);

    SweepPlan grid;
    grid.phase_start = 0.0;
    grid.phase_stop = 2.0 * kPi;
    grid.phase_steps = 17;
    CHECK(grid.phase_at(0) == 0.0);
    CHECK(grid.phase_at(16) == 2.0 * kPi);
    CHECK(grid.phase_at(8) == doctest::Approx(kPi));
    SweepPlan single;
    single.phase_steps = 1;
    single.phase_start = 0.7;
    CHECK(single.phase_at(0) == 0.7);
}

TEST_CASE("configure_phase_point rejects unsuitable circuits") {
    CHECK_THROWS_AS(configure_phase_point(
                        parse_circuit("modes b v; bs B balanced b v -> e f;"
                                      " detect D1 e; detect D2 f;"),
                        0.0),
                    ConfigError);  // no removable element
    CHECK_THROWS_AS(configure_phase_point(
                        parse_circuit("modes b v; bs B balanced b v -> e f removable;"
                                      " detect D1 e;"),
                        0.0),
                    ConfigError);  // one detector
}

TEST_CASE("closed balanced at zero phase always hits the second detector") {
    const CircuitDescription desc = golden_closed();
    const ConfiguredPhasePoint point = configure_phase_point(desc, 0.0);
    const SpacelikeReport spacelike = spacelike_check(TimelineParams{});
    for (std::uint64_t id = 0; id < 200; ++id) {
        const TrialRecord r =
            run_trial(point, 0, Policy::fixed_closed, 987654321u + id, id, spacelike);
        CHECK(r.detector == "D2");
        CHECK(r.config == Config::closed);
    }
}

TEST_CASE("trials are reproducible from the master seed and id") {
    const ConfiguredPhasePoint point = configure_phase_point(golden_closed(), 1.234);
    const SpacelikeReport spacelike = spacelike_check(TimelineParams{});
    const TrialRecord a = run_trial(point, 3, Policy::qrng_random, 42, 1000, spacelike);
    const TrialRecord b = run_trial(point, 3, Policy::qrng_random, 42, 1000, spacelike);
    CHECK(a.detector == b.detector);
    CHECK(a.config == b.config);
    CHECK(a.rng_seed == b.rng_seed);
    CHECK(a.phase_setting == 1.234);
    CHECK(a.spacelike);
    CHECK(a.choice_complete_ps == 120000);
}

TEST_CASE("open configuration frequencies sit near one half") {
    const ConfiguredPhasePoint point = configure_phase_point(golden_closed(), 0.9);
    const SpacelikeReport spacelike = spacelike_check(TimelineParams{});
    const std::int64_t n = 100000;
    std::int64_t d1 = 0;
    for (std::int64_t id = 0; id < n; ++id) {
        const TrialRecord r = run_trial(point, 0, Policy::fixed_open, 42,
                                        static_cast<std::uint64_t>(id), spacelike);
        if (r.detector == "D1") ++d1;
    }
    const double freq = static_cast<double>(d1) / static_cast<double>(n);
    const double sigma = std::sqrt(0.25 / static_cast<double>(n));
    CHECK(std::abs(freq - 0.5) <= 3.0 * sigma);
}

TEST_CASE("the QRNG bit is fair") {
    const ConfiguredPhasePoint point = configure_phase_point(golden_closed(), 0.4);
    const SpacelikeReport spacelike = spacelike_check(TimelineParams{});
    const std::int64_t n = 10000;
    std::int64_t closed = 0;
    for (std::int64_t id = 0; id < n; ++id) {
        const TrialRecord r = run_trial(point, 0, Policy::qrng_random, 4242,
                                        static_cast<std::uint64_t>(id), spacelike);
        if (r.config == Config::closed) ++closed;
    }
    const double freq = static_cast<double>(closed) / static_cast<double>(n);
    CHECK(std::abs(freq - 0.5) <= 3.0 * std::sqrt(0.25 / static_cast<double>(n)));
}

TEST_CASE("a one-step one-trial sweep emits exactly one record") {
    std::vector<TrialRecord> records;
    SweepPlan plan;
    plan.phase_steps = 1;
    plan.trials_per_point = 1;
    run_sweep(golden_closed(), plan, TimelineParams{},
              [&](const TrialRecord& r) { records.push_back(r); });
    REQUIRE(records.size() == 1);
    CHECK(records[0].trial_id == 0);
}

TEST_CASE("sweep streams are deterministic and order-independent") {
    SweepPlan plan;
    plan.phase_steps = 5;
    plan.trials_per_point = 400;
    plan.policy = Policy::qrng_random;
    plan.master_seed = 777;
    const CircuitDescription desc = golden_closed();

    std::vector<TrialRecord> first, second;
    run_sweep(desc, plan, TimelineParams{}, [&](const TrialRecord& r) { first.push_back(r); });
    run_sweep(desc, plan, TimelineParams{}, [&](const TrialRecord& r) { second.push_back(r); });
    REQUIRE(first.size() == second.size());
    REQUIRE(first.size() == 2000);
    for (std::size_t i = 0; i < first.size(); ++i) {
        CHECK(first[i].trial_id == second[i].trial_id);
        CHECK(first[i].detector == second[i].detector);
        CHECK(first[i].config == second[i].config);
        CHECK(first[i].rng_seed == second[i].rng_seed);
    }
    // Records are stream-position independent: recompute a scattering of
    // trials directly and compare.
    const SpacelikeReport spacelike = spacelike_check(TimelineParams{});
    for (const std::size_t probe : std::vector<std::size_t>{0, 1, 399, 400, 1234, 1999}) {
        const TrialRecord& r = first[probe];
        const ConfiguredPhasePoint point = configure_phase_point(desc, r.phase_setting);
        const TrialRecord redo = run_trial(point, r.phase_index, plan.policy, plan.master_seed,
                                           r.trial_id, spacelike);
        CHECK(redo.detector == r.detector);
        CHECK(redo.config == r.config);
        CHECK(redo.rng_seed == r.rng_seed);
    }
}

TEST_CASE("aggregated frequencies track the analytic probabilities within 4 sigma") {
    SweepPlan plan;
    plan.phase_steps = 5;
    plan.trials_per_point = 20000;
    plan.policy = Policy::qrng_random;
    plan.master_seed = 12321;
    const CircuitDescription desc = golden_closed();

    struct Cell {
        std::int64_t d1 = 0;
        std::int64_t total = 0;
    };
    std::map<std::pair<Config, int>, Cell> cells;
    run_sweep(desc, plan, TimelineParams{}, [&](const TrialRecord& r) {
        Cell& cell = cells[{r.config, r.phase_index}];
        cell.total += 1;
        if (r.detector == "D1") cell.d1 += 1;
    });
    for (const auto& [key, cell] : cells) {
        const ConfiguredPhasePoint point = configure_phase_point(desc, plan.phase_at(key.second));
        const double p = point.detector1_prob(key.first);
        const double freq = static_cast<double>(cell.d1) / static_cast<double>(cell.total);
        const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(cell.total));
        CHECK(std::abs(freq - p) <= 4.0 * sigma);
    }
}

TEST_CASE("every photon lands on exactly one detector") {
    SweepPlan plan;
    plan.phase_steps = 3;
    plan.trials_per_point = 1000;
    plan.policy = Policy::qrng_random;
    std::map<int, std::int64_t> per_point;
    run_sweep(golden_closed(), plan, TimelineParams{},
              [&](const TrialRecord& r) { per_point[r.phase_index] += 1; });
    for (const auto& [index, count] : per_point) CHECK(count == 1000);
}
