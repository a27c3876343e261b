#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "interfero/analysis.hpp"
#include "test_support.hpp"

using namespace interfero;
using testsupport::kPi;

namespace {

TrialRecord record(std::uint64_t id, Config config, int phase_index, double phase,
                   const char* detector) {
    TrialRecord r;
    r.trial_id = id;
    r.config = config;
    r.phase_index = phase_index;
    r.phase_setting = phase;
    r.detector = detector;
    return r;
}

/// Infinite-N counts for a 17-point grid from the analytic detector-1 curve.
CountsSummary analytic_counts(const BeamSplitterSpec& spec, Config config, double total) {
    CountsSummary summary;
    for (int i = 0; i < 17; ++i) {
        const double phase = 2.0 * kPi * i / 16.0;
        const double p = config == Config::closed ? analytic_closed_d1(spec, phase)
                                                  : analytic_open_d1(spec);
        PhaseBucket bucket;
        bucket.phase = phase;
        bucket.total = total;
        bucket.n_d1 = total * p;
        bucket.n_d2 = total - bucket.n_d1;
        summary.per_config[config][i] = bucket;
    }
    return summary;
}

}  // namespace

TEST_CASE("chi-square survival function matches reference values") {
    // Frozen from an independent statistics package.
    CHECK(stats::chi2_sf(16.0, 16) == doctest::Approx(0.4529608094869946).epsilon(1e-12));
    CHECK(stats::chi2_sf(3.5, 2) == doctest::Approx(0.1737739434504451).epsilon(1e-12));
    CHECK(stats::chi2_sf(40.0, 17) == doctest::Approx(0.0012941985337428965).epsilon(1e-12));
    CHECK(stats::chi2_sf(0.5, 1) == doctest::Approx(0.47950012218695337).epsilon(1e-12));
    CHECK(stats::chi2_sf(100.0, 64) == doctest::Approx(0.0026862828946550184).epsilon(1e-12));
    CHECK(stats::chi2_sf(25.2, 17) == doctest::Approx(0.09032168859553526).epsilon(1e-12));
    CHECK(stats::chi2_sf(8.26, 9) == doctest::Approx(0.5081718433121454).epsilon(1e-12));
    CHECK(stats::chi2_sf(300.0, 100) == doctest::Approx(7.4121008573230175e-22).epsilon(1e-9));
    CHECK(stats::chi2_sf(0.0, 5) == 1.0);
    CHECK_THROWS_AS(stats::chi2_sf(1.0, 0), InvalidArgument);
}

TEST_CASE("sorting a handful of events") {
    std::vector<TrialRecord> records;
    records.push_back(record(0, Config::open, 0, 0.0, "D1"));
    records.push_back(record(1, Config::open, 0, 0.0, "D1"));
    records.push_back(record(2, Config::open, 0, 0.0, "D2"));
    records.push_back(record(3, Config::closed, 0, 0.0, "D1"));

    const CountsSummary summary = sort_events(records);
    CHECK(summary.per_config.at(Config::open).at(0).n_d1 == 2.0);
    CHECK(summary.per_config.at(Config::open).at(0).n_d2 == 1.0);
    CHECK(summary.per_config.at(Config::closed).at(0).n_d1 == 1.0);
    CHECK(summary.per_config.at(Config::closed).at(0).n_d2 == 0.0);
    CHECK(summary.total_records() == 4.0);
}

TEST_CASE("an empty stream folds to an empty summary") {
    const CountsSummary summary = sort_events(std::span<const TrialRecord>{});
    CHECK(summary.per_config.empty());
    CHECK(summary.total_records() == 0.0);
}

TEST_CASE("sorting is permutation invariant") {
    testsupport::Rng rng(1414);
    std::vector<TrialRecord> records;
    for (std::uint64_t id = 0; id < 500; ++id) {
        records.push_back(record(id, rng.next_bit() ? Config::closed : Config::open,
                                 testsupport::uniform_int(rng, 0, 4),
                                 testsupport::uniform(rng, 0.0, 2.0 * kPi),
                                 rng.next_bit() ? "D1" : "D2"));
    }
    const CountsSummary base = sort_events(records);
    std::mt19937 shuffler(99);
    for (int round = 0; round < 5; ++round) {
        std::shuffle(records.begin(), records.end(), shuffler);
        const CountsSummary shuffled = sort_events(records);
        REQUIRE(shuffled.per_config.size() == base.per_config.size());
        for (const auto& [config, buckets] : base.per_config) {
            for (const auto& [index, bucket] : buckets) {
                const PhaseBucket& other = shuffled.per_config.at(config).at(index);
                CHECK(other.n_d1 == bucket.n_d1);
                CHECK(other.n_d2 == bucket.n_d2);
                CHECK(other.total == bucket.total);
            }
        }
    }
}

TEST_CASE("records with unknown detectors are corrupt") {
    std::vector<TrialRecord> records{record(41, Config::open, 0, 0.0, "D7")};
    CHECK_THROWS_WITH_AS(sort_events(records), doctest::Contains("trial 41"), CorruptRecord);
}

TEST_CASE("analytic closed balanced fringes have unit visibility") {
    const CountsSummary summary = analytic_counts(balanced_beam_splitter(), Config::closed, 1e6);
    const FringeReport report = fringe_report(summary, balanced_beam_splitter());
    REQUIRE(report.closed.has_value());
    CHECK(report.closed->visibility == 1.0);
    CHECK(report.closed->analytic_visibility == 1.0);
    CHECK(report.closed->p_value == doctest::Approx(1.0));
    CHECK(report.closed->flatness_p < 1e-6);  // fringes are anything but flat
}

TEST_CASE("analytic open counts are perfectly flat with zero visibility") {
    const CountsSummary summary = analytic_counts(balanced_beam_splitter(), Config::open, 1e6);
    const FringeReport report = fringe_report(summary, balanced_beam_splitter());
    REQUIRE(report.open.has_value());
    CHECK(report.open->visibility == 0.0);
    CHECK(report.open->analytic_visibility == 0.0);
    CHECK(report.open->flatness_p == 1.0);
    CHECK(report.accepted());
}

TEST_CASE("unbalanced analytic visibility follows the closed-form ratio") {
    const BeamSplitterSpec spec = make_beam_splitter(0.6, 0.8, kPi / 2.0, 0.0);
    const CountsSummary summary = analytic_counts(spec, Config::closed, 1e6);
    const FringeReport report = fringe_report(summary, spec);
    REQUIRE(report.closed.has_value());
    CHECK(std::abs(report.closed->visibility - 0.4608 / 0.5392) <= 1e-12);
}

TEST_CASE("insufficient phase coverage is reported") {
    CountsSummary summary = analytic_counts(balanced_beam_splitter(), Config::closed, 1000.0);
    auto& buckets = summary.per_config.at(Config::closed);
    buckets.erase(buckets.find(2), buckets.end());
    CHECK_THROWS_AS(fringe_report(summary, balanced_beam_splitter()), InsufficientData);
}

TEST_CASE("missing analytic attachment is an error") {
    const CountsSummary summary = analytic_counts(balanced_beam_splitter(), Config::closed, 10.0);
    CountsSummary stripped = summary;
    for (auto& [config, buckets] : stripped.per_config) {
        for (auto& [index, bucket] : buckets) {
            bucket.analytic_d1 = std::numeric_limits<double>::quiet_NaN();
        }
    }
    CHECK_THROWS_AS(fringe_report(stripped), InvalidArgument);
}

TEST_CASE("circuit-derived expectations match the closed-form curves") {
    const CircuitDescription desc = parse_circuit(
        testsupport::slurp(std::string(INTERFERO_CIRCUITS_DIR) + "/mzi_closed.circ"));
    CountsSummary summary;
    for (int i = 0; i < 9; ++i) {
        const double phase = 2.0 * kPi * i / 8.0;
        for (const Config config : {Config::open, Config::closed}) {
            PhaseBucket bucket;
            bucket.phase = phase;
            bucket.total = 10.0;
            bucket.n_d1 = 5.0;
            bucket.n_d2 = 5.0;
            summary.per_config[config][i] = bucket;
        }
    }
    attach_analytic(summary, desc);
    for (const auto& [config, buckets] : summary.per_config) {
        for (const auto& [index, bucket] : buckets) {
            const double expected = config == Config::closed
                                        ? analytic_closed_d1(balanced_beam_splitter(), bucket.phase)
                                        : analytic_open_d1(balanced_beam_splitter());
            CHECK(std::abs(bucket.analytic_d1 - expected) <= 1e-12);
        }
    }
}

TEST_CASE("seeded Monte Carlo closed run passes the fringe thresholds") {
    SweepPlan plan;
    plan.phase_steps = 17;
    plan.trials_per_point = 20000;
    plan.policy = Policy::fixed_closed;
    plan.master_seed = 42;
    const CircuitDescription desc = parse_circuit(
        testsupport::slurp(std::string(INTERFERO_CIRCUITS_DIR) + "/mzi_closed.circ"));

    CountsSummary summary;
    run_sweep(desc, plan, TimelineParams{}, [&](const TrialRecord& r) { summary.add(r); });
    attach_analytic(summary, desc);
    const FringeReport report = fringe_report(summary);
    REQUIRE(report.closed.has_value());
    CHECK(report.closed->visibility >= 0.99);
    CHECK(report.closed->p_value > 0.01);
    CHECK(report.accepted());
}
