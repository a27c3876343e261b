#include <doctest.h>

#include <cmath>

#include "interfero/mode_algebra.hpp"
#include "test_support.hpp"

using namespace interfero;
using testsupport::kPi;

namespace {
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
}

TEST_CASE("beam splitter validation") {
    CHECK_NOTHROW(make_beam_splitter(kInvSqrt2, kInvSqrt2, kPi / 2.0, 0.0));
    CHECK_NOTHROW(make_beam_splitter(1.0, 0.0, 0.0, 0.0));  // cross term vanishes
    CHECK_THROWS_AS(make_beam_splitter(0.8, 0.8, kPi / 2.0, 0.0), LosslessViolation);
    CHECK_THROWS_AS(make_beam_splitter(1.2, 0.0, 0.0, 0.0), LosslessViolation);
    CHECK_THROWS_AS(make_beam_splitter(-0.6, 0.8, kPi / 2.0, 0.0), LosslessViolation);
    // both magnitudes nonzero but phases not a quarter turn apart
    CHECK_THROWS_AS(make_beam_splitter(kInvSqrt2, kInvSqrt2, 0.0, 0.0), LosslessViolation);
    // the other quarter-turn branch is fine
    CHECK_NOTHROW(make_beam_splitter(0.6, 0.8, -kPi / 2.0, 0.0));
    CHECK_NOTHROW(make_beam_splitter(0.6, 0.8, 3.0 * kPi / 2.0, 0.0));
}

TEST_CASE("balanced transfer matrix entries") {
    const TransferMatrix m = bs_transfer(balanced_beam_splitter());
    CHECK(std::abs(m.entries()(0, 0) - Complex(0.0, kInvSqrt2)) < 1e-12);
    CHECK(std::abs(m.entries()(0, 1) - Complex(kInvSqrt2, 0.0)) < 1e-12);
    CHECK(std::abs(m.entries()(1, 0) - Complex(kInvSqrt2, 0.0)) < 1e-12);
    CHECK(std::abs(m.entries()(1, 1) - Complex(0.0, kInvSqrt2)) < 1e-12);
    CHECK(m.input_modes() == std::vector<std::string>{"b", "v"});
    CHECK(m.output_modes() == std::vector<std::string>{"s", "f"});
}

TEST_CASE("fully reflecting splitter decouples the modes") {
    const TransferMatrix m = bs_transfer(make_beam_splitter(1.0, 0.0, 0.0, 0.0));
    CHECK(std::abs(m.entries()(0, 0) - Complex(1.0, 0.0)) < 1e-12);
    CHECK(std::abs(m.entries()(0, 1)) < 1e-12);
    CHECK(std::abs(m.entries()(1, 0)) < 1e-12);
    CHECK(std::abs(m.entries()(1, 1) - Complex(1.0, 0.0)) < 1e-12);
}

TEST_CASE("every valid spec yields a unitary transfer") {
    testsupport::Rng rng(101);
    for (int i = 0; i < 100; ++i) {
        const TransferMatrix m = bs_transfer(testsupport::random_spec(rng));
        CHECK(m.unitarity_residual() <= 1e-12);
    }
}

TEST_CASE("phase transfer matrices") {
    const TransferMatrix id = phase_transfer(PhasePair{0.0, 0.0});
    CHECK(testsupport::max_abs_diff(id.entries(), Eigen::MatrixXcd::Identity(2, 2)) < 1e-12);

    const TransferMatrix pi_phase = phase_transfer(PhasePair{kPi, 0.0});
    CHECK(std::abs(pi_phase.entries()(0, 0) - Complex(-1.0, 0.0)) < 1e-12);
    CHECK(std::abs(pi_phase.entries()(1, 1) - Complex(1.0, 0.0)) < 1e-12);

    const TransferMatrix quarter = phase_transfer(PhasePair{kPi / 2.0, 0.0});
    CHECK(std::abs(quarter.entries()(0, 0) - Complex(0.0, 1.0)) < 1e-12);
    CHECK(std::abs(quarter.entries()(0, 1)) == 0.0);
}

TEST_CASE("compose obeys the identity law and label contract") {
    testsupport::Rng rng(202);
    const Eigen::MatrixXcd u = testsupport::random_unitary(rng, 3);
    const auto modes_in = testsupport::generic_modes(3);
    const std::vector<std::string> modes_out{"x", "y", "z"};
    const TransferMatrix m(u, modes_in, modes_out);

    const TransferMatrix left = compose(m, TransferMatrix::identity(modes_in));
    CHECK(testsupport::max_abs_diff(left.entries(), u) == 0.0);
    const TransferMatrix right = compose(TransferMatrix::identity(modes_out), m);
    CHECK(testsupport::max_abs_diff(right.entries(), u) == 0.0);

    CHECK_THROWS_AS(compose(m, m), ModeMismatch);  // outputs (x,y,z) vs inputs (m0,m1,m2)
}

TEST_CASE("squared balanced splitter swaps modes up to a global phase i") {
    const TransferMatrix first = bs_transfer(balanced_beam_splitter(), {"b", "v"}, {"s", "f"});
    const TransferMatrix second = bs_transfer(balanced_beam_splitter(), {"s", "f"}, {"p", "q"});
    const TransferMatrix squared = compose(second, first);
    Eigen::MatrixXcd expected(2, 2);
    expected << Complex(0, 0), Complex(0, 1), Complex(0, 1), Complex(0, 0);
    CHECK(testsupport::max_abs_diff(squared.entries(), expected) < 1e-12);
}

TEST_CASE("compose is associative") {
    testsupport::Rng rng(303);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = testsupport::uniform_int(rng, 2, 4);
        const auto a = testsupport::generic_modes(n);
        std::vector<std::string> b, c, d;
        for (int i = 0; i < n; ++i) {
            b.push_back("b" + std::to_string(i));
            c.push_back("c" + std::to_string(i));
            d.push_back("d" + std::to_string(i));
        }
        const TransferMatrix m1(testsupport::random_unitary(rng, n), a, b);
        const TransferMatrix m2(testsupport::random_unitary(rng, n), b, c);
        const TransferMatrix m3(testsupport::random_unitary(rng, n), c, d);
        const TransferMatrix left = compose(m3, compose(m2, m1));
        const TransferMatrix right = compose(compose(m3, m2), m1);
        CHECK(testsupport::max_abs_diff(left.entries(), right.entries()) <= 1e-12);
        CHECK(left.unitarity_residual() <= 1e-12);
    }
}

TEST_CASE("closed coefficients at the balanced quarter-turn point") {
    const MziCoefficients c =
        mzi_closed_coeffs(balanced_beam_splitter(), PhasePair{kPi / 2.0, 0.0});
    CHECK(std::abs(c.r_mz - Complex(0.5, -0.5)) < 1e-12);
    CHECK(std::abs(c.t_mz - Complex(-0.5, 0.5)) < 1e-12);
    CHECK(std::abs(std::norm(c.r_mz) - 0.5) < 1e-12);
    CHECK(std::abs(std::norm(c.t_mz) - 0.5) < 1e-12);
}

TEST_CASE("equal arm phases send every photon across") {
    testsupport::Rng rng(404);
    for (int i = 0; i < 10; ++i) {
        const double common = testsupport::uniform(rng, -kPi, kPi);
        const MziCoefficients c =
            mzi_closed_coeffs(balanced_beam_splitter(), PhasePair{common, common});
        CHECK(std::norm(c.r_mz) < 1e-12);
        CHECK(std::abs(std::norm(c.t_mz) - 1.0) < 1e-12);
    }
}

TEST_CASE("unbalanced closed statistics match the composed-matrix oracle") {
    const BeamSplitterSpec spec = make_beam_splitter(0.6, 0.8, kPi / 2.0, 0.0);
    const PhasePair phases{0.0, 0.0};
    const MziCoefficients c = mzi_closed_coeffs(spec, phases);
    CHECK(std::abs(std::norm(c.r_mz) - 0.0784) < 1e-12);
    CHECK(std::abs(std::norm(c.t_mz) - 0.9216) < 1e-12);

    // Independent route: explicit matrix product splitter * phases * splitter.
    const TransferMatrix oracle =
        compose(bs_transfer(spec, {"e", "f"}, {"c1", "c2"}),
                compose(phase_transfer(phases), bs_transfer(spec, {"b", "v"}, {"e", "f"})));
    CHECK(std::abs(std::norm(oracle.entries()(0, 0)) - 0.0784) < 1e-12);
    CHECK(std::abs(std::norm(oracle.entries()(0, 1)) - 0.9216) < 1e-12);
    CHECK(std::abs(c.r_mz - oracle.entries()(0, 0)) < 1e-12);
    CHECK(std::abs(c.t_mz - oracle.entries()(0, 1)) < 1e-12);
    CHECK(std::abs(c.r_mz_prime - oracle.entries()(1, 1)) < 1e-12);
}

TEST_CASE("closed moduli follow the interference formulas on a phase grid") {
    testsupport::Rng rng(505);
    for (int s = 0; s < 20; ++s) {
        const BeamSplitterSpec spec = testsupport::random_spec(rng);
        const double r2 = spec.r_mag * spec.r_mag;
        const double t2 = spec.t_mag * spec.t_mag;
        for (int k = 0; k < 64; ++k) {
            const double phi = -2.0 * kPi + 4.0 * kPi * k / 63.0;
            const double phi_f = testsupport::uniform(rng, -kPi, kPi);
            const MziCoefficients c = mzi_closed_coeffs(spec, PhasePair{phi_f + phi, phi_f});
            const double expected_r = r2 * r2 + t2 * t2 - 2.0 * r2 * t2 * std::cos(phi);
            const double expected_t = 2.0 * r2 * t2 * (1.0 + std::cos(phi));
            CHECK(std::abs(std::norm(c.r_mz) - expected_r) <= 1e-12);
            CHECK(std::abs(std::norm(c.t_mz) - expected_t) <= 1e-12);
            CHECK(std::abs(std::norm(c.r_mz) + std::norm(c.t_mz) - 1.0) <= 1e-12);
            CHECK(std::abs(std::norm(c.r_mz_prime) + std::norm(c.t_mz) - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("a common arm phase drops out of the closed statistics") {
    testsupport::Rng rng(606);
    for (int i = 0; i < 30; ++i) {
        const BeamSplitterSpec spec = testsupport::random_spec(rng);
        const double phi_e = testsupport::uniform(rng, -kPi, kPi);
        const double phi_f = testsupport::uniform(rng, -kPi, kPi);
        const double alpha = testsupport::uniform(rng, -2.0 * kPi, 2.0 * kPi);
        const OpticalState in = OpticalState::basis_state({"b", "v"}, 0);
        const Eigen::VectorXd base =
            detection_probs(apply(mzi_closed_transfer(spec, {phi_e, phi_f}), in));
        const Eigen::VectorXd shifted =
            detection_probs(apply(mzi_closed_transfer(spec, {phi_e + alpha, phi_f + alpha}), in));
        CHECK((base - shifted).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("open transfer ignores the phase shifters") {
    const OpticalState in = OpticalState::basis_state({"b", "v"}, 0);

    const Eigen::VectorXd balanced = detection_probs(apply(mzi_open_transfer(balanced_beam_splitter()), in));
    CHECK(std::abs(balanced(0) - 0.5) < 1e-12);
    CHECK(std::abs(balanced(1) - 0.5) < 1e-12);

    const Eigen::VectorXd unbalanced =
        detection_probs(apply(mzi_open_transfer(make_beam_splitter(0.6, 0.8, kPi / 2.0, 0.0)), in));
    CHECK(std::abs(unbalanced(0) - 0.64) < 1e-12);
    CHECK(std::abs(unbalanced(1) - 0.36) < 1e-12);

    const Eigen::VectorXd mirror =
        detection_probs(apply(mzi_open_transfer(make_beam_splitter(1.0, 0.0, 0.0, 0.0)), in));
    CHECK(mirror(0) == 0.0);
    CHECK(mirror(1) == 1.0);
}

TEST_CASE("apply moves amplitudes and preserves the norm") {
    const OpticalState in = OpticalState::basis_state({"b", "v"}, 0);
    const OpticalState same = apply(TransferMatrix::identity({"b", "v"}), in);
    CHECK(same.amplitudes() == in.amplitudes());

    const OpticalState split = apply(bs_transfer(balanced_beam_splitter()), in);
    CHECK(std::abs(split.amplitudes()(0) - Complex(0.0, kInvSqrt2)) < 1e-12);
    CHECK(std::abs(split.amplitudes()(1) - Complex(kInvSqrt2, 0.0)) < 1e-12);

    Eigen::VectorXcd even(2);
    even << Complex(kInvSqrt2, 0.0), Complex(kInvSqrt2, 0.0);
    const OpticalState flipped =
        apply(phase_transfer(PhasePair{kPi, 0.0}), OpticalState(even, {"e", "f"}));
    CHECK(std::abs(flipped.amplitudes()(0) - Complex(-kInvSqrt2, 0.0)) < 1e-12);
    CHECK(std::abs(flipped.amplitudes()(1) - Complex(kInvSqrt2, 0.0)) < 1e-12);

    CHECK_THROWS_AS(apply(bs_transfer(balanced_beam_splitter()), flipped), ModeMismatch);

    testsupport::Rng rng(707);
    for (int i = 0; i < 30; ++i) {
        const int n = testsupport::uniform_int(rng, 2, 4);
        const TransferMatrix m(testsupport::random_unitary(rng, n), testsupport::generic_modes(n),
                               testsupport::generic_modes(n));
        const OpticalState out = apply(m, OpticalState::basis_state(testsupport::generic_modes(n),
                                                                    testsupport::uniform_int(rng, 0, n - 1)));
        CHECK(std::abs(out.amplitudes().squaredNorm() - 1.0) <= 1e-12);
        CHECK(std::abs(detection_probs(out).sum() - 1.0) <= 1e-12);
    }
}

TEST_CASE("detection probabilities at the fringe extremes") {
    const OpticalState in = OpticalState::basis_state({"b", "v"}, 0);
    CHECK(detection_probs(in)(0) == 1.0);
    CHECK(detection_probs(in)(1) == 0.0);

    const Eigen::VectorXd at_pi =
        detection_probs(apply(mzi_closed_transfer(balanced_beam_splitter(), {kPi, 0.0}), in));
    CHECK(std::abs(at_pi(0) - 1.0) < 1e-12);
    CHECK(std::abs(at_pi(1)) < 1e-12);

    const Eigen::VectorXd at_quarter =
        detection_probs(apply(mzi_closed_transfer(balanced_beam_splitter(), {kPi / 2.0, 0.0}), in));
    CHECK(std::abs(at_quarter(0) - 0.5) < 1e-12);
    CHECK(std::abs(at_quarter(1) - 0.5) < 1e-12);
}

TEST_CASE("states refuse silent renormalization") {
    Eigen::VectorXcd drifted(2);
    drifted << Complex(1.0 + 3e-9, 0.0), Complex(0.0, 0.0);
    CHECK_THROWS_AS(OpticalState(drifted, {"b", "v"}), NotNormalized);

    Eigen::VectorXcd nearly(2);
    nearly << Complex(1.0, 0.0), Complex(1e-7, 0.0);  // norm^2 off by 1e-14
    CHECK_NOTHROW(OpticalState(nearly, {"b", "v"}));
}

TEST_CASE("derived phase reduces to (-pi, pi]") {
    CHECK(PhasePair{kPi / 2.0, 0.0}.derived_phase() == doctest::Approx(kPi / 2.0));
    CHECK(PhasePair{3.0 * kPi, 0.0}.derived_phase() == doctest::Approx(kPi));
    CHECK(PhasePair{0.0, kPi}.derived_phase() == doctest::Approx(kPi));  // -pi folds to +pi
    CHECK(PhasePair{7.0, 1.0}.derived_phase() == doctest::Approx(6.0 - 2.0 * kPi));
    CHECK(PhasePair{-0.25, 0.25}.derived_phase() == doctest::Approx(-0.5));
}

TEST_CASE("non-unitary construction is rejected") {
    Eigen::MatrixXcd bad(2, 2);
    bad << 1.0, 0.0, 0.0, 0.5;
    CHECK_THROWS_AS(TransferMatrix(bad, {"a", "b"}, {"c", "d"}), LosslessViolation);
    CHECK_THROWS_AS(TransferMatrix(Eigen::MatrixXcd::Identity(2, 2), {"a", "a"}, {"c", "d"}),
                    InvalidArgument);
}
