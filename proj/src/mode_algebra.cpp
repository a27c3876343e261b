#include "interfero/mode_algebra.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <unordered_set>

namespace interfero {

namespace {

constexpr double kPi = std::numbers::pi;

std::string join(const std::vector<std::string>& labels) {
    std::string out;
    for (const auto& l : labels) {
        if (!out.empty()) out += " ";
        out += l;
    }
    return out;
}

void require_unique(const std::vector<std::string>& labels, const char* which) {
    std::unordered_set<std::string> seen;
    for (const auto& l : labels) {
        if (!seen.insert(l).second) {
            throw InvalidArgument(std::string("duplicate ") + which + " mode label '" + l + "'");
        }
    }
}

}  // namespace

BeamSplitterSpec make_beam_splitter(double r_mag, double t_mag, double phi_r, double phi_t) {
    if (!(r_mag >= 0.0 && r_mag <= 1.0)) {
        throw LosslessViolation("reflection magnitude " + std::to_string(r_mag) +
                                " outside [0, 1]");
    }
    if (!(t_mag >= 0.0 && t_mag <= 1.0)) {
        throw LosslessViolation("transmission magnitude " + std::to_string(t_mag) +
                                " outside [0, 1]");
    }
    const double norm_defect = r_mag * r_mag + t_mag * t_mag - 1.0;
    if (std::abs(norm_defect) > kAlgebraTol) {
        std::ostringstream os;
        os << "|R|^2 + |T|^2 = " << (r_mag * r_mag + t_mag * t_mag) << " differs from 1 by "
           << norm_defect;
        throw LosslessViolation(os.str());
    }
    // R T* + T R* = 2 |R| |T| cos(phi_r - phi_t) must vanish.
    const double cross = 2.0 * r_mag * t_mag * std::cos(phi_r - phi_t);
    if (std::abs(cross) > kAlgebraTol) {
        std::ostringstream os;
        os << "R T* + T R* = " << cross << " (phases must differ by pi/2 mod pi)";
        throw LosslessViolation(os.str());
    }
    return BeamSplitterSpec{r_mag, t_mag, phi_r, phi_t};
}

BeamSplitterSpec balanced_beam_splitter() {
    const double inv_sqrt2 = std::sqrt(0.5);
    return make_beam_splitter(inv_sqrt2, inv_sqrt2, kPi / 2.0, 0.0);
}

double PhasePair::derived_phase() const {
    double r = std::remainder(phi_e - phi_f, 2.0 * kPi);
    if (r <= -kPi) r = kPi;  // remainder lands in [-pi, pi]; fold -pi onto pi
    return r;
}

TransferMatrix::TransferMatrix(Eigen::MatrixXcd entries,
                               std::vector<std::string> input_modes,
                               std::vector<std::string> output_modes)
    : entries_(std::move(entries)),
      input_modes_(std::move(input_modes)),
      output_modes_(std::move(output_modes)) {
    if (entries_.rows() != entries_.cols()) {
        throw InvalidArgument("transfer matrix must be square");
    }
    if (static_cast<Eigen::Index>(input_modes_.size()) != entries_.cols() ||
        static_cast<Eigen::Index>(output_modes_.size()) != entries_.rows()) {
        throw InvalidArgument("mode label count does not match matrix dimension");
    }
    require_unique(input_modes_, "input");
    require_unique(output_modes_, "output");
    const double residual = unitarity_residual();
    if (residual > kAlgebraTol) {
        std::ostringstream os;
        os << "transfer matrix is not unitary (residual " << residual << ")";
        throw LosslessViolation(os.str());
    }
}

TransferMatrix TransferMatrix::identity(std::vector<std::string> modes) {
    const auto n = static_cast<Eigen::Index>(modes.size());
    return TransferMatrix(Eigen::MatrixXcd::Identity(n, n), modes, modes);
}

double TransferMatrix::unitarity_residual() const {
    const Eigen::MatrixXcd defect =
        entries_.adjoint() * entries_ - Eigen::MatrixXcd::Identity(dim(), dim());
    return defect.cwiseAbs().maxCoeff();
}

Eigen::Index TransferMatrix::output_index(const std::string& mode) const {
    for (Eigen::Index i = 0; i < dim(); ++i) {
        if (output_modes_[static_cast<std::size_t>(i)] == mode) return i;
    }
    throw ModeMismatch("no output mode '" + mode + "' in [" + join(output_modes_) + "]");
}

Eigen::Index TransferMatrix::input_index(const std::string& mode) const {
    for (Eigen::Index i = 0; i < dim(); ++i) {
        if (input_modes_[static_cast<std::size_t>(i)] == mode) return i;
    }
    throw ModeMismatch("no input mode '" + mode + "' in [" + join(input_modes_) + "]");
}

Complex TransferMatrix::entry(const std::string& output_mode, const std::string& input_mode) const {
    return entries_(output_index(output_mode), input_index(input_mode));
}

TransferMatrix bs_transfer(const BeamSplitterSpec& spec,
                           std::vector<std::string> input_modes,
                           std::vector<std::string> output_modes) {
    const Complex r = spec.reflection();
    const Complex t = spec.transmission();
    Eigen::MatrixXcd m(2, 2);
    m << r, t, t, r;
    return TransferMatrix(std::move(m), std::move(input_modes), std::move(output_modes));
}

TransferMatrix phase_transfer(const PhasePair& phases, std::vector<std::string> modes) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
    m(0, 0) = std::polar(1.0, phases.phi_e);
    m(1, 1) = std::polar(1.0, phases.phi_f);
    return TransferMatrix(std::move(m), modes, modes);
}

TransferMatrix compose(const TransferMatrix& second, const TransferMatrix& first) {
    if (first.output_modes() != second.input_modes()) {
        throw ModeMismatch("cannot compose: first outputs [" + join(first.output_modes()) +
                           "] do not match second inputs [" + join(second.input_modes()) + "]");
    }
    return TransferMatrix(second.entries() * first.entries(), first.input_modes(),
                          second.output_modes());
}

MziCoefficients mzi_closed_coeffs(const BeamSplitterSpec& input,
                                  const BeamSplitterSpec& output,
                                  const PhasePair& phases) {
    const Complex r1 = input.reflection();
    const Complex t1 = input.transmission();
    const Complex r2 = output.reflection();
    const Complex t2 = output.transmission();
    const Complex ee = std::polar(1.0, phases.phi_e);
    const Complex ef = std::polar(1.0, phases.phi_f);
    return MziCoefficients{
        r2 * ee * r1 + t2 * ef * t1,   // R_MZ
        r2 * ee * t1 + t2 * ef * r1,   // T_MZ
        t2 * ee * t1 + r2 * ef * r1,   // R'_MZ
    };
}

MziCoefficients mzi_closed_coeffs(const BeamSplitterSpec& spec, const PhasePair& phases) {
    return mzi_closed_coeffs(spec, spec, phases);
}

TransferMatrix mzi_closed_transfer(const BeamSplitterSpec& spec, const PhasePair& phases) {
    const MziCoefficients c = mzi_closed_coeffs(spec, phases);
    Eigen::MatrixXcd m(2, 2);
    m << c.r_mz, c.t_mz, c.t_mz, c.r_mz_prime;
    return TransferMatrix(std::move(m), {"b", "v"}, {"c1", "c2"});
}

TransferMatrix mzi_open_transfer(const BeamSplitterSpec& spec) {
    const Complex r = spec.reflection();
    const Complex t = spec.transmission();
    Eigen::MatrixXcd m(2, 2);
    m << t, r, r, t;
    return TransferMatrix(std::move(m), {"b", "v"}, {"o1", "o2"});
}

OpticalState::OpticalState(Eigen::VectorXcd amplitudes, std::vector<std::string> modes)
    : amplitudes_(std::move(amplitudes)), modes_(std::move(modes)) {
    if (static_cast<Eigen::Index>(modes_.size()) != amplitudes_.size()) {
        throw InvalidArgument("mode label count does not match amplitude count");
    }
    require_unique(modes_, "state");
    const double defect = std::abs(amplitudes_.squaredNorm() - 1.0);
    if (defect > kNormAcceptTol) {
        std::ostringstream os;
        os << "state squared norm differs from 1 by " << defect << "; renormalization is refused";
        throw NotNormalized(os.str());
    }
}

OpticalState OpticalState::basis_state(std::vector<std::string> modes, Eigen::Index index) {
    Eigen::VectorXcd amp = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(modes.size()));
    amp(index) = Complex(1.0, 0.0);
    return OpticalState(std::move(amp), std::move(modes));
}

OpticalState apply(const TransferMatrix& matrix, const OpticalState& state) {
    if (state.modes() != matrix.input_modes()) {
        throw ModeMismatch("state modes do not match matrix input modes");
    }
    return OpticalState(matrix.entries() * state.amplitudes(), matrix.output_modes());
}

Eigen::VectorXd detection_probs(const OpticalState& state) {
    const double defect = std::abs(state.amplitudes().squaredNorm() - 1.0);
    if (defect > kNormAcceptTol) {
        throw NotNormalized("state norm drifted beyond acceptance");
    }
    return state.amplitudes().cwiseAbs2();
}

}  // namespace interfero
