#pragma once

#include <Eigen/Dense>

#include <complex>
#include <string>
#include <vector>

#include "interfero/errors.hpp"

namespace interfero {

using Complex = std::complex<double>;

/// Tolerance for constructor-time algebraic validation (unitarity, lossless
/// constraints).
inline constexpr double kAlgebraTol = 1e-12;

/// Tolerance for accepting an externally supplied state as normalized.
/// Renormalization is never performed; drift beyond this is an error so its
/// origin stays visible.
inline constexpr double kNormAcceptTol = 1e-9;

/// Complex coefficients of a lossless two-mode beam splitter,
/// R = |R| e^{i phi_r} and T = |T| e^{i phi_t}, subject to
///   |R|^2 + |T|^2 = 1   and   R T* + T R* = 0.
/// The second constraint is equivalent to cos(phi_r - phi_t) = 0 whenever both
/// magnitudes are nonzero.
struct BeamSplitterSpec {
    double r_mag;
    double t_mag;
    double phi_r;
    double phi_t;

    Complex reflection() const { return std::polar(r_mag, phi_r); }
    Complex transmission() const { return std::polar(t_mag, phi_t); }
};

/// Validates the lossless constraints and returns the spec.
/// Throws LosslessViolation if a magnitude is outside [0,1] or either
/// constraint fails beyond kAlgebraTol.
BeamSplitterSpec make_beam_splitter(double r_mag, double t_mag, double phi_r, double phi_t);

/// |R| = |T| = 1/sqrt(2) with the canonical phase convention phi_t = 0,
/// phi_r = pi/2.
BeamSplitterSpec balanced_beam_splitter();

/// Additional phase shifts picked up along the two interferometer arms.
struct PhasePair {
    double phi_e = 0.0;
    double phi_f = 0.0;

    /// phi_e - phi_f reduced to (-pi, pi].
    double derived_phase() const;
};

/// Unitary map from input-mode operators to output-mode operators.
/// Rows are indexed by output modes, columns by input modes. A single photon
/// amplitude vector over the input modes transforms by the same matrix.
class TransferMatrix {
public:
    TransferMatrix(Eigen::MatrixXcd entries,
                   std::vector<std::string> input_modes,
                   std::vector<std::string> output_modes);

    static TransferMatrix identity(std::vector<std::string> modes);

    const Eigen::MatrixXcd& entries() const { return entries_; }
    const std::vector<std::string>& input_modes() const { return input_modes_; }
    const std::vector<std::string>& output_modes() const { return output_modes_; }
    Eigen::Index dim() const { return entries_.rows(); }

    /// max |U^H U - I|, entrywise.
    double unitarity_residual() const;

    /// Index of a mode label in the output (input) list; throws ModeMismatch
    /// if absent.
    Eigen::Index output_index(const std::string& mode) const;
    Eigen::Index input_index(const std::string& mode) const;

    Complex entry(const std::string& output_mode, const std::string& input_mode) const;

private:
    Eigen::MatrixXcd entries_;
    std::vector<std::string> input_modes_;
    std::vector<std::string> output_modes_;
};

/// Beam-splitter transfer [[R, T], [T, R]] from input modes (b, v) to output
/// modes (s, f). Output 1 carries the reflection of input 1.
TransferMatrix bs_transfer(const BeamSplitterSpec& spec,
                           std::vector<std::string> input_modes = {"b", "v"},
                           std::vector<std::string> output_modes = {"s", "f"});

/// Per-arm phase factors diag(e^{i phi_e}, e^{i phi_f}) on modes (e, f).
TransferMatrix phase_transfer(const PhasePair& phases,
                              std::vector<std::string> modes = {"e", "f"});

/// Matrix product second * first. Requires first.output_modes to equal
/// second.input_modes exactly; throws ModeMismatch otherwise.
TransferMatrix compose(const TransferMatrix& second, const TransferMatrix& first);

/// Coefficients of the closed Mach-Zehnder map
///   out1 = R_MZ in1 + T_MZ in2,  out2 = T_MZ in1 + R'_MZ in2.
struct MziCoefficients {
    Complex r_mz;
    Complex t_mz;
    Complex r_mz_prime;
};

/// Closed-configuration coefficients for identical input and output splitters:
///   R_MZ  = R^2 e^{i phi_e} + T^2 e^{i phi_f}
///   R'_MZ = R^2 e^{i phi_f} + T^2 e^{i phi_e}
///   T_MZ  = R T (e^{i phi_e} + e^{i phi_f})
/// With phi = phi_e - phi_f and phi_r - phi_t = +-pi/2 these give
///   |R_MZ|^2 = |R|^4 + |T|^4 - 2 |R|^2 |T|^2 cos(phi)
///   |T_MZ|^2 = 2 |R|^2 |T|^2 (1 + cos(phi)).
/// Note the (1 + cos phi) sign: the (1 - cos phi) variant sometimes quoted for
/// |T_MZ|^2 would break |R_MZ|^2 + |T_MZ|^2 = 1 everywhere except
/// cos(phi) = 0, and is inconsistent with the balanced-case fringe
/// N_2/N = (1 + cos phi)/2.
MziCoefficients mzi_closed_coeffs(const BeamSplitterSpec& spec, const PhasePair& phases);

/// Independent-splitter variant; `input` is the entrance splitter.
MziCoefficients mzi_closed_coeffs(const BeamSplitterSpec& input,
                                  const BeamSplitterSpec& output,
                                  const PhasePair& phases);

/// Closed-configuration transfer [[R_MZ, T_MZ], [T_MZ, R'_MZ]] from (b, v) to
/// (c1, c2), built from the coefficient formulas.
TransferMatrix mzi_closed_transfer(const BeamSplitterSpec& spec, const PhasePair& phases);

/// Open-configuration transfer [[T, R], [R, T]] from (b, v) to (o1, o2): with
/// the output splitter off, each input crosses straight through to the
/// opposite port and no phase reaches the output amplitudes' moduli.
TransferMatrix mzi_open_transfer(const BeamSplitterSpec& spec);

/// Single-photon amplitude vector over ordered mode labels.
class OpticalState {
public:
    OpticalState(Eigen::VectorXcd amplitudes, std::vector<std::string> modes);

    /// Photon in mode `index`, vacuum elsewhere.
    static OpticalState basis_state(std::vector<std::string> modes, Eigen::Index index);

    const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }
    const std::vector<std::string>& modes() const { return modes_; }
    Eigen::Index dim() const { return amplitudes_.size(); }

private:
    Eigen::VectorXcd amplitudes_;
    std::vector<std::string> modes_;
};

/// Applies a transfer matrix to a state. The state's modes must equal the
/// matrix's input modes; the result lives on the matrix's output modes.
OpticalState apply(const TransferMatrix& matrix, const OpticalState& state);

/// Born-rule probabilities |amplitude|^2 per mode. Throws NotNormalized when
/// the input norm deviates from 1 beyond kNormAcceptTol.
Eigen::VectorXd detection_probs(const OpticalState& state);

}  // namespace interfero
