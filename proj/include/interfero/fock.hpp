#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "interfero/mode_algebra.hpp"

namespace interfero {

/// Truncated Fock basis over a fixed number of modes: all occupation vectors
/// with total photon number <= n_max. States are grouped by total photon
/// number (ascending); within a block, occupation vectors are ordered
/// reverse-lexicographically, so the single-photon block follows the mode
/// order of the circuit: (1,0,...), (0,1,0,...), ...
class FockBasis {
public:
    FockBasis(int num_modes, int n_max);

    int num_modes() const { return num_modes_; }
    int n_max() const { return n_max_; }
    std::size_t size() const { return states_.size(); }

    const std::vector<int>& occupations(std::size_t index) const { return states_[index]; }
    int total_photons(std::size_t index) const;
    std::size_t index_of(const std::vector<int>& occupations) const;

    /// Indices of the basis states with total photon number n.
    std::vector<std::size_t> block(int n) const;

private:
    int num_modes_;
    int n_max_;
    std::vector<std::vector<int>> states_;
};

/// Dense unitary over a truncated Fock basis; block-diagonal in total photon
/// number for passive (photon-conserving) optics.
struct FockUnitary {
    FockBasis basis;
    Eigen::MatrixXcd entries;

    /// The sub-matrix on the fixed photon-number block n.
    Eigen::MatrixXcd block(int n) const;
};

/// Amplitude vector over a truncated Fock basis.
struct FockState {
    FockBasis basis;
    Eigen::VectorXcd amplitudes;

    static FockState vacuum(const FockBasis& basis);
    /// One photon in `mode`, vacuum elsewhere.
    static FockState single_photon(const FockBasis& basis, int mode);
};

/// Lifts a mode transfer matrix to the truncated Fock space by mapping each
/// input creation operator to its image under the mode map and expanding the
/// resulting operator products on the vacuum. The n = 1 block equals the mode
/// matrix entrywise. Throws TruncationTooSmall for n_max < 1.
FockUnitary lift_to_fock(const TransferMatrix& matrix, int n_max);

FockState apply(const FockUnitary& unitary, const FockState& state);

/// <state| n_hat_mode |state>. The state must be normalized within
/// kNormAcceptTol.
double expected_photon_number(const FockState& state, int mode);
double expected_photon_number(const FockState& state, const std::string& mode_label,
                              const std::vector<std::string>& mode_order);

}  // namespace interfero
