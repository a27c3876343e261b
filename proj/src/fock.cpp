#include "interfero/fock.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace interfero {

namespace {

// Occupation vectors of `modes` slots summing to exactly `total`, first slot
// taking the largest count first (reverse-lexicographic order).
void enumerate_block(int modes, int total, std::vector<int>& prefix,
                     std::vector<std::vector<int>>& out) {
    if (modes == 1) {
        prefix.push_back(total);
        out.push_back(prefix);
        prefix.pop_back();
        return;
    }
    for (int k = total; k >= 0; --k) {
        prefix.push_back(k);
        enumerate_block(modes - 1, total - k, prefix, out);
        prefix.pop_back();
    }
}

}  // namespace

FockBasis::FockBasis(int num_modes, int n_max) : num_modes_(num_modes), n_max_(n_max) {
    if (num_modes < 1) throw InvalidArgument("Fock basis needs at least one mode");
    if (n_max < 1) throw TruncationTooSmall("photon-number truncation must be at least 1");
    for (int n = 0; n <= n_max; ++n) {
        std::vector<int> prefix;
        enumerate_block(num_modes, n, prefix, states_);
    }
}

int FockBasis::total_photons(std::size_t index) const {
    const auto& occ = states_[index];
    return std::accumulate(occ.begin(), occ.end(), 0);
}

std::size_t FockBasis::index_of(const std::vector<int>& occupations) const {
    for (std::size_t i = 0; i < states_.size(); ++i) {
        if (states_[i] == occupations) return i;
    }
    throw InvalidArgument("occupation vector outside the truncated basis");
}

std::vector<std::size_t> FockBasis::block(int n) const {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < states_.size(); ++i) {
        if (total_photons(i) == n) idx.push_back(i);
    }
    return idx;
}

Eigen::MatrixXcd FockUnitary::block(int n) const {
    const auto idx = basis.block(n);
    const auto m = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXcd sub(m, m);
    for (Eigen::Index r = 0; r < m; ++r) {
        for (Eigen::Index c = 0; c < m; ++c) {
            sub(r, c) = entries(static_cast<Eigen::Index>(idx[static_cast<std::size_t>(r)]),
                                static_cast<Eigen::Index>(idx[static_cast<std::size_t>(c)]));
        }
    }
    return sub;
}

FockState FockState::vacuum(const FockBasis& basis) {
    Eigen::VectorXcd amp = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis.size()));
    amp(0) = 1.0;
    return FockState{basis, std::move(amp)};
}

FockState FockState::single_photon(const FockBasis& basis, int mode) {
    std::vector<int> occ(static_cast<std::size_t>(basis.num_modes()), 0);
    occ[static_cast<std::size_t>(mode)] = 1;
    Eigen::VectorXcd amp = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis.size()));
    amp(static_cast<Eigen::Index>(basis.index_of(occ))) = 1.0;
    return FockState{basis, std::move(amp)};
}

FockUnitary lift_to_fock(const TransferMatrix& matrix, int n_max) {
    if (n_max < 1) throw TruncationTooSmall("photon-number truncation must be at least 1");
    const int modes = static_cast<int>(matrix.dim());
    FockBasis basis(modes, n_max);
    const auto dim = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXcd lifted = Eigen::MatrixXcd::Zero(dim, dim);

    // Column by column: a basis ket |n_1 ... n_m> maps to
    //   prod_j (sum_i M_ij a_i^dag)^{n_j} |0> / sqrt(prod_j n_j!),
    // expanded as an amplitude map over occupation vectors.
    for (Eigen::Index col = 0; col < dim; ++col) {
        const auto& occ = basis.occupations(static_cast<std::size_t>(col));
        std::map<std::vector<int>, Complex> amps;
        amps[std::vector<int>(static_cast<std::size_t>(modes), 0)] = Complex(1.0, 0.0);
        double normalization = 1.0;
        for (int j = 0; j < modes; ++j) {
            for (int rep = 0; rep < occ[static_cast<std::size_t>(j)]; ++rep) {
                std::map<std::vector<int>, Complex> next;
                for (const auto& [state, amp] : amps) {
                    for (int i = 0; i < modes; ++i) {
                        const Complex coeff = matrix.entries()(i, j);
                        if (coeff == Complex(0.0, 0.0)) continue;
                        std::vector<int> raised = state;
                        const double factor =
                            std::sqrt(static_cast<double>(raised[static_cast<std::size_t>(i)] + 1));
                        raised[static_cast<std::size_t>(i)] += 1;
                        next[raised] += amp * coeff * factor;
                    }
                }
                amps = std::move(next);
            }
            for (int k = 2; k <= occ[static_cast<std::size_t>(j)]; ++k) {
                normalization *= static_cast<double>(k);
            }
        }
        const double scale = 1.0 / std::sqrt(normalization);
        for (const auto& [state, amp] : amps) {
            lifted(static_cast<Eigen::Index>(basis.index_of(state)), col) = amp * scale;
        }
    }
    return FockUnitary{std::move(basis), std::move(lifted)};
}

FockState apply(const FockUnitary& unitary, const FockState& state) {
    if (unitary.basis.size() != state.basis.size() ||
        unitary.basis.num_modes() != state.basis.num_modes()) {
        throw ModeMismatch("Fock state basis does not match the unitary's basis");
    }
    return FockState{state.basis, unitary.entries * state.amplitudes};
}

double expected_photon_number(const FockState& state, int mode) {
    if (mode < 0 || mode >= state.basis.num_modes()) {
        throw InvalidArgument("mode index outside the basis");
    }
    const double defect = std::abs(state.amplitudes.squaredNorm() - 1.0);
    if (defect > kNormAcceptTol) {
        throw NotNormalized("Fock state norm drifted beyond acceptance");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < state.basis.size(); ++i) {
        const double p = std::norm(state.amplitudes(static_cast<Eigen::Index>(i)));
        total += p * state.basis.occupations(i)[static_cast<std::size_t>(mode)];
    }
    return total;
}

double expected_photon_number(const FockState& state, const std::string& mode_label,
                              const std::vector<std::string>& mode_order) {
    const auto it = std::find(mode_order.begin(), mode_order.end(), mode_label);
    if (it == mode_order.end()) throw ModeMismatch("no mode '" + mode_label + "'");
    return expected_photon_number(state, static_cast<int>(std::distance(mode_order.begin(), it)));
}

}  // namespace interfero
