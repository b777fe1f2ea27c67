// Independent verification paths used by the oracle harness and the tests:
// free-fermion closed forms for the XX ring, dense eigensolver-based matrix
// exponentials, and brute-force reductions.  Nothing here shares code with
// the production paths it is used to check, beyond the dense construction of
// a Hamiltonian from its term list.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "spinbath/spin_core.hpp"
#include "spinbath/xx_model.hpp"

namespace spinbath::oracles {

// Jordan-Wigner closed form for the XX ring: in the n-excitation sector the
// fermion boundary condition is antiperiodic for n even (half-integer modes)
// and periodic for n odd (integer modes); the hopping ground energy is
// -2 sum of the n largest cos(k) over the allowed momenta.
inline double jw_sector_energy(int N, int n, double h) {
    std::vector<double> cosk(static_cast<std::size_t>(N));
    for (int m = 0; m < N; ++m) {
        const double k = 2.0 * std::numbers::pi * (m + (n % 2 == 0 ? 0.5 : 0.0)) / N;
        cosk[static_cast<std::size_t>(m)] = std::cos(k);
    }
    std::sort(cosk.begin(), cosk.end(), std::greater<>());
    double e = 0.0;
    for (int m = 0; m < n; ++m) e += -2.0 * cosk[static_cast<std::size_t>(m)];
    return e - (N - 2 * n) * h;
}

inline double jw_global_energy(int N, double h) {
    double best = std::numeric_limits<double>::infinity();
    for (int n = 0; n <= N; ++n) best = std::min(best, jw_sector_energy(N, n, h));
    return best;
}

// exp(-i H t) |psi> through a full dense eigendecomposition.
inline Vector dense_expm_apply(const Matrix& H, double t, const Vector& psi) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(H);
    const Vector coeffs = es.eigenvectors().adjoint() * psi;
    Vector phased(coeffs.size());
    for (Eigen::Index i = 0; i < coeffs.size(); ++i)
        phased[i] = std::exp(cdouble(0.0, -es.eigenvalues()[i] * t)) * coeffs[i];
    return es.eigenvectors() * phased;
}

inline PureState dense_expm_apply(const SpinHamiltonian& H, double t, const PureState& psi) {
    return PureState(psi.layout, dense_expm_apply(H.to_dense(), t, psi.amps));
}

inline double dense_ground_energy(const SpinHamiltonian& H) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(H.to_dense(), Eigen::EigenvaluesOnly);
    return es.eigenvalues()[0];
}

// Partial trace by explicit enumeration over bra/ket pairs; quadratic in the
// full dimension, independent of the masked single-pass production routine.
inline DensityMatrix brute_force_reduced(const PureState& state, const std::vector<int>& keep) {
    const int total = state.layout.total_qubits();
    std::uint64_t keep_mask = 0;
    for (int l : keep) keep_mask |= std::uint64_t{1} << l;
    std::vector<int> keep_sorted(keep);
    std::sort(keep_sorted.begin(), keep_sorted.end());

    const auto sub_index = [&](std::uint64_t full) {
        std::uint64_t idx = 0;
        for (std::size_t b = 0; b < keep_sorted.size(); ++b)
            if (full >> keep_sorted[b] & 1u) idx |= std::uint64_t{1} << b;
        return idx;
    };

    const std::size_t dim = state.layout.dim();
    const std::size_t dk = std::size_t{1} << keep_sorted.size();
    Matrix rho = Matrix::Zero(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dk));
    const std::uint64_t traced_mask = (dim - 1) & ~keep_mask;
    for (std::uint64_t i = 0; i < dim; ++i)
        for (std::uint64_t j = 0; j < dim; ++j)
            if ((i & traced_mask) == (j & traced_mask))
                rho(static_cast<Eigen::Index>(sub_index(i)), static_cast<Eigen::Index>(sub_index(j))) +=
                    state.amps[static_cast<Eigen::Index>(i)] *
                    std::conj(state.amps[static_cast<Eigen::Index>(j)]);
    (void)total;
    return DensityMatrix{std::move(rho), keep_sorted};
}

inline double brute_force_entropy(const PureState& state, const std::vector<int>& keep) {
    return von_neumann_entropy(brute_force_reduced(state, keep));
}

// I(S:F) = H_S + H_F - H_SF with every entropy taken from an explicit
// brute-force reduction of the named subsystem.
inline double brute_force_mutual_information(const PureState& global,
                                             const std::vector<int>& fragment) {
    const int sys = global.layout.system_label();
    std::vector<int> sf(fragment);
    sf.push_back(sys);
    const double h_s = brute_force_entropy(global, {sys});
    const double h_f = fragment.empty() ? 0.0 : brute_force_entropy(global, fragment);
    const double h_sf = brute_force_entropy(global, sf);
    return h_s + h_f - h_sf;
}

}  // namespace spinbath::oracles
