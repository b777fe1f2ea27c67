// Qubit register conventions, pure states, density matrices, partial trace,
// von Neumann entropy and Pauli-string application.
//
// Register convention (shared by every module):
//   * A register holds n_bath bath spins plus, optionally, one system qubit.
//   * The system qubit, when present, is site 0; bath spins are sites
//     1..n_bath.  Bath-only registers use sites 0..n_bath-1.
//   * Bit i of a computational-basis index is the state of site i:
//     bit 0 <-> spin up   (+1 eigenstate of sigma^z),
//     bit 1 <-> spin down (-1 eigenstate of sigma^z).
//   * Basis index = sum_i bit_i * 2^i, so the ket |s0 s1 s2 ...> written
//     site-0-first has index s0 + 2*s1 + 4*s2 + ...

#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace spinbath {

using cdouble = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

inline constexpr double kNormTol = 1e-12;
inline constexpr double kHermTol = 1e-10;
inline constexpr double kEigClipTol = 1e-12;

struct RegisterLayout {
    int n_bath = 0;
    bool has_system = false;

    int total_qubits() const { return n_bath + (has_system ? 1 : 0); }
    std::size_t dim() const { return std::size_t{1} << total_qubits(); }

    int system_label() const {
        if (!has_system) throw std::invalid_argument("register has no system qubit");
        return 0;
    }
    // Label of the i-th bath spin, i in [0, n_bath).
    int bath_label(int i) const {
        if (i < 0 || i >= n_bath) throw std::invalid_argument("bath spin index out of range");
        return has_system ? i + 1 : i;
    }
    std::vector<int> bath_labels() const {
        std::vector<int> out(static_cast<std::size_t>(n_bath));
        for (int i = 0; i < n_bath; ++i) out[static_cast<std::size_t>(i)] = bath_label(i);
        return out;
    }
    bool contains(int label) const { return label >= 0 && label < total_qubits(); }

    friend bool operator==(const RegisterLayout&, const RegisterLayout&) = default;
};

inline RegisterLayout bath_register(int n_bath) { return RegisterLayout{n_bath, false}; }
inline RegisterLayout system_register(int n_bath) { return RegisterLayout{n_bath, true}; }

// Normalized amplitude vector over a register.
struct PureState {
    RegisterLayout layout;
    Vector amps;

    PureState() = default;
    PureState(RegisterLayout l, Vector a) : layout(l), amps(std::move(a)) {
        if (amps.size() != static_cast<Eigen::Index>(layout.dim()))
            throw std::invalid_argument("amplitude vector does not match register dimension");
    }

    double norm() const { return amps.norm(); }

    void require_normalized(double tol = kNormTol) const {
        if (std::abs(norm() - 1.0) > tol)
            throw std::invalid_argument("state is not normalized (|norm-1| = " +
                                        std::to_string(std::abs(norm() - 1.0)) + ")");
    }

    static PureState zero(RegisterLayout l) {
        return PureState(l, Vector::Zero(static_cast<Eigen::Index>(l.dim())));
    }
    // Computational basis state |bits>, bit i of `bits` = state of site i.
    static PureState basis(RegisterLayout l, std::uint64_t bits) {
        PureState s = zero(l);
        s.amps[static_cast<Eigen::Index>(bits)] = 1.0;
        return s;
    }
};

inline cdouble inner(const PureState& a, const PureState& b) {
    if (a.layout != b.layout) throw std::invalid_argument("inner product across mismatched registers");
    return a.amps.dot(b.amps);  // conjugates a
}

inline double fidelity(const PureState& a, const PureState& b) {
    return std::norm(inner(a, b));
}

// Hermitian, PSD, unit-trace matrix over a retained subset of the register.
// `labels` lists the retained qubits (ascending); it is empty for states
// expressed in a non-register basis (e.g. the Dicke basis of the magnon
// module), where only the matrix itself is meaningful.
struct DensityMatrix {
    Matrix mat;
    std::vector<int> labels;

    Eigen::Index dim() const { return mat.rows(); }

    double hermiticity_error() const { return (mat - mat.adjoint()).cwiseAbs().maxCoeff(); }
    double trace_error() const { return std::abs(mat.trace().real() - 1.0) + std::abs(mat.trace().imag()); }

    void require_valid(double herm_tol = kHermTol, double trace_tol = kHermTol,
                       double psd_tol = kHermTol) const {
        if (mat.rows() != mat.cols()) throw std::invalid_argument("density matrix is not square");
        if (hermiticity_error() > herm_tol) throw std::invalid_argument("density matrix is not Hermitian");
        if (trace_error() > trace_tol) throw std::invalid_argument("density matrix trace differs from 1");
        Eigen::SelfAdjointEigenSolver<Matrix> es(mat, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -psd_tol)
            throw std::invalid_argument("density matrix has a negative eigenvalue");
    }
};

namespace detail {

// Positions of set bits of `mask`, ascending.
inline std::vector<int> bit_positions(std::uint64_t mask) {
    std::vector<int> pos;
    for (int b = 0; mask; ++b, mask >>= 1)
        if (mask & 1u) pos.push_back(b);
    return pos;
}

// expand_table[i] scatters the bits of i into the set positions of `mask`.
inline std::vector<std::uint64_t> expand_table(std::uint64_t mask) {
    const std::vector<int> pos = bit_positions(mask);
    const std::size_t n = std::size_t{1} << pos.size();
    std::vector<std::uint64_t> table(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::uint64_t v = 0;
        for (std::size_t b = 0; b < pos.size(); ++b)
            if (i >> b & 1u) v |= std::uint64_t{1} << pos[b];
        table[i] = v;
    }
    return table;
}

inline std::uint64_t label_mask(const RegisterLayout& layout, const std::vector<int>& labels) {
    std::uint64_t mask = 0;
    for (int l : labels) {
        if (!layout.contains(l)) throw std::invalid_argument("qubit label outside the register");
        const std::uint64_t bit = std::uint64_t{1} << l;
        if (mask & bit) throw std::invalid_argument("duplicate qubit label");
        mask |= bit;
    }
    return mask;
}

}  // namespace detail

// Partial trace over the complement of `keep`.  Bit-mask index arithmetic,
// no reshape materialization; cost O(2^total * 2^|keep|).
inline DensityMatrix reduced_density(const PureState& state, const std::vector<int>& keep) {
    if (keep.empty()) throw std::invalid_argument("reduced_density: empty keep set");
    const std::uint64_t keep_mask = detail::label_mask(state.layout, keep);
    const std::uint64_t full_mask = state.layout.dim() - 1;
    const std::uint64_t traced_mask = full_mask & ~keep_mask;

    const auto keep_idx = detail::expand_table(keep_mask);
    const auto tr_idx = detail::expand_table(traced_mask);
    const std::size_t dk = keep_idx.size();

    Matrix rho = Matrix::Zero(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dk));
    const cdouble* amp = state.amps.data();
    for (std::uint64_t base : tr_idx) {
        for (std::size_t a = 0; a < dk; ++a) {
            const cdouble va = amp[keep_idx[a] | base];
            if (va == cdouble{0.0, 0.0}) continue;
            for (std::size_t b = 0; b <= a; ++b)
                rho(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) +=
                    va * std::conj(amp[keep_idx[b] | base]);
        }
    }
    for (Eigen::Index a = 0; a < rho.rows(); ++a)
        for (Eigen::Index b = a + 1; b < rho.cols(); ++b) rho(a, b) = std::conj(rho(b, a));

    std::vector<int> sorted = keep;
    std::sort(sorted.begin(), sorted.end());
    return DensityMatrix{std::move(rho), std::move(sorted)};
}

// -sum p log2 p over the spectrum, eigenvalues clipped to [0,1]; entropies
// are in bits throughout the library.
inline double von_neumann_entropy(const DensityMatrix& rho) {
    if (rho.mat.rows() != rho.mat.cols()) throw std::invalid_argument("entropy of a non-square matrix");
    if (rho.hermiticity_error() > kHermTol)
        throw std::invalid_argument("entropy of a non-Hermitian matrix");
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho.mat, Eigen::EigenvaluesOnly);
    double H = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const double p = std::clamp(es.eigenvalues()[i], 0.0, 1.0);
        if (p > kEigClipTol) H -= p * std::log2(p);
    }
    return H;
}

enum class Pauli { X, Y, Z };

// Sparse Pauli string: one Pauli per listed site.
using PauliString = std::vector<std::pair<int, Pauli>>;

namespace detail {

struct PauliMasks {
    std::uint64_t flip = 0;   // x and y sites
    std::uint64_t phase = 0;  // y and z sites: each set bit contributes (-1)^bit
    int n_y = 0;
};

inline PauliMasks compile_string(const RegisterLayout& layout, const PauliString& string) {
    PauliMasks m;
    std::uint64_t seen = 0;
    for (const auto& [site, op] : string) {
        if (!layout.contains(site)) throw std::invalid_argument("Pauli site outside the register");
        const std::uint64_t bit = std::uint64_t{1} << site;
        if (seen & bit) throw std::invalid_argument("duplicate site in Pauli string");
        seen |= bit;
        switch (op) {
            case Pauli::X: m.flip |= bit; break;
            case Pauli::Y: m.flip |= bit; m.phase |= bit; ++m.n_y; break;
            case Pauli::Z: m.phase |= bit; break;
        }
    }
    return m;
}

inline cdouble i_pow(int n) {
    switch (n & 3) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

}  // namespace detail

// scalar * (tensor product of the listed Paulis) applied to `state`.
// Convention checks: sigma^x|0> = |1>;  sigma^y|0> = i|1>;  sigma^z|0> = +|0>.
inline PureState apply_pauli_string(const PureState& state, const PauliString& string,
                                    cdouble scalar = 1.0) {
    const auto m = detail::compile_string(state.layout, string);
    const cdouble base = scalar * detail::i_pow(m.n_y);
    PureState out = PureState::zero(state.layout);
    const std::size_t dim = state.layout.dim();
    for (std::size_t i = 0; i < dim; ++i) {
        const cdouble v = state.amps[static_cast<Eigen::Index>(i)];
        if (v == cdouble{0.0, 0.0}) continue;
        const bool odd = std::popcount(i & m.phase) & 1;
        out.amps[static_cast<Eigen::Index>(i ^ m.flip)] += (odd ? -base : base) * v;
    }
    return out;
}

}  // namespace spinbath
