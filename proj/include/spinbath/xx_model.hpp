// XX ring bath: H_B = -sum_i (s_i^+ s_{i+1}^- + s_i^- s_{i+1}^+) - h sum_i s_i^z
// with periodic boundary conditions, the system-bath coupling
// H_SE = d s_S^z (x) sum_i s_i^x, magnetization sectors, and sector / global
// ground states.
//
// H_B conserves the number n of flipped spins (1-bits).  Within a sector the
// field term is the constant -(N-2n)h, so hopping blocks are diagonalized
// once per (N, n) at h = 0 and reused for every field value.  Sector results
// are memoized process-wide; distinct sectors may be computed in parallel.

#pragma once

#include <cstdint>
#include <future>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <unordered_map>
#include <utility>

#include "spinbath/spin_core.hpp"

namespace spinbath {

struct Term {
    double coeff;
    PauliString ops;
};

// Real-coefficient Pauli-term sum; Hermitian by construction.  Terms are
// compiled to bit masks for a matrix-free matvec.
class SpinHamiltonian {
  public:
    SpinHamiltonian() = default;
    SpinHamiltonian(RegisterLayout layout, std::vector<Term> terms)
        : layout_(layout), terms_(std::move(terms)) {
        compiled_.reserve(terms_.size());
        for (const auto& t : terms_) {
            auto m = detail::compile_string(layout_, t.ops);
            compiled_.push_back(Compiled{m.flip, m.phase, t.coeff * detail::i_pow(m.n_y)});
        }
    }

    const RegisterLayout& layout() const { return layout_; }
    const std::vector<Term>& terms() const { return terms_; }

    // out = H * in
    void apply(const Vector& in, Vector& out) const {
        out.setZero(static_cast<Eigen::Index>(layout_.dim()));
        const std::size_t dim = layout_.dim();
        for (const auto& c : compiled_) {
            for (std::size_t i = 0; i < dim; ++i) {
                const bool odd = std::popcount(i & c.phase) & 1;
                out[static_cast<Eigen::Index>(i ^ c.flip)] +=
                    (odd ? -c.base : c.base) * in[static_cast<Eigen::Index>(i)];
            }
        }
    }

    Vector apply(const Vector& in) const {
        Vector out;
        apply(in, out);
        return out;
    }

    Matrix to_dense() const {
        const std::size_t dim = layout_.dim();
        Matrix M = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
        for (const auto& c : compiled_)
            for (std::size_t i = 0; i < dim; ++i) {
                const bool odd = std::popcount(i & c.phase) & 1;
                M(static_cast<Eigen::Index>(i ^ c.flip), static_cast<Eigen::Index>(i)) +=
                    odd ? -c.base : c.base;
            }
        return M;
    }

    // Same operator with every site shifted by `offset` in a new register
    // (used to embed a bath-only Hamiltonian alongside the system qubit).
    SpinHamiltonian shifted(RegisterLayout new_layout, int offset) const {
        std::vector<Term> shifted_terms = terms_;
        for (auto& t : shifted_terms)
            for (auto& [site, op] : t.ops) site += offset;
        return SpinHamiltonian(new_layout, std::move(shifted_terms));
    }

    SpinHamiltonian scaled(double factor) const {
        std::vector<Term> t = terms_;
        for (auto& term : t) term.coeff *= factor;
        return SpinHamiltonian(layout_, std::move(t));
    }

    friend SpinHamiltonian operator+(const SpinHamiltonian& a, const SpinHamiltonian& b) {
        if (a.layout_ != b.layout_)
            throw std::invalid_argument("adding Hamiltonians on mismatched registers");
        std::vector<Term> t = a.terms_;
        t.insert(t.end(), b.terms_.begin(), b.terms_.end());
        return SpinHamiltonian(a.layout_, std::move(t));
    }

  private:
    struct Compiled {
        std::uint64_t flip;
        std::uint64_t phase;
        cdouble base;
    };
    RegisterLayout layout_;
    std::vector<Term> terms_;
    std::vector<Compiled> compiled_;
};

// sum_i coeff * sigma^x on the given sites.
inline SpinHamiltonian collective_x(RegisterLayout layout, const std::vector<int>& sites,
                                    double coeff) {
    std::vector<Term> terms;
    terms.reserve(sites.size());
    for (int s : sites) terms.push_back(Term{coeff, {{s, Pauli::X}}});
    return SpinHamiltonian(layout, std::move(terms));
}

// H_B on a bath-only register.  s^+ s^- + s^- s^+ = (xx + yy)/2.
inline SpinHamiltonian build_xx_bath(int N, double h) {
    if (N < 3) throw std::invalid_argument("XX ring needs N >= 3 (N = 2 double-counts the bond)");
    const RegisterLayout layout = bath_register(N);
    std::vector<Term> terms;
    terms.reserve(static_cast<std::size_t>(3 * N));
    for (int i = 0; i < N; ++i) {
        const int j = (i + 1) % N;
        terms.push_back(Term{-0.5, {{i, Pauli::X}, {j, Pauli::X}}});
        terms.push_back(Term{-0.5, {{i, Pauli::Y}, {j, Pauli::Y}}});
    }
    for (int i = 0; i < N; ++i) terms.push_back(Term{-h, {{i, Pauli::Z}}});
    return SpinHamiltonian(layout, std::move(terms));
}

// H_SE = d sigma_S^z (x) sum_i sigma_i^x on a register with the system qubit.
inline SpinHamiltonian build_interaction(int N, double d) {
    if (N < 1) throw std::invalid_argument("interaction needs at least one bath spin");
    const RegisterLayout layout = system_register(N);
    std::vector<Term> terms;
    terms.reserve(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i)
        terms.push_back(Term{d, {{layout.system_label(), Pauli::Z}, {layout.bath_label(i), Pauli::X}}});
    return SpinHamiltonian(layout, std::move(terms));
}

// Basis states (as bit patterns) of the n-excitation sector, ascending.
inline std::vector<std::uint64_t> sector_basis(int N, int n) {
    if (n < 0 || n > N) throw std::invalid_argument("sector index out of range");
    std::vector<std::uint64_t> basis;
    if (n == 0) {
        basis.push_back(0);
        return basis;
    }
    // Gosper's hack: next integer with the same popcount.
    std::uint64_t v = (std::uint64_t{1} << n) - 1;
    const std::uint64_t limit = std::uint64_t{1} << N;
    while (v < limit) {
        basis.push_back(v);
        const std::uint64_t c = v & -v;
        const std::uint64_t r = v + c;
        v = (((r ^ v) >> 2) / c) | r;
    }
    return basis;
}

struct SectorGroundState {
    int n = 0;
    double h = 0.0;
    double energy = 0.0;
    PureState vector;
    bool degenerate = false;
    double gap = 0.0;  // to the next level inside the sector (h-independent)
};

struct SectorBoundary {
    double h_threshold;
    int n_below;  // ground sector for h just below the threshold
    int n_above;  // ground sector for h just above
};

inline constexpr double kDegeneracyGapTol = 1e-10;
inline constexpr double kGroundTieTol = 1e-9;

namespace detail {

// Hopping block of H_B restricted to the n-excitation sector (h = 0 part).
inline Eigen::MatrixXd sector_hopping_matrix(int N, int n) {
    const auto basis = sector_basis(N, n);
    std::unordered_map<std::uint64_t, int> rank;
    rank.reserve(basis.size() * 2);
    for (std::size_t a = 0; a < basis.size(); ++a) rank[basis[a]] = static_cast<int>(a);

    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(basis.size()),
                                              static_cast<Eigen::Index>(basis.size()));
    for (std::size_t a = 0; a < basis.size(); ++a) {
        const std::uint64_t s = basis[a];
        for (int i = 0; i < N; ++i) {
            const int j = (i + 1) % N;
            const std::uint64_t bi = std::uint64_t{1} << i, bj = std::uint64_t{1} << j;
            if (((s & bi) != 0) != ((s & bj) != 0)) {
                const std::uint64_t t = s ^ (bi | bj);
                M(rank.at(t), static_cast<Eigen::Index>(a)) += -1.0;
            }
        }
    }
    return M;
}

struct SectorEig {
    double e0_hop = 0.0;  // lowest hopping eigenvalue (h = 0)
    double gap = std::numeric_limits<double>::infinity();
    bool degenerate = false;
    Eigen::VectorXd ground;  // empty when computed energies-only
};

inline SectorEig diagonalize_sector(int N, int n, bool want_vector) {
    Eigen::MatrixXd M = sector_hopping_matrix(N, n);
    SectorEig out;
    if (M.rows() == 1) {
        out.e0_hop = M(0, 0);
        out.ground = Eigen::VectorXd::Ones(1);
        return out;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        M, want_vector ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    out.e0_hop = es.eigenvalues()[0];
    out.gap = es.eigenvalues()[1] - es.eigenvalues()[0];
    out.degenerate = out.gap < kDegeneracyGapTol;
    if (want_vector) out.ground = es.eigenvectors().col(0);
    return out;
}

// Component on |s> of sector `rep` becomes the component on the bit
// complement of s in sector N-rep (the global spin flip commutes with the
// hopping block, so the mirrored vector is the mirrored sector's ground).
inline SectorEig mirror_sector(int N, int rep, const SectorEig& src) {
    SectorEig out;
    out.e0_hop = src.e0_hop;
    out.gap = src.gap;
    out.degenerate = src.degenerate;
    const auto rep_basis = sector_basis(N, rep);
    const auto tgt_basis = sector_basis(N, N - rep);
    std::unordered_map<std::uint64_t, int> tgt_rank;
    tgt_rank.reserve(tgt_basis.size() * 2);
    for (std::size_t a = 0; a < tgt_basis.size(); ++a)
        tgt_rank[tgt_basis[a]] = static_cast<int>(a);
    const std::uint64_t full = (std::uint64_t{1} << N) - 1;
    out.ground.resize(src.ground.size());
    for (Eigen::Index a = 0; a < src.ground.size(); ++a)
        out.ground[tgt_rank.at(~rep_basis[static_cast<std::size_t>(a)] & full)] = src.ground[a];
    return out;
}

// Process-wide memo of sector eigendata.  The promise/shared_future scheme
// lets distinct sectors run concurrently while duplicate requests block on
// the first computation.
class SectorCache {
  public:
    static SectorCache& instance() {
        static SectorCache cache;
        return cache;
    }

    std::shared_ptr<const SectorEig> get(int N, int n, bool want_vector) {
        const Key key{N, std::min(n, N - n), want_vector};
        std::shared_future<std::shared_ptr<const SectorEig>> fut;
        std::promise<std::shared_ptr<const SectorEig>> prom;
        bool owner = false;
        {
            std::lock_guard<std::mutex> lock(mutex_);
            auto it = futures_.find(key);
            if (it == futures_.end()) {
                fut = prom.get_future().share();
                futures_.emplace(key, fut);
                owner = true;
            } else {
                fut = it->second;
            }
        }
        if (owner) {
            try {
                prom.set_value(std::make_shared<SectorEig>(
                    diagonalize_sector(N, key.n, want_vector)));
            } catch (...) {
                prom.set_exception(std::current_exception());
            }
        }
        auto rep = fut.get();
        if (key.n == n || !want_vector) return rep;
        // Mirrored vector for n > N/2 (cheap permutation, not cached).
        return std::make_shared<SectorEig>(mirror_sector(N, key.n, *rep));
    }

  private:
    struct Key {
        int N, n;
        bool vec;
        friend auto operator<=>(const Key&, const Key&) = default;
    };
    std::mutex mutex_;
    std::map<Key, std::shared_future<std::shared_ptr<const SectorEig>>> futures_;
};

inline double sector_field_coefficient(int N, int n) { return -static_cast<double>(N - 2 * n); }

}  // namespace detail

// Lowest eigenpair of H_B in the n-excitation sector, by dense symmetric
// diagonalization of the sector block.  `degenerate` flags an in-sector
// ground-level degeneracy (gap < 1e-10); the eigenvector returned is then
// the solver's deterministic first column.
inline SectorGroundState sector_ground(int N, double h, int n) {
    if (N < 3) throw std::invalid_argument("XX ring needs N >= 3");
    if (n < 0 || n > N) throw std::invalid_argument("sector index out of range");
    const auto eig = detail::SectorCache::instance().get(N, n, /*want_vector=*/true);

    PureState state = PureState::zero(bath_register(N));
    const auto basis = sector_basis(N, n);
    for (std::size_t a = 0; a < basis.size(); ++a)
        state.amps[static_cast<Eigen::Index>(basis[a])] = eig->ground[static_cast<Eigen::Index>(a)];

    SectorGroundState g;
    g.n = n;
    g.h = h;
    g.energy = eig->e0_hop + detail::sector_field_coefficient(N, n) * h;
    g.vector = std::move(state);
    g.degenerate = eig->degenerate;
    g.gap = eig->gap;
    return g;
}

// Hopping ground energies E_n(0) for n = 0..N (energies-only diagonalization,
// memoized; sectors computed in parallel).
inline std::vector<double> sector_hopping_energies(int N) {
    std::vector<double> e(static_cast<std::size_t>(N) + 1);
    std::vector<std::future<std::shared_ptr<const detail::SectorEig>>> futs;
    futs.reserve(static_cast<std::size_t>(N / 2) + 1);
    for (int n = 0; n <= N / 2; ++n)
        futs.push_back(std::async(std::launch::async, [N, n] {
            return detail::SectorCache::instance().get(N, n, /*want_vector=*/false);
        }));
    for (int n = 0; n <= N / 2; ++n) e[static_cast<std::size_t>(n)] = futs[static_cast<std::size_t>(n)].get()->e0_hop;
    for (int n = N / 2 + 1; n <= N; ++n) e[static_cast<std::size_t>(n)] = e[static_cast<std::size_t>(N - n)];
    return e;
}

// Minimum-energy sector ground state over n = 0..N; near-exact ties (1e-9)
// resolve toward fewer excitations.
inline SectorGroundState global_ground(int N, double h) {
    const auto e0 = sector_hopping_energies(N);
    int best = 0;
    double best_energy = std::numeric_limits<double>::infinity();
    for (int n = 0; n <= N; ++n) {
        const double en = e0[static_cast<std::size_t>(n)] + detail::sector_field_coefficient(N, n) * h;
        if (en < best_energy - kGroundTieTol) {
            best = n;
            best_energy = en;
        }
    }
    return sector_ground(N, h, best);
}

// Level crossings of the per-sector energy lines E_n(h) = E_n(0) - (N-2n) h,
// listed by decreasing h.  Exact line intersections of the lower envelope
// over h > 0; the topmost threshold is the critical field.
inline std::vector<SectorBoundary> sector_boundaries(int N) {
    const auto e0 = sector_hopping_energies(N);
    const auto slope = [&](int n) { return detail::sector_field_coefficient(N, n); };
    const auto intercept = [&](int n) { return e0[static_cast<std::size_t>(n)]; };

    std::vector<SectorBoundary> out;
    int cur = 0;  // slope -N is strictly smallest, so n = 0 wins as h -> inf
    while (true) {
        double h_next = 0.0;
        int next = -1;
        for (int m = cur + 1; m <= N; ++m) {
            const double ds = slope(m) - slope(cur);
            const double hx = (intercept(cur) - intercept(m)) / ds;
            // Largest crossing wins; on exact ties the steeper line lies
            // lower just below the crossing.
            if (hx > h_next + 1e-15 || (std::abs(hx - h_next) <= 1e-15 && m > next)) {
                h_next = hx;
                next = m;
            }
        }
        if (next < 0 || h_next <= 0.0) break;
        out.push_back(SectorBoundary{h_next, next, cur});
        cur = next;
    }
    return out;
}

}  // namespace spinbath
