#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "spinbath/oracles.hpp"
#include "spinbath/spin_core.hpp"
#include "test_support.hpp"

using namespace spinbath;
using testsup::ghz_state;
using testsup::random_state;

TEST_CASE("register layout and bit conventions") {
    RegisterLayout bath = bath_register(4);
    CHECK(bath.total_qubits() == 4);
    CHECK(bath.dim() == 16);
    CHECK_THROWS_AS(bath.system_label(), std::invalid_argument);

    RegisterLayout full = system_register(4);
    CHECK(full.total_qubits() == 5);
    CHECK(full.system_label() == 0);
    CHECK(full.bath_label(0) == 1);
    CHECK(full.bath_label(3) == 4);
}

TEST_CASE("pauli application follows the sign conventions") {
    const RegisterLayout two = bath_register(2);

    // sigma^x on site 0 of |00> flips the site-0 bit: index 0 -> index 1.
    PureState s = PureState::basis(two, 0b00);
    PureState flipped = apply_pauli_string(s, {{0, Pauli::X}});
    CHECK(std::abs(flipped.amps[0b01] - 1.0) < 1e-15);

    // sigma^z: |0> is the +1 eigenstate, |1> picks up a minus sign.
    const RegisterLayout one = bath_register(1);
    PureState up = PureState::basis(one, 0);
    PureState dn = PureState::basis(one, 1);
    CHECK(std::abs(apply_pauli_string(up, {{0, Pauli::Z}}).amps[0] - 1.0) < 1e-15);
    CHECK(std::abs(apply_pauli_string(dn, {{0, Pauli::Z}}).amps[1] + 1.0) < 1e-15);

    // sigma^y|0> = i|1>, sigma^y|1> = -i|0>.
    CHECK(std::abs(apply_pauli_string(up, {{0, Pauli::Y}}).amps[1] - cdouble(0, 1)) < 1e-15);
    CHECK(std::abs(apply_pauli_string(dn, {{0, Pauli::Y}}).amps[0] - cdouble(0, -1)) < 1e-15);

    CHECK_THROWS_AS(apply_pauli_string(s, {{5, Pauli::X}}), std::invalid_argument);
}

TEST_CASE("pauli strings are involutions") {
    std::mt19937 rng(71);
    const RegisterLayout layout = bath_register(6);
    std::uniform_int_distribution<int> which(0, 2);
    for (int rep = 0; rep < 25; ++rep) {
        PureState s = random_state(layout, rng);
        PauliString str;
        for (int site = 0; site < 6; ++site)
            if (rng() % 2) str.push_back({site, static_cast<Pauli>(which(rng))});
        if (str.empty()) str.push_back({0, Pauli::X});
        PureState twice = apply_pauli_string(apply_pauli_string(s, str), str);
        CHECK(fidelity(s, twice) >= 1.0 - 1e-12);
    }
}

TEST_CASE("reduced density of GHZ branch records") {
    const cdouble alpha = 0.6, beta = 0.8;
    PureState ghz = ghz_state(4, alpha, beta);
    // Records are orthonormal, so one bath spin carries diag(|a|^2, |b|^2).
    DensityMatrix rho = reduced_density(ghz, {2});
    CHECK(std::abs(rho.mat(0, 0) - 0.36) < 1e-12);
    CHECK(std::abs(rho.mat(1, 1) - 0.64) < 1e-12);
    CHECK(std::abs(rho.mat(0, 1)) < 1e-12);
    rho.require_valid();
}

TEST_CASE("reduced density of a product state is a pure projector") {
    const RegisterLayout layout = bath_register(5);
    PureState zero = PureState::basis(layout, 0);
    for (const auto& keep : {std::vector<int>{0}, {1, 3}, {0, 2, 4}}) {
        DensityMatrix rho = reduced_density(zero, keep);
        CHECK(std::abs(rho.mat(0, 0) - 1.0) < 1e-12);
        CHECK(std::abs(von_neumann_entropy(rho)) < 1e-12);
    }
}

TEST_CASE("complementary reductions of a random pure state share a spectrum") {
    std::mt19937 rng(1234);
    PureState s = random_state(bath_register(6), rng);
    DensityMatrix a = reduced_density(s, {0, 2});
    DensityMatrix b = reduced_density(s, {1, 3, 4, 5});
    Eigen::SelfAdjointEigenSolver<Matrix> ea(a.mat, Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<Matrix> eb(b.mat, Eigen::EigenvaluesOnly);
    // the 4 eigenvalues of the small side match the top of the large side
    Eigen::VectorXd va = ea.eigenvalues();
    Eigen::VectorXd vb = eb.eigenvalues().tail(4);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(va[i] - vb[i]) < 1e-10);
}

TEST_CASE("reduced density agrees with the brute-force enumeration") {
    std::mt19937 rng(99);
    PureState s = random_state(system_register(5), rng);
    for (const auto& keep : {std::vector<int>{0}, {0, 3}, {1, 2, 4}, {0, 1, 2, 3, 4, 5}}) {
        DensityMatrix fast = reduced_density(s, keep);
        DensityMatrix slow = oracles::brute_force_reduced(s, keep);
        CHECK((fast.mat - slow.mat).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("reduced density rejects bad keep sets") {
    PureState s = PureState::basis(bath_register(3), 0);
    CHECK_THROWS_AS(reduced_density(s, {}), std::invalid_argument);
    CHECK_THROWS_AS(reduced_density(s, {3}), std::invalid_argument);
    CHECK_THROWS_AS(reduced_density(s, {0, 0}), std::invalid_argument);
}

TEST_CASE("von Neumann entropy reference values") {
    DensityMatrix mixed{Matrix::Zero(2, 2), {0}};
    mixed.mat(0, 0) = 0.5;
    mixed.mat(1, 1) = 0.5;
    CHECK(std::abs(von_neumann_entropy(mixed) - 1.0) < 1e-12);

    DensityMatrix pure{Matrix::Zero(2, 2), {0}};
    pure.mat(0, 0) = 1.0;
    CHECK(von_neumann_entropy(pure) == 0.0);

    DensityMatrix skewed{Matrix::Zero(2, 2), {0}};
    skewed.mat(0, 0) = 0.75;
    skewed.mat(1, 1) = 0.25;
    const double expected = -(0.75 * std::log2(0.75) + 0.25 * std::log2(0.25));
    CHECK(std::abs(von_neumann_entropy(skewed) - expected) < 1e-12);
    CHECK(std::abs(expected - 0.811278) < 1e-6);

    DensityMatrix bad{Matrix::Zero(2, 2), {0}};
    bad.mat(0, 1) = 1.0;
    CHECK_THROWS_AS(von_neumann_entropy(bad), std::invalid_argument);
}

TEST_CASE("entropy of complementary bipartitions matches for pure states") {
    std::mt19937 rng(2026);
    for (int rep = 0; rep < 30; ++rep) {
        const int total = 3 + static_cast<int>(rng() % 4);  // 3..6 qubits
        PureState s = random_state(bath_register(total), rng);
        std::vector<int> keep, comp;
        for (int q = 0; q < total; ++q) (rng() % 2 ? keep : comp).push_back(q);
        if (keep.empty() || comp.empty()) continue;
        const double ha = von_neumann_entropy(reduced_density(s, keep));
        const double hb = von_neumann_entropy(reduced_density(s, comp));
        CHECK(std::abs(ha - hb) < 1e-9);
    }
}

TEST_CASE("reductions preserve trace and positivity") {
    std::mt19937 rng(31);
    for (int rep = 0; rep < 20; ++rep) {
        PureState s = random_state(bath_register(6), rng);
        std::vector<int> keep;
        for (int q = 0; q < 6; ++q)
            if (rng() % 2) keep.push_back(q);
        if (keep.empty()) keep.push_back(0);
        reduced_density(s, keep).require_valid(1e-10, 1e-10, 1e-10);
    }
}
