// Shared helpers for the unit tests: seeded random states and small fixtures.
#pragma once

#include <random>

#include "spinbath/spin_core.hpp"

namespace testsup {

using spinbath::cdouble;
using spinbath::PureState;
using spinbath::RegisterLayout;

inline PureState random_state(RegisterLayout layout, std::mt19937& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    spinbath::Vector v(static_cast<Eigen::Index>(layout.dim()));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = cdouble(gauss(rng), gauss(rng));
    v /= v.norm();
    return PureState(layout, std::move(v));
}

// alpha |0>|00..0> + beta |1>|11..1> on a system register: branch records are
// orthonormal site by site.
inline PureState ghz_state(int n_bath, cdouble alpha, cdouble beta) {
    const RegisterLayout layout = spinbath::system_register(n_bath);
    PureState s = PureState::zero(layout);
    s.amps[0] = alpha;
    s.amps[static_cast<Eigen::Index>(layout.dim() - 1)] = beta;
    return s;
}

}  // namespace testsup
