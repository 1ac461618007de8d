#pragma once

#include "stratlab/symbols.hpp"

#include <complex>

namespace stratlab {

using cplx = std::complex<double>;

/// Sheared-frame amplitudes of a k != 0 mode. q is the amplitude of the
/// Laplacian of u2, so the wall-normal velocity is recovered as -q/p.
struct NonzeroModeState {
    cplx q{};
    cplx theta{};
    cplx u1{};
    cplx u3{};
};

/// Symmetric unknowns in which the buoyancy coupling is antisymmetric.
struct SymmetricState {
    cplx g{};
    cplx gamma{};
};

/// |k,l|^{1/2} p^{1/4}; the factor dividing q and multiplying theta.
double symmetric_weight(double t, const ModeIndex& mode);

SymmetricState to_symmetric(const NonzeroModeState& state, double t, const ModeIndex& mode);

/// Inverse of to_symmetric. Returns the pair (q, theta) in a state with
/// u1 = u3 = 0.
NonzeroModeState from_symmetric(const SymmetricState& state, double t, const ModeIndex& mode);

cplx u2_from_q(cplx q, double t, const ModeIndex& mode);

/// Inverse of u2_from_q: q = -p u2.
cplx q_from_u2(cplx u2, double t, const ModeIndex& mode);

} // namespace stratlab
