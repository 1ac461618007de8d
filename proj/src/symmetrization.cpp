#include "stratlab/symmetrization.hpp"

#include "stratlab/errors.hpp"

#include <cmath>

namespace stratlab {

namespace {

void require_nonzero_k(const ModeIndex& mode) {
    if (mode.k == 0) {
        throw DegenerateModeError("symmetric variables are defined only for k != 0");
    }
}

} // namespace

double symmetric_weight(double t, const ModeIndex& mode) {
    const double p = symbol_p(t, mode);
    return std::sqrt(mode.kl_norm()) * std::exp(0.25 * std::log(p));
}

SymmetricState to_symmetric(const NonzeroModeState& state, double t, const ModeIndex& mode) {
    require_nonzero_k(mode);
    const double w = symmetric_weight(t, mode);
    return {state.q / w, state.theta * w};
}

NonzeroModeState from_symmetric(const SymmetricState& state, double t, const ModeIndex& mode) {
    require_nonzero_k(mode);
    const double w = symmetric_weight(t, mode);
    NonzeroModeState out;
    out.q = state.g * w;
    out.theta = state.gamma / w;
    return out;
}

cplx u2_from_q(cplx q, double t, const ModeIndex& mode) {
    return -q / symbol_p(t, mode);
}

cplx q_from_u2(cplx u2, double t, const ModeIndex& mode) {
    return -symbol_p(t, mode) * u2;
}

} // namespace stratlab
