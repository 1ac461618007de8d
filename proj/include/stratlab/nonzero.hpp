#pragma once

#include "stratlab/symbols.hpp"
#include "stratlab/symmetrization.hpp"

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace stratlab {

enum class IntegratorMethod {
    /// Explicit Dormand-Prince 5(4).
    dormand_prince,
    /// Dormand-Prince applied after factoring out exp(-nu int p), exp(-kappa int p)
    /// over each step (Lawson). Preferred for long runs where nu p dominates.
    integrating_factor,
};

struct IntegratorConfig {
    double rel_tol = 1e-9;
    /// Relative to the largest component of the initial state.
    double abs_tol = 1e-12;
    double max_step = 1.0;
    /// Final time; when unset, default_t_end is used.
    std::optional<double> t_end;
    double sample_dt = 0.05;
    IntegratorMethod method = IntegratorMethod::dormand_prince;
};

/// Throws std::invalid_argument when a tolerance or step is not positive or
/// sample_dt exceeds t_end.
void validate(const IntegratorConfig& cfg);

/// Three enhanced-dissipation e-foldings, 3 (lambda k^2 / 12)^{-1/3}. Falls back
/// to min{nu,kappa} in place of lambda when the rate constants are unavailable.
double default_t_end(const ModeIndex& mode, const PhysParams& params);

struct SampleDiagnostics {
    /// |g|^2 + |gamma|^2.
    double sym_norm2 = 0.0;
    /// Energy functional; only for beta > 1/2.
    std::optional<double> energy;
    /// C_beta^2 exp(-lambda k^2 t^3 / 12) (|g(0)|^2 + |gamma(0)|^2).
    std::optional<double> envelope_sym;
    /// C_beta^2 exp(-4 beta/(2 beta + 1) lambda int_0^t p) (|g(0)|^2 + |gamma(0)|^2).
    std::optional<double> envelope_sym_sharp;
    std::optional<double> envelope_u1;
    std::optional<double> envelope_u3;
    /// |k u1 + (eta - k t) u2 + l u3| with u2 = -q/p.
    double divergence_residual = 0.0;
};

struct Trajectory {
    ModeIndex mode{};
    std::vector<double> times;
    std::vector<NonzeroModeState> states;
    std::vector<SampleDiagnostics> diagnostics;
    std::size_t steps_accepted = 0;
    std::size_t steps_rejected = 0;
};

/// Right-hand side of the (Q, Theta) system in the sheared frame.
std::pair<cplx, cplx> rhs_qtheta(double t, cplx q, cplx theta, const ModeIndex& mode, const PhysParams& params);

/// Right-hand side of the U1/U3 equations. The pressure terms carry the sign
/// that keeps k U1 + (eta - k t) U2 + l U3 = 0 invariant with U2 = -Q/p.
std::pair<cplx, cplx> rhs_u1u3(double t, const NonzeroModeState& state, const ModeIndex& mode,
                               const PhysParams& params);

NonzeroModeState rhs_full(double t, const NonzeroModeState& state, const ModeIndex& mode, const PhysParams& params);

SymmetricState rhs_symmetric(double t, const SymmetricState& s, const ModeIndex& mode, const PhysParams& params);

Trajectory integrate_mode(const NonzeroModeState& initial, const ModeIndex& mode, const PhysParams& params,
                          const IntegratorConfig& cfg);

/// Energy functional
///   E = 1/2 [ |g|^2 + |gamma|^2 - (1/(2 beta)) r Re(g conj(gamma)) ],  r = p'/(|k,l| p^{1/2}).
/// The cross-term sign is the one for which dE/dt is free of p'/p terms
/// under rhs_symmetric. Requires beta > 0.
double energy(double t, const SymmetricState& s, const ModeIndex& mode, const PhysParams& params);

/// dE/dt = -(1/(4 beta)) r' Re(g conj(gamma)) - nu p |g|^2 - kappa p |gamma|^2
///         + ((nu + kappa)/(4 beta)) r p Re(g conj(gamma)).
double energy_rate(double t, const SymmetricState& s, const ModeIndex& mode, const PhysParams& params);

/// Max over interior samples of |centred difference of E - energy_rate|.
double check_energy_identity(const Trajectory& traj, const ModeIndex& mode, const PhysParams& params);

double envelope_symmetric(double t, const ModeIndex& mode, const RateConstants& rates, double init_norm2);

double envelope_symmetric_sharp(double t, const ModeIndex& mode, const RateConstants& rates, double init_norm2);

double envelope_u1u3(double t, const ModeIndex& mode, const RateConstants& rates, double u_init,
                     double sym_init_norm);

/// Largest normalised excess of the trajectory over each envelope; the run
/// passes when every field is <= envelope_slack.
struct EnvelopeReport {
    double sym = 0.0;
    double sym_sharp = 0.0;
    double u1 = 0.0;
    double u3 = 0.0;
    /// max of (sharp - crude) / scale; the sharper envelope must not exceed the crude one.
    double ordering = 0.0;
};

inline constexpr double envelope_slack = 1e-9;

/// Throws ParameterGateError when the trajectory carries no envelopes.
EnvelopeReport check_envelopes(const Trajectory& traj);

/// max_t divergence residual relative to the largest of |k u1|, |eta u2|, |l u3| at t = 0.
double divergence_drift(const Trajectory& traj);

} // namespace stratlab
