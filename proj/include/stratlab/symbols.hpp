#pragma once

#include <cmath>
#include <cstdint>

namespace stratlab {

/// Viscosity, thermal diffusivity and Brunt-Vaisala frequency.
struct PhysParams {
    double nu = 1e-2;
    double kappa = 1e-2;
    double beta = 1.0;
};

/// beta > 1/2 and max{nu,kappa}/min{nu,kappa} < 4 beta - 1. Equality fails.
bool theorem1_applicable(const PhysParams& params);

/// One Fourier mode: integer wavenumbers k (streamwise), l (spanwise) and
/// the continuous vertical frequency eta.
struct ModeIndex {
    std::int64_t k = 1;
    std::int64_t l = 0;
    double eta = 0.0;

    double kl_norm2() const { return double(k) * double(k) + double(l) * double(l); }
    double kl_norm() const { return std::sqrt(kl_norm2()); }
    /// |eta, l|^2, the streak Laplacian symbol.
    double eta_l_norm2() const { return eta * eta + double(l) * double(l); }
    double full_norm2() const { return kl_norm2() + eta * eta; }
    bool is_mean() const { return k == 0 && l == 0 && eta == 0.0; }
};

struct RateConstants {
    double beta = 0.0;
    double lambda_nu = 0.0;
    double lambda_kappa = 0.0;
    double lambda = 0.0;
    double c_beta = 0.0;
};

/// k^2 + (eta - k t)^2 + l^2, the symbol of -Delta in the sheared frame.
double symbol_p(double t, const ModeIndex& mode);

/// d/dt symbol_p = -2k(eta - k t).
double symbol_p_prime(double t, const ModeIndex& mode);

/// p' / (|k,l| p^{1/2}); lies in [-2, 2].
double symbol_ratio(double t, const ModeIndex& mode);

/// Exact time derivative of symbol_ratio. Requires k != 0.
double symbol_ratio_derivative(double t, const ModeIndex& mode);

/// Closed form of the integral of p over [0, t].
double integral_p(double t, const ModeIndex& mode);

/// Integral of p over [t0, t1] without cancellation for t1 close to t0.
double integral_p_between(double t0, double t1, const ModeIndex& mode);

/// Adaptive quadrature of p(t)^{-power} over the whole real line
/// (power > 1/2, k != 0).
double integral_p_power_over_line(const ModeIndex& mode, double power);

/// Decay rates and the energy-equivalence constant. Throws
/// ParameterGateError when theorem1_applicable is false.
RateConstants rate_constants(const PhysParams& params);

} // namespace stratlab
