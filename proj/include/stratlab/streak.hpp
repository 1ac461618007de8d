#pragma once

// Streak (k = 0) modes: closed-form propagation through the 2x2 kernels,
// the homogeneous lift-up solution and the uniform-in-time bounds.

#include "stratlab/symbols.hpp"
#include "stratlab/symmetrization.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace stratlab {

/// Amplitudes at (eta, l) of the x-averaged velocity and temperature.
struct StreakState {
    cplx u1{};
    cplx u2{};
    cplx u3{};
    cplx theta{};
};

/// Rescaled unknowns (f0, h0, g0, gamma0); defined for l != 0, beta > 0.
struct StreakScaled {
    cplx f0{};
    cplx h0{};
    cplx g0{};
    cplx gamma0{};
};

/// a = |nu - kappa| |eta,l|^2 / 2, b = beta |l| / |eta,l|, c^2 = a^2 - b^2.
struct KernelParams {
    double a = 0.0;
    double b = 0.0;
    double c_squared = 0.0;
};

struct Mat2 {
    double m11 = 0.0, m12 = 0.0;
    double m21 = 0.0, m22 = 0.0;

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    double det() const { return m11 * m22 - m12 * m21; }
    Mat2 operator*(const Mat2& o) const {
        return {m11 * o.m11 + m12 * o.m21, m11 * o.m12 + m12 * o.m22,
                m21 * o.m11 + m22 * o.m21, m21 * o.m12 + m22 * o.m22};
    }
};

KernelParams kernel_params(const PhysParams& params, double eta, std::int64_t l);

/// sinh(ct)/c for c^2 > 0, sin(st)/s for c^2 = -s^2 < 0, a Taylor series
/// when |c^2| t^2 < 1e-4. Continuous across c^2 = 0.
double sinhc_stable(double c_squared, double t);

/// cosh(ct) / cos(st) counterpart of sinhc_stable; d/dt coshc = c^2 sinhc.
double coshc_stable(double c_squared, double t);

/// exp(-decay t) sinhc_stable(c^2, t) without overflow for large t (decay >= c).
double damped_sinhc(double c_squared, double decay, double t);

/// exp(-decay t) coshc_stable(c^2, t) without overflow for large t (decay >= c).
double damped_coshc(double c_squared, double decay, double t);

/// exp(M t) for the (g0, gamma0) block
///   M = [[-nu |eta,l|^2, -b], [b, -kappa |eta,l|^2]].
/// Throws DegenerateModeError for l = 0.
Mat2 exp_M(double t, const KernelParams& kp, const PhysParams& params, double eta, std::int64_t l);

/// (N - M)^{-1} (exp(N t) - exp(M t)) with N = -nu |eta,l|^2 I; has the form
/// [[m11, m12], [-m12, m22]] and vanishes at t = 0.
Mat2 coupling_block(double t, const KernelParams& kp, const PhysParams& params, double eta, std::int64_t l);

StreakScaled to_scaled(const StreakState& s, const PhysParams& params, double eta, std::int64_t l);
StreakState from_scaled(const StreakScaled& s, const PhysParams& params, double eta, std::int64_t l);

/// Exact solution of the streak system at time t. For l = 0 the wall-normal
/// velocity is zero by incompressibility and is returned as 0; the other
/// components decay as heat modes.
StreakState propagate_streak(const StreakState& initial, double t, const PhysParams& params, double eta,
                             std::int64_t l);

/// Unstratified (beta = 0) solution: u1 grows like -t u2(0) under heat decay;
/// theta decays at rate kappa |eta,l|^2. params.beta is ignored.
StreakState liftup_baseline(const StreakState& initial, double t, const PhysParams& params, double eta,
                            std::int64_t l);

struct LiftupPeak {
    double time = 0.0;
    double value = 0.0;
};

/// Closed-form maximiser of |u1(0) - t u2(0)| exp(-nu |eta,l|^2 t) over t >= 0.
LiftupPeak liftup_peak(const StreakState& initial, const PhysParams& params, double eta, std::int64_t l);

/// Right-hand side of the streak system in original variables (any beta >= 0).
StreakState streak_rhs(const StreakState& s, const PhysParams& params, double eta, std::int64_t l);

/// Adaptive Runge-Kutta solution of streak_rhs sampled at increasing times.
/// Independent of the closed-form kernels; used as a verification oracle.
std::vector<StreakState> integrate_streak_numerically(const StreakState& initial, std::span<const double> times,
                                                      const PhysParams& params, double eta, std::int64_t l,
                                                      double rel_tol = 1e-12, double abs_tol = 1e-14);

/// Largest positive excess of exp(-a t) coshc over 2 and of exp(-a t) sinhc
/// over 2/max{a, b} across the sample times.
double hyperbolic_bounds_check(const KernelParams& kp, std::span<const double> t_samples);

/// Right-hand-side coefficient combinations of the pointwise streak bounds,
/// one per component:
///   u1:    |u1| + |eta,l|^4/(beta l^2) |u2| + (|u2| + |theta|)/beta
///   u2:    |u2| + |l|/|eta,l| |theta|
///   u3:    |u3| + |eta|/|l| |u2| + |eta|/|eta,l| |theta|
///   theta: |eta,l|/|l| |u2| + |theta|
struct StreakBound {
    double u1 = 0.0;
    double u2 = 0.0;
    double u3 = 0.0;
    double theta = 0.0;
};

StreakBound streak_pointwise_bound(const StreakState& initial, const PhysParams& params, double eta,
                                   std::int64_t l);

/// Per component, sup over the samples of |component(t)| exp(min{nu,kappa} |eta,l|^2 t)
/// divided by the matching streak_pointwise_bound coefficient (0 when both vanish).
StreakBound fitted_streak_constants(const StreakState& initial, const PhysParams& params, double eta,
                                    std::int64_t l, std::span<const double> times);

} // namespace stratlab
