#include "stratlab/streak.hpp"

#include "stratlab/errors.hpp"
#include "stratlab/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace stratlab {

namespace {

constexpr double series_threshold = 1e-4;

void require_streak_mode(double eta, std::int64_t l) {
    if (l == 0 && eta == 0.0) throw DegenerateModeError("(eta, l) = (0, 0) is the spatial mean");
}

void require_coupled(const PhysParams& params, double eta, std::int64_t l) {
    require_streak_mode(eta, l);
    if (l == 0) throw DegenerateModeError("streak kernels are singular for l = 0");
    if (!(params.beta > 0.0)) throw ParameterGateError("streak kernels require beta > 0");
}

double sinhc_series(double c2, double t) {
    const double x = c2 * t * t;
    return t * (1.0 + x / 6.0 + x * x / 120.0 + x * x * x / 5040.0);
}

double coshc_series(double c2, double t) {
    const double x = c2 * t * t;
    return 1.0 + x / 2.0 + x * x / 24.0 + x * x * x / 720.0;
}

using Vec8 = ode::Vec<8>;

Vec8 pack(const StreakState& s) {
    return {s.u1.real(), s.u1.imag(), s.u2.real(), s.u2.imag(),
            s.u3.real(), s.u3.imag(), s.theta.real(), s.theta.imag()};
}

StreakState unpack(const Vec8& v) {
    return {{v[0], v[1]}, {v[2], v[3]}, {v[4], v[5]}, {v[6], v[7]}};
}

} // namespace

KernelParams kernel_params(const PhysParams& params, double eta, std::int64_t l) {
    require_coupled(params, eta, l);
    const double n2 = eta * eta + double(l) * double(l);
    KernelParams kp;
    kp.a = std::abs(params.nu - params.kappa) * n2 / 2.0;
    kp.b = params.beta * std::abs(double(l)) / std::sqrt(n2);
    kp.c_squared = (kp.a - kp.b) * (kp.a + kp.b);
    return kp;
}

double sinhc_stable(double c_squared, double t) {
    if (std::abs(c_squared) * t * t < series_threshold) return sinhc_series(c_squared, t);
    if (c_squared > 0.0) {
        const double c = std::sqrt(c_squared);
        return std::sinh(c * t) / c;
    }
    const double s = std::sqrt(-c_squared);
    return std::sin(s * t) / s;
}

double coshc_stable(double c_squared, double t) {
    if (std::abs(c_squared) * t * t < series_threshold) return coshc_series(c_squared, t);
    if (c_squared > 0.0) return std::cosh(std::sqrt(c_squared) * t);
    return std::cos(std::sqrt(-c_squared) * t);
}

double damped_sinhc(double c_squared, double decay, double t) {
    if (std::abs(c_squared) * t * t < series_threshold) return std::exp(-decay * t) * sinhc_series(c_squared, t);
    if (c_squared > 0.0) {
        const double c = std::sqrt(c_squared);
        return std::exp((c - decay) * t) * (-std::expm1(-2.0 * c * t)) / (2.0 * c);
    }
    const double s = std::sqrt(-c_squared);
    return std::exp(-decay * t) * std::sin(s * t) / s;
}

double damped_coshc(double c_squared, double decay, double t) {
    if (std::abs(c_squared) * t * t < series_threshold) return std::exp(-decay * t) * coshc_series(c_squared, t);
    if (c_squared > 0.0) {
        const double c = std::sqrt(c_squared);
        return std::exp((c - decay) * t) * 0.5 * (1.0 + std::exp(-2.0 * c * t));
    }
    return std::exp(-decay * t) * std::cos(std::sqrt(-c_squared) * t);
}

Mat2 exp_M(double t, const KernelParams& kp, const PhysParams& params, double eta, std::int64_t l) {
    require_coupled(params, eta, l);
    const double n2 = eta * eta + double(l) * double(l);
    const double mean_decay = 0.5 * (params.nu + params.kappa) * n2;
    const double half_split = 0.5 * (params.nu - params.kappa) * n2;
    const double dc = damped_coshc(kp.c_squared, mean_decay, t);
    const double ds = damped_sinhc(kp.c_squared, mean_decay, t);
    return {dc - half_split * ds, -kp.b * ds, kp.b * ds, dc + half_split * ds};
}

Mat2 coupling_block(double t, const KernelParams& kp, const PhysParams& params, double eta, std::int64_t l) {
    require_coupled(params, eta, l);
    const double n2 = eta * eta + double(l) * double(l);
    const double mean_decay = 0.5 * (params.nu + params.kappa) * n2;
    const double split = (params.nu - params.kappa) * n2;
    const double dc = damped_coshc(kp.c_squared, mean_decay, t);
    const double ds = damped_sinhc(kp.c_squared, mean_decay, t);
    const double phi_minus = dc - 0.5 * split * ds;
    const double heat = std::exp(-params.nu * n2 * t);
    const double m12 = (phi_minus - heat) / kp.b;
    const double m11 = split / (kp.b * kp.b) * (phi_minus - heat) + ds;
    return {m11, m12, -m12, ds};
}

StreakScaled to_scaled(const StreakState& s, const PhysParams& params, double eta, std::int64_t l) {
    require_coupled(params, eta, l);
    const double n = std::sqrt(eta * eta + double(l) * double(l));
    const double al = std::abs(double(l));
    const double w = std::pow(n, 1.5) / std::sqrt(al);
    StreakScaled out;
    out.f0 = -w * s.u1;
    out.g0 = w * s.u2;
    out.gamma0 = std::sqrt(n * al) * s.theta;
    out.h0 = std::pow(n, 2.5) * std::sqrt(al) / (params.beta * double(l)) * s.u3;
    return out;
}

StreakState from_scaled(const StreakScaled& s, const PhysParams& params, double eta, std::int64_t l) {
    require_coupled(params, eta, l);
    const double n = std::sqrt(eta * eta + double(l) * double(l));
    const double al = std::abs(double(l));
    const double w = std::pow(n, 1.5) / std::sqrt(al);
    StreakState out;
    out.u1 = -s.f0 / w;
    out.u2 = s.g0 / w;
    out.theta = s.gamma0 / std::sqrt(n * al);
    out.u3 = s.h0 * (params.beta * double(l)) / (std::pow(n, 2.5) * std::sqrt(al));
    return out;
}

StreakState propagate_streak(const StreakState& initial, double t, const PhysParams& params, double eta,
                             std::int64_t l) {
    require_streak_mode(eta, l);
    const double n2 = eta * eta + double(l) * double(l);
    if (l == 0) {
        const double heat_nu = std::exp(-params.nu * n2 * t);
        return {heat_nu * initial.u1, cplx{}, heat_nu * initial.u3, std::exp(-params.kappa * n2 * t) * initial.theta};
    }
    const KernelParams kp = kernel_params(params, eta, l);
    const StreakScaled x0 = to_scaled(initial, params, eta, l);
    const Mat2 em = exp_M(t, kp, params, eta, l);
    const Mat2 cb = coupling_block(t, kp, params, eta, l);
    const double heat = std::exp(-params.nu * n2 * t);
    StreakScaled xt;
    // S = diag(1, eta) multiplies the coupling block rows.
    xt.f0 = heat * x0.f0 + cb.m11 * x0.g0 + cb.m12 * x0.gamma0;
    xt.h0 = heat * x0.h0 + eta * (cb.m21 * x0.g0 + cb.m22 * x0.gamma0);
    xt.g0 = em.m11 * x0.g0 + em.m12 * x0.gamma0;
    xt.gamma0 = em.m21 * x0.g0 + em.m22 * x0.gamma0;
    return from_scaled(xt, params, eta, l);
}

StreakState liftup_baseline(const StreakState& initial, double t, const PhysParams& params, double eta,
                            std::int64_t l) {
    require_streak_mode(eta, l);
    const double n2 = eta * eta + double(l) * double(l);
    const double heat_nu = std::exp(-params.nu * n2 * t);
    return {heat_nu * (initial.u1 - t * initial.u2), heat_nu * initial.u2, heat_nu * initial.u3,
            std::exp(-params.kappa * n2 * t) * initial.theta};
}

LiftupPeak liftup_peak(const StreakState& initial, const PhysParams& params, double eta, std::int64_t l) {
    require_streak_mode(eta, l);
    const double d = params.nu * (eta * eta + double(l) * double(l));
    const double a2 = std::norm(initial.u1);
    const double b2 = std::norm(initial.u2);
    const double re = (initial.u1 * std::conj(initial.u2)).real();
    auto value = [&](double t) { return std::sqrt(std::max(0.0, a2 - 2.0 * t * re + t * t * b2)) * std::exp(-d * t); };

    LiftupPeak best{0.0, value(0.0)};
    auto consider = [&](double t) {
        if (t > 0.0 && std::isfinite(t)) {
            const double v = value(t);
            if (v > best.value) best = {t, v};
        }
    };
    // Stationary points of exp(-2dt)(a2 - 2 t re + t^2 b2):
    //   d b2 t^2 - (b2 + 2 d re) t + (re + d a2) = 0.
    const double qa = d * b2;
    const double qb = -(b2 + 2.0 * d * re);
    const double qc = re + d * a2;
    if (qa != 0.0) {
        const double disc = qb * qb - 4.0 * qa * qc;
        if (disc >= 0.0) {
            const double root = std::sqrt(disc);
            const double q = -0.5 * (qb + std::copysign(root, qb));
            consider(q / qa);
            if (q != 0.0) consider(qc / q);
        }
    } else if (qb != 0.0) {
        consider(-qc / qb);
    }
    return best;
}

StreakState streak_rhs(const StreakState& s, const PhysParams& params, double eta, std::int64_t l) {
    require_streak_mode(eta, l);
    const double ld = double(l);
    const double n2 = eta * eta + ld * ld;
    StreakState d;
    d.u1 = -s.u2 - params.nu * n2 * s.u1;
    d.u2 = -params.beta * ld * ld / n2 * s.theta - params.nu * n2 * s.u2;
    d.u3 = params.beta * eta * ld / n2 * s.theta - params.nu * n2 * s.u3;
    d.theta = params.beta * s.u2 - params.kappa * n2 * s.theta;
    return d;
}

std::vector<StreakState> integrate_streak_numerically(const StreakState& initial, std::span<const double> times,
                                                      const PhysParams& params, double eta, std::int64_t l,
                                                      double rel_tol, double abs_tol) {
    require_streak_mode(eta, l);
    auto f = [&params, eta, l](double, const Vec8& y, Vec8& dy) { dy = pack(streak_rhs(unpack(y), params, eta, l)); };
    ode::ControllerConfig ctl;
    ctl.rel_tol = rel_tol;
    ctl.abs_tol = abs_tol;
    ctl.max_step = 0.5;
    ode::AdaptiveDriver driver(ode::DormandPrinceStepper<8, decltype(f)>(f), ctl);
    std::vector<StreakState> out;
    out.reserve(times.size());
    double t = 0.0;
    Vec8 y = pack(initial);
    for (double target : times) {
        driver.advance(t, y, target);
        out.push_back(unpack(y));
    }
    return out;
}

double hyperbolic_bounds_check(const KernelParams& kp, std::span<const double> t_samples) {
    const double sinh_bound = 2.0 / std::max(kp.a, kp.b);
    double worst = 0.0;
    for (double t : t_samples) {
        worst = std::max(worst, damped_coshc(kp.c_squared, kp.a, t) - 2.0);
        worst = std::max(worst, damped_sinhc(kp.c_squared, kp.a, t) - sinh_bound);
    }
    return worst;
}

StreakBound streak_pointwise_bound(const StreakState& initial, const PhysParams& params, double eta,
                                   std::int64_t l) {
    require_coupled(params, eta, l);
    const double al = std::abs(double(l));
    const double n2 = eta * eta + al * al;
    const double n = std::sqrt(n2);
    const double u1 = std::abs(initial.u1), u2 = std::abs(initial.u2);
    const double u3 = std::abs(initial.u3), th = std::abs(initial.theta);
    StreakBound b;
    b.u1 = u1 + n2 * n2 / (params.beta * al * al) * u2 + (u2 + th) / params.beta;
    b.u2 = u2 + al / n * th;
    b.u3 = u3 + std::abs(eta) / al * u2 + std::abs(eta) / n * th;
    b.theta = n / al * u2 + th;
    return b;
}

StreakBound fitted_streak_constants(const StreakState& initial, const PhysParams& params, double eta,
                                    std::int64_t l, std::span<const double> times) {
    const StreakBound coef = streak_pointwise_bound(initial, params, eta, l);
    const double rate = std::min(params.nu, params.kappa) * (eta * eta + double(l) * double(l));
    auto ratio = [](double value, double c) { return c > 0.0 ? value / c : (value > 0.0 ? INFINITY : 0.0); };
    StreakBound fit;
    for (double t : times) {
        const StreakState s = propagate_streak(initial, t, params, eta, l);
        const double w = std::exp(rate * t);
        fit.u1 = std::max(fit.u1, ratio(w * std::abs(s.u1), coef.u1));
        fit.u2 = std::max(fit.u2, ratio(w * std::abs(s.u2), coef.u2));
        fit.u3 = std::max(fit.u3, ratio(w * std::abs(s.u3), coef.u3));
        fit.theta = std::max(fit.theta, ratio(w * std::abs(s.theta), coef.theta));
    }
    return fit;
}

} // namespace stratlab
