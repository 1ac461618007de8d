#pragma once

// Dormand-Prince 5(4) with FSAL and a PI step-size controller, for small
// fixed-size real systems. The controller is split from the stepper so an
// integrating-factor (Lawson) stepper can reuse it.

#include "stratlab/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>

namespace stratlab::ode {

template <std::size_t N>
using Vec = std::array<double, N>;

struct ControllerConfig {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    double max_step = 1.0;
    double min_step = 1e-12;
};

struct StepStats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
};

namespace dopri {
// Butcher tableau (Dormand & Prince 1980).
inline constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
inline constexpr double a21 = 1.0 / 5.0;
inline constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
inline constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
inline constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                        a54 = -212.0 / 729.0;
inline constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                        a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
inline constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                        b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
// b - b_hat (error weights).
inline constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                        e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
} // namespace dopri

/// RMS of err_i / (atol + rtol * max(|y_i|, |y_new_i|)).
template <std::size_t N>
double error_norm(const Vec<N>& err, const Vec<N>& y, const Vec<N>& y_new, const ControllerConfig& cfg) {
    double acc = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double sc = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
        const double r = err[i] / sc;
        acc += r * r;
    }
    return std::sqrt(acc / double(N));
}

/// One Dormand-Prince step of size h from (t, y) given k1 = f(t, y).
/// Writes the 5th-order solution, f(t + h, y_new) and the embedded error.
template <std::size_t N, class F>
void dopri_step(F& f, double t, const Vec<N>& y, double h, const Vec<N>& k1, Vec<N>& y_new, Vec<N>& k7,
                Vec<N>& err) {
    using namespace dopri;
    Vec<N> k2, k3, k4, k5, k6, tmp;
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * a21 * k1[i];
    f(t + c2 * h, tmp, k2);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    f(t + c3 * h, tmp, k3);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    f(t + c4 * h, tmp, k4);
    for (std::size_t i = 0; i < N; ++i)
        tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    f(t + c5 * h, tmp, k5);
    for (std::size_t i = 0; i < N; ++i)
        tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    f(t + h, tmp, k6);
    for (std::size_t i = 0; i < N; ++i)
        y_new[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    f(t + h, y_new, k7);
    for (std::size_t i = 0; i < N; ++i)
        err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
}

/// Plain Dormand-Prince stepper with first-same-as-last reuse.
template <std::size_t N, class F>
class DormandPrinceStepper {
public:
    using state_type = Vec<N>;

    explicit DormandPrinceStepper(F f) : f_(std::move(f)) {}

    double attempt(double t, const state_type& y, double h, state_type& y_new, const ControllerConfig& cfg) {
        if (!have_k1_ || t != t_k1_) {
            f_(t, y, k1_);
            have_k1_ = true;
            t_k1_ = t;
        }
        state_type err;
        dopri_step<N>(f_, t, y, h, k1_, y_new, k7_, err);
        return error_norm<N>(err, y, y_new, cfg);
    }

    void accept(double t_new) {
        k1_ = k7_;
        t_k1_ = t_new;
    }

    /// Derivative at the start of the next step; used for the initial step guess.
    state_type derivative(double t, const state_type& y) {
        state_type d;
        f_(t, y, d);
        return d;
    }

private:
    F f_;
    state_type k1_{}, k7_{};
    bool have_k1_ = false;
    double t_k1_ = std::numeric_limits<double>::quiet_NaN();
};

/// PI-controlled adaptive driver. Keeps its step size between calls to
/// advance so that hitting output times does not shrink the natural step.
template <class Stepper>
class AdaptiveDriver {
public:
    using state_type = typename Stepper::state_type;

    AdaptiveDriver(Stepper stepper, ControllerConfig cfg) : stepper_(std::move(stepper)), cfg_(cfg) {}

    /// Advance (t, y) to exactly t_target.
    void advance(double& t, state_type& y, double t_target) {
        if (t_target <= t) return;
        if (h_ <= 0.0) h_ = initial_step(t, y);
        while (t < t_target) {
            const double remaining = t_target - t;
            double h = std::min(h_, cfg_.max_step);
            bool clamped = false;
            if (h >= remaining) {
                h = remaining;
                clamped = true;
            } else if (h > 0.5 * remaining) {
                // Avoid leaving a sliver step at the end of the interval.
                h = 0.5 * remaining;
            }
            state_type y_new;
            const double err = stepper_.attempt(t, y, h, y_new, cfg_);
            if (!std::isfinite(err)) {
                h_ = 0.25 * h;
                ++stats_.rejected;
                check_underflow(t);
                continue;
            }
            if (err <= 1.0) {
                const double t_new = clamped ? t_target : t + h;
                stepper_.accept(t_new);
                t = t_new;
                y = y_new;
                ++stats_.accepted;
                double fac = safety * std::pow(std::max(err, 1e-10), -alpha) * std::pow(err_old_, beta_pi);
                fac = std::clamp(fac, 0.2, 5.0);
                if (reject_last_) fac = std::min(fac, 1.0);
                const double proposal = h * fac;
                // A clamped step says nothing about the natural step size unless it failed to grow.
                h_ = clamped ? std::max(h_, proposal) : proposal;
                err_old_ = std::max(err, 1e-4);
                reject_last_ = false;
            } else {
                const double fac = std::max(0.2, safety * std::pow(err, -alpha));
                h_ = h * fac;
                ++stats_.rejected;
                reject_last_ = true;
                check_underflow(t);
            }
        }
    }

    const StepStats& stats() const { return stats_; }
    double step_size() const { return h_; }

private:
    static constexpr double safety = 0.9;
    static constexpr double beta_pi = 0.04;
    static constexpr double alpha = 0.2 - 0.75 * beta_pi;

    void check_underflow(double t) const {
        if (h_ < cfg_.min_step) {
            throw StepSizeUnderflow("step size fell below " + std::to_string(cfg_.min_step) + " at t = " +
                                    std::to_string(t));
        }
    }

    double initial_step(double t, const state_type& y) {
        const state_type d = stepper_.derivative(t, y);
        double ny = 0.0, nd = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double sc = cfg_.abs_tol + cfg_.rel_tol * std::abs(y[i]);
            ny += (y[i] / sc) * (y[i] / sc);
            nd += (d[i] / sc) * (d[i] / sc);
        }
        ny = std::sqrt(ny / double(y.size()));
        nd = std::sqrt(nd / double(y.size()));
        const double h = (ny < 1e-5 || nd < 1e-5) ? 1e-6 : 0.01 * ny / nd;
        return std::clamp(h, 1e-6, cfg_.max_step);
    }

    Stepper stepper_;
    ControllerConfig cfg_;
    StepStats stats_;
    double h_ = 0.0;
    double err_old_ = 1e-4;
    bool reject_last_ = false;
};

} // namespace stratlab::ode
