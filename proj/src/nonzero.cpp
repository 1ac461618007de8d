#include "stratlab/nonzero.hpp"

#include "stratlab/errors.hpp"
#include "stratlab/ode.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stratlab {

namespace {

using Vec8 = ode::Vec<8>;

Vec8 pack(const NonzeroModeState& s) {
    return {s.q.real(), s.q.imag(), s.theta.real(), s.theta.imag(),
            s.u1.real(), s.u1.imag(), s.u3.real(), s.u3.imag()};
}

NonzeroModeState unpack(const Vec8& v) {
    return {{v[0], v[1]}, {v[2], v[3]}, {v[4], v[5]}, {v[6], v[7]}};
}

void require_nonzero_k(const ModeIndex& mode) {
    if (mode.k == 0) throw DegenerateModeError("nonzero-mode evolution requires k != 0");
}

/// Off-diagonal (coupling) part of the full system; the diagonal part is
/// -nu p for q, u1, u3 and -kappa p for theta.
NonzeroModeState coupling(double t, const NonzeroModeState& s, const ModeIndex& mode, double beta) {
    const double k = double(mode.k);
    const double l = double(mode.l);
    const double p = symbol_p(t, mode);
    const double shear = mode.eta - k * t;
    NonzeroModeState d;
    d.q = beta * mode.kl_norm2() * s.theta;
    d.theta = -beta * s.q / p;
    d.u1 = s.q / p - 2.0 * k * k * s.q / (p * p) + beta * k * shear * s.theta / p;
    d.u3 = -2.0 * k * l * s.q / (p * p) + beta * l * shear * s.theta / p;
    return d;
}

struct FullRhs {
    ModeIndex mode;
    PhysParams params;
    void operator()(double t, const Vec8& y, Vec8& dy) const { dy = pack(rhs_full(t, unpack(y), mode, params)); }
};

/// Lawson stepper: within a step from t0 the unknowns are rescaled by
/// exp(c int_{t0}^{t} p) so that the stiff diffusion is integrated exactly.
class LawsonStepper {
public:
    using state_type = Vec8;

    LawsonStepper(ModeIndex mode, PhysParams params) : mode_(mode), params_(params) {
        rates_ = {params.nu, params.nu, params.kappa, params.kappa,
                  params.nu, params.nu, params.nu, params.nu};
    }

    double attempt(double t0, const Vec8& y, double h, Vec8& y_new, const ode::ControllerConfig& cfg) {
        auto f = [this, t0](double s, const Vec8& v, Vec8& dv) {
            const double integ = integral_p_between(t0, s, mode_);
            Vec8 u;
            std::array<double, 8> grow;
            for (std::size_t i = 0; i < 8; ++i) {
                grow[i] = std::exp(rates_[i] * integ);
                u[i] = v[i] / grow[i];
            }
            const Vec8 c = pack(coupling(s, unpack(u), mode_, params_.beta));
            for (std::size_t i = 0; i < 8; ++i) dv[i] = grow[i] * c[i];
        };
        Vec8 k1, k7, err, v_new;
        f(t0, y, k1);
        ode::dopri_step<8>(f, t0, y, h, k1, v_new, k7, err);
        const double norm = ode::error_norm<8>(err, y, v_new, cfg);
        const double integ = integral_p_between(t0, t0 + h, mode_);
        for (std::size_t i = 0; i < 8; ++i) y_new[i] = v_new[i] * std::exp(-rates_[i] * integ);
        return norm;
    }

    void accept(double) {}

    Vec8 derivative(double t, const Vec8& y) const { return pack(rhs_full(t, unpack(y), mode_, params_)); }

private:
    ModeIndex mode_;
    PhysParams params_;
    std::array<double, 8> rates_{};
};

std::vector<double> sample_times(double t_end, double dt) {
    std::vector<double> times;
    const auto n = static_cast<std::size_t>(std::floor(t_end / dt + 1e-9));
    times.reserve(n + 2);
    for (std::size_t i = 0; i <= n; ++i) times.push_back(double(i) * dt);
    if (t_end - times.back() > 1e-12 * std::max(1.0, t_end)) times.push_back(t_end);
    return times;
}

double divergence_residual(double t, const NonzeroModeState& s, const ModeIndex& mode) {
    const cplx u2 = u2_from_q(s.q, t, mode);
    return std::abs(double(mode.k) * s.u1 + (mode.eta - double(mode.k) * t) * u2 + double(mode.l) * s.u3);
}

template <class Driver>
void run_samples(Driver& driver, Trajectory& traj, Vec8 y) {
    double t = 0.0;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        driver.advance(t, y, traj.times[i]);
        traj.states.push_back(unpack(y));
    }
    traj.steps_accepted = driver.stats().accepted;
    traj.steps_rejected = driver.stats().rejected;
}

} // namespace

void validate(const IntegratorConfig& cfg) {
    if (!(cfg.rel_tol > 0.0) || !(cfg.abs_tol > 0.0)) throw std::invalid_argument("tolerances must be > 0");
    if (!(cfg.max_step > 0.0)) throw std::invalid_argument("max_step must be > 0");
    if (!(cfg.sample_dt > 0.0)) throw std::invalid_argument("sample_dt must be > 0");
    if (cfg.t_end && !(*cfg.t_end >= cfg.sample_dt)) throw std::invalid_argument("sample_dt must be <= t_end");
}

double default_t_end(const ModeIndex& mode, const PhysParams& params) {
    double rate = std::min(params.nu, params.kappa);
    if (theorem1_applicable(params)) rate = rate_constants(params).lambda;
    const double k2 = std::max(1.0, double(mode.k) * double(mode.k));
    return 3.0 * std::cbrt(12.0 / (rate * k2));
}

std::pair<cplx, cplx> rhs_qtheta(double t, cplx q, cplx theta, const ModeIndex& mode, const PhysParams& params) {
    const double p = symbol_p(t, mode);
    return {params.beta * mode.kl_norm2() * theta - params.nu * p * q,
            -params.beta * q / p - params.kappa * p * theta};
}

std::pair<cplx, cplx> rhs_u1u3(double t, const NonzeroModeState& state, const ModeIndex& mode,
                               const PhysParams& params) {
    const double p = symbol_p(t, mode);
    const NonzeroModeState c = coupling(t, state, mode, params.beta);
    return {c.u1 - params.nu * p * state.u1, c.u3 - params.nu * p * state.u3};
}

NonzeroModeState rhs_full(double t, const NonzeroModeState& state, const ModeIndex& mode, const PhysParams& params) {
    const double p = symbol_p(t, mode);
    NonzeroModeState d = coupling(t, state, mode, params.beta);
    d.q -= params.nu * p * state.q;
    d.theta -= params.kappa * p * state.theta;
    d.u1 -= params.nu * p * state.u1;
    d.u3 -= params.nu * p * state.u3;
    return d;
}

SymmetricState rhs_symmetric(double t, const SymmetricState& s, const ModeIndex& mode, const PhysParams& params) {
    require_nonzero_k(mode);
    const double p = symbol_p(t, mode);
    const double quarter = 0.25 * symbol_p_prime(t, mode) / p;
    const double coupling = params.beta * mode.kl_norm() / std::sqrt(p);
    return {-quarter * s.g + coupling * s.gamma - params.nu * p * s.g,
            quarter * s.gamma - coupling * s.g - params.kappa * p * s.gamma};
}

Trajectory integrate_mode(const NonzeroModeState& initial, const ModeIndex& mode, const PhysParams& params,
                          const IntegratorConfig& cfg) {
    require_nonzero_k(mode);
    validate(cfg);
    const double t_end = cfg.t_end.value_or(default_t_end(mode, params));
    if (cfg.sample_dt > t_end) throw std::invalid_argument("sample_dt must be <= t_end");

    Trajectory traj;
    traj.mode = mode;
    traj.times = sample_times(t_end, cfg.sample_dt);
    traj.states.reserve(traj.times.size());

    // The system is linear, so the absolute tolerance is taken relative to
    // the size of the data; tiny quadrature-tail nodes then get the same
    // relative accuracy as the bulk.
    const Vec8 y0 = pack(initial);
    double scale = 0.0;
    for (double v : y0) scale = std::max(scale, std::abs(v));
    ode::ControllerConfig ctl;
    ctl.rel_tol = cfg.rel_tol;
    ctl.abs_tol = cfg.abs_tol * (scale > 0.0 ? scale : 1.0);
    ctl.max_step = cfg.max_step;

    if (cfg.method == IntegratorMethod::dormand_prince) {
        ode::AdaptiveDriver driver(ode::DormandPrinceStepper<8, FullRhs>(FullRhs{mode, params}), ctl);
        run_samples(driver, traj, y0);
    } else {
        ode::AdaptiveDriver driver(LawsonStepper(mode, params), ctl);
        run_samples(driver, traj, y0);
    }

    const bool with_energy = params.beta > 0.5;
    const bool with_envelopes = theorem1_applicable(params);
    RateConstants rates;
    if (with_envelopes) rates = rate_constants(params);

    const SymmetricState s0 = to_symmetric(initial, 0.0, mode);
    const double init_norm2 = std::norm(s0.g) + std::norm(s0.gamma);
    const double sym_init_norm = std::sqrt(init_norm2);

    traj.diagnostics.reserve(traj.times.size());
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const double t = traj.times[i];
        const SymmetricState s = to_symmetric(traj.states[i], t, mode);
        SampleDiagnostics d;
        d.sym_norm2 = std::norm(s.g) + std::norm(s.gamma);
        d.divergence_residual = divergence_residual(t, traj.states[i], mode);
        if (with_energy) d.energy = energy(t, s, mode, params);
        if (with_envelopes) {
            d.envelope_sym = envelope_symmetric(t, mode, rates, init_norm2);
            d.envelope_sym_sharp = envelope_symmetric_sharp(t, mode, rates, init_norm2);
            d.envelope_u1 = envelope_u1u3(t, mode, rates, std::abs(initial.u1), sym_init_norm);
            d.envelope_u3 = envelope_u1u3(t, mode, rates, std::abs(initial.u3), sym_init_norm);
        }
        traj.diagnostics.push_back(d);
    }
    return traj;
}

double energy(double t, const SymmetricState& s, const ModeIndex& mode, const PhysParams& params) {
    require_nonzero_k(mode);
    if (!(params.beta > 0.0)) throw ParameterGateError("energy functional requires beta > 0");
    const double r = symbol_ratio(t, mode);
    const double cross = (s.g * std::conj(s.gamma)).real();
    return 0.5 * (std::norm(s.g) + std::norm(s.gamma) - r * cross / (2.0 * params.beta));
}

double energy_rate(double t, const SymmetricState& s, const ModeIndex& mode, const PhysParams& params) {
    require_nonzero_k(mode);
    if (!(params.beta > 0.0)) throw ParameterGateError("energy functional requires beta > 0");
    const double p = symbol_p(t, mode);
    const double r = symbol_ratio(t, mode);
    const double dr = symbol_ratio_derivative(t, mode);
    const double cross = (s.g * std::conj(s.gamma)).real();
    const double inv4b = 1.0 / (4.0 * params.beta);
    return -inv4b * dr * cross - params.nu * p * std::norm(s.g) - params.kappa * p * std::norm(s.gamma) +
           (params.nu + params.kappa) * inv4b * r * p * cross;
}

double check_energy_identity(const Trajectory& traj, const ModeIndex& mode, const PhysParams& params) {
    const std::size_t n = traj.times.size();
    if (n < 3) throw InsufficientSamplingError("energy identity needs at least 3 samples");
    std::vector<double> e(n);
    std::vector<SymmetricState> s(n);
    for (std::size_t i = 0; i < n; ++i) {
        s[i] = to_symmetric(traj.states[i], traj.times[i], mode);
        e[i] = energy(traj.times[i], s[i], mode, params);
    }
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        // Three-point derivative, exact for quadratics on uneven spacing.
        const double hm = traj.times[i] - traj.times[i - 1];
        const double hp = traj.times[i + 1] - traj.times[i];
        const double de = (hm * hm * (e[i + 1] - e[i]) + hp * hp * (e[i] - e[i - 1])) / (hm * hp * (hm + hp));
        worst = std::max(worst, std::abs(de - energy_rate(traj.times[i], s[i], mode, params)));
    }
    return worst;
}

double envelope_symmetric(double t, const ModeIndex& mode, const RateConstants& rates, double init_norm2) {
    const double k2 = double(mode.k) * double(mode.k);
    return rates.c_beta * rates.c_beta * std::exp(-rates.lambda * k2 * t * t * t / 12.0) * init_norm2;
}

double envelope_symmetric_sharp(double t, const ModeIndex& mode, const RateConstants& rates, double init_norm2) {
    const double rate = 4.0 * rates.beta / (2.0 * rates.beta + 1.0) * rates.lambda;
    return rates.c_beta * rates.c_beta * std::exp(-rate * integral_p(t, mode)) * init_norm2;
}

double envelope_u1u3(double t, const ModeIndex& mode, const RateConstants& rates, double u_init,
                     double sym_init_norm) {
    const double k2 = double(mode.k) * double(mode.k);
    const double weight = std::pow(mode.kl_norm2() / (k2 * k2 * k2), 0.25);
    const double forced = 6.0 * rates.c_beta * (3.0 + rates.beta) * weight * sym_init_norm;
    return std::exp(-rates.lambda * k2 * t * t * t / 24.0) * (u_init + forced);
}

EnvelopeReport check_envelopes(const Trajectory& traj) {
    if (traj.diagnostics.empty() || !traj.diagnostics.front().envelope_sym) {
        throw ParameterGateError("trajectory carries no envelopes (parameters outside the decay regime)");
    }
    const SampleDiagnostics& d0 = traj.diagnostics.front();
    const NonzeroModeState& x0 = traj.states.front();
    const double sym_scale = std::max(d0.sym_norm2, 1e-300);
    const double u_scale = std::max(std::abs(x0.u1) + std::abs(x0.u3) + std::sqrt(d0.sym_norm2), 1e-300);

    EnvelopeReport rep;
    rep.sym = rep.sym_sharp = rep.u1 = rep.u3 = rep.ordering = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const SampleDiagnostics& d = traj.diagnostics[i];
        const NonzeroModeState& x = traj.states[i];
        rep.sym = std::max(rep.sym, (d.sym_norm2 - *d.envelope_sym) / sym_scale);
        rep.sym_sharp = std::max(rep.sym_sharp, (d.sym_norm2 - *d.envelope_sym_sharp) / sym_scale);
        rep.ordering = std::max(rep.ordering, (*d.envelope_sym_sharp - *d.envelope_sym) / sym_scale);
        rep.u1 = std::max(rep.u1, (std::abs(x.u1) - *d.envelope_u1) / u_scale);
        rep.u3 = std::max(rep.u3, (std::abs(x.u3) - *d.envelope_u3) / u_scale);
    }
    return rep;
}

double divergence_drift(const Trajectory& traj) {
    if (traj.states.empty()) return 0.0;
    const ModeIndex& m = traj.mode;
    const NonzeroModeState& x0 = traj.states.front();
    const double scale = std::max({std::abs(double(m.k) * x0.u1), std::abs(m.eta * u2_from_q(x0.q, 0.0, m)),
                                   std::abs(double(m.l) * x0.u3)});
    double worst = 0.0;
    for (const auto& d : traj.diagnostics) worst = std::max(worst, d.divergence_residual);
    return scale > 0.0 ? worst / scale : worst;
}

} // namespace stratlab
