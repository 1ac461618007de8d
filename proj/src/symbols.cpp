#include "stratlab/symbols.hpp"

#include "stratlab/errors.hpp"

#include <algorithm>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <limits>

namespace stratlab {

bool theorem1_applicable(const PhysParams& params) {
    if (!(params.beta > 0.5) || !(params.nu > 0.0) || !(params.kappa > 0.0)) {
        return false;
    }
    const double lo = std::min(params.nu, params.kappa);
    const double hi = std::max(params.nu, params.kappa);
    return hi / lo < 4.0 * params.beta - 1.0;
}

double symbol_p(double t, const ModeIndex& mode) {
    const double shear = mode.eta - double(mode.k) * t;
    return mode.kl_norm2() + shear * shear;
}

double symbol_p_prime(double t, const ModeIndex& mode) {
    return -2.0 * double(mode.k) * (mode.eta - double(mode.k) * t);
}

double symbol_ratio(double t, const ModeIndex& mode) {
    return symbol_p_prime(t, mode) / (mode.kl_norm() * std::sqrt(symbol_p(t, mode)));
}

double symbol_ratio_derivative(double t, const ModeIndex& mode) {
    const double k = double(mode.k);
    const double p = symbol_p(t, mode);
    const double dp = symbol_p_prime(t, mode);
    return (2.0 * k * k - dp * dp / (2.0 * p)) / (mode.kl_norm() * std::sqrt(p));
}

double integral_p(double t, const ModeIndex& mode) {
    const double k = double(mode.k);
    const double mid = mode.eta - 0.5 * k * t;
    return mode.kl_norm2() * t + t * (mid * mid + k * k * t * t / 12.0);
}

double integral_p_between(double t0, double t1, const ModeIndex& mode) {
    // Same closed form, centred on the interval midpoint.
    const double k = double(mode.k);
    const double h = t1 - t0;
    const double mid = mode.eta - k * 0.5 * (t0 + t1);
    return mode.kl_norm2() * h + h * (mid * mid + k * k * h * h / 12.0);
}

double integral_p_power_over_line(const ModeIndex& mode, double power) {
    if (mode.k == 0) {
        throw DegenerateModeError("integral over the line diverges for k = 0");
    }
    if (!(power > 0.5)) {
        throw std::invalid_argument("p^{-power} is integrable only for power > 1/2");
    }
    // Symmetric about the critical time eta/k; integrate one half-line.
    const double k2 = double(mode.k) * double(mode.k);
    const double floor = mode.kl_norm2();
    auto half = [&](double s) { return std::pow(floor + k2 * s * s, -power); };
    boost::math::quadrature::exp_sinh<double> integrator;
    const double tol = std::sqrt(std::numeric_limits<double>::epsilon()) * 1e-4;
    return 2.0 * integrator.integrate(half, 0.0, std::numeric_limits<double>::infinity(), tol);
}

RateConstants rate_constants(const PhysParams& params) {
    if (!(params.beta > 0.5)) {
        throw ParameterGateError("rate constants require beta > 1/2");
    }
    if (!theorem1_applicable(params)) {
        throw ParameterGateError("max{nu,kappa}/min{nu,kappa} must be < 4 beta - 1");
    }
    const double beta = params.beta;
    const double mixed = (params.nu + params.kappa) / (4.0 * beta);
    RateConstants rc;
    rc.beta = beta;
    rc.lambda_nu = params.nu - mixed;
    rc.lambda_kappa = params.kappa - mixed;
    rc.lambda = std::min(rc.lambda_nu, rc.lambda_kappa);
    rc.c_beta = std::sqrt((2.0 * beta + 1.0) / (2.0 * beta - 1.0) * std::exp(1.0 / (2.0 * beta - 1.0)));
    return rc;
}

} // namespace stratlab
