#include "stratlab/field.hpp"

#include "stratlab/errors.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace stratlab {

namespace {

// Tail depth, in widths, beyond the outermost profile center.
constexpr double tail_widths = 6.0;

bool present(const GaussianProfile& g) { return g.amplitude != cplx{}; }

template <class F>
void for_each_profile(const ModeProfiles& m, F&& f) {
    f(m.u1);
    f(m.u2);
    f(m.u3);
    f(m.theta);
}

GaussianProfile mirrored(const GaussianProfile& g) { return {std::conj(g.amplitude), -g.center, g.width}; }

bool close(cplx a, cplx b) {
    const double diff = std::abs(a - b);
    return diff <= 1e-12 * std::max(std::abs(a), std::abs(b)) || diff < 1e-300;
}

double sum_components(const FieldAmplitudes& a, unsigned components) {
    double acc = 0.0;
    if (components & comp_u1) acc += std::norm(a.u1);
    if (components & comp_u2) acc += std::norm(a.u2);
    if (components & comp_u3) acc += std::norm(a.u3);
    if (components & comp_theta) acc += std::norm(a.theta);
    return acc;
}

std::vector<ModeSample> select(std::span<const ModeSample> samples, bool streaks, bool require_l) {
    std::vector<ModeSample> out;
    for (const auto& s : samples) {
        if (s.is_streak() != streaks) continue;
        if (require_l && s.mode.l == 0) continue;
        out.push_back(s);
    }
    return out;
}

double safe_ratio(double num, double den) {
    if (num == 0.0) return 0.0;
    if (den <= 0.0) return INFINITY;
    return num / den;
}

} // namespace

EtaGrid make_eta_grid(double cutoff, int panels) {
    if (!(cutoff > 0.0) || !std::isfinite(cutoff)) throw std::invalid_argument("grid cutoff must be positive");
    if (panels < 1) throw std::invalid_argument("grid needs at least one panel");
    if (panels % 2 != 0) ++panels;
    using rule = boost::math::quadrature::gauss<double, gauss_points_per_panel>;
    const auto& x = rule::abscissa();
    const auto& w = rule::weights();

    // Build the positive half and mirror it so the nodes are exactly symmetric.
    const int half_panels = panels / 2;
    const double width = cutoff / half_panels;
    std::vector<std::pair<double, double>> right;
    for (int j = 0; j < half_panels; ++j) {
        const double mid = (j + 0.5) * width;
        const double h = 0.5 * width;
        for (std::size_t i = 0; i < x.size(); ++i) {
            right.emplace_back(mid - h * x[i], h * w[i]);
            if (x[i] != 0.0) right.emplace_back(mid + h * x[i], h * w[i]);
        }
    }
    std::sort(right.begin(), right.end());

    EtaGrid grid;
    grid.cutoff = cutoff;
    grid.nodes.reserve(2 * right.size());
    grid.weights.reserve(2 * right.size());
    for (auto it = right.rbegin(); it != right.rend(); ++it) {
        grid.nodes.push_back(-it->first);
        grid.weights.push_back(it->second);
    }
    for (const auto& [node, weight] : right) {
        grid.nodes.push_back(node);
        grid.weights.push_back(weight);
    }
    return grid;
}

cplx GaussianProfile::operator()(double eta) const {
    const double z = (eta - center) / width;
    return amplitude * std::exp(-0.5 * z * z);
}

double GaussianProfile::mass() const { return std::norm(amplitude) * width * std::sqrt(std::numbers::pi); }

double GaussianProfile::tail_mass(double cutoff) const {
    const double upper = std::erfc((cutoff - center) / width);
    const double lower = std::erfc((cutoff + center) / width);
    return 0.5 * mass() * (upper + lower);
}

FieldAmplitudes ModeProfiles::operator()(double eta) const { return {u1(eta), u2(eta), u3(eta), theta(eta)}; }

InitialConditionSpec with_conjugates(const InitialConditionSpec& spec) {
    InitialConditionSpec out = spec;
    for (const auto& m : spec.modes) {
        if (m.k == 0 && m.l == 0) continue;
        const bool listed = std::any_of(spec.modes.begin(), spec.modes.end(),
                                        [&](const ModeProfiles& o) { return o.k == -m.k && o.l == -m.l; });
        if (listed) continue;
        out.modes.push_back({-m.k, -m.l, mirrored(m.u1), mirrored(m.u2), mirrored(m.u3), mirrored(m.theta)});
    }
    return out;
}

EtaGrid default_grid(const InitialConditionSpec& spec) {
    double cutoff = 1.0;
    double narrowest = INFINITY;
    for (const auto& m : spec.modes) {
        for_each_profile(m, [&](const GaussianProfile& g) {
            if (!present(g)) return;
            cutoff = std::max(cutoff, std::abs(g.center) + tail_widths * g.width);
            narrowest = std::min(narrowest, g.width);
        });
    }
    if (!std::isfinite(narrowest)) narrowest = cutoff;
    const int panels = std::max(2, int(std::ceil(2.0 * cutoff / narrowest)));
    return make_eta_grid(cutoff, panels);
}

FieldAmplitudes leray_project(const FieldAmplitudes& u, std::int64_t k, double eta, std::int64_t l) {
    const double kd = double(k), ld = double(l);
    const double n2 = kd * kd + eta * eta + ld * ld;
    if (n2 == 0.0) return u;
    const cplx along = (kd * u.u1 + eta * u.u2 + ld * u.u3) / n2;
    return {u.u1 - along * kd, u.u2 - along * eta, u.u3 - along * ld, u.theta};
}

FieldAmplitudes initial_amplitudes(const ModeSample& s) {
    if (const auto* st = std::get_if<StreakState>(&s.state)) return {st->u1, st->u2, st->u3, st->theta};
    const auto& nz = std::get<NonzeroModeState>(s.state);
    return {nz.u1, u2_from_q(nz.q, 0.0, s.mode), nz.u3, nz.theta};
}

std::vector<ModeSample> build_modes(const InitialConditionSpec& spec, const EtaGrid& grid) {
    std::map<std::pair<std::int64_t, std::int64_t>, const ModeProfiles*> by_mode;
    for (const auto& m : spec.modes) {
        if (!by_mode.emplace(std::pair{m.k, m.l}, &m).second) {
            throw ValidationError("modes", "duplicate (k, l) = (" + std::to_string(m.k) + ", " + std::to_string(m.l) + ")");
        }
    }

    const std::size_t n = grid.size();
    for (const auto& [kl, m] : by_mode) {
        const auto partner = by_mode.find({-kl.first, -kl.second});
        if (partner == by_mode.end()) continue;
        for (std::size_t i = 0; i < n; ++i) {
            const FieldAmplitudes a = (*m)(grid.nodes[i]);
            const FieldAmplitudes b = (*partner->second)(grid.nodes[n - 1 - i]);
            if (!close(a.u1, std::conj(b.u1)) || !close(a.u2, std::conj(b.u2)) || !close(a.u3, std::conj(b.u3)) ||
                !close(a.theta, std::conj(b.theta))) {
                throw SymmetryViolationError("profiles at (" + std::to_string(kl.first) + ", " +
                                             std::to_string(kl.second) +
                                             ") are not conjugate-symmetric at eta = " + std::to_string(grid.nodes[i]));
            }
        }
    }

    std::vector<ModeSample> out;
    out.reserve(by_mode.size() * n);
    for (const auto& [kl, m] : by_mode) {
        const auto [k, l] = kl;
        for (std::size_t i = 0; i < n; ++i) {
            const double eta = grid.nodes[i];
            ModeSample s;
            s.mode = ModeIndex{k, l, eta};
            if (s.mode.is_mean()) continue;
            s.eta_index = i;
            s.weight = grid.weights[i];
            FieldAmplitudes a = (*m)(eta);
            if (spec.divergence_projection) a = leray_project(a, k, eta, l);
            if (k == 0) {
                s.state = StreakState{a.u1, a.u2, a.u3, a.theta};
            } else {
                s.state = NonzeroModeState{q_from_u2(a.u2, 0.0, s.mode), a.theta, a.u1, a.u3};
            }
            out.push_back(std::move(s));
        }
    }
    return out;
}

double hs_norm(std::span<const ModeSample> samples, double s, unsigned components) {
    if (!(s >= 0.0)) throw std::invalid_argument("Sobolev index must be >= 0");
    double acc = 0.0;
    for (const auto& sample : samples) {
        const double weight = std::pow(1.0 + sample.mode.full_norm2(), s);
        acc += sample.weight * weight * sum_components(initial_amplitudes(sample), components);
    }
    return std::sqrt(acc);
}

void check_truncation(const InitialConditionSpec& spec, const EtaGrid& grid) {
    double total = 0.0, tail = 0.0;
    for (const auto& m : spec.modes) {
        for_each_profile(m, [&](const GaussianProfile& g) {
            total += g.mass();
            tail += g.tail_mass(grid.cutoff);
        });
    }
    if (total > 0.0 && tail > 1e-8 * total) {
        throw QuadratureError("cutoff " + std::to_string(grid.cutoff) + " truncates a fraction " +
                              std::to_string(tail / total) + " of the initial mass");
    }
}

SampleNorms sample_norms(const NonzeroModeState& s, const ModeIndex& mode, double t) {
    return {std::norm(s.u1) + std::norm(s.u3), std::norm(u2_from_q(s.q, t, mode)), std::norm(s.theta)};
}

NodeSeries reduce_trajectory(const Trajectory& traj, double weight) {
    NodeSeries out;
    out.mode = traj.mode;
    out.weight = weight;
    if (!traj.states.empty()) out.sym0 = to_symmetric(traj.states.front(), traj.times.front(), traj.mode);
    out.norms.reserve(traj.states.size());
    for (std::size_t j = 0; j < traj.states.size(); ++j) {
        out.norms.push_back(sample_norms(traj.states[j], traj.mode, traj.times[j]));
    }
    return out;
}

NormReport theorem1_report(std::span<const NodeSeries> series, std::span<const double> times,
                           std::span<const ModeSample> samples, const PhysParams& params) {
    const RateConstants rates = rate_constants(params);
    const std::vector<ModeSample> nz = select(samples, false, false);
    if (series.size() != nz.size()) throw std::invalid_argument("one series per nonzero-mode sample is required");
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (series[i].norms.size() != times.size()) throw std::invalid_argument("series do not share the time grid");
        if (series[i].mode.k != nz[i].mode.k || series[i].mode.l != nz[i].mode.l ||
            series[i].mode.eta != nz[i].mode.eta) {
            throw std::invalid_argument("series are not in sample order");
        }
    }

    NormReport rep;
    for (std::size_t i = 0; i < report_sobolev_indices.size(); ++i) {
        rep.initial_hs[i] = hs_norm(nz, report_sobolev_indices[i], comp_all);
    }
    const double data_h3 = hs_norm(nz, 3.0, comp_velocity) + hs_norm(nz, 3.0, comp_theta);
    const double data_u13 = hs_norm(nz, 0.0, comp_u1 | comp_u3) + hs_norm(nz, 1.5, comp_u2) + hs_norm(nz, 1.0, comp_theta);
    const double data_u2 = hs_norm(nz, 3.0, comp_u2) + hs_norm(nz, 3.0, comp_theta);
    const double data_theta = hs_norm(nz, 2.0, comp_u2) + hs_norm(nz, 1.0, comp_theta);

    rep.records.reserve(times.size());
    for (std::size_t j = 0; j < times.size(); ++j) {
        const double t = times[j];
        double u13 = 0.0, u2 = 0.0, th = 0.0;
        for (const auto& s : series) {
            u13 += s.weight * s.norms[j].u13;
            u2 += s.weight * s.norms[j].u2;
            th += s.weight * s.norms[j].theta;
        }
        NormRecord r;
        r.t = t;
        r.u13 = std::sqrt(u13);
        r.u2 = std::sqrt(u2);
        r.theta = std::sqrt(th);
        const double bracket = japanese_bracket(t);
        r.lhs = r.u13 + std::pow(bracket, 1.5) * r.u2 + std::sqrt(bracket) * r.theta;
        r.envelope = std::exp(-rates.lambda * t * t * t / 24.0);
        rep.sup_ratio = std::max(rep.sup_ratio, safe_ratio(r.lhs, r.envelope * data_h3));
        rep.sup_ratio_u13_minimal = std::max(rep.sup_ratio_u13_minimal, safe_ratio(r.u13, r.envelope * data_u13));
        rep.sup_ratio_u2_minimal =
            std::max(rep.sup_ratio_u2_minimal, safe_ratio(std::pow(bracket, 1.5) * r.u2, r.envelope * data_u2));
        rep.sup_ratio_theta_minimal =
            std::max(rep.sup_ratio_theta_minimal, safe_ratio(std::sqrt(bracket) * r.theta, r.envelope * data_theta));
        rep.records.push_back(r);
    }

    // Per-(k,l) chain: samples arrive grouped by (k, l).
    rep.chain_u2_ratio = rep.chain_theta_ratio = -INFINITY;
    const double c2 = rates.c_beta * rates.c_beta;
    std::size_t begin = 0;
    while (begin < series.size()) {
        std::size_t end = begin;
        while (end < series.size() && series[end].mode.k == series[begin].mode.k &&
               series[end].mode.l == series[begin].mode.l) {
            ++end;
        }
        const ModeIndex& m0 = series[begin].mode;
        const double kl = m0.kl_norm();
        const double k2 = double(m0.k) * double(m0.k);
        std::vector<double> bound_u2(times.size()), bound_th(times.size()), u2(times.size()), th(times.size());
        for (std::size_t j = 0; j < times.size(); ++j) {
            const double t = times[j];
            double rhs_u2 = 0.0, rhs_th = 0.0;
            for (std::size_t i = begin; i < end; ++i) {
                const auto& s = series[i];
                const double p = symbol_p(t, s.mode);
                const double init = std::norm(s.sym0.g) + std::norm(s.sym0.gamma);
                u2[j] += s.weight * s.norms[j].u2;
                th[j] += s.weight * s.norms[j].theta;
                rhs_u2 += s.weight * std::pow(p, -1.5) * init;
                rhs_th += s.weight * std::pow(p, -0.5) * init;
            }
            const double env = c2 * std::exp(-rates.lambda * k2 * t * t * t / 12.0);
            bound_u2[j] = kl * env * rhs_u2;
            bound_th[j] = env * rhs_th / kl;
        }
        for (std::size_t j = 0; j < times.size(); ++j) {
            if (bound_u2.front() > 0.0) {
                rep.chain_u2_ratio = std::max(rep.chain_u2_ratio, (u2[j] - bound_u2[j]) / bound_u2.front());
            }
            if (bound_th.front() > 0.0) {
                rep.chain_theta_ratio = std::max(rep.chain_theta_ratio, (th[j] - bound_th[j]) / bound_th.front());
            }
        }
        begin = end;
    }
    return rep;
}

StreakReport theorem2_report(std::span<const ModeSample> samples, std::span<const double> times,
                             const PhysParams& params) {
    if (!(params.beta > 0.0)) throw ParameterGateError("streak aggregation requires beta > 0");
    const std::vector<ModeSample> zs = select(samples, true, true);
    const double data = hs_norm(zs, 4.0, comp_all);
    const double data_u1 =
        hs_norm(zs, 4.0, comp_u1) + (hs_norm(zs, 4.0, comp_u2) + hs_norm(zs, 4.0, comp_theta)) / params.beta;
    const double rate = std::min(params.nu, params.kappa);

    StreakReport rep;
    rep.times.assign(times.begin(), times.end());
    rep.norm.reserve(times.size());
    rep.u1_norm.reserve(times.size());
    for (double t : times) {
        double all = 0.0, u1 = 0.0;
        for (const auto& s : zs) {
            const StreakState st = propagate_streak(std::get<StreakState>(s.state), t, params, s.mode.eta, s.mode.l);
            u1 += s.weight * std::norm(st.u1);
            all += s.weight * (std::norm(st.u1) + std::norm(st.u2) + std::norm(st.u3) + std::norm(st.theta));
        }
        rep.norm.push_back(std::sqrt(all));
        rep.u1_norm.push_back(std::sqrt(u1));
        const double growth = std::exp(rate * t);
        rep.sup_ratio = std::max(rep.sup_ratio, safe_ratio(growth * rep.norm.back(), data));
        rep.u1_ratio = std::max(rep.u1_ratio, safe_ratio(growth * rep.u1_norm.back(), data_u1));
    }
    return rep;
}

double liftup_u1_ratio(std::span<const ModeSample> samples, std::span<const double> times, const PhysParams& params) {
    const std::vector<ModeSample> zs = select(samples, true, true);
    const double data = hs_norm(zs, 4.0, comp_u1) + hs_norm(zs, 4.0, comp_u2) + hs_norm(zs, 4.0, comp_theta);
    const double rate = std::min(params.nu, params.kappa);
    double sup = 0.0;
    for (double t : times) {
        double u1 = 0.0;
        for (const auto& s : zs) {
            const StreakState st = liftup_baseline(std::get<StreakState>(s.state), t, params, s.mode.eta, s.mode.l);
            u1 += s.weight * std::norm(st.u1);
        }
        sup = std::max(sup, safe_ratio(std::exp(rate * t) * std::sqrt(u1), data));
    }
    return sup;
}

FrameNorms moving_frame_norms(std::span<const Trajectory> trajs, std::span<const double> weights, std::size_t j) {
    FrameNorms out;
    for (std::size_t i = 0; i < trajs.size(); ++i) {
        const SampleNorms n = sample_norms(trajs[i].states.at(j), trajs[i].mode, trajs[i].times.at(j));
        out.u13 += weights[i] * n.u13;
        out.u2 += weights[i] * n.u2;
        out.theta += weights[i] * n.theta;
    }
    return out;
}

FrameNorms stationary_frame_norms(std::span<const Trajectory> trajs, std::span<const double> weights, std::size_t j) {
    FrameNorms out;
    for (std::size_t i = 0; i < trajs.size(); ++i) {
        const Trajectory& tr = trajs[i];
        const NonzeroModeState& s = tr.states.at(j);
        const double k = double(tr.mode.k), l = double(tr.mode.l);
        // Stationary vertical frequency of the moving label eta; the
        // translation has unit Jacobian so the weight carries over.
        const double xi = tr.mode.eta - k * tr.times.at(j);
        const double p = k * k + xi * xi + l * l;
        out.u13 += weights[i] * (std::norm(s.u1) + std::norm(s.u3));
        out.u2 += weights[i] * std::norm(s.q / p);
        out.theta += weights[i] * std::norm(s.theta);
    }
    return out;
}

} // namespace stratlab
