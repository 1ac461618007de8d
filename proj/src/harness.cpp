#include "stratlab/harness.hpp"

#include "stratlab/errors.hpp"
#include "stratlab/streak.hpp"

#include "parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>

namespace stratlab {

namespace {

// ---------------------------------------------------------------- parsing

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_list(std::string_view v) {
    std::vector<std::string_view> out;
    v = trim(v);
    if (v.empty()) return out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = v.find(',', start);
        out.push_back(trim(v.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) return out;
        start = comma + 1;
    }
}

double to_double(std::string_view s, int line) {
    const std::string buf(s);
    char* end = nullptr;
    const double v = std::strtod(buf.c_str(), &end);
    if (buf.empty() || end != buf.c_str() + buf.size() || !std::isfinite(v)) {
        throw ParseError(line, "malformed number '" + buf + "'");
    }
    return v;
}

std::int64_t to_int(std::string_view s, int line) {
    const std::string buf(s);
    char* end = nullptr;
    const long long v = std::strtoll(buf.c_str(), &end, 10);
    if (buf.empty() || end != buf.c_str() + buf.size()) throw ParseError(line, "malformed integer '" + buf + "'");
    return v;
}

bool to_bool(std::string_view s, int line) {
    if (s == "true" || s == "yes" || s == "1" || s == "on") return true;
    if (s == "false" || s == "no" || s == "0" || s == "off") return false;
    throw ParseError(line, "malformed boolean '" + std::string(s) + "'");
}

GaussianProfile to_profile(std::string_view v, int line) {
    if (trim(v) == "none") return {{0.0, 0.0}, 0.0, 1.0};
    const auto parts = split_list(v);
    if (parts.size() != 4) throw ParseError(line, "profile needs amp_re, amp_im, center, width");
    return {{to_double(parts[0], line), to_double(parts[1], line)}, to_double(parts[2], line), to_double(parts[3], line)};
}

template <class T, class F>
std::vector<T> to_list(std::string_view v, int line, F&& conv) {
    std::vector<T> out;
    for (auto item : split_list(v)) out.push_back(conv(item, line));
    return out;
}

std::string fmt_g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

// ---------------------------------------------------------------- sweep plan

struct PointTask {
    std::size_t scenario = 0;
    ModeIndex mode{};
};

struct NodeTask {
    std::size_t scenario = 0;
    std::size_t sample = 0;
};

struct NodeResult {
    NodeSeries series;
    std::vector<double> times;
    double envelope_excess = -INFINITY;
    bool has_envelopes = false;
    std::string error;
    double wall_ms = 0.0;
};

struct StreakResult {
    StreakReport report;
    std::string error;
    double wall_ms = 0.0;
};

struct ScenarioPlan {
    const ScenarioConfig* cfg = nullptr;
    std::vector<ModeIndex> points;
    std::vector<ModeSample> samples;
    std::vector<std::size_t> nonzero_samples;
    std::vector<std::size_t> streak_samples;
    bool theorem1 = false;
    bool theorem2 = false;
    IntegratorConfig field_integrator{};
    std::vector<double> streak_times;
    std::string plan_error;
};

std::vector<double> uniform_times(double t_end, double dt) {
    std::vector<double> out;
    const auto n = static_cast<std::size_t>(std::floor(t_end / dt + 1e-9));
    for (std::size_t i = 0; i <= n; ++i) out.push_back(double(i) * dt);
    if (t_end - out.back() > 1e-12 * std::max(1.0, t_end)) out.push_back(t_end);
    return out;
}

std::vector<std::string> point_check_names(const ScenarioConfig& cfg, const ModeIndex& m) {
    std::vector<std::string> out;
    if (m.k != 0) {
        if (cfg.enabled(Check::energy_identity)) out.emplace_back("energy_identity");
        if (cfg.enabled(Check::envelopes)) {
            for (const char* n : {"envelope_sym", "envelope_sharp", "envelope_order", "envelope_u1u3"}) out.emplace_back(n);
        }
        if (cfg.enabled(Check::divergence)) out.emplace_back("divergence");
        return out;
    }
    if (cfg.enabled(Check::liftup_baseline)) out.emplace_back("liftup_baseline");
    if (m.l != 0) {
        if (cfg.enabled(Check::hyperbolic_bounds)) out.emplace_back("hyperbolic_bounds");
        if (cfg.enabled(Check::streak_bound)) out.emplace_back("streak_bound");
    }
    return out;
}

double threshold_for(const Thresholds& th, const std::string& check) {
    static const std::map<std::string, double Thresholds::*> table{
        {"energy_identity", &Thresholds::energy_identity},
        {"envelope_sym", &Thresholds::envelopes},
        {"envelope_sharp", &Thresholds::envelopes},
        {"envelope_order", &Thresholds::envelopes},
        {"envelope_u1u3", &Thresholds::envelopes},
        {"divergence", &Thresholds::divergence},
        {"liftup_baseline", &Thresholds::liftup_baseline},
        {"hyperbolic_bounds", &Thresholds::hyperbolic_bounds},
        {"streak_bound", &Thresholds::streak_bound},
        {"theorem1", &Thresholds::theorem1},
        {"theorem1_u13_minimal", &Thresholds::theorem1_minimal},
        {"theorem1_u2_minimal", &Thresholds::theorem1_minimal},
        {"theorem1_theta_minimal", &Thresholds::theorem1_minimal},
        {"theorem1_chain_u2", &Thresholds::theorem1_chain},
        {"theorem1_chain_theta", &Thresholds::theorem1_chain},
        {"theorem1_grid_envelopes", &Thresholds::envelopes},
        {"theorem2", &Thresholds::theorem2},
        {"theorem2_u1", &Thresholds::theorem2_u1},
    };
    return th.*table.at(check);
}

ReportRow make_row(const ScenarioConfig& cfg, const std::optional<ModeIndex>& mode, const std::string& check,
                   double statistic, double wall_ms) {
    ReportRow r;
    r.scenario = cfg.id;
    if (mode) {
        r.mode_k = mode->k;
        r.mode_l = mode->l;
        r.eta = mode->eta;
    }
    r.check = check;
    r.statistic = statistic;
    r.threshold = threshold_for(cfg.thresholds, check);
    r.pass = std::isfinite(statistic) && statistic <= r.threshold;
    r.wall_ms = wall_ms;
    return r;
}

NonzeroModeState nonzero_state(const FieldAmplitudes& a, const ModeIndex& m) {
    return {q_from_u2(a.u2, 0.0, m), a.theta, a.u1, a.u3};
}

void dump_trajectory(const std::string& dir, const ScenarioConfig& cfg, const Trajectory& traj) {
    std::filesystem::create_directories(dir);
    const auto& m = traj.mode;
    const std::string name = cfg.id + "_k" + std::to_string(m.k) + "_l" + std::to_string(m.l) + "_eta" +
                             format_double(m.eta) + ".csv";
    std::ofstream out(std::filesystem::path(dir) / name);
    out << "t,re_q,im_q,re_theta,im_theta,re_u1,im_u1,re_u3,im_u3,energy,envelope\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const auto& s = traj.states[i];
        const auto& d = traj.diagnostics[i];
        out << format_double(traj.times[i]) << ',' << format_double(s.q.real()) << ',' << format_double(s.q.imag())
            << ',' << format_double(s.theta.real()) << ',' << format_double(s.theta.imag()) << ','
            << format_double(s.u1.real()) << ',' << format_double(s.u1.imag()) << ',' << format_double(s.u3.real())
            << ',' << format_double(s.u3.imag()) << ',' << (d.energy ? format_double(*d.energy) : "") << ','
            << (d.envelope_sym ? format_double(*d.envelope_sym) : "") << '\n';
    }
}

std::vector<double> run_point_checks(const ScenarioConfig& cfg, const ModeIndex& m, const SweepOptions& opts) {
    const FieldAmplitudes a = cfg.point_amplitudes(m.k, m.l, m.eta);
    const PhysParams& params = cfg.params;
    std::vector<double> stats;
    if (m.k != 0) {
        IntegratorConfig ic = cfg.integrator;
        if (cfg.enabled(Check::energy_identity)) ic.sample_dt = std::min(ic.sample_dt, 1e-3);
        const Trajectory traj = integrate_mode(nonzero_state(a, m), m, params, ic);
        if (!opts.dump_dir.empty()) dump_trajectory(opts.dump_dir, cfg, traj);
        if (cfg.enabled(Check::energy_identity)) {
            double max_e = 0.0;
            for (const auto& d : traj.diagnostics) max_e = std::max(max_e, d.energy.value_or(0.0));
            const double residual = check_energy_identity(traj, m, params);
            stats.push_back(max_e > 0.0 ? residual / max_e : residual);
        }
        if (cfg.enabled(Check::envelopes)) {
            const EnvelopeReport env = check_envelopes(traj);
            stats.push_back(env.sym);
            stats.push_back(env.sym_sharp);
            stats.push_back(env.ordering);
            stats.push_back(std::max(env.u1, env.u3));
        }
        if (cfg.enabled(Check::divergence)) stats.push_back(divergence_drift(traj));
        return stats;
    }

    const StreakState s0{a.u1, a.u2, a.u3, a.theta};
    if (cfg.enabled(Check::liftup_baseline)) {
        const LiftupPeak peak = liftup_peak(s0, params, m.eta, m.l);
        const double decay = params.nu * m.eta_l_norm2();
        const double horizon = std::max(4.0 / decay, 2.0 * peak.time);
        const int n = 20000;
        double sampled = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double t = horizon * double(i) / n;
            sampled = std::max(sampled, std::abs(liftup_baseline(s0, t, params, m.eta, m.l).u1));
        }
        stats.push_back(peak.value > 0.0 ? std::abs(sampled - peak.value) / peak.value : sampled);
    }
    if (m.l != 0) {
        if (cfg.enabled(Check::hyperbolic_bounds)) {
            const KernelParams kp = kernel_params(params, m.eta, m.l);
            const double tau = 1.0 / std::max(kp.a, kp.b);
            std::vector<double> ts;
            for (int i = 0; i <= 2000; ++i) ts.push_back(100.0 * tau * i / 2000.0);
            stats.push_back(hyperbolic_bounds_check(kp, ts));
        }
        if (cfg.enabled(Check::streak_bound)) {
            const auto ts = uniform_times(cfg.streak_t_end, cfg.streak_dt);
            const StreakBound fit = fitted_streak_constants(s0, params, m.eta, m.l, ts);
            stats.push_back(std::max({fit.u1, fit.u2, fit.u3, fit.theta}));
        }
    }
    return stats;
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

} // namespace

std::string_view check_name(Check c) {
    switch (c) {
    case Check::energy_identity: return "energy_identity";
    case Check::envelopes: return "envelopes";
    case Check::divergence: return "divergence";
    case Check::theorem1: return "theorem1";
    case Check::theorem2: return "theorem2";
    case Check::liftup_baseline: return "liftup_baseline";
    case Check::hyperbolic_bounds: return "hyperbolic_bounds";
    case Check::streak_bound: return "streak_bound";
    }
    return "unknown";
}

std::optional<Check> check_from_name(std::string_view name) {
    for (Check c : all_checks) {
        if (check_name(c) == name) return c;
    }
    return std::nullopt;
}

bool ScenarioConfig::enabled(Check c) const { return std::find(checks.begin(), checks.end(), c) != checks.end(); }

InitialConditionSpec ScenarioConfig::ic_spec() const {
    InitialConditionSpec spec;
    spec.divergence_projection = divergence_projection;
    for (auto k : k_values) {
        for (auto l : l_values) {
            if (k == 0 && l == 0) continue;
            spec.modes.push_back({k, l, profile.u1, profile.u2, profile.u3, profile.theta});
        }
    }
    return spec;
}

EtaGrid ScenarioConfig::grid() const {
    const EtaGrid auto_grid = default_grid(ic_spec());
    const double cutoff = grid_cutoff.value_or(auto_grid.cutoff);
    if (grid_panels) return make_eta_grid(cutoff, *grid_panels);
    if (!grid_cutoff) return auto_grid;
    // Keep the automatic panel width when only the cutoff is given.
    const double width = 2.0 * auto_grid.cutoff / double(auto_grid.size() / gauss_points_per_panel);
    return make_eta_grid(cutoff, std::max(2, int(std::ceil(2.0 * cutoff / width))));
}

FieldAmplitudes ScenarioConfig::point_amplitudes(std::int64_t k, std::int64_t l, double eta) const {
    FieldAmplitudes a{profile.u1(eta), profile.u2(eta), profile.u3(eta), profile.theta(eta)};
    return divergence_projection ? leray_project(a, k, eta, l) : a;
}

void validate(const ScenarioConfig& cfg) {
    if (cfg.id.empty() || !std::all_of(cfg.id.begin(), cfg.id.end(), [](char c) {
            return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
        })) {
        throw ValidationError("scenario.id", "must be non-empty and use only letters, digits, '_', '-', '.'");
    }
    const auto& p = cfg.params;
    if (!(p.nu > 0.0) || !std::isfinite(p.nu)) throw ValidationError("params.nu", "must be > 0");
    if (!(p.kappa > 0.0) || !std::isfinite(p.kappa)) throw ValidationError("params.kappa", "must be > 0");
    if (!(p.beta >= 0.0) || !std::isfinite(p.beta)) throw ValidationError("params.beta", "must be >= 0");
    auto unique = [](auto v) {
        std::sort(v.begin(), v.end());
        return std::adjacent_find(v.begin(), v.end()) == v.end();
    };
    if (!unique(cfg.k_values)) throw ValidationError("modes.k", "duplicate values");
    if (!unique(cfg.l_values)) throw ValidationError("modes.l", "duplicate values");
    if (!unique(cfg.eta_points)) throw ValidationError("modes.eta", "duplicate values");
    for (auto* g : {&cfg.profile.u1, &cfg.profile.u2, &cfg.profile.u3, &cfg.profile.theta}) {
        if (!(g->width > 0.0)) throw ValidationError("ic", "profile widths must be > 0");
    }
    if (cfg.grid_cutoff && !(*cfg.grid_cutoff > 0.0)) throw ValidationError("grid.cutoff", "must be > 0");
    if (cfg.grid_panels && *cfg.grid_panels < 1) throw ValidationError("grid.panels", "must be >= 1");
    try {
        validate(cfg.integrator);
    } catch (const std::invalid_argument& e) {
        throw ValidationError("integrator", e.what());
    }
    if (cfg.report_samples < 3) throw ValidationError("integrator.report_samples", "must be >= 3");
    if (!(cfg.streak_t_end > 0.0)) throw ValidationError("streaks.t_end", "must be > 0");
    if (!(cfg.streak_dt > 0.0) || cfg.streak_dt > cfg.streak_t_end) {
        throw ValidationError("streaks.sample_dt", "must be in (0, t_end]");
    }
}

void apply_gates(ScenarioConfig& cfg) {
    const auto& p = cfg.params;
    auto disable = [&](Check c, const std::string& why) {
        auto it = std::find(cfg.checks.begin(), cfg.checks.end(), c);
        if (it == cfg.checks.end()) return;
        cfg.checks.erase(it);
        cfg.warnings.push_back(std::string(check_name(c)) + " disabled: " + why);
    };
    if (!(p.beta > 0.5)) disable(Check::energy_identity, "beta = " + fmt_g(p.beta) + " <= 1/2");
    if (!theorem1_applicable(p)) {
        const std::string why = p.beta > 0.5 ? "max(nu,kappa)/min(nu,kappa) >= 4 beta - 1"
                                             : "beta = " + fmt_g(p.beta) + " <= 1/2";
        disable(Check::envelopes, why);
        disable(Check::theorem1, why);
    }
    if (!(p.beta > 0.0)) {
        disable(Check::theorem2, "beta = 0");
        disable(Check::hyperbolic_bounds, "beta = 0");
        disable(Check::streak_bound, "beta = 0");
    }
}

ScenarioConfig parse_config(std::string_view text) {
    ScenarioConfig cfg;
    static const std::set<std::string> sections{"scenario", "params", "modes", "ic",
                                                "grid",     "integrator", "streaks", "checks", "thresholds"};
    std::string section;
    std::set<std::string> seen_keys;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        const std::size_t comment = line.find_first_of("#;");
        if (comment != std::string_view::npos) line = line.substr(0, comment);
        line = trim(line);
        if (line.empty()) {
            if (eol == text.size()) break;
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') throw ParseError(line_no, "unterminated section header");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (!sections.count(section)) throw ParseError(line_no, "unknown section [" + section + "]");
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError(line_no, "expected 'key = value'");
        if (section.empty()) throw ParseError(line_no, "key outside of a section");
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        const std::string full = section + "." + key;
        if (!seen_keys.insert(full).second) throw ParseError(line_no, "duplicate key " + full);
        auto unknown = [&] { return ParseError(line_no, "unknown key '" + key + "' in [" + section + "]"); };

        if (section == "scenario") {
            if (key == "id") cfg.id = std::string(value);
            else throw unknown();
        } else if (section == "params") {
            if (key == "nu") cfg.params.nu = to_double(value, line_no);
            else if (key == "kappa") cfg.params.kappa = to_double(value, line_no);
            else if (key == "beta") cfg.params.beta = to_double(value, line_no);
            else throw unknown();
        } else if (section == "modes") {
            if (key == "k") cfg.k_values = to_list<std::int64_t>(value, line_no, to_int);
            else if (key == "l") cfg.l_values = to_list<std::int64_t>(value, line_no, to_int);
            else if (key == "eta") cfg.eta_points = to_list<double>(value, line_no, to_double);
            else throw unknown();
        } else if (section == "ic") {
            if (key == "u1") cfg.profile.u1 = to_profile(value, line_no);
            else if (key == "u2") cfg.profile.u2 = to_profile(value, line_no);
            else if (key == "u3") cfg.profile.u3 = to_profile(value, line_no);
            else if (key == "theta") cfg.profile.theta = to_profile(value, line_no);
            else if (key == "projection") cfg.divergence_projection = to_bool(value, line_no);
            else throw unknown();
        } else if (section == "grid") {
            if (key == "cutoff") {
                if (value != "auto") cfg.grid_cutoff = to_double(value, line_no);
            } else if (key == "panels") {
                if (value != "auto") cfg.grid_panels = int(to_int(value, line_no));
            } else {
                throw unknown();
            }
        } else if (section == "integrator") {
            auto& ic = cfg.integrator;
            if (key == "rel_tol") ic.rel_tol = to_double(value, line_no);
            else if (key == "abs_tol") ic.abs_tol = to_double(value, line_no);
            else if (key == "max_step") ic.max_step = to_double(value, line_no);
            else if (key == "sample_dt") ic.sample_dt = to_double(value, line_no);
            else if (key == "t_end") {
                if (value == "auto") ic.t_end.reset();
                else ic.t_end = to_double(value, line_no);
            } else if (key == "method") {
                if (value == "dormand_prince") ic.method = IntegratorMethod::dormand_prince;
                else if (value == "integrating_factor") ic.method = IntegratorMethod::integrating_factor;
                else throw ValidationError("integrator.method", "expected dormand_prince or integrating_factor");
            } else if (key == "report_samples") {
                cfg.report_samples = int(to_int(value, line_no));
            } else {
                throw unknown();
            }
        } else if (section == "streaks") {
            if (key == "t_end") cfg.streak_t_end = to_double(value, line_no);
            else if (key == "sample_dt") cfg.streak_dt = to_double(value, line_no);
            else throw unknown();
        } else if (section == "checks") {
            if (key != "enabled") throw unknown();
            std::vector<Check> checks;
            for (auto name : split_list(value)) {
                const auto c = check_from_name(name);
                if (!c) throw ValidationError("checks.enabled", "unknown check '" + std::string(name) + "'");
                if (std::find(checks.begin(), checks.end(), *c) == checks.end()) checks.push_back(*c);
            }
            if (checks.empty()) throw ValidationError("checks.enabled", "at least one check must be enabled");
            cfg.checks.clear();
            for (Check c : all_checks) {
                if (std::find(checks.begin(), checks.end(), c) != checks.end()) cfg.checks.push_back(c);
            }
        } else if (section == "thresholds") {
            static const std::map<std::string, double Thresholds::*> fields{
                {"energy_identity", &Thresholds::energy_identity},
                {"envelopes", &Thresholds::envelopes},
                {"divergence", &Thresholds::divergence},
                {"hyperbolic_bounds", &Thresholds::hyperbolic_bounds},
                {"liftup_baseline", &Thresholds::liftup_baseline},
                {"streak_bound", &Thresholds::streak_bound},
                {"theorem1", &Thresholds::theorem1},
                {"theorem1_minimal", &Thresholds::theorem1_minimal},
                {"theorem1_chain", &Thresholds::theorem1_chain},
                {"theorem2", &Thresholds::theorem2},
                {"theorem2_u1", &Thresholds::theorem2_u1},
            };
            const auto it = fields.find(key);
            if (it == fields.end()) throw unknown();
            cfg.thresholds.*(it->second) = to_double(value, line_no);
        }
        if (eol == text.size()) break;
    }
    validate(cfg);
    apply_gates(cfg);
    return cfg;
}

std::vector<ReportRow> run_sweep(const ScenarioConfig& scenario, const SweepOptions& opts) {
    return run_sweep(std::span<const ScenarioConfig>(&scenario, 1), opts);
}

std::vector<ReportRow> run_sweep(std::span<const ScenarioConfig> scenarios, const SweepOptions& opts) {
    std::vector<ScenarioPlan> plans(scenarios.size());
    std::vector<PointTask> point_tasks;
    std::vector<NodeTask> node_tasks;
    std::vector<std::size_t> streak_tasks;

    for (std::size_t si = 0; si < scenarios.size(); ++si) {
        const ScenarioConfig& cfg = scenarios[si];
        ScenarioPlan& plan = plans[si];
        plan.cfg = &cfg;
        std::vector<std::int64_t> ks = cfg.k_values, ls = cfg.l_values;
        std::vector<double> etas = cfg.eta_points;
        std::sort(ks.begin(), ks.end());
        std::sort(ls.begin(), ls.end());
        std::sort(etas.begin(), etas.end());
        for (auto k : ks) {
            for (auto l : ls) {
                for (double eta : etas) {
                    ModeIndex m{k, l, eta};
                    if (m.is_mean() || point_check_names(cfg, m).empty()) continue;
                    plan.points.push_back(m);
                    point_tasks.push_back({si, m});
                }
            }
        }

        const bool any_nonzero = std::any_of(ks.begin(), ks.end(), [](auto k) { return k != 0; });
        const bool any_streak = std::any_of(ks.begin(), ks.end(), [](auto k) { return k == 0; }) &&
                                std::any_of(ls.begin(), ls.end(), [](auto l) { return l != 0; });
        plan.theorem1 = cfg.enabled(Check::theorem1) && any_nonzero;
        plan.theorem2 = cfg.enabled(Check::theorem2) && any_streak;
        if (!plan.theorem1 && !plan.theorem2) continue;
        try {
            const InitialConditionSpec spec = cfg.ic_spec();
            const EtaGrid grid = cfg.grid();
            check_truncation(spec, grid);
            plan.samples = build_modes(spec, grid);
        } catch (const std::exception& e) {
            plan.plan_error = e.what();
            continue;
        }
        for (std::size_t i = 0; i < plan.samples.size(); ++i) {
            (plan.samples[i].is_streak() ? plan.streak_samples : plan.nonzero_samples).push_back(i);
        }
        if (plan.theorem1) {
            double t_end = 0.0;
            if (cfg.integrator.t_end) {
                t_end = *cfg.integrator.t_end;
            } else {
                for (auto k : ks) {
                    if (k != 0) t_end = std::max(t_end, default_t_end(ModeIndex{k, 0, 0.0}, cfg.params));
                }
            }
            plan.field_integrator = cfg.integrator;
            plan.field_integrator.t_end = t_end;
            plan.field_integrator.sample_dt = t_end / double(cfg.report_samples);
            for (std::size_t i : plan.nonzero_samples) node_tasks.push_back({si, i});
        }
        if (plan.theorem2) {
            plan.streak_times = uniform_times(cfg.streak_t_end, cfg.streak_dt);
            streak_tasks.push_back(si);
        }
    }

    std::vector<std::vector<double>> point_stats(point_tasks.size());
    std::vector<std::string> point_errors(point_tasks.size());
    std::vector<double> point_ms(point_tasks.size(), 0.0);
    std::vector<NodeResult> node_results(node_tasks.size());
    std::vector<StreakResult> streak_results(streak_tasks.size());

    const std::size_t total = point_tasks.size() + node_tasks.size() + streak_tasks.size();
    detail::parallel_for(total, opts.workers, [&](std::size_t task) {
        const auto start = std::chrono::steady_clock::now();
        if (task < point_tasks.size()) {
            const PointTask& pt = point_tasks[task];
            try {
                point_stats[task] = run_point_checks(*plans[pt.scenario].cfg, pt.mode, opts);
            } catch (const std::exception& e) {
                point_errors[task] = e.what();
            }
            point_ms[task] = elapsed_ms(start);
            return;
        }
        task -= point_tasks.size();
        if (task < node_tasks.size()) {
            const NodeTask& nt = node_tasks[task];
            const ScenarioPlan& plan = plans[nt.scenario];
            const ModeSample& s = plan.samples[nt.sample];
            NodeResult& out = node_results[task];
            try {
                const Trajectory traj =
                    integrate_mode(std::get<NonzeroModeState>(s.state), s.mode, plan.cfg->params, plan.field_integrator);
                out.series = reduce_trajectory(traj, s.weight);
                out.times = traj.times;
                if (traj.diagnostics.front().envelope_sym) {
                    const EnvelopeReport env = check_envelopes(traj);
                    out.has_envelopes = true;
                    out.envelope_excess = std::max({env.sym, env.sym_sharp, env.ordering, env.u1, env.u3});
                }
            } catch (const std::exception& e) {
                out.error = e.what();
            }
            out.wall_ms = elapsed_ms(start);
            return;
        }
        task -= node_tasks.size();
        const ScenarioPlan& plan = plans[streak_tasks[task]];
        StreakResult& out = streak_results[task];
        try {
            std::vector<ModeSample> streaks;
            for (std::size_t i : plan.streak_samples) streaks.push_back(plan.samples[i]);
            out.report = theorem2_report(streaks, plan.streak_times, plan.cfg->params);
        } catch (const std::exception& e) {
            out.error = e.what();
        }
        out.wall_ms = elapsed_ms(start);
    });

    // Single-threaded reduction in fixed order.
    std::vector<ReportRow> rows;
    auto wall = [&](double ms) { return opts.timing ? ms : 0.0; };
    std::size_t point_cursor = 0, node_cursor = 0, streak_cursor = 0;
    for (const ScenarioPlan& plan : plans) {
        const ScenarioConfig& cfg = *plan.cfg;
        for (const ModeIndex& m : plan.points) {
            const std::size_t ti = point_cursor++;
            const auto names = point_check_names(cfg, m);
            const std::string& err = point_errors[ti];
            for (std::size_t c = 0; c < names.size(); ++c) {
                const double stat = err.empty() ? point_stats[ti].at(c) : NAN;
                ReportRow r = make_row(cfg, m, names[c], stat, wall(point_ms[ti]));
                r.note = err;
                rows.push_back(std::move(r));
            }
        }

        if (plan.theorem1) {
            const std::vector<std::string> names{"theorem1",          "theorem1_u13_minimal", "theorem1_u2_minimal",
                                                 "theorem1_theta_minimal", "theorem1_chain_u2", "theorem1_chain_theta",
                                                 "theorem1_grid_envelopes"};
            std::string err = plan.plan_error;
            double ms = 0.0;
            std::vector<NodeSeries> series;
            std::vector<double> times;
            double env_excess = -INFINITY;
            bool has_env = false;
            const std::size_t n_nodes = plan.plan_error.empty() ? plan.nonzero_samples.size() : 0;
            for (std::size_t i = 0; i < n_nodes; ++i) {
                NodeResult& nr = node_results[node_cursor++];
                ms += nr.wall_ms;
                if (!nr.error.empty() && err.empty()) err = nr.error;
                if (nr.has_envelopes) {
                    has_env = true;
                    env_excess = std::max(env_excess, nr.envelope_excess);
                }
                if (i == 0) times = nr.times;
                series.push_back(std::move(nr.series));
            }
            std::vector<double> stats(names.size(), NAN);
            if (err.empty()) {
                try {
                    std::vector<ModeSample> nz;
                    for (std::size_t i : plan.nonzero_samples) nz.push_back(plan.samples[i]);
                    const auto start = std::chrono::steady_clock::now();
                    const NormReport rep = theorem1_report(series, times, nz, cfg.params);
                    ms += elapsed_ms(start);
                    stats = {rep.sup_ratio,      rep.sup_ratio_u13_minimal, rep.sup_ratio_u2_minimal,
                             rep.sup_ratio_theta_minimal, rep.chain_u2_ratio, rep.chain_theta_ratio,
                             has_env ? env_excess : 0.0};
                } catch (const std::exception& e) {
                    err = e.what();
                }
            }
            for (std::size_t c = 0; c < names.size(); ++c) {
                ReportRow r = make_row(cfg, std::nullopt, names[c], stats[c], wall(ms));
                r.note = err;
                rows.push_back(std::move(r));
            }
        }

        if (plan.theorem2) {
            std::string err = plan.plan_error;
            double stat = NAN, stat_u1 = NAN, ms = 0.0;
            if (plan.plan_error.empty()) {
                const StreakResult& sr = streak_results[streak_cursor++];
                ms = sr.wall_ms;
                err = sr.error;
                if (err.empty()) {
                    stat = sr.report.sup_ratio;
                    stat_u1 = sr.report.u1_ratio;
                }
            }
            ReportRow r = make_row(cfg, std::nullopt, "theorem2", stat, wall(ms));
            r.note = err;
            rows.push_back(r);
            r = make_row(cfg, std::nullopt, "theorem2_u1", stat_u1, wall(ms));
            r.note = err;
            rows.push_back(std::move(r));
        }
    }
    return rows;
}

std::vector<ScenarioConfig> standard_suite() {
    struct ParamSet {
        double nu, kappa, beta;
    };
    std::vector<ParamSet> params;
    for (double nu : {1e-2, 1e-3}) {
        for (double beta : {0.75, 1.0, 2.0}) params.push_back({nu, nu, beta});
    }
    params.push_back({1e-3, 2e-3, 1.0});

    std::vector<ScenarioConfig> out;
    for (const auto& p : params) {
        for (double center : {0.0, 2.0}) {
            for (double width : {0.5, 2.0}) {
                ScenarioConfig cfg;
                cfg.id = "std-nu" + fmt_g(p.nu) + "-kappa" + fmt_g(p.kappa) + "-beta" + fmt_g(p.beta) + "-c" +
                         fmt_g(center) + "-w" + fmt_g(width);
                cfg.params = {p.nu, p.kappa, p.beta};
                cfg.k_values = {0, 1, 2};
                cfg.l_values = {0, 1, 2};
                cfg.eta_points = {0.0, 2.0};
                cfg.profile.u1 = {{0.5, 0.0}, center, width};
                cfg.profile.u2 = {{1.0, 0.0}, center, width};
                cfg.profile.u3 = {{0.0, 0.5}, center, width};
                cfg.profile.theta = {{0.5, 0.25}, center, width};
                validate(cfg);
                apply_gates(cfg);
                out.push_back(std::move(cfg));
            }
        }
    }
    return out;
}

std::size_t resolve_workers(std::optional<std::size_t> requested) {
    if (const char* env = std::getenv("STRAT_LAB_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return std::size_t(v);
    }
    if (requested && *requested > 0) return *requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

} // namespace stratlab
