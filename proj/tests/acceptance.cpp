// Acceptance run: one PASS/FAIL line per criterion. Exits 0 when the failing
// sub-checks are exactly those named with --expected-failures (default none).

#include "oracles.hpp"

#include "stratlab/harness.hpp"
#include "stratlab/nonzero.hpp"
#include "stratlab/streak.hpp"
#include "stratlab/verify.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace stratlab;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

struct SubCheck {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id = 0;
    std::string title;
    std::vector<SubCheck> subs;

    void add(std::string name, bool pass, std::string detail) { subs.push_back({std::move(name), pass, std::move(detail)}); }
    bool pass() const {
        return std::all_of(subs.begin(), subs.end(), [](const SubCheck& s) { return s.pass; });
    }
};

// ------------------------------------------------------------ 1. streaks

using State8 = std::array<double, 8>;

/// Streak system in original variables, written out independently of the library.
struct StreakOde {
    double nu, kappa, beta, eta, l;
    void operator()(const State8& x, State8& dx, double) const {
        const double n2 = eta * eta + l * l;
        for (int c = 0; c < 2; ++c) {
            const double u1 = x[0 + c], u2 = x[2 + c], u3 = x[4 + c], th = x[6 + c];
            dx[0 + c] = -u2 - nu * n2 * u1;
            dx[2 + c] = -beta * l * l / n2 * th - nu * n2 * u2;
            dx[4 + c] = beta * eta * l / n2 * th - nu * n2 * u3;
            dx[6 + c] = beta * u2 - kappa * n2 * th;
        }
    }
};

double streak_error_odeint(const StreakCase& c, const StreakState& s0, const std::vector<double>& times) {
    namespace odeint = boost::numeric::odeint;
    State8 x{s0.u1.real(), s0.u1.imag(), s0.u2.real(), s0.u2.imag(),
             s0.u3.real(), s0.u3.imag(), s0.theta.real(), s0.theta.imag()};
    std::vector<State8> out;
    auto stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<State8>>(1e-14, 1e-12);
    odeint::integrate_times(stepper, StreakOde{c.params.nu, c.params.kappa, c.params.beta, c.eta, double(c.l)}, x,
                            times.begin(), times.end(), 1e-3, [&](const State8& y, double) { out.push_back(y); });
    double scale = 0.0, err = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const StreakState e = propagate_streak(s0, times[i], c.params, c.eta, c.l);
        const cplx o[4] = {{out[i][0], out[i][1]}, {out[i][2], out[i][3]}, {out[i][4], out[i][5]}, {out[i][6], out[i][7]}};
        const cplx v[4] = {e.u1, e.u2, e.u3, e.theta};
        for (int j = 0; j < 4; ++j) {
            scale = std::max(scale, std::abs(o[j]));
            err = std::max(err, std::abs(v[j] - o[j]));
        }
    }
    return err / scale;
}

Criterion streak_equivalence() {
    Criterion c{1, "streak closed form vs adaptive Runge-Kutta, t in [0, 50]", {}};
    const auto t0 = Clock::now();
    std::vector<double> times;
    for (int i = 0; i <= 500; ++i) times.push_back(0.1 * i);
    const auto cases = streak_verification_grid(true);
    double worst = 0.0, worst_tuned = 0.0, min_c2 = INFINITY;
    bool has_oscillatory = false, has_hyperbolic = false;
    for (const auto& sc : cases) {
        const double e = streak_error_odeint(sc, streak_probe_state(), times);
        worst = std::max(worst, e);
        const KernelParams kp = kernel_params(sc.params, sc.eta, sc.l);
        if (std::abs(kp.c_squared) < 1e-6) {
            worst_tuned = std::max(worst_tuned, e);
            min_c2 = std::min(min_c2, std::abs(kp.c_squared));
        }
        has_oscillatory |= kp.c_squared < 0.0 && sc.params.nu == sc.params.kappa;
        has_hyperbolic |= kp.c_squared > 0.0;
    }
    const double secs = seconds_since(t0);
    c.add("streak_oracle", worst <= 1e-8,
          "max rel err " + fmt("%.2e", worst) + " over " + std::to_string(cases.size()) + " cases");
    c.add("streak_regimes", has_oscillatory && has_hyperbolic && std::isfinite(min_c2) && worst_tuned <= 1e-8,
          "near-degenerate cases (min |c^2| " + fmt("%.1e", min_c2) + ") err " + fmt("%.2e", worst_tuned));
    c.add("streak_runtime", secs <= 120.0, fmt("%.2f s", secs));
    return c;
}

// ------------------------------------------------------- 2. matrix identities

Criterion matrix_identities() {
    Criterion c{2, "exp_M, coupling block, semigroup and determinant identities", {}};
    double e_exp = 0.0, e_coup = 0.0, e_semi = 0.0, e_det = 0.0;
    auto mat_err = [](const Mat2& m, const Eigen::Matrix2d& o) {
        const double scale = o.cwiseAbs().maxCoeff();
        return std::max({std::abs(m.m11 - o(0, 0)), std::abs(m.m12 - o(0, 1)), std::abs(m.m21 - o(1, 0)),
                         std::abs(m.m22 - o(1, 1))}) /
               scale;
    };
    for (const auto& sc : streak_verification_grid(true)) {
        const auto& p = sc.params;
        const KernelParams kp = kernel_params(p, sc.eta, sc.l);
        const Eigen::Matrix2d m = oracle::streak_M(p.nu, p.kappa, p.beta, sc.eta, sc.l);
        const double n2 = sc.eta * sc.eta + double(sc.l) * double(sc.l);
        for (double t : {0.1, 1.0, 5.0, 20.0, 50.0}) {
            const Mat2 e = exp_M(t, kp, p, sc.eta, sc.l);
            e_exp = std::max(e_exp, mat_err(e, oracle::expm(m * t)));
            e_coup = std::max(e_coup, mat_err(coupling_block(t, kp, p, sc.eta, sc.l),
                                              oracle::coupling(p.nu, p.kappa, p.beta, sc.eta, sc.l, t)));
            const Mat2 prod = e * exp_M(0.5 * t, kp, p, sc.eta, sc.l);
            Eigen::Matrix2d pm;
            pm << prod.m11, prod.m12, prod.m21, prod.m22;
            e_semi = std::max(e_semi, mat_err(exp_M(1.5 * t, kp, p, sc.eta, sc.l), pm));
            const double products = std::abs(e.m11 * e.m22) + std::abs(e.m12 * e.m21);
            e_det = std::max(e_det, std::abs(e.det() - std::exp(-(p.nu + p.kappa) * n2 * t)) / products);
        }
    }
    c.add("exp_M", e_exp <= 1e-10, "exp_M vs Pade " + fmt("%.2e", e_exp));
    c.add("coupling_block", e_coup <= 1e-9, "coupling vs dense " + fmt("%.2e", e_coup));
    c.add("semigroup", e_semi <= 1e-10, "semigroup " + fmt("%.2e", e_semi));
    c.add("determinant", e_det <= 1e-10, "det relative to |m11 m22| + |m12 m21| " + fmt("%.2e", e_det));
    return c;
}

// ---------------------------------------------------------------- 3. lift-up

Criterion liftup() {
    Criterion c{3, "lift-up growth without stratification, suppression with it", {}};
    const StreakState s0{{}, {1.0, 0.0}, {}, {}};
    auto sup_u1 = [&](const PhysParams& p, double t_end, double dt) {
        double sup = 0.0;
        for (double t = 0.0; t <= t_end; t += dt) {
            const StreakState s = p.beta > 0.0 ? propagate_streak(s0, t, p, 0.0, 1) : liftup_baseline(s0, t, p, 0.0, 1);
            sup = std::max(sup, std::abs(s.u1));
        }
        return sup;
    };
    std::map<double, double> strat;
    for (double nu : {1e-2, 1e-3}) {
        const double peak = sup_u1({nu, nu, 0.0}, 5.0 / nu, 0.0037 / nu);
        const double expected = 1.0 / (std::exp(1.0) * nu);
        c.add("liftup_peak_nu" + fmt("%g", nu), std::abs(peak - expected) <= 0.01 * expected,
              "beta=0 nu=" + fmt("%g", nu) + " peak " + fmt("%.4f", peak) + " vs 1/(e nu) " + fmt("%.4f", expected));
        strat[nu] = sup_u1({nu, nu, 1.0}, 400.0, 0.005);
        const double bound = 8.0 * 1.0 * (std::abs(s0.u2) + std::abs(s0.theta));
        c.add("stratified_bound_nu" + fmt("%g", nu), strat[nu] <= bound,
              "beta=1 sup " + fmt("%.4f", strat[nu]) + " <= " + fmt("%g", bound));
    }
    const double ratio = strat[1e-3] / strat[1e-2];
    c.add("stratified_nu_ratio", ratio <= 1.1, "sup ratio nu=1e-3/1e-2 " + fmt("%.4f", ratio));
    return c;
}

// ----------------------------------------------------------- 4. energy

Criterion energy_machinery() {
    Criterion c{4, "coercivity and energy identity", {}};
    auto gen = oracle::rng(99);
    std::uniform_real_distribution<double> amp(-5.0, 5.0), beta(0.6, 5.0), time(-30.0, 30.0), eta(-10.0, 10.0);
    std::uniform_int_distribution<int> kd(1, 5), ld(-5, 5), sign(0, 1);
    std::size_t violations = 0;
    for (int i = 0; i < 100000; ++i) {
        double b = beta(gen);
        if (b == 0.6) b = 5.0;
        const PhysParams p{1e-2, 1e-2, b};
        const ModeIndex m{sign(gen) ? kd(gen) : -kd(gen), ld(gen), eta(gen)};
        const SymmetricState s{{amp(gen), amp(gen)}, {amp(gen), amp(gen)}};
        const double n2 = std::norm(s.g) + std::norm(s.gamma);
        const double e = energy(time(gen), s, m, p);
        const double slack = 1e-14 * n2;
        if (e < 0.5 * (1.0 - 1.0 / (2.0 * b)) * n2 - slack || e > 0.5 * (1.0 + 1.0 / (2.0 * b)) * n2 + slack) {
            ++violations;
        }
    }
    c.add("coercivity", violations == 0, std::to_string(violations) + "/100000 coercivity violations");

    const ModeIndex m{1, 1, 2.0};
    const PhysParams p{1e-2, 1e-2, 1.0};
    NonzeroModeState x0;
    x0.q = q_from_u2({1.0, 0.0}, 0.0, m);
    x0.theta = {0.5, 0.25};
    x0.u3 = {0.0, 0.5};
    x0.u1 = -(m.eta * cplx(1.0, 0.0) + x0.u3) / 1.0;
    IntegratorConfig cfg;
    cfg.t_end = 10.0;
    cfg.rel_tol = 1e-12;
    cfg.abs_tol = 1e-15;
    double residual[2];
    double max_e = 0.0;
    int i = 0;
    for (double dt : {2e-3, 1e-3}) {
        cfg.sample_dt = dt;
        const Trajectory tr = integrate_mode(x0, m, p, cfg);
        residual[i++] = check_energy_identity(tr, m, p);
        for (const auto& d : tr.diagnostics) max_e = std::max(max_e, *d.energy);
    }
    const double rel = residual[1] / max_e;
    const double order = std::log2(residual[0] / residual[1]);
    c.add("energy_identity", rel <= 1e-4, "residual/maxE at dt=1e-3 " + fmt("%.2e", rel));
    c.add("energy_order", order >= 1.8 && order <= 2.2, "fitted order " + fmt("%.3f", order));
    return c;
}

// ------------------------------------------------ 5 + 8 + 9. standard suite

struct SuiteStats {
    std::map<std::string, double> worst;
    std::map<std::string, std::size_t> failures;
    std::size_t rows = 0;
    std::vector<ReportRow> all;
};

SuiteStats summarize(std::vector<ReportRow> rows) {
    SuiteStats s;
    s.rows = rows.size();
    for (const auto& r : rows) {
        auto [it, inserted] = s.worst.emplace(r.check, r.statistic);
        if (!inserted) it->second = std::max(it->second, r.statistic);
        if (std::isnan(r.statistic)) it->second = r.statistic;
        if (!r.pass) ++s.failures[r.check];
    }
    s.all = std::move(rows);
    return s;
}

Criterion envelope_dominance(const SuiteStats& suite, double secs, std::size_t workers) {
    Criterion c{5, "envelope dominance on the standard suite", {}};
    for (const char* check : {"envelope_sym", "envelope_sharp", "envelope_order", "envelope_u1u3",
                              "theorem1_grid_envelopes", "theorem1_chain_u2", "theorem1_chain_theta"}) {
        const auto it = suite.worst.find(check);
        const bool present = it != suite.worst.end();
        const std::size_t fails = suite.failures.count(check) ? suite.failures.at(check) : 0;
        c.add(check, present && fails == 0 && it->second <= 1e-9,
              std::string(check) + " " + (present ? fmt("%.2e", it->second) : std::string("missing")));
    }
    c.add("suite_runtime", secs <= 600.0, fmt("%.1f s", secs) + " on " + std::to_string(workers) + " workers");
    return c;
}

// ------------------------------------------------------------ 6. quadrature

Criterion quadrature_facts() {
    Criterion c{6, "p^{-3/4} line integral bound and integral_p closed form", {}};
    double worst_bound = -INFINITY, worst_oracle = 0.0;
    for (std::int64_t k : {1, 2, 3}) {
        for (std::int64_t l : {0, 1, 2, 4}) {
            const ModeIndex m{k, l, 0.0};
            const double v = integral_p_power_over_line(m, 0.75);
            worst_bound = std::max(worst_bound, v / (6.0 * std::pow(double(k), -1.5)));
            // Closed form: F^{1/2-a} / |k| B(1/2, a - 1/2) with F = k^2 + l^2.
            const double exact = std::pow(m.kl_norm2(), -0.25) / double(k) * std::beta(0.5, 0.25);
            worst_oracle = std::max(worst_oracle, oracle::rel_err(v, exact));
        }
    }
    const double unit = integral_p_power_over_line({1, 0, 0.0}, 0.75);
    c.add("p34_bound", worst_bound <= 1.0, "max integral/(6|k|^-1.5) " + fmt("%.4f", worst_bound));
    c.add("p34_oracle", worst_oracle <= 1e-10 && std::abs(unit - 5.2441151085842396) <= 1e-9,
          "k=1,l=0 " + fmt("%.6f", unit) + ", closed-form agreement " + fmt("%.1e", worst_oracle));

    double worst_p = 0.0;
    for (std::int64_t k : {1, 2, 3}) {
        for (std::int64_t l : {0, 1, 2, 4}) {
            for (double eta : {-3.0, 0.0, 2.5}) {
                const ModeIndex m{k, l, eta};
                for (double t : {0.5, 5.0, 25.0, 60.0, 100.0}) {
                    const double q = oracle::integrate([&](double s) { return symbol_p(s, m); }, 0.0, t);
                    worst_p = std::max(worst_p, oracle::rel_err(integral_p(t, m), q));
                }
            }
        }
    }
    c.add("integral_p", worst_p <= 1e-10, "integral_p vs quadrature " + fmt("%.1e", worst_p));
    return c;
}

// -------------------------------------------------------- 7. hyperbolic bounds

Criterion hyperbolic() {
    Criterion c{7, "hyperbolic kernel bounds on a 50x50 (a, b) grid", {}};
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const double a = i == 0 ? 0.0 : std::pow(10.0, -3.0 + 4.0 * (i - 1) / 48.0);
        for (int j = 0; j < 50; ++j) {
            const double b = std::pow(10.0, -3.0 + 4.0 * j / 49.0);
            const double scale = 1.0 / (a > 0.0 ? std::min(a, b) : b);
            std::vector<double> ts;
            for (int n = 0; n <= 5000; ++n) ts.push_back(100.0 * scale * n / 5000.0);
            worst = std::max(worst, hyperbolic_bounds_check({a, b, (a - b) * (a + b)}, ts));
        }
    }
    c.add("hyperbolic_bounds", worst == 0.0, "max violation " + fmt("%.1e", worst));
    return c;
}

// ---------------------------------------------------------- 8. theorem-level

Criterion theorem_reports(const SuiteStats& suite, const std::vector<ScenarioConfig>& configs, std::size_t workers) {
    Criterion c{8, "theorem-level reports", {}};
    const Thresholds pins{};
    const double t1 = suite.worst.at("theorem1");
    c.add("theorem1_pinned", std::isfinite(t1) && suite.failures.count("theorem1") == 0 &&
                                 suite.failures.count("theorem1_u13_minimal") == 0 &&
                                 suite.failures.count("theorem1_u2_minimal") == 0 &&
                                 suite.failures.count("theorem1_theta_minimal") == 0,
          "theorem1 sup ratio max " + fmt("%.4f", t1) + " <= pin " + fmt("%g", pins.theorem1));

    // Tolerance refinement on one scenario per parameter set.
    double worst_change = 0.0;
    for (const auto& base : configs) {
        if (base.id.find("-c0-w0.5") == std::string::npos) continue;
        ScenarioConfig fine = base;
        fine.checks = {Check::theorem1};
        ScenarioConfig coarse = fine;
        fine.integrator.rel_tol = 1e-11;
        fine.integrator.abs_tol = 1e-14;
        auto stat = [&](const ScenarioConfig& cfg) -> double {
            for (const auto& r : run_sweep(cfg, {workers, false, ""})) {
                if (r.check == "theorem1") return r.statistic;
            }
            return NAN;
        };
        worst_change = std::max(worst_change, oracle::rel_err(stat(coarse), stat(fine)));
    }
    c.add("theorem1_stable", worst_change <= 0.05, "tolerance refinement change " + fmt("%.2e", worst_change));

    const double t2 = suite.worst.at("theorem2_u1");
    c.add("theorem2_pinned", std::isfinite(t2) && suite.failures.count("theorem2") == 0 &&
                                 suite.failures.count("theorem2_u1") == 0,
          "theorem2 u1 ratio max " + fmt("%.4f", t2) + " <= pin " + fmt("%g", pins.theorem2_u1));

    // beta-monotonicity of the u1 statistic at fixed data: group by everything but beta.
    std::map<std::string, std::map<double, double>> series;
    for (const auto& r : suite.all) {
        if (r.check != "theorem2_u1") continue;
        const auto at = r.scenario.find("-beta");
        const auto end = r.scenario.find("-c", at);
        const double beta = std::stod(r.scenario.substr(at + 5, end - at - 5));
        series[r.scenario.substr(0, at) + r.scenario.substr(end)][beta] = r.statistic;
    }
    std::size_t monotone = 0, total = 0;
    std::string worst_case;
    double worst_rise = 0.0;
    for (const auto& [key, by_beta] : series) {
        if (by_beta.size() < 3) continue;
        ++total;
        bool ok = true;
        double prev = INFINITY;
        for (const auto& [beta, v] : by_beta) {
            if (v > prev) {
                ok = false;
                if (v / prev - 1.0 > worst_rise) {
                    worst_rise = v / prev - 1.0;
                    worst_case = key;
                }
            }
            prev = v;
        }
        monotone += ok;
    }
    c.add("theorem2_beta_monotonicity", total > 0 && monotone == total,
          "u1 statistic non-increasing in beta on " + std::to_string(monotone) + "/" + std::to_string(total) +
              " data sets; largest rise " + fmt("%.2f%%", 100.0 * worst_rise) +
              (worst_case.empty() ? "" : " (" + worst_case + ")"));
    return c;
}

// ----------------------------------------------------------- 9. determinism

Criterion determinism(const std::vector<ScenarioConfig>& configs) {
    Criterion c{9, "sweep output identical across worker counts", {}};
    std::vector<ScenarioConfig> subset;
    for (std::size_t i = 0; i < configs.size(); i += 9) subset.push_back(configs[i]);
    const std::string ref = emit_report(run_sweep(subset, {1, false, ""}), ReportFormat::csv);
    bool same = true;
    for (std::size_t w : {4u, 8u}) same &= emit_report(run_sweep(subset, {w, false, ""}), ReportFormat::csv) == ref;
    c.add("determinism", same, std::to_string(subset.size()) + " scenarios, workers {1, 4, 8}, " +
                                   std::to_string(ref.size()) + " bytes");
    return c;
}

std::set<std::string> parse_expected(int argc, char** argv) {
    std::set<std::string> out;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--expected-failures") == 0 && i + 1 < argc) {
            std::stringstream ss(argv[++i]);
            std::string item;
            while (std::getline(ss, item, ',')) {
                if (!item.empty()) out.insert(item);
            }
        }
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    const std::set<std::string> expected = parse_expected(argc, argv);
    const std::size_t workers = resolve_workers(std::nullopt);

    std::vector<Criterion> results;
    auto report = [&](Criterion c) {
        std::vector<std::string> failed, details;
        for (const auto& s : c.subs) {
            details.push_back(s.detail);
            if (!s.pass) failed.push_back(s.name);
        }
        std::string line = c.pass() ? "PASS" : "FAIL";
        line += " " + std::to_string(c.id) + " " + c.title + ": ";
        for (std::size_t i = 0; i < details.size(); ++i) line += (i ? "; " : "") + details[i];
        if (!failed.empty()) {
            line += " [failed:";
            for (const auto& f : failed) line += " " + f + (expected.count(f) ? " (expected)" : "");
            line += "]";
        }
        std::printf("%s\n", line.c_str());
        std::fflush(stdout);
        results.push_back(std::move(c));
    };

    report(streak_equivalence());
    report(matrix_identities());
    report(liftup());
    report(energy_machinery());

    const auto configs = standard_suite();
    const auto t0 = Clock::now();
    const SuiteStats suite = summarize(run_sweep(configs, {workers, false, ""}));
    const double suite_secs = seconds_since(t0);
    report(envelope_dominance(suite, suite_secs, workers));
    report(quadrature_facts());
    report(hyperbolic());
    report(theorem_reports(suite, configs, workers));
    report(determinism(configs));

    std::set<std::string> failing;
    std::size_t passed = 0;
    for (const auto& c : results) {
        passed += c.pass();
        for (const auto& s : c.subs) {
            if (!s.pass) failing.insert(s.name);
        }
    }
    std::printf("%zu/%zu criteria pass (%zu standard-suite rows)\n", passed, results.size(), suite.rows);
    if (failing == expected) {
        if (!expected.empty()) std::printf("failing sub-checks match the expected set\n");
        return 0;
    }
    for (const auto& f : failing) {
        if (!expected.count(f)) std::printf("unexpected failure: %s\n", f.c_str());
    }
    for (const auto& f : expected) {
        if (!failing.count(f)) std::printf("expected failure now passes: %s\n", f.c_str());
    }
    return 1;
}
