#include "stratlab/errors.hpp"
#include "stratlab/harness.hpp"
#include "stratlab/verify.hpp"

#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace stratlab;

namespace {

const char* small_config = R"(
[scenario]
id = small
[params]
nu = 1e-2
kappa = 1e-2
beta = 1
[modes]
k = 0, 1
l = 0, 1
eta = 0, 1.5
[ic]
u1 = 0.5, 0, 0, 2
u2 = 1, 0, 0, 2
u3 = 0, 0.5, 0, 2
theta = 0.5, 0.25, 0, 2
[integrator]
report_samples = 60
[streaks]
t_end = 100
sample_dt = 0.5
)";

bool has(const ScenarioConfig& c, Check k) { return c.enabled(k); }

int parse_error_line(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ParseError& e) {
        return e.line();
    }
    return -1;
}

std::string validation_field(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ValidationError& e) {
        return e.field();
    }
    return "";
}

} // namespace

TEST_CASE("check names") {
    for (Check c : all_checks) CHECK(check_from_name(check_name(c)) == c);
    CHECK_FALSE(check_from_name("nope").has_value());
}

TEST_CASE("minimal config takes the documented defaults") {
    const ScenarioConfig c = parse_config("[params]\nbeta = 1\n");
    CHECK(c.id == "scenario");
    CHECK(c.params.nu == 1e-2);
    CHECK(c.params.kappa == 1e-2);
    CHECK(c.params.beta == 1.0);
    CHECK(c.k_values == std::vector<std::int64_t>{1});
    CHECK(c.l_values == std::vector<std::int64_t>{0});
    CHECK(c.eta_points == std::vector<double>{0.0});
    CHECK(c.divergence_projection);
    CHECK_FALSE(c.grid_cutoff.has_value());
    CHECK(c.integrator.rel_tol == 1e-9);
    CHECK(c.integrator.abs_tol == 1e-12);
    CHECK_FALSE(c.integrator.t_end.has_value());
    CHECK(c.report_samples == 400);
    CHECK(c.checks.size() == std::size(all_checks));
    CHECK(c.warnings.empty());
    CHECK(c.thresholds.theorem1 == 0.2);
}

TEST_CASE("config sections") {
    const ScenarioConfig c = parse_config(std::string(small_config) + R"(
[grid]
cutoff = 9
panels = 6
[checks]
enabled = theorem1, divergence   ; order does not matter
[thresholds]
theorem1 = 0.5
)");
    CHECK(c.id == "small");
    CHECK(c.k_values == std::vector<std::int64_t>{0, 1});
    CHECK(c.eta_points == std::vector<double>{0.0, 1.5});
    CHECK(c.profile.u3.amplitude == cplx(0.0, 0.5));
    CHECK(c.grid_cutoff == 9.0);
    CHECK(c.grid().size() == 6u * gauss_points_per_panel);
    CHECK(c.checks == std::vector<Check>{Check::divergence, Check::theorem1});
    CHECK(c.thresholds.theorem1 == 0.5);
    CHECK(c.streak_t_end == 100.0);
}

TEST_CASE("gates disable theorem checks with a warning") {
    const ScenarioConfig c = parse_config("[params]\nbeta = 0.4\n[checks]\nenabled = theorem1, divergence\n");
    CHECK_FALSE(has(c, Check::theorem1));
    CHECK(has(c, Check::divergence));
    REQUIRE(c.warnings.size() == 1);
    CHECK(c.warnings[0].find("theorem1") != std::string::npos);

    const ScenarioConfig ratio = parse_config("[params]\nnu = 1\nkappa = 4\nbeta = 1\n");
    CHECK_FALSE(has(ratio, Check::theorem1));
    CHECK_FALSE(has(ratio, Check::envelopes));
    CHECK(has(ratio, Check::energy_identity));

    const ScenarioConfig zero = parse_config("[params]\nbeta = 0\n");
    CHECK(zero.checks == std::vector<Check>{Check::divergence, Check::liftup_baseline});
}

TEST_CASE("parse errors") {
    CHECK(parse_error_line("[params]\nnu = 1e-2\nbeta = 1.x\n") == 3);
    CHECK(parse_error_line("[params]\nbeta\n") == 2);
    CHECK(parse_error_line("[params]\nbeta = 1\nbeta = 2\n") == 3);
    CHECK(parse_error_line("[nosuch]\n") == 1);
    CHECK(parse_error_line("[params]\ncolour = red\n") == 2);
    CHECK(parse_error_line("beta = 1\n") == 1);
    CHECK(parse_error_line("[modes]\nk = 1, two\n") == 2);
    CHECK(parse_error_line("[ic]\nu1 = 1, 0, 0\n") == 2);
}

TEST_CASE("validation errors name the field") {
    CHECK(validation_field("[params]\nnu = -1\n") == "params.nu");
    CHECK(validation_field("[params]\nbeta = -1\n") == "params.beta");
    CHECK(validation_field("[modes]\nk = 1, 1\n") == "modes.k");
    CHECK(validation_field("[scenario]\nid = a b\n") == "scenario.id");
    CHECK(validation_field("[checks]\nenabled = envelopes, bogus\n") == "checks.enabled");
    CHECK(validation_field("[integrator]\nrel_tol = 0\n") == "integrator");
    CHECK(validation_field("[grid]\npanels = 0\n") == "grid.panels");
}

TEST_CASE("sweep output is independent of the worker count") {
    const ScenarioConfig c = parse_config(small_config);
    const std::string one = emit_report(run_sweep(c, {1, false, ""}), ReportFormat::csv);
    CHECK(one.find(",false,") == std::string::npos);
    for (std::size_t w : {4u, 8u}) CHECK(emit_report(run_sweep(c, {w, false, ""}), ReportFormat::csv) == one);
    CHECK(emit_report(run_sweep(c, {1, false, ""}), ReportFormat::csv) == one);
}

TEST_CASE("sweep row layout") {
    const auto rows = run_sweep(parse_config(small_config), {2, false, ""});
    auto count = [&](const std::string& check) {
        return std::count_if(rows.begin(), rows.end(), [&](const ReportRow& r) { return r.check == check; });
    };
    // (1,0,0), (1,0,1.5), (1,1,0), (1,1,1.5) nonzero modes.
    CHECK(count("energy_identity") == 4);
    CHECK(count("divergence") == 4);
    // (0,1,0), (0,1,1.5) and (0,0,1.5) streaks.
    CHECK(count("liftup_baseline") == 3);
    CHECK(count("streak_bound") == 2);
    CHECK(count("theorem1") == 1);
    CHECK(count("theorem2_u1") == 1);
    for (const auto& r : rows) {
        CHECK(r.pass == (r.statistic <= r.threshold));
        CHECK(r.wall_ms == 0.0);
    }
}

TEST_CASE("empty mode list gives a header-only report") {
    const ScenarioConfig c = parse_config("[modes]\nk =\n");
    const auto rows = run_sweep(c, {2, false, ""});
    CHECK(rows.empty());
    CHECK(emit_report(rows, ReportFormat::csv) == std::string(csv_header) + "\n");
}

TEST_CASE("a failing scenario leaves the others untouched") {
    const ScenarioConfig good = parse_config(small_config);
    ScenarioConfig bad = good;
    bad.id = "bad";
    bad.integrator.rel_tol = 1e-30;
    bad.integrator.abs_tol = 1e-40;
    const std::vector<ScenarioConfig> both{bad, good};
    const auto mixed = run_sweep(both, {2, false, ""});
    const auto alone = run_sweep(good, {2, false, ""});
    std::vector<ReportRow> good_rows;
    std::size_t failed = 0;
    for (const auto& r : mixed) {
        if (r.scenario == "small") good_rows.push_back(r);
        else if (!r.pass) {
            ++failed;
            CHECK(std::isnan(r.statistic));
            CHECK_FALSE(r.note.empty());
        }
    }
    CHECK(failed > 0);
    CHECK(good_rows == alone);
}

TEST_CASE("trajectory dump") {
    const auto dir = std::filesystem::temp_directory_path() / "stratlab_dump_test";
    std::filesystem::remove_all(dir);
    ScenarioConfig c = parse_config("[modes]\nk = 1\nl = 1\neta = 0\n[checks]\nenabled = divergence\n");
    run_sweep(c, {1, false, dir.string()});
    std::size_t files = 0;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        ++files;
        std::ifstream in(entry.path());
        std::string header;
        std::getline(in, header);
        CHECK(header == "t,re_q,im_q,re_theta,im_theta,re_u1,im_u1,re_u3,im_u3,energy,envelope");
    }
    CHECK(files == 1);
    std::filesystem::remove_all(dir);
}

TEST_CASE("standard suite") {
    const auto suite = standard_suite();
    CHECK(suite.size() == 28);
    for (const auto& c : suite) {
        CHECK(c.warnings.empty());
        CHECK(theorem1_applicable(c.params));
    }
    std::vector<std::string> ids;
    for (const auto& c : suite) ids.push_back(c.id);
    std::sort(ids.begin(), ids.end());
    CHECK(std::adjacent_find(ids.begin(), ids.end()) == ids.end());
    for (const auto& c : envelope_suite()) CHECK(c.checks == std::vector<Check>{Check::envelopes});
}

TEST_CASE("worker resolution") {
    unsetenv("STRAT_LAB_THREADS");
    CHECK(resolve_workers(3) == 3);
    CHECK(resolve_workers(std::nullopt) >= 1);
    setenv("STRAT_LAB_THREADS", "5", 1);
    CHECK(resolve_workers(3) == 5);
    setenv("STRAT_LAB_THREADS", "junk", 1);
    CHECK(resolve_workers(3) == 3);
    unsetenv("STRAT_LAB_THREADS");
}

TEST_CASE("built-in verification sweeps") {
    for (const auto& r : verify_streaks(false, 2)) CHECK(r.pass);
    const auto lift = baseline_liftup();
    CHECK(lift.size() == 5);
    for (const auto& r : lift) CHECK(r.pass);
}
