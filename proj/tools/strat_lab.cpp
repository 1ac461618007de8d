// strat_lab: run scenario configs and the built-in verification sweeps.

#include "stratlab/errors.hpp"
#include "stratlab/harness.hpp"
#include "stratlab/report.hpp"
#include "stratlab/verify.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace stratlab;

namespace {

struct OutputOptions {
    std::string out_dir;
    std::string format = "csv";
    std::optional<std::size_t> workers;
    bool timing = false;
};

void add_output_options(CLI::App* cmd, OutputOptions& o) {
    cmd->add_option("--workers", o.workers, "Worker threads (default: all cores; STRAT_LAB_THREADS overrides)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--out", o.out_dir, "Directory for the report (default: stdout)");
    cmd->add_option("--format", o.format, "Report format")->check(CLI::IsMember({"csv", "jsonl"}));
    cmd->add_flag("--timing", o.timing, "Record per-task wall time");
}

/// Writes the report and the failure summary; returns the exit code.
int finish(const std::vector<ReportRow>& rows, const OutputOptions& o, const std::string& name) {
    const ReportFormat fmt = o.format == "jsonl" ? ReportFormat::jsonl : ReportFormat::csv;
    const std::string text = emit_report(rows, fmt);
    if (o.out_dir.empty()) {
        std::cout << text;
    } else {
        fs::create_directories(o.out_dir);
        const fs::path path = fs::path(o.out_dir) / (name + (fmt == ReportFormat::csv ? ".csv" : ".jsonl"));
        std::ofstream(path, std::ios::binary) << text;
        std::cerr << "wrote " << path.string() << '\n';
    }
    std::size_t failed = 0;
    for (const auto& r : rows) {
        if (r.pass) continue;
        ++failed;
        std::cerr << "FAIL " << r.scenario << ' ' << r.check;
        if (r.mode_k) std::cerr << " k=" << *r.mode_k << " l=" << *r.mode_l << " eta=" << format_double(*r.eta);
        std::cerr << " statistic=" << format_double(r.statistic) << " threshold=" << format_double(r.threshold);
        if (!r.note.empty()) std::cerr << " (" << r.note << ')';
        std::cerr << '\n';
    }
    std::cerr << rows.size() - failed << '/' << rows.size() << " rows pass\n";
    return failed == 0 ? 0 : 1;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Linearized stratified Couette flow verification lab"};
    app.require_subcommand(1);

    OutputOptions run_opts, streak_opts, env_opts, liftup_opts;
    std::string config_path;
    bool dump = false;
    auto* run = app.add_subcommand("run", "Run every enabled check of a scenario config");
    run->add_option("config", config_path, "Scenario config file")->required()->check(CLI::ExistingFile);
    add_output_options(run, run_opts);
    run->add_flag("--dump-trajectories", dump, "Write per-mode trajectory CSVs under <out>/trajectories");

    std::string grid = "coarse";
    auto* streaks = app.add_subcommand("verify-streaks", "Closed-form streak solution against Runge-Kutta");
    streaks->add_option("--grid", grid, "Parameter grid")->check(CLI::IsMember({"coarse", "fine"}));
    add_output_options(streaks, streak_opts);

    auto* envelopes = app.add_subcommand("verify-envelopes", "Envelope checks over the standard suite");
    add_output_options(envelopes, env_opts);

    auto* liftup = app.add_subcommand("baseline-liftup", "Lift-up growth with and without stratification");
    add_output_options(liftup, liftup_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            const ScenarioConfig cfg = parse_config(read_file(config_path));
            for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << '\n';
            SweepOptions opts;
            opts.workers = resolve_workers(run_opts.workers);
            opts.timing = run_opts.timing;
            if (dump) {
                if (run_opts.out_dir.empty()) throw std::runtime_error("--dump-trajectories requires --out");
                opts.dump_dir = (fs::path(run_opts.out_dir) / "trajectories").string();
            }
            return finish(run_sweep(cfg, opts), run_opts, cfg.id);
        }
        if (*streaks) {
            return finish(verify_streaks(grid == "fine", resolve_workers(streak_opts.workers)), streak_opts,
                          "verify-streaks");
        }
        if (*envelopes) {
            SweepOptions opts;
            opts.workers = resolve_workers(env_opts.workers);
            opts.timing = env_opts.timing;
            const auto suite = envelope_suite();
            return finish(run_sweep(suite, opts), env_opts, "verify-envelopes");
        }
        return finish(baseline_liftup(), liftup_opts, "baseline-liftup");
    } catch (const ParseError& e) {
        std::cerr << "error: " << config_path << ": " << e.what() << '\n';
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
    }
    return 2;
}
