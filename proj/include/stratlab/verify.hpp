#pragma once

// Built-in verification sweeps behind the strat_lab subcommands.

#include "stratlab/harness.hpp"
#include "stratlab/report.hpp"
#include "stratlab/streak.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace stratlab {

struct StreakCase {
    PhysParams params{};
    double eta = 0.0;
    std::int64_t l = 1;
};

/// kappa for which a = b at (nu, beta, eta, l), offset by `shift`; kappa < nu.
double tuned_kappa(double nu, double beta, double eta, std::int64_t l, double shift = 0.0);

/// Fine: eta in {0, +-1, +-3}, l in {1, 2}, nu and kappa over all pairs of
/// {1e-3, 1e-2, 5e-2}, beta in {0.75, 1, 2}, plus three near-degenerate
/// (a close to b) cases. Coarse keeps eta in {0, 3}, l = 1, beta = 1 and the
/// near-degenerate cases.
std::vector<StreakCase> streak_verification_grid(bool fine);

/// Fixed generic initial data used by the streak sweeps.
StreakState streak_probe_state();

/// max_t |closed form - Runge-Kutta| over all components, divided by the
/// largest component of the Runge-Kutta solution, at times 0, dt, ..., t_end.
double streak_oracle_error(const StreakState& initial, const StreakCase& c, double t_end, double dt);

/// One row per case; statistic streak_oracle_error over [0, 50], threshold 1e-8.
std::vector<ReportRow> verify_streaks(bool fine, std::size_t workers);

/// The standard suite restricted to the envelope checks.
std::vector<ScenarioConfig> envelope_suite();

/// sup over the samples of |u1| along propagate_streak (beta > 0) or
/// liftup_baseline (beta = 0).
double sampled_u1_sup(const StreakState& initial, const PhysParams& params, double eta, std::int64_t l,
                      double t_end, double dt);

/// Lift-up rows at |eta,l| = 1 with u2(0) = 1: the sampled unstratified peak
/// against 1/(e nu) for nu in {1e-2, 1e-3}, the stratified (beta = 1) sup
/// against 8 (|u2(0)| + |theta(0)|) / beta, and the stratified sup ratio
/// between nu = 1e-3 and nu = 1e-2 against 1.1.
std::vector<ReportRow> baseline_liftup();

} // namespace stratlab
