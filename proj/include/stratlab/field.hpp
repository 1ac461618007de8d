#pragma once

// Spectral initial data on an eta quadrature grid, Sobolev norms, and the
// aggregation of per-mode solutions into field-level decay statistics.

#include "stratlab/nonzero.hpp"
#include "stratlab/streak.hpp"
#include "stratlab/symbols.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

namespace stratlab {

/// Composite Gauss-Legendre rule on [-cutoff, cutoff]; nodes are symmetric
/// about 0 so node i and node size()-1-i are negatives of each other.
struct EtaGrid {
    std::vector<double> nodes;
    std::vector<double> weights;
    double cutoff = 0.0;

    std::size_t size() const { return nodes.size(); }
};

/// Points per panel of the Gauss-Legendre rule.
inline constexpr int gauss_points_per_panel = 20;

EtaGrid make_eta_grid(double cutoff, int panels);

/// A exp(-(eta - center)^2 / (2 width^2)); amplitude 0 means an absent profile.
struct GaussianProfile {
    cplx amplitude{};
    double center = 0.0;
    double width = 1.0;

    cplx operator()(double eta) const;
    /// Integral over the real line of |profile|^2.
    double mass() const;
    /// Integral of |profile|^2 over |eta| > cutoff.
    double tail_mass(double cutoff) const;
};

/// Velocity and temperature amplitudes at one wavenumber triple.
struct FieldAmplitudes {
    cplx u1{};
    cplx u2{};
    cplx u3{};
    cplx theta{};
};

struct ModeProfiles {
    std::int64_t k = 1;
    std::int64_t l = 0;
    GaussianProfile u1, u2, u3, theta;

    FieldAmplitudes operator()(double eta) const;
};

struct InitialConditionSpec {
    std::vector<ModeProfiles> modes;
    /// Remove the component of (u1, u2, u3) along (k, eta, l) at every node.
    bool divergence_projection = true;
};

/// Adds the (-k, -l) partner of every listed mode with conjugated amplitudes
/// and mirrored centers, so the represented field is real.
InitialConditionSpec with_conjugates(const InitialConditionSpec& spec);

/// Smallest symmetric cutoff that leaves less than 1e-10 of every profile's
/// mass outside [-cutoff, cutoff], and a panel count with panels no wider
/// than the narrowest profile.
EtaGrid default_grid(const InitialConditionSpec& spec);

/// u minus its component along (k, eta, l).
FieldAmplitudes leray_project(const FieldAmplitudes& u, std::int64_t k, double eta, std::int64_t l);

struct ModeSample {
    ModeIndex mode{};
    std::size_t eta_index = 0;
    double weight = 0.0;
    std::variant<NonzeroModeState, StreakState> state;

    bool is_streak() const { return std::holds_alternative<StreakState>(state); }
};

/// Amplitudes at t = 0 of a sample (u2 recovered from q for k != 0).
FieldAmplitudes initial_amplitudes(const ModeSample& s);

/// Samples every profile at every grid node, ordered by (k, l, node index).
/// Throws SymmetryViolationError when a listed (-k, -l) partner differs from
/// the conjugate mirror by more than 1e-12 (relative); unlisted partners are
/// implied.
std::vector<ModeSample> build_modes(const InitialConditionSpec& spec, const EtaGrid& grid);

enum Component : unsigned {
    comp_u1 = 1u,
    comp_u2 = 2u,
    comp_u3 = 4u,
    comp_theta = 8u,
    comp_velocity = comp_u1 | comp_u2 | comp_u3,
    comp_all = comp_velocity | comp_theta,
};

/// sqrt(sum_{k,l} int (1 + k^2 + eta^2 + l^2)^s |phi|^2 d eta) over the
/// selected components of the samples at t = 0. Requires s >= 0.
double hs_norm(std::span<const ModeSample> samples, double s, unsigned components = comp_all);

/// Throws QuadratureError when the grid cuts off more than 1e-8 of the
/// initial L^2 mass of the spec.
void check_truncation(const InitialConditionSpec& spec, const EtaGrid& grid);

/// Sampled decay statistics of the nonzero-mode part of a field.
struct NormRecord {
    double t = 0.0;
    double u13 = 0.0;
    double u2 = 0.0;
    double theta = 0.0;
    /// ||(u1,u3)|| + <t>^{3/2} ||u2|| + <t>^{1/2} ||theta||.
    double lhs = 0.0;
    /// exp(-lambda t^3 / 24).
    double envelope = 0.0;
};

inline constexpr std::array<double, 5> report_sobolev_indices{1.0, 1.5, 2.0, 3.0, 4.0};

struct NormReport {
    std::vector<NormRecord> records;
    /// ||(u, theta)(0)||_{H^s} for s in report_sobolev_indices.
    std::array<double, 5> initial_hs{};
    /// sup_t lhs / (envelope (||u(0)||_{H^3} + ||theta(0)||_{H^3})).
    double sup_ratio = 0.0;
    /// Per-component ratios against the smallest data norms that control them:
    /// (u1,u3) vs ||(u1,u3)||_{L^2} + ||u2||_{H^{3/2}} + ||theta||_{H^1};
    /// <t>^{3/2} u2 vs ||u2||_{H^3} + ||theta||_{H^3};
    /// <t>^{1/2} theta vs ||u2||_{H^2} + ||theta||_{H^1}.
    double sup_ratio_u13_minimal = 0.0;
    double sup_ratio_u2_minimal = 0.0;
    double sup_ratio_theta_minimal = 0.0;
    /// Largest excess of ||u2_{k,l}(t)||^2 over
    ///   B(t) = |k,l| C_beta^2 exp(-lambda k^2 t^3/12) int p^{-3/2} (|g(0)|^2 + |gamma(0)|^2) d eta,
    /// relative to B(0), over (k,l) and t; the theta chain uses weight
    /// p^{-1/2}/|k,l|. Non-positive when the chain holds.
    double chain_u2_ratio = 0.0;
    double chain_theta_ratio = 0.0;
};

/// <t> = sqrt(1 + t^2).
inline double japanese_bracket(double t) { return std::sqrt(1.0 + t * t); }

/// Squared L^2 norms of (u1,u3), u2 and theta of one trajectory sample.
struct SampleNorms {
    double u13 = 0.0;
    double u2 = 0.0;
    double theta = 0.0;
};

SampleNorms sample_norms(const NonzeroModeState& s, const ModeIndex& mode, double t);

/// Per-node time series used by theorem1_report; lets callers drop the full
/// trajectories once reduced.
struct NodeSeries {
    ModeIndex mode{};
    double weight = 0.0;
    SymmetricState sym0{};
    std::vector<SampleNorms> norms;
};

NodeSeries reduce_trajectory(const Trajectory& traj, double weight);

/// Aggregates the k != 0 part. samples are the build_modes output used to start
/// the runs (streak samples are ignored); series must match the nonzero samples
/// in order and share one time grid. Throws ParameterGateError when the rate
/// constants are unavailable, std::invalid_argument on inconsistent inputs.
NormReport theorem1_report(std::span<const NodeSeries> series, std::span<const double> times,
                           std::span<const ModeSample> samples, const PhysParams& params);

struct StreakReport {
    std::vector<double> times;
    /// ||(u, theta)_0(t)||_{L^2}.
    std::vector<double> norm;
    std::vector<double> u1_norm;
    /// sup_t exp(min{nu,kappa} t) ||(u,theta)_0(t)|| / ||(u,theta)_0(0)||_{H^4}.
    double sup_ratio = 0.0;
    /// sup_t exp(min{nu,kappa} t) ||u1_0(t)|| / (||u1||_{H^4} + (||u2||_{H^4} + ||theta||_{H^4}) / beta).
    double u1_ratio = 0.0;
};

/// Aggregates the closed-form streak solution over the k = 0, l != 0 samples.
/// Samples with l = 0 are excluded: they are pure heat modes without a uniform
/// decay rate. Requires beta > 0.
StreakReport theorem2_report(std::span<const ModeSample> samples, std::span<const double> times,
                             const PhysParams& params);

/// sup_t exp(min{nu,kappa} t) ||u1_0(t)|| / (||u1||_{H^4} + ||u2||_{H^4} + ||theta||_{H^4})
/// for the unstratified (beta = 0) solution; grows like 1/nu.
double liftup_u1_ratio(std::span<const ModeSample> samples, std::span<const double> times, const PhysParams& params);

/// ||(u1,u3)||^2, ||u2||^2, ||theta||^2 at sample j evaluated in stationary
/// coordinates xi = eta - k t; equal to the moving-frame values because the
/// map is a translation.
struct FrameNorms {
    double u13 = 0.0;
    double u2 = 0.0;
    double theta = 0.0;
};

FrameNorms moving_frame_norms(std::span<const Trajectory> trajs, std::span<const double> weights, std::size_t j);
FrameNorms stationary_frame_norms(std::span<const Trajectory> trajs, std::span<const double> weights, std::size_t j);

} // namespace stratlab
