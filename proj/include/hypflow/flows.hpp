#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hypflow/energy.hpp"
#include "hypflow/triangulation.hpp"
#include "hypflow/types.hpp"

namespace hypflow {

enum class FlowKind
{
    Guo,                // dw/dt = B
    FractionalCalabi,   // dw/dt = Delta^s (B - b)
    GeneralizedYamabe,  // dw/dt = g (B - b),  g_i = ((2-p) B_i + p b_i) / B_i^(p+1)
};

std::string to_string(FlowKind kind);
/// Accepts "guo", "fractional-calabi", "generalized-yamabe".
FlowKind parse_flow_kind(const std::string& name);

struct FlowSpec
{
    FlowKind kind = FlowKind::FractionalCalabi;
    double s = 1.0;     // fractional exponent
    double p = 0.0;     // Yamabe weight exponent, in [0, 2)
    VectorXd targets;   // prescribed lengths; ignored by Guo
    double step = 0.1;  // initial (and maximum) step
    double tol = 1e-8;  // on ||B - b||_inf, or ||B||_inf for Guo
    double t_max = 1e4;
    double safety = 1e-6;  // minimum admissibility margin of any RK stage
    // Largest ||w_stage - w||_inf allowed within one step. Keeps explicit
    // steps from leaping into the flat far field where Delta^s ~ 0.
    double max_displacement = 0.25;
    // Bounds on h times the fastest and slowest decay rates of the
    // linearized field. Without them the step settles at the RK4 stability
    // limit near w*, where the discrete decay no longer follows the flow.
    // The fast cap keeps every mode damped; the slow cap keeps the slowest
    // mode, which dominates the tail, accurate. 0 disables either.
    double fast_mode_cap = 2.0;
    double slow_mode_cap = 0.5;
    long max_steps = 5'000'000;
    // Rejects steps on the exact Lyapunov value when set; otherwise on
    // C = sum (B - b)^2.
    bool evaluate_energy = true;
    // Reference point for reported Lyapunov values. When absent they are
    // reported relative to the final sample.
    std::optional<VectorXd> w_star;

    static FlowSpec guo();
    static FlowSpec fractional_calabi(double s, VectorXd targets);
    static FlowSpec generalized_yamabe(double p, VectorXd targets);

    /// Throws std::invalid_argument on out-of-range parameters.
    void validate(int n_boundaries) const;

    /// Targets used in residuals and energies: zero for Guo.
    VectorXd effective_targets(int n_boundaries) const;
};

struct FieldRates
{
    double slowest = 0.0;
    double fastest = 0.0;
};

/// Bounds on the decay rates of the field linearized at w, from the
/// eigenvalues of Delta.
FieldRates field_rates(const IdealTriangulation& tri, const BaseMetric& l0, const ConformalFactor& w,
                       const FlowSpec& spec);

/// g_i for the generalized Yamabe flow.
VectorXd yamabe_coefficients(const BoundaryLengths& B, const VectorXd& targets, double p);

/// dw/dt at w. Throws InadmissibleFactor.
VectorXd vector_field(const IdealTriangulation& tri, const BaseMetric& l0, const ConformalFactor& w,
                      const FlowSpec& spec);

enum class FlowStatus
{
    Converged,
    TimeBudgetExhausted,
    GuardTriggered,  // a kernel failed at an accepted state, or max_steps hit
    StepCollapse,    // step fell below 1e-12
};

std::string to_string(FlowStatus status);

struct FlowSample
{
    double t = 0.0;
    VectorXd w;
    BoundaryLengths B;
    double residual = 0.0;  // ||B - b||_inf
    double step = 0.0;      // step that produced this sample (0 for the first)
    EnergyRecord energy;
};

struct Trajectory
{
    FlowSpec spec;
    VectorXd targets;  // effective targets
    std::vector<FlowSample> samples;
    FlowStatus status = FlowStatus::GuardTriggered;
    std::string message;
    long accepted_steps = 0;
    long rejected_steps = 0;

    const FlowSample& final() const { return samples.back(); }
    /// Lambda for fractional Calabi, Xi for generalized Yamabe, Phi for Guo.
    double reported_energy(const FlowSample& sample) const;
};

/// Classical RK4 with step halving. A step is rejected when any stage comes
/// within `safety` of the admissibility boundary or moves further than
/// `max_displacement`, when a kernel throws, or when the Lyapunov value
/// (Lambda or Xi) would increase.
Trajectory integrate(const IdealTriangulation& tri, const BaseMetric& l0, const ConformalFactor& w0,
                     const FlowSpec& spec);

struct DecayFit
{
    double rate = 0.0;       // lambda in ||B - b||_2 ~ exp(-lambda t)
    double r_squared = 0.0;
    int samples_used = 0;
};

/// Least-squares slope of ln ||B - b||_2 against t over the second half (in
/// time) of the trajectory. Throws InsufficientData unless at least 10
/// samples lie below the initial residual and 3 of them in that half.
DecayFit decay_rate(const Trajectory& traj);

}  // namespace hypflow
