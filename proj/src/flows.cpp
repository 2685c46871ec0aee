#include "hypflow/flows.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hypflow/conformal_metric.hpp"
#include "hypflow/errors.hpp"
#include "hypflow/jacobian.hpp"

namespace hypflow {

std::string to_string(FlowKind kind)
{
    switch (kind) {
        case FlowKind::Guo:
            return "guo";
        case FlowKind::FractionalCalabi:
            return "fractional-calabi";
        case FlowKind::GeneralizedYamabe:
            return "generalized-yamabe";
    }
    return "unknown";
}

FlowKind parse_flow_kind(const std::string& name)
{
    if (name == "guo")
        return FlowKind::Guo;
    if (name == "fractional-calabi")
        return FlowKind::FractionalCalabi;
    if (name == "generalized-yamabe")
        return FlowKind::GeneralizedYamabe;
    throw std::invalid_argument("unknown flow kind '" + name + "'");
}

std::string to_string(FlowStatus status)
{
    switch (status) {
        case FlowStatus::Converged:
            return "Converged";
        case FlowStatus::TimeBudgetExhausted:
            return "TimeBudgetExhausted";
        case FlowStatus::GuardTriggered:
            return "GuardTriggered";
        case FlowStatus::StepCollapse:
            return "StepCollapse";
    }
    return "unknown";
}

FlowSpec FlowSpec::guo()
{
    FlowSpec spec;
    spec.kind = FlowKind::Guo;
    return spec;
}

FlowSpec FlowSpec::fractional_calabi(double s, VectorXd targets)
{
    FlowSpec spec;
    spec.kind = FlowKind::FractionalCalabi;
    spec.s = s;
    spec.targets = std::move(targets);
    return spec;
}

FlowSpec FlowSpec::generalized_yamabe(double p, VectorXd targets)
{
    FlowSpec spec;
    spec.kind = FlowKind::GeneralizedYamabe;
    spec.p = p;
    spec.targets = std::move(targets);
    return spec;
}

void FlowSpec::validate(int n_boundaries) const
{
    if (!(step > 0.0) || !std::isfinite(step))
        throw std::invalid_argument("step must be positive");
    if (!(tol > 0.0))
        throw std::invalid_argument("tol must be positive");
    if (!(t_max > 0.0))
        throw std::invalid_argument("t_max must be positive");
    if (!(safety >= 0.0))
        throw std::invalid_argument("safety must be non-negative");
    if (!(max_displacement > 0.0))
        throw std::invalid_argument("max_displacement must be positive");
    if (!(fast_mode_cap >= 0.0) || !std::isfinite(fast_mode_cap) || !(slow_mode_cap >= 0.0) ||
        !std::isfinite(slow_mode_cap))
        throw std::invalid_argument("mode caps must be non-negative");
    if (!std::isfinite(s))
        throw std::invalid_argument("s must be finite");
    if (kind == FlowKind::GeneralizedYamabe && !(p >= 0.0 && p < 2.0))
        throw std::invalid_argument("p must lie in [0, 2)");
    if (kind != FlowKind::Guo) {
        if (targets.size() != n_boundaries)
            throw std::invalid_argument("expected " + std::to_string(n_boundaries) + " targets, got " +
                                        std::to_string(targets.size()));
        if (!(targets.array() > 0.0).all() || !targets.allFinite())
            throw std::invalid_argument("targets must be positive and finite");
    }
    if (w_star && w_star->size() != n_boundaries)
        throw std::invalid_argument("w_star has the wrong dimension");
}

VectorXd FlowSpec::effective_targets(int n_boundaries) const
{
    return kind == FlowKind::Guo ? VectorXd::Zero(n_boundaries) : targets;
}

VectorXd yamabe_coefficients(const BoundaryLengths& B, const VectorXd& targets, double p)
{
    return ((2.0 - p) * B.array() + p * targets.array()) / B.array().pow(p + 1.0);
}

VectorXd vector_field(const IdealTriangulation& tri, const BaseMetric& l0, const ConformalFactor& w,
                      const FlowSpec& spec)
{
    const VectorXd B = boundary_lengths(tri, l0, w);
    switch (spec.kind) {
        case FlowKind::Guo:
            return B;
        case FlowKind::FractionalCalabi: {
            if (spec.s == 0.0)
                return B - spec.targets;
            const MatrixXd L = boundary_jacobian(tri, l0, w);
            return delta_power(L, spec.s).power * (B - spec.targets);
        }
        case FlowKind::GeneralizedYamabe:
            return yamabe_coefficients(B, spec.targets, spec.p).cwiseProduct(B - spec.targets);
    }
    throw std::logic_error("unhandled flow kind");
}

namespace {

struct FieldEval
{
    VectorXd value;
    FieldRates rates;
};

// Bounds on the decay rates of the linearized field from the eigenvalues of
// Delta.
FieldRates rates_from(const VectorXd& lambda, const BoundaryLengths& B, const FlowSpec& spec)
{
    const double lo = lambda.minCoeff(), hi = lambda.maxCoeff();
    switch (spec.kind) {
        case FlowKind::Guo:
            return {lo, hi};
        case FlowKind::FractionalCalabi: {
            const double a = std::pow(lo, spec.s + 1.0), b = std::pow(hi, spec.s + 1.0);
            return {std::min(a, b), std::max(a, b)};
        }
        case FlowKind::GeneralizedYamabe: {
            const VectorXd g = yamabe_coefficients(B, spec.targets, spec.p);
            return {g.minCoeff() * lo, g.maxCoeff() * hi};
        }
    }
    throw std::logic_error("unhandled flow kind");
}

// Field and rates at w, given B(w). Shares one eigendecomposition.
FieldEval field_with_rates(const IdealTriangulation& tri, const BaseMetric& l0, const ConformalFactor& w,
                           const BoundaryLengths& B, const FlowSpec& spec)
{
    const MatrixXd L = boundary_jacobian(tri, l0, w);
    if (spec.kind == FlowKind::FractionalCalabi && spec.s != 0.0) {
        const auto dp = delta_power(L, spec.s);
        return {dp.power * (B - spec.targets), rates_from(dp.eigenvalues, B, spec)};
    }
    const MatrixXd delta = -L;
    const VectorXd lambda = Eigen::SelfAdjointEigenSolver<MatrixXd>(delta, Eigen::EigenvaluesOnly).eigenvalues();
    VectorXd value = spec.kind == FlowKind::Guo                ? B
                     : spec.kind == FlowKind::FractionalCalabi ? VectorXd(B - spec.targets)
                                                               : VectorXd(yamabe_coefficients(B, spec.targets, spec.p)
                                                                              .cwiseProduct(B - spec.targets));
    return {std::move(value), rates_from(lambda, B, spec)};
}

}  // namespace

FieldRates field_rates(const IdealTriangulation& tri, const BaseMetric& l0, const ConformalFactor& w,
                       const FlowSpec& spec)
{
    return field_with_rates(tri, l0, w, boundary_lengths(tri, l0, w), spec).rates;
}

double Trajectory::reported_energy(const FlowSample& sample) const
{
    switch (spec.kind) {
        case FlowKind::Guo:
            return sample.energy.phi;
        case FlowKind::FractionalCalabi:
            return sample.energy.lambda_val;
        case FlowKind::GeneralizedYamabe:
            return sample.energy.xi;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

namespace {

// Single steps are short, so a low-order rule already converges on the
// first bisection.
constexpr QuadratureOptions step_rule{1e-10, 20, 2};

double min_margin(const IdealTriangulation& tri, const BaseMetric& l0, const VectorXd& w)
{
    return admissibility_margin(tri, l0, w).minCoeff();
}

// The residual penalty that pairs with Psi in the flow's Lyapunov function.
double penalty(const FlowSpec& spec, const BoundaryLengths& B, const VectorXd& targets)
{
    if (spec.kind == FlowKind::GeneralizedYamabe && spec.evaluate_energy)
        return weighted_residual_energy(B, targets, spec.p);
    return residual_energy(B, targets);
}

struct StepResult
{
    VectorXd w;
    BoundaryLengths B;
    double dpsi = 0.0;
};

class Integrator
{
public:
    Integrator(const IdealTriangulation& tri, const BaseMetric& l0, const FlowSpec& spec)
        : tri_(tri), l0_(l0), spec_(spec), targets_(spec.effective_targets(tri.n_boundaries()))
    {
    }

    const VectorXd& targets() const { return targets_; }

    double residual(const BoundaryLengths& B) const { return (B - targets_).lpNorm<Eigen::Infinity>(); }

    // One RK4 step from w with derivative k1. Empty on rejection.
    std::optional<StepResult> try_step(const VectorXd& w, const BoundaryLengths& B, const VectorXd& k1,
                                       double h) const
    {
        try {
            const VectorXd p2 = w + 0.5 * h * k1;
            if (!stage_ok(w, p2))
                return std::nullopt;
            const VectorXd k2 = vector_field(tri_, l0_, p2, spec_);
            const VectorXd p3 = w + 0.5 * h * k2;
            if (!stage_ok(w, p3))
                return std::nullopt;
            const VectorXd k3 = vector_field(tri_, l0_, p3, spec_);
            const VectorXd p4 = w + h * k3;
            if (!stage_ok(w, p4))
                return std::nullopt;
            const VectorXd k4 = vector_field(tri_, l0_, p4, spec_);

            StepResult out;
            out.w = w + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            if (!stage_ok(w, out.w))
                return std::nullopt;
            out.B = boundary_lengths(tri_, l0_, out.w);
            if (spec_.evaluate_energy)
                out.dpsi = segment_integral(tri_, l0_, targets_, w, out.w, step_rule);

            if (spec_.kind != FlowKind::Guo) {
                const double before = penalty(spec_, B, targets_);
                const double after = penalty(spec_, out.B, targets_);
                const double change = (spec_.evaluate_energy ? out.dpsi : 0.0) + (after - before);
                if (change > 0.0)
                    return std::nullopt;
            }
            return out;
        } catch (const Error&) {
            return std::nullopt;
        }
    }

private:
    bool stage_ok(const VectorXd& from, const VectorXd& stage) const
    {
        return stage.allFinite() && (stage - from).lpNorm<Eigen::Infinity>() <= spec_.max_displacement &&
               min_margin(tri_, l0_, stage) >= spec_.safety;
    }

    const IdealTriangulation& tri_;
    const BaseMetric& l0_;
    const FlowSpec& spec_;
    VectorXd targets_;
};

constexpr double min_step = 1e-12;
constexpr int growth_streak = 5;
constexpr double growth_factor = 1.5;

// `dpsi[k]` is Psi(w_k) - Psi(w_{k-1}) for k >= 1. Lyapunov values are
// accumulated backwards from the final sample so that they stay accurate as
// they approach zero.
void finalize_energies(const IdealTriangulation& tri, const BaseMetric& l0, Trajectory& traj, double psi0,
                       const std::vector<double>& dpsi)
{
    const FlowSpec& spec = traj.spec;
    const VectorXd& b = traj.targets;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const std::size_t count = traj.samples.size();

    std::vector<double> gap(count, 0.0);  // Psi(w_k) - Psi(w*)
    if (spec.evaluate_energy) {
        if (spec.w_star)
            gap[count - 1] = segment_integral(tri, l0, b, *spec.w_star, traj.samples.back().w);
        for (std::size_t k = count - 1; k > 0; --k)
            gap[k - 1] = gap[k] - dpsi[k];
    }

    double psi = psi0;
    for (std::size_t k = 0; k < count; ++k) {
        auto& s = traj.samples[k];
        auto& e = s.energy;
        e.base_point = VectorXd::Zero(b.size());
        e.w_star = spec.w_star;
        e.c_val = residual_energy(s.B, b);
        e.upsilon = weighted_residual_energy(s.B, b, spec.p);
        if (spec.evaluate_energy) {
            if (k > 0)
                psi += dpsi[k];
            e.psi = psi;
            e.phi = psi - b.dot(s.w);
            e.lambda_val = gap[k] + e.c_val;
            e.xi = gap[k] + e.upsilon;
        } else {
            e.psi = e.phi = e.lambda_val = e.xi = nan;
        }
    }
}

}  // namespace

Trajectory integrate(const IdealTriangulation& tri, const BaseMetric& l0, const ConformalFactor& w0,
                     const FlowSpec& spec)
{
    spec.validate(tri.n_boundaries());
    const VectorXd margin0 = admissibility_margin(tri, l0, w0);
    for (Eigen::Index e = 0; e < margin0.size(); ++e)
        if (!(margin0(e) > 0.0))
            throw InadmissibleFactor("initial factor is inadmissible at edge " + std::to_string(e),
                                     static_cast<std::size_t>(e));

    Integrator stepper(tri, l0, spec);
    Trajectory traj;
    traj.spec = spec;
    traj.targets = stepper.targets();

    VectorXd w = w0;
    BoundaryLengths B = boundary_lengths(tri, l0, w);
    double t = 0.0;
    const double psi0 = spec.evaluate_energy ? potential_phi(tri, l0, w) + traj.targets.dot(w) : 0.0;
    std::vector<double> dpsi{0.0};
    traj.samples.push_back({t, w, B, stepper.residual(B), 0.0, {}});

    auto finish = [&](FlowStatus status, std::string message) {
        traj.status = status;
        traj.message = std::move(message);
        finalize_energies(tri, l0, traj, psi0, dpsi);
        return traj;
    };

    if (stepper.residual(B) < spec.tol)
        return finish(FlowStatus::Converged, "initial state within tolerance");

    double h = spec.step;
    int streak = 0;
    VectorXd k1;
    double h_cap = std::numeric_limits<double>::infinity();
    // k1 and the step cap at the current state.
    auto evaluate_here = [&] {
        if (spec.fast_mode_cap > 0.0 || spec.slow_mode_cap > 0.0) {
            FieldEval eval = field_with_rates(tri, l0, w, B, spec);
            k1 = std::move(eval.value);
            h_cap = std::numeric_limits<double>::infinity();
            if (spec.fast_mode_cap > 0.0)
                h_cap = spec.fast_mode_cap / eval.rates.fastest;
            if (spec.slow_mode_cap > 0.0)
                h_cap = std::min(h_cap, spec.slow_mode_cap / eval.rates.slowest);
        } else {
            k1 = vector_field(tri, l0, w, spec);
        }
    };
    try {
        evaluate_here();
    } catch (const Error& err) {
        return finish(FlowStatus::GuardTriggered, err.what());
    }

    while (true) {
        if (t >= spec.t_max)
            return finish(FlowStatus::TimeBudgetExhausted, "time budget exhausted");
        if (traj.accepted_steps >= spec.max_steps)
            return finish(FlowStatus::GuardTriggered, "step limit reached");

        const double h_eff = std::min({h, h_cap, spec.t_max - t});
        auto step = stepper.try_step(w, B, k1, h_eff);
        if (!step) {
            ++traj.rejected_steps;
            streak = 0;
            h *= 0.5;
            if (h < min_step)
                return finish(FlowStatus::StepCollapse, "step size fell below 1e-12");
            continue;
        }

        ++traj.accepted_steps;
        t += h_eff;
        w = std::move(step->w);
        B = std::move(step->B);
        dpsi.push_back(step->dpsi);
        traj.samples.push_back({t, w, B, stepper.residual(B), h_eff, {}});

        if (stepper.residual(B) < spec.tol)
            return finish(FlowStatus::Converged, "residual below tolerance");

        if (++streak >= growth_streak) {
            h = std::min(growth_factor * h, spec.step);
            streak = 0;
        }
        try {
            evaluate_here();
        } catch (const Error& err) {
            return finish(FlowStatus::GuardTriggered, err.what());
        }
    }
}

namespace {

constexpr int min_decaying_samples = 10;
constexpr std::size_t min_tail_samples = 3;

}  // namespace

DecayFit decay_rate(const Trajectory& traj)
{
    const double initial = (traj.samples.front().B - traj.targets).norm();
    const double t_half = 0.5 * traj.samples.back().t;

    std::vector<double> ts, ys;
    int decaying = 0;
    for (const auto& s : traj.samples) {
        const double r = (s.B - traj.targets).norm();
        if (!(r < initial && r > 0.0))
            continue;
        ++decaying;
        if (s.t >= t_half) {
            ts.push_back(s.t);
            ys.push_back(std::log(r));
        }
    }
    if (decaying < min_decaying_samples)
        throw InsufficientData("fewer than 10 samples below the initial residual");
    if (ts.size() < min_tail_samples)
        throw InsufficientData("fewer than 3 samples in the second half of the trajectory");

    const Eigen::Map<const VectorXd> t(ts.data(), static_cast<Eigen::Index>(ts.size()));
    const Eigen::Map<const VectorXd> y(ys.data(), static_cast<Eigen::Index>(ys.size()));
    const double t_mean = t.mean(), y_mean = y.mean();
    const VectorXd dt = t.array() - t_mean;
    const VectorXd dy = y.array() - y_mean;
    const double sxx = dt.squaredNorm();
    if (sxx == 0.0)
        throw InsufficientData("all tail samples share one time");
    const double slope = dt.dot(dy) / sxx;
    const double syy = dy.squaredNorm();
    const double ss_res = (dy - slope * dt).squaredNorm();

    DecayFit fit;
    fit.rate = -slope;
    fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    fit.samples_used = static_cast<int>(ts.size());
    return fit;
}

}  // namespace hypflow
