#include "hypflow/energy.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "hypflow/conformal_metric.hpp"
#include "hypflow/errors.hpp"

namespace hypflow {

namespace {

constexpr double roundoff_multiple = 256.0;

struct GaussRule
{
    VectorXd nodes;  // on [-1, 1]
    VectorXd weights;
};

// Golub-Welsch: nodes are the eigenvalues of the Legendre Jacobi matrix.
GaussRule make_gauss_rule(int order)
{
    MatrixXd jacobi = MatrixXd::Zero(order, order);
    for (int k = 1; k < order; ++k) {
        const double beta = k / std::sqrt(4.0 * k * k - 1.0);
        jacobi(k, k - 1) = beta;
        jacobi(k - 1, k) = beta;
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(jacobi);
    return {eig.eigenvalues(), 2.0 * eig.eigenvectors().row(0).transpose().array().square()};
}

const GaussRule& gauss_rule(int order)
{
    static const auto rules = [] {
        std::array<GaussRule, max_gauss_order + 1> out;
        for (int k = 1; k <= max_gauss_order; ++k)
            out[k] = make_gauss_rule(k);
        return out;
    }();
    if (order < 1 || order > max_gauss_order)
        throw std::invalid_argument("quadrature order must be in [1, " + std::to_string(max_gauss_order) + "]");
    return rules[order];
}

// An integrand sample: its value and the magnitude of the terms that were
// summed to produce it, which bounds its rounding error.
struct Sample
{
    double value = 0.0;
    double terms = 0.0;
};

struct PanelEstimate
{
    double value = 0.0;
    double magnitude = 0.0;  // same rule applied to |f|
    double terms = 0.0;      // same rule applied to the term magnitude
};

template <typename F>
PanelEstimate gauss_panel(const F& f, const GaussRule& rule, double a, double b)
{
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    PanelEstimate out;
    for (Eigen::Index k = 0; k < rule.nodes.size(); ++k) {
        const Sample v = f(mid + half * rule.nodes(k));
        out.value += rule.weights(k) * v.value;
        out.magnitude += rule.weights(k) * std::abs(v.value);
        out.terms += rule.weights(k) * v.terms;
    }
    out.value *= half;
    out.magnitude *= half;
    out.terms *= half;
    return out;
}

template <typename F>
double adaptive(const F& f, const GaussRule& rule, double a, double b, const PanelEstimate& left, const PanelEstimate& right,
                double coarse, double tol, int depth, int max_depth)
{
    const double fine = left.value + right.value;
    if (std::abs(fine - coarse) <= tol * (b - a))
        return fine;
    if (depth >= max_depth)
        throw QuadratureStall("quadrature did not converge after " + std::to_string(max_depth) + " refinements");
    const double mid = 0.5 * (a + b);
    const double q1 = 0.5 * (a + mid), q3 = 0.5 * (mid + b);
    return adaptive(f, rule, a, mid, gauss_panel(f, rule, a, q1), gauss_panel(f, rule, q1, mid), left.value, tol, depth + 1,
                    max_depth) +
           adaptive(f, rule, mid, b, gauss_panel(f, rule, mid, q3), gauss_panel(f, rule, q3, b), right.value, tol, depth + 1,
                    max_depth);
}

// Integral over [0, 1], bisecting until coarse and fine estimates of every
// panel agree to within its share of the tolerance.
template <typename F>
double integrate_unit(const F& f, const QuadratureOptions& opts)
{
    const GaussRule& rule = gauss_rule(opts.order);
    const PanelEstimate coarse = gauss_panel(f, rule, 0.0, 1.0);
    const PanelEstimate left = gauss_panel(f, rule, 0.0, 0.5);
    const PanelEstimate right = gauss_panel(f, rule, 0.5, 1.0);
    const double scale = left.magnitude + right.magnitude;
    if (scale == 0.0)
        return 0.0;
    // Below this the two levels differ only by rounding in the integrand.
    const double noise =
        roundoff_multiple * std::numeric_limits<double>::epsilon() * (left.terms + right.terms);
    return adaptive(f, rule, 0.0, 1.0, left, right, coarse.value, std::max(opts.rel_tol * scale, noise), 0,
                    opts.max_depth);
}

void require_admissible(const IdealTriangulation& tri, const BaseMetric& l0, const VectorXd& w)
{
    const VectorXd margin = admissibility_margin(tri, l0, w);
    for (Eigen::Index e = 0; e < margin.size(); ++e)
        if (!(margin(e) > 0.0))
            throw InadmissibleFactor("edge " + std::to_string(e) + " has non-positive admissibility margin",
                                     static_cast<std::size_t>(e));
}

}  // namespace

double segment_integral(const IdealTriangulation& tri,
                        const BaseMetric& l0,
                        const VectorXd& targets,
                        const VectorXd& from,
                        const VectorXd& to,
                        const QuadratureOptions& opts)
{
    require_admissible(tri, l0, from);
    require_admissible(tri, l0, to);
    const VectorXd direction = to - from;
    if (direction.isZero(0.0))
        return 0.0;
    auto integrand = [&](double t) {
        const VectorXd B = boundary_lengths(tri, l0, from + t * direction);
        return Sample{(targets - B).dot(direction),
                      (targets.cwiseAbs() + B.cwiseAbs()).dot(direction.cwiseAbs())};
    };
    return integrate_unit(integrand, opts);
}

double potential_phi(const IdealTriangulation& tri,
                     const BaseMetric& l0,
                     const ConformalFactor& w,
                     const ConformalFactor& base_point,
                     const QuadratureOptions& opts)
{
    return segment_integral(tri, l0, VectorXd::Zero(w.size()), base_point, w, opts);
}

double potential_phi(const IdealTriangulation& tri,
                     const BaseMetric& l0,
                     const ConformalFactor& w,
                     const QuadratureOptions& opts)
{
    return potential_phi(tri, l0, w, VectorXd::Zero(w.size()), opts);
}

double potential_phi_along(const IdealTriangulation& tri,
                           const BaseMetric& l0,
                           const std::vector<VectorXd>& path,
                           const QuadratureOptions& opts)
{
    double total = 0.0;
    for (std::size_t k = 1; k < path.size(); ++k)
        total += potential_phi(tri, l0, path[k], path[k - 1], opts);
    return total;
}

double potential_psi(const IdealTriangulation& tri,
                     const BaseMetric& l0,
                     const VectorXd& targets,
                     const ConformalFactor& w,
                     const ConformalFactor& base_point)
{
    return potential_phi(tri, l0, w, base_point) + targets.dot(w);
}

double residual_energy(const BoundaryLengths& B, const VectorXd& targets)
{
    return (B - targets).squaredNorm();
}

double weighted_residual_energy(const BoundaryLengths& B, const VectorXd& targets, double p)
{
    return ((B - targets).array().square() / B.array().pow(p)).sum();
}

EnergyRecord lyapunov_values(const IdealTriangulation& tri,
                             const BaseMetric& l0,
                             const ConformalFactor& w,
                             const VectorXd& targets,
                             double p,
                             const ConformalFactor& w_star,
                             std::optional<ConformalFactor> base_point)
{
    EnergyRecord rec;
    rec.base_point = base_point ? *base_point : VectorXd::Zero(w.size());
    rec.w_star = w_star;
    rec.phi = potential_phi(tri, l0, w, rec.base_point);
    rec.psi = rec.phi + targets.dot(w);
    // Psi(w) - Psi(w*) does not depend on the base point.
    const double psi_gap = segment_integral(tri, l0, targets, w_star, w);
    const VectorXd B = boundary_lengths(tri, l0, w);
    rec.c_val = residual_energy(B, targets);
    rec.upsilon = weighted_residual_energy(B, targets, p);
    rec.lambda_val = psi_gap + rec.c_val;
    rec.xi = psi_gap + rec.upsilon;
    return rec;
}

}  // namespace hypflow
