#pragma once

#include <optional>
#include <vector>

#include "hypflow/triangulation.hpp"
#include "hypflow/types.hpp"

namespace hypflow {

inline constexpr int max_gauss_order = 16;

struct QuadratureOptions
{
    double rel_tol = 1e-10;  // relative to the integral of |integrand|
    int max_depth = 20;      // bisection levels before QuadratureStall
    int order = 7;           // Gauss-Legendre points per panel
};

/// Integral of sum_i (targets_i - B_i) dw_i along the straight segment from
/// `from` to `to`. With zero targets this is the increment of Phi; with the
/// prescribed lengths it is the increment of Psi. Both endpoints must be
/// admissible; the segment then is too, since W is convex.
double segment_integral(const IdealTriangulation& tri,
                        const BaseMetric& l0,
                        const VectorXd& targets,
                        const VectorXd& from,
                        const VectorXd& to,
                        const QuadratureOptions& opts = {});

/// Phi(w) = -int_c^w sum B_i dw_i along the straight segment [c, w].
double potential_phi(const IdealTriangulation& tri,
                     const BaseMetric& l0,
                     const ConformalFactor& w,
                     const ConformalFactor& base_point,
                     const QuadratureOptions& opts = {});

/// Phi(w) with the default base point c = 0.
double potential_phi(const IdealTriangulation& tri,
                     const BaseMetric& l0,
                     const ConformalFactor& w,
                     const QuadratureOptions& opts = {});

/// Same line integral along a polyline through `path` (first point is the
/// base point, last is w). Every vertex of the path must be admissible.
double potential_phi_along(const IdealTriangulation& tri,
                           const BaseMetric& l0,
                           const std::vector<VectorXd>& path,
                           const QuadratureOptions& opts = {});

/// Psi(w) = Phi(w) + sum b_i w_i (base point c).
double potential_psi(const IdealTriangulation& tri,
                     const BaseMetric& l0,
                     const VectorXd& targets,
                     const ConformalFactor& w,
                     const ConformalFactor& base_point);

/// C = sum (B_i - b_i)^2.
double residual_energy(const BoundaryLengths& B, const VectorXd& targets);

/// Upsilon = sum (B_i - b_i)^2 / B_i^p.
double weighted_residual_energy(const BoundaryLengths& B, const VectorXd& targets, double p);

struct EnergyRecord
{
    double phi = 0.0;
    double psi = 0.0;
    double lambda_val = 0.0;  // Psi(w) - Psi(w*) + C(w)
    double xi = 0.0;          // Psi(w) - Psi(w*) + Upsilon(w)
    double c_val = 0.0;
    double upsilon = 0.0;
    VectorXd base_point;
    std::optional<VectorXd> w_star;
};

/// All potentials and Lyapunov values at w, relative to the critical point
/// w_star of Psi. The base point defaults to 0.
EnergyRecord lyapunov_values(const IdealTriangulation& tri,
                             const BaseMetric& l0,
                             const ConformalFactor& w,
                             const VectorXd& targets,
                             double p,
                             const ConformalFactor& w_star,
                             std::optional<ConformalFactor> base_point = std::nullopt);

}  // namespace hypflow
