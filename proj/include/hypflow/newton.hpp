#pragma once

#include <vector>

#include "hypflow/triangulation.hpp"
#include "hypflow/types.hpp"

namespace hypflow {

struct SolveOptions
{
    double tol = 1e-12;  // on ||B - b||_inf
    int max_iterations = 200;
    double safety = 1e-6;  // minimum admissibility margin of accepted iterates
    double armijo = 1e-4;
    double min_step = 1e-12;
};

struct SolveReport
{
    ConformalFactor w_star;
    int iterations = 0;  // loop passes; each evaluates the residual once
    double final_residual = 0.0;
    bool converged = false;
    std::vector<double> residual_history;  // ||B - b||_inf per pass
};

/// Finds w* with B(w*) = targets by damped Newton descent on the strictly
/// convex Psi(w) = Phi(w) + b.w, whose gradient is b - B and Hessian -L.
/// Throws MaxIterations, LineSearchFailure, or EigSolveFailure when the
/// Cholesky factorization of -L fails.
SolveReport solve_prescribed(const IdealTriangulation& tri,
                             const BaseMetric& l0,
                             const VectorXd& targets,
                             const ConformalFactor& w_init,
                             const SolveOptions& opts = {});

/// Same, starting from w = 0.
SolveReport solve_prescribed(const IdealTriangulation& tri,
                             const BaseMetric& l0,
                             const VectorXd& targets,
                             const SolveOptions& opts = {});

}  // namespace hypflow
