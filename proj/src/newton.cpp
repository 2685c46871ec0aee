#include "hypflow/newton.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <stdexcept>
#include <string>

#include "hypflow/conformal_metric.hpp"
#include "hypflow/energy.hpp"
#include "hypflow/errors.hpp"
#include "hypflow/jacobian.hpp"

namespace hypflow {

SolveReport solve_prescribed(const IdealTriangulation& tri,
                             const BaseMetric& l0,
                             const VectorXd& targets,
                             const ConformalFactor& w_init,
                             const SolveOptions& opts)
{
    const int n = tri.n_boundaries();
    if (targets.size() != n)
        throw std::invalid_argument("expected " + std::to_string(n) + " targets");
    if (!(targets.array() > 0.0).all() || !targets.allFinite())
        throw std::invalid_argument("targets must be positive and finite");
    const VectorXd margin0 = admissibility_margin(tri, l0, w_init);
    Eigen::Index worst = 0;
    if (!(margin0.minCoeff(&worst) > 0.0))
        throw InadmissibleFactor("initial factor is inadmissible on edge " + std::to_string(worst),
                                 static_cast<std::size_t>(worst));

    SolveReport report;
    VectorXd w = w_init;
    for (int pass = 1; pass <= opts.max_iterations; ++pass) {
        const VectorXd B = boundary_lengths(tri, l0, w);
        const VectorXd r = B - targets;
        const double res = r.lpNorm<Eigen::Infinity>();
        report.iterations = pass;
        report.residual_history.push_back(res);
        report.w_star = w;
        report.final_residual = res;
        if (res < opts.tol) {
            report.converged = true;
            return report;
        }

        const MatrixXd delta = -boundary_jacobian(tri, l0, w);
        const Eigen::LLT<MatrixXd> chol(delta);
        if (chol.info() != Eigen::Success)
            throw EigSolveFailure("Cholesky factorization of -L failed at Newton pass " + std::to_string(pass));
        const VectorXd direction = chol.solve(r);
        // Directional derivative of Psi: (b - B) . direction < 0.
        const double slope = -r.dot(direction);

        double alpha = 1.0;
        while (true) {
            if (alpha < opts.min_step)
                throw LineSearchFailure("line search step fell below " + std::to_string(opts.min_step) +
                                        " at residual " + std::to_string(res));
            const VectorXd trial = w + alpha * direction;
            if (trial.allFinite() && admissibility_margin(tri, l0, trial).minCoeff() >= opts.safety) {
                try {
                    const double decrease = segment_integral(tri, l0, targets, w, trial);
                    if (decrease <= opts.armijo * alpha * slope) {
                        w = trial;
                        break;
                    }
                } catch (const NonFinite&) {
                }
            }
            alpha *= 0.5;
        }
    }
    throw MaxIterations("Newton did not converge in " + std::to_string(opts.max_iterations) +
                        " iterations (residual " + std::to_string(report.final_residual) + ")");
}

SolveReport solve_prescribed(const IdealTriangulation& tri,
                             const BaseMetric& l0,
                             const VectorXd& targets,
                             const SolveOptions& opts)
{
    return solve_prescribed(tri, l0, targets, VectorXd::Zero(tri.n_boundaries()), opts);
}

}  // namespace hypflow
