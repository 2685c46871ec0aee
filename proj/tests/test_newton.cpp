#include <doctest.h>

#include <stdexcept>

#include "hypflow/errors.hpp"
#include "hypflow/newton.hpp"
#include "oracles.hpp"

using namespace hypflow;

namespace {

VectorXd pants_metric()
{
    return VectorXd::Constant(3, oracle::pants_edge());
}

}  // namespace

TEST_CASE("targets equal to B(0) are solved in one pass")
{
    const auto tri = pair_of_pants();
    const VectorXd l0 = pants_metric();
    const VectorXd b = boundary_lengths(tri, l0, Eigen::Vector3d::Zero());
    const auto rep = solve_prescribed(tri, l0, b);
    CHECK(rep.converged);
    CHECK(rep.iterations == 1);
    CHECK(rep.w_star.cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("symmetric pants targets match the bisection oracle")
{
    const auto tri = pair_of_pants();
    const VectorXd l0 = pants_metric();
    for (double b : {0.3, 1.0, 2.0, 5.0}) {
        const auto rep = solve_prescribed(tri, l0, VectorXd::Constant(3, b));
        REQUIRE(rep.converged);
        const double expected = oracle::symmetric_pants_factor(l0(0), b);
        for (int i = 0; i < 3; ++i)
            CHECK(rep.w_star(i) == doctest::Approx(expected).epsilon(1e-10));
        CHECK(rep.final_residual < 1e-12);
    }
}

TEST_CASE("plant and recover")
{
    Rng rng(51);
    for (const auto& c : oracle::instance_mix(51, 40)) {
        const VectorXd planted = random_admissible_factor(c.mesh, c.l0, rng);
        const VectorXd b = boundary_lengths(c.mesh, c.l0, planted);
        const auto rep = solve_prescribed(c.mesh, c.l0, b);
        REQUIRE(rep.converged);
        CHECK((rep.w_star - planted).lpNorm<Eigen::Infinity>() < 1e-8);
        CHECK(rep.residual_history.size() == static_cast<std::size_t>(rep.iterations));
        CHECK(rep.residual_history.back() == rep.final_residual);
    }
}

TEST_CASE("the solution does not depend on the starting point")
{
    Rng rng(52);
    SolveOptions opts;
    for (const auto& c : oracle::instance_mix(52, 30)) {
        const VectorXd b = VectorXd::Constant(c.mesh.n_boundaries(), 1.5);
        const auto a = solve_prescribed(c.mesh, c.l0, b, opts);
        const auto other = solve_prescribed(c.mesh, c.l0, b, c.w, opts);
        REQUIRE(a.converged);
        REQUIRE(other.converged);
        CHECK((a.w_star - other.w_star).lpNorm<Eigen::Infinity>() < 10.0 * 1e-10);
    }
}

TEST_CASE("the residual converges quadratically near the solution")
{
    const auto c = oracle::instance_mix(53, 5).back();
    const auto rep = solve_prescribed(c.mesh, c.l0, VectorXd::Constant(c.mesh.n_boundaries(), 0.5));
    REQUIRE(rep.converged);
    const auto& r = rep.residual_history;
    for (std::size_t k = 1; k < r.size(); ++k)
        if (r[k - 1] < 1e-3 && r[k] > 1e-14)
            MESSAGE("r_{k+1} / r_k^2 = " << r[k] / (r[k - 1] * r[k - 1]));
    CHECK(r.size() < 30);
}

TEST_CASE("invalid input is rejected")
{
    const auto tri = pair_of_pants();
    const VectorXd l0 = pants_metric();
    CHECK_THROWS_AS(solve_prescribed(tri, l0, Eigen::Vector3d(1.0, 0.0, 1.0)), std::invalid_argument);
    CHECK_THROWS_AS(solve_prescribed(tri, l0, Eigen::Vector2d(1.0, 1.0)), std::invalid_argument);
    try {
        solve_prescribed(tri, l0, Eigen::Vector3d::Ones(), Eigen::Vector3d(1.0, -0.5, -0.5));
        FAIL("expected InadmissibleFactor");
    } catch (const InadmissibleFactor& e) {
        CHECK(e.edge() == 1);
    }
    SolveOptions one;
    one.max_iterations = 1;
    CHECK_THROWS_AS(solve_prescribed(tri, l0, Eigen::Vector3d(0.2, 3.0, 7.0), one), MaxIterations);
}
