#include <doctest.h>

#include <cmath>

#include "hypflow/energy.hpp"
#include "hypflow/errors.hpp"
#include "hypflow/jacobian.hpp"
#include "hypflow/newton.hpp"
#include "oracles.hpp"

using namespace hypflow;

namespace {

VectorXd pants_metric()
{
    return VectorXd::Constant(3, oracle::pants_edge());
}

// Axis-aligned staircase from `from` to `to`, one coordinate at a time.
std::vector<VectorXd> staircase(const VectorXd& from, const VectorXd& to)
{
    std::vector<VectorXd> path{from};
    VectorXd w = from;
    for (Eigen::Index k = 0; k < w.size(); ++k) {
        w(k) = to(k);
        path.push_back(w);
    }
    return path;
}

// Pants factor on the ray w = (-tau, -tau, 0) where edge (0,1) has `margin`.
VectorXd ray_point(double margin)
{
    const double tau = 0.5 * (std::log(2.0) - margin);
    return Eigen::Vector3d(-tau, -tau, 0.0);
}

}  // namespace

TEST_CASE("phi vanishes at its base point")
{
    for (const auto& c : oracle::instance_mix(41, 10)) {
        CHECK(potential_phi(c.mesh, c.l0, c.w, c.w) == 0.0);
        CHECK(potential_phi(c.mesh, c.l0, VectorXd::Zero(c.w.size())) == 0.0);
    }
}

TEST_CASE("phi is path independent")
{
    for (const auto& c : oracle::instance_mix(42, 30)) {
        const VectorXd zero = VectorXd::Zero(c.w.size());
        // Both legs of the staircase stay admissible only if its corners do.
        const auto path = staircase(zero, c.w);
        bool inside = true;
        for (const auto& p : path)
            inside = inside && admissibility_margin(c.mesh, c.l0, p).minCoeff() > 1e-3;
        if (!inside)
            continue;
        const double straight = potential_phi(c.mesh, c.l0, c.w);
        const double stairs = potential_phi_along(c.mesh, c.l0, path);
        CHECK(std::abs(straight - stairs) < 1e-8);
    }
}

TEST_CASE("gradient of phi is -B")
{
    const double h = 1e-5;
    for (const auto& c : oracle::instance_mix(43, 20)) {
        const VectorXd B = boundary_lengths(c.mesh, c.l0, c.w);
        for (Eigen::Index k = 0; k < c.w.size(); ++k) {
            VectorXd up = c.w, down = c.w;
            up(k) += h;
            down(k) -= h;
            const double fd =
                (potential_phi(c.mesh, c.l0, up, c.w) - potential_phi(c.mesh, c.l0, down, c.w)) / (2.0 * h);
            CHECK(fd == doctest::Approx(-B(k)).epsilon(1e-6));
        }
    }
}

TEST_CASE("hessian of phi is -L")
{
    const double h = 2e-4;
    for (const auto& c : oracle::instance_mix(44, 10)) {
        const MatrixXd L = boundary_jacobian(c.mesh, c.l0, c.w);
        const auto n = c.w.size();
        auto phi = [&](Eigen::Index i, double di, Eigen::Index j, double dj) {
            VectorXd w = c.w;
            w(i) += di;
            w(j) += dj;
            return potential_phi(c.mesh, c.l0, w, c.w);
        };
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) {
                const double d2 = (phi(i, h, j, h) - phi(i, h, j, -h) - phi(i, -h, j, h) + phi(i, -h, j, -h)) /
                                  (4.0 * h * h);
                CHECK(std::abs(d2 + L(i, j)) < 1e-4);
            }
    }
}

TEST_CASE("lyapunov values vanish at the critical point")
{
    const auto tri = pair_of_pants();
    const VectorXd l0 = pants_metric();
    const VectorXd b = Eigen::Vector3d(1.0, 1.5, 2.0);
    const VectorXd w_star = solve_prescribed(tri, l0, b).w_star;
    const auto at_star = lyapunov_values(tri, l0, w_star, b, 1.0, w_star);
    CHECK(at_star.lambda_val == doctest::Approx(0.0));
    CHECK(std::abs(at_star.lambda_val) < 1e-20);
    CHECK(std::abs(at_star.xi) < 1e-20);

    // Gradient of Psi at w*: b - B.
    CHECK((b - boundary_lengths(tri, l0, w_star)).lpNorm<Eigen::Infinity>() < 1e-6);
}

TEST_CASE("lyapunov values are positive away from the critical point")
{
    Rng rng(45);
    for (const auto& c : oracle::instance_mix(45, 30)) {
        const VectorXd target_w = random_admissible_factor(c.mesh, c.l0, rng);
        const VectorXd b = boundary_lengths(c.mesh, c.l0, target_w);
        const auto rec = lyapunov_values(c.mesh, c.l0, c.w, b, 0.0, target_w);
        CHECK(rec.lambda_val > 0.0);
        CHECK(rec.xi > 0.0);
        CHECK(rec.upsilon == rec.c_val);
        CHECK(rec.c_val >= 0.0);
        CHECK(rec.psi == doctest::Approx(rec.phi + b.dot(c.w)).epsilon(1e-15));
    }
}

TEST_CASE("psi differences do not depend on the base point")
{
    for (const auto& c : oracle::instance_mix(46, 10)) {
        const VectorXd zero = VectorXd::Zero(c.w.size());
        const VectorXd b = VectorXd::Constant(c.w.size(), 1.0);
        const VectorXd other = 0.5 * c.w;
        const double d0 = potential_psi(c.mesh, c.l0, b, c.w, zero) - potential_psi(c.mesh, c.l0, b, other, zero);
        const double d1 = potential_psi(c.mesh, c.l0, b, c.w, c.w) - potential_psi(c.mesh, c.l0, b, other, c.w);
        CHECK(std::abs(d0 - d1) < 1e-9);
        const auto r0 = lyapunov_values(c.mesh, c.l0, c.w, b, 1.0, other);
        const auto r1 = lyapunov_values(c.mesh, c.l0, c.w, b, 1.0, other, c.w);
        CHECK(r0.lambda_val == doctest::Approx(r1.lambda_val).epsilon(1e-12));
        CHECK(r1.phi == 0.0);
    }
}

TEST_CASE("psi is strictly convex along random chords")
{
    Rng rng(47);
    for (const auto& c : oracle::instance_mix(47, 30)) {
        const VectorXd w2 = random_admissible_factor(c.mesh, c.l0, rng);
        const VectorXd b = VectorXd::Constant(c.w.size(), 0.7);
        const VectorXd mid = 0.5 * (c.w + w2);
        const double lhs = potential_psi(c.mesh, c.l0, b, mid, c.w);
        const double rhs =
            0.5 * (potential_psi(c.mesh, c.l0, b, c.w, c.w) + potential_psi(c.mesh, c.l0, b, w2, c.w));
        CHECK(lhs < rhs - 1e-12 * (c.w - w2).squaredNorm());
    }
}

TEST_CASE("lambda and xi blow up toward the admissibility boundary")
{
    const auto tri = pair_of_pants();
    const VectorXd l0 = pants_metric();
    const VectorXd b = Eigen::Vector3d(1.0, 1.0, 1.0);
    const VectorXd w_star = solve_prescribed(tri, l0, b).w_star;
    double last_lambda = -1.0, last_xi = -1.0;
    for (double m : {1e-1, 1e-2, 1e-3}) {
        const VectorXd w = ray_point(m);
        CHECK(admissibility_margin(tri, l0, w).minCoeff() == doctest::Approx(m).epsilon(1e-9));
        const auto rec = lyapunov_values(tri, l0, w, b, 1.0, w_star);
        CHECK(rec.lambda_val > last_lambda);
        CHECK(rec.xi > last_xi);
        last_lambda = rec.lambda_val;
        last_xi = rec.xi;
    }
}

TEST_CASE("quadrature errors are signalled")
{
    const auto tri = pair_of_pants();
    const VectorXd l0 = pants_metric();
    CHECK_THROWS_AS(potential_phi(tri, l0, Eigen::Vector3d(-1.0, -1.0, -1.0)), InadmissibleFactor);
    QuadratureOptions strict;
    strict.max_depth = 0;
    strict.order = 1;
    CHECK_THROWS_AS(potential_phi(tri, l0, ray_point(1e-6), strict), QuadratureStall);
    QuadratureOptions bad;
    bad.order = 0;
    CHECK_THROWS_AS(potential_phi(tri, l0, ray_point(0.5), bad), std::invalid_argument);
}

TEST_CASE("weighted residual energy")
{
    const VectorXd B = Eigen::Vector3d(1.0, 2.0, 4.0);
    const VectorXd b = Eigen::Vector3d(2.0, 2.0, 2.0);
    CHECK(residual_energy(B, b) == doctest::Approx(5.0));
    CHECK(weighted_residual_energy(B, b, 0.0) == residual_energy(B, b));
    CHECK(weighted_residual_energy(B, b, 1.0) == doctest::Approx(1.0 + 0.0 + 1.0));
}
