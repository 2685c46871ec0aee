#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <random>

#include "hypflow/jacobian.hpp"
#include "oracles.hpp"

using namespace hypflow;

namespace {

MatrixXd fd_jacobian(const oracle::Case& c)
{
    // Column k of the central Jacobian is dB / dw_k, i.e. row k of L.
    return oracle::central_jacobian(
               [&](const VectorXd& w) -> VectorXd { return boundary_lengths(c.mesh, c.l0, w); }, c.w, 1e-5)
        .transpose();
}

double max_eigenvalue(const MatrixXd& A)
{
    return Eigen::SelfAdjointEigenSolver<MatrixXd>(A).eigenvalues().maxCoeff();
}

}  // namespace

TEST_CASE("analytic L matches finite differences of B")
{
    for (const auto& c : oracle::instance_mix(31, 60)) {
        const MatrixXd L = boundary_jacobian(c.mesh, c.l0, c.w);
        const MatrixXd fd = fd_jacobian(c);
        const double scale = oracle::max_abs(L);
        for (Eigen::Index i = 0; i < L.rows(); ++i)
            for (Eigen::Index j = 0; j < L.cols(); ++j)
                CHECK(std::abs(L(i, j) - fd(i, j)) <= 1e-6 * std::abs(fd(i, j)) + 1e-9 * scale);
    }
}

TEST_CASE("L is symmetric, diagonally dominant and negative definite")
{
    for (const auto& c : oracle::instance_mix(32, 100)) {
        const MatrixXd L = boundary_jacobian(c.mesh, c.l0, c.w);
        CHECK(symmetry_defect(L) < 1e-9);
        CHECK(is_diagonally_dominant(L));
        CHECK(max_eigenvalue(0.5 * (L + L.transpose())) < 0.0);
    }
}

TEST_CASE("symmetric pants give a circulant L")
{
    const auto tri = pair_of_pants();
    const VectorXd l0 = VectorXd::Constant(3, oracle::pants_edge());
    const MatrixXd L = boundary_jacobian(tri, l0, Eigen::Vector3d::Zero());
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(L(i, j) == doctest::Approx(i == j ? L(0, 0) : L(0, 1)).epsilon(1e-13));
    const VectorXd row_sums = L * Eigen::Vector3d::Ones();
    CHECK(row_sums(1) == doctest::Approx(row_sums(0)).epsilon(1e-13));
    CHECK(row_sums(2) == doctest::Approx(row_sums(0)).epsilon(1e-13));
    // Along the diagonal ray B = 2 theta(t); its derivative is the row sum.
    const double h = 1e-6;
    const double fd = (oracle::symmetric_pants_length(l0(0), h) - oracle::symmetric_pants_length(l0(0), -h)) / (2 * h);
    CHECK(row_sums(0) == doctest::Approx(fd).epsilon(1e-7));
}

TEST_CASE("each face block is symmetric, dominant and negative definite")
{
    std::mt19937_64 gen(33);
    std::uniform_real_distribution<double> margin(0.01, 3.0);
    for (int k = 0; k < 500; ++k) {
        const Vector3<double> m(margin(gen), margin(gen), margin(gen));
        const Vector3<double> l = lengths_from_margin(m);
        const Matrix3<double> block = face_block(HexagonSides<double>::from_vector(l), m);
        CHECK(symmetry_defect(block) < 1e-12);
        CHECK(is_diagonally_dominant(block));
        CHECK(max_eigenvalue(0.5 * (block + block.transpose())) < 0.0);
    }
}

TEST_CASE("delta power at s = 0 and s = 1")
{
    for (const auto& c : oracle::instance_mix(34, 20)) {
        const MatrixXd L = boundary_jacobian(c.mesh, c.l0, c.w);
        const auto zero = delta_power(L, 0.0);
        CHECK(zero.power == MatrixXd::Identity(L.rows(), L.cols()));
        const auto one = delta_power(L, 1.0);
        CHECK((one.power + L).cwiseAbs().maxCoeff() < 1e-10 * std::max(1.0, oracle::max_abs(L)));
        const MatrixXd Q = one.eigenvectors;
        CHECK((Q.transpose() * Q - MatrixXd::Identity(Q.cols(), Q.cols())).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(one.eigenvalues.minCoeff() > 0.0);
    }
}

TEST_CASE("square root, semigroup and commutation")
{
    std::mt19937_64 gen(35);
    std::uniform_real_distribution<double> expo(-2.0, 2.0);
    for (const auto& c : oracle::instance_mix(35, 40)) {
        const MatrixXd L = boundary_jacobian(c.mesh, c.l0, c.w);
        const MatrixXd delta = -L;
        const MatrixXd root = delta_power(L, 0.5).power;
        CHECK((root * root - delta).cwiseAbs().maxCoeff() < 1e-8 * std::max(1.0, oracle::max_abs(delta)));

        const double s = expo(gen), t = expo(gen);
        const MatrixXd lhs = delta_power(L, s).power * delta_power(L, t).power;
        const MatrixXd rhs = delta_power(L, s + t).power;
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-8 * std::max(1.0, oracle::max_abs(rhs)));

        const MatrixXd P = delta_power(L, s).power;
        CHECK((P * delta - delta * P).cwiseAbs().maxCoeff() <
              1e-8 * std::max(1.0, oracle::max_abs(P) * oracle::max_abs(delta)));
        CHECK(symmetry_defect(P) < 1e-12);
    }
}

TEST_CASE("delta power refuses matrices that are not negative definite")
{
    const MatrixXd positive = MatrixXd::Identity(2, 2);
    CHECK_THROWS_AS(delta_power(positive, 1.0), EigSolveFailure);
    MatrixXd singular(2, 2);
    singular << -1.0, 0.0, 0.0, -1e-14;
    CHECK_NOTHROW(delta_power(singular, 1.0));
    CHECK_THROWS_AS(delta_power(singular, -1.0), EigSolveFailure);
}

TEST_CASE("long double jacobian agrees with double")
{
    const auto c = oracle::instance_mix(36, 3).back();
    const MatrixXd Ld = boundary_jacobian(c.mesh, c.l0, c.w);
    const auto Ll = boundary_jacobian(c.mesh, c.l0.cast<long double>().eval(), c.w.cast<long double>().eval());
    CHECK((Ll.cast<double>() - Ld).cwiseAbs().maxCoeff() < 1e-12 * oracle::max_abs(Ld));
}
