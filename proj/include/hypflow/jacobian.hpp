#pragma once

// L = [dB_j / dw_i] assembled from per-face 3x3 blocks, and fractional powers
// of Delta = -L.

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

#include "hypflow/conformal_metric.hpp"
#include "hypflow/errors.hpp"
#include "hypflow/hexagon.hpp"
#include "hypflow/types.hpp"

namespace hypflow {

/// d(theta at corners 0,1,2) / d(w at corners 0,1,2) for one hexagon, where
/// `margins` are the admissibility margins of (l_jk, l_ki, l_ij).
template <typename Scalar>
Matrix3<Scalar> face_block(const HexagonSides<Scalar>& sides, const Vector3<Scalar>& margins)
{
    // Side r (opposite corner r) moves with the w of the other two corners.
    Matrix3<Scalar> dl_dw = Matrix3<Scalar>::Zero();
    for (int r = 0; r < 3; ++r) {
        const Scalar d = length_log_derivative(margins(r));
        dl_dw(r, (r + 1) % 3) = d;
        dl_dw(r, (r + 2) % 3) = d;
    }
    return arc_side_jacobian(sides) * dl_dw;
}

/// Dense n x n Jacobian L(i, j) = dB_j / dw_i. Faces are summed in index order.
template <typename DerivedL, typename DerivedW>
Matrix<typename DerivedW::Scalar> boundary_jacobian(const IdealTriangulation& tri,
                                                    const Eigen::MatrixBase<DerivedL>& l0,
                                                    const Eigen::MatrixBase<DerivedW>& w)
{
    using Scalar = typename DerivedW::Scalar;
    const Vector<Scalar> margin = admissibility_margin(tri, l0, w);
    const Vector<Scalar> l = lengths_from_margin(margin);
    const int n = tri.n_boundaries();
    Matrix<Scalar> L = Matrix<Scalar>::Zero(n, n);
    for (int f = 0; f < tri.n_faces(); ++f) {
        const auto& face = tri.face(f);
        const Vector3<Scalar> face_margin{margin(face.sides[2]), margin(face.sides[0]), margin(face.sides[1])};
        const Matrix3<Scalar> block = face_block(face_sides(tri, l, f), face_margin);
        // block(m, q) = d theta_m / d w_{corner q}
        for (int m = 0; m < 3; ++m)
            for (int q = 0; q < 3; ++q)
                L(face.corners[q], face.corners[m]) += block(m, q);
    }
    return L;
}

/// max |A - A^T| / max |A|.
template <typename Derived>
typename Derived::Scalar symmetry_defect(const Eigen::MatrixBase<Derived>& A)
{
    using Scalar = typename Derived::Scalar;
    const Scalar scale = A.cwiseAbs().maxCoeff();
    if (scale == Scalar(0))
        return Scalar(0);
    return (A - A.transpose()).cwiseAbs().maxCoeff() / scale;
}

/// |A_ii| >= sum_{j != i} |A_ij| for every row.
template <typename Derived>
bool is_diagonally_dominant(const Eigen::MatrixBase<Derived>& A)
{
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        const auto off = A.row(i).cwiseAbs().sum() - std::abs(A(i, i));
        if (std::abs(A(i, i)) < off)
            return false;
    }
    return true;
}

/// Delta^s for the symmetric positive definite Delta = -L, via the orthogonal
/// eigendecomposition Delta = Q diag(lambda) Q^T.
template <typename Scalar>
struct DeltaPower
{
    Scalar s{};
    Matrix<Scalar> power;         // Delta^s
    Vector<Scalar> eigenvalues;   // of Delta, ascending
    Matrix<Scalar> eigenvectors;  // columns, orthonormal
};

template <typename Derived>
DeltaPower<typename Derived::Scalar> delta_power(const Eigen::MatrixBase<Derived>& L, typename Derived::Scalar s)
{
    using Scalar = typename Derived::Scalar;
    using std::pow;
    const Matrix<Scalar> delta = -L;
    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> eig(delta);
    if (eig.info() != Eigen::Success)
        throw EigSolveFailure("symmetric eigensolver did not converge");

    DeltaPower<Scalar> out{s, {}, eig.eigenvalues(), eig.eigenvectors()};
    const Scalar lo = out.eigenvalues.minCoeff();
    const Scalar hi = out.eigenvalues.maxCoeff();
    if (!(lo > Scalar(0)))
        throw EigSolveFailure("Delta is not positive definite (smallest eigenvalue " + std::to_string(double(lo)) +
                              ")");
    if (s < Scalar(0) && lo < Scalar(1e-12) * hi)
        throw EigSolveFailure("Delta is numerically singular; negative power refused");

    if (s == Scalar(0)) {
        out.power = Matrix<Scalar>::Identity(L.rows(), L.cols());
        return out;
    }
    Vector<Scalar> d(out.eigenvalues.size());
    for (Eigen::Index k = 0; k < d.size(); ++k)
        d(k) = pow(out.eigenvalues(k), s);
    out.power = out.eigenvectors * d.asDiagonal() * out.eigenvectors.transpose();
    return out;
}

}  // namespace hypflow
