#pragma once

// Discrete conformal deformation of a base metric:
//
//   cosh(l_e / 2) = exp(w_i + w_j) cosh(l0_e / 2)     for edge e = (i, j).
//
// A factor w is admissible when every margin w_i + w_j + ln cosh(l0_e / 2) is
// positive; then cosh(l_e / 2) = exp(margin_e) and all lengths are defined.

#include <cmath>
#include <stdexcept>
#include <string>

#include "hypflow/errors.hpp"
#include "hypflow/hexagon.hpp"
#include "hypflow/triangulation.hpp"
#include "hypflow/types.hpp"

namespace hypflow {

namespace detail {

/// ln cosh(x) without overflow for large |x|.
template <typename Scalar>
Scalar log_cosh(Scalar x)
{
    using std::abs;
    using std::exp;
    using std::log;
    using std::log1p;
    const Scalar a = abs(x);
    return a + log1p(exp(Scalar(-2) * a)) - log(Scalar(2));
}

template <typename DerivedL, typename DerivedW>
void require_dimensions(const IdealTriangulation& tri,
                        const Eigen::MatrixBase<DerivedL>& l0,
                        const Eigen::MatrixBase<DerivedW>& w)
{
    if (l0.size() != tri.n_edges())
        throw std::invalid_argument("base metric has " + std::to_string(l0.size()) + " entries, mesh has " +
                                    std::to_string(tri.n_edges()) + " edges");
    if (w.size() != tri.n_boundaries())
        throw std::invalid_argument("conformal factor has " + std::to_string(w.size()) +
                                    " entries, mesh has " + std::to_string(tri.n_boundaries()) +
                                    " boundary components");
}

}  // namespace detail

/// Per-edge margins w_i + w_j + ln cosh(l0_e / 2). A self-edge uses 2 w_i.
template <typename DerivedL, typename DerivedW>
Vector<typename DerivedW::Scalar> admissibility_margin(const IdealTriangulation& tri,
                                                       const Eigen::MatrixBase<DerivedL>& l0,
                                                       const Eigen::MatrixBase<DerivedW>& w)
{
    using Scalar = typename DerivedW::Scalar;
    detail::require_dimensions(tri, l0, w);
    Vector<Scalar> margin(tri.n_edges());
    for (int e = 0; e < tri.n_edges(); ++e) {
        const auto& [i, j] = tri.edge(e).endpoints;
        margin(e) = w(i) + w(j) + detail::log_cosh(Scalar(l0(e)) / Scalar(2));
    }
    return margin;
}

template <typename DerivedL, typename DerivedW>
bool is_admissible(const IdealTriangulation& tri,
                   const Eigen::MatrixBase<DerivedL>& l0,
                   const Eigen::MatrixBase<DerivedW>& w)
{
    return (admissibility_margin(tri, l0, w).array() > 0).all();
}

/// Deformed edge lengths from per-edge margins.
template <typename Derived>
Vector<typename Derived::Scalar> lengths_from_margin(const Eigen::MatrixBase<Derived>& margin)
{
    using Scalar = typename Derived::Scalar;
    using std::expm1;
    Vector<Scalar> l(margin.size());
    for (Eigen::Index e = 0; e < margin.size(); ++e) {
        if (!(margin(e) > Scalar(0)))
            throw InadmissibleFactor("edge " + std::to_string(e) + " has non-positive admissibility margin",
                                     static_cast<std::size_t>(e));
        l(e) = Scalar(2) * detail::acosh1p(expm1(margin(e)));
    }
    return l;
}

/// Deformed lengths l = w * l0. Throws InadmissibleFactor naming the first
/// edge whose margin is not positive.
template <typename DerivedL, typename DerivedW>
Vector<typename DerivedW::Scalar> deform(const IdealTriangulation& tri,
                                         const Eigen::MatrixBase<DerivedL>& l0,
                                         const Eigen::MatrixBase<DerivedW>& w)
{
    return lengths_from_margin(admissibility_margin(tri, l0, w));
}

/// d l_e / d(w_i + w_j) = 2 coth(l_e / 2), from the margin.
template <typename Scalar>
Scalar length_log_derivative(Scalar margin)
{
    using std::exp;
    using std::expm1;
    using std::sqrt;
    const Scalar y = expm1(margin);
    return Scalar(2) * exp(margin) / sqrt(y * (y + Scalar(2)));
}

/// Sides of face f in hexagon order (l_jk, l_ki, l_ij) with corners
/// (i, j, k) = corners (0, 1, 2).
template <typename Derived>
HexagonSides<typename Derived::Scalar> face_sides(const IdealTriangulation& tri,
                                                  const Eigen::MatrixBase<Derived>& lengths,
                                                  int f)
{
    const auto& sides = tri.face(f).sides;
    return {lengths(sides[2]), lengths(sides[0]), lengths(sides[1])};
}

/// Boundary lengths B_i: the sum of the B-arcs at every corner labelled i.
template <typename DerivedL, typename DerivedW>
Vector<typename DerivedW::Scalar> boundary_lengths(const IdealTriangulation& tri,
                                                   const Eigen::MatrixBase<DerivedL>& l0,
                                                   const Eigen::MatrixBase<DerivedW>& w)
{
    using Scalar = typename DerivedW::Scalar;
    const Vector<Scalar> l = deform(tri, l0, w);
    Vector<Scalar> B = Vector<Scalar>::Zero(tri.n_boundaries());
    for (int f = 0; f < tri.n_faces(); ++f) {
        const Vector3<Scalar> theta = opposite_arcs(face_sides(tri, l, f)).as_vector();
        const auto& corners = tri.face(f).corners;
        for (int m = 0; m < 3; ++m)
            B(corners[m]) += theta(m);
    }
    return B;
}

}  // namespace hypflow
