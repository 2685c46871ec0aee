#pragma once

// Right-angled hyperbolic hexagons. Three alternating sides are segments of
// ideal edges (l_jk, l_ki, l_ij); the other three are B-arcs (theta_i,
// theta_j, theta_k), with theta_i opposite l_jk. They are related by
//
//   cosh theta_i = (cosh l_jk + cosh l_ij cosh l_ki) / (sinh l_ij sinh l_ki)
//
// and its cyclic rotations.

#include <cmath>
#include <string>

#include "hypflow/errors.hpp"
#include "hypflow/types.hpp"

namespace hypflow {

/// Sides beyond this overflow cosh products in double precision.
inline constexpr double max_hexagon_side = 350.0;

template <typename Scalar>
struct HexagonSides
{
    Scalar l_jk{};
    Scalar l_ki{};
    Scalar l_ij{};

    /// (l_jk, l_ki, l_ij): entry r is opposite arc r.
    Vector3<Scalar> as_vector() const { return {l_jk, l_ki, l_ij}; }
    static HexagonSides from_vector(const Vector3<Scalar>& v) { return {v(0), v(1), v(2)}; }
};

template <typename Scalar>
struct HexagonArcs
{
    Scalar theta_i{};
    Scalar theta_j{};
    Scalar theta_k{};

    Vector3<Scalar> as_vector() const { return {theta_i, theta_j, theta_k}; }
};

namespace detail {

template <typename Scalar>
void require_valid_sides(const Vector3<Scalar>& s)
{
    for (int r = 0; r < 3; ++r) {
        using std::isfinite;
        if (!isfinite(s(r)) || !(s(r) > Scalar(0)))
            throw NonFinite("hexagon side " + std::to_string(r) + " is not a positive finite length");
        if (s(r) > Scalar(max_hexagon_side))
            throw NonFinite("hexagon side " + std::to_string(r) + " exceeds the representable range");
    }
}

/// cosh(theta) - 1 for the arc opposite `opp` and adjacent to `adj1`, `adj2`.
/// Written without the cancellation in cosh(b)cosh(c) - sinh(b)sinh(c).
template <typename Scalar>
Scalar arc_excess(Scalar opp, Scalar adj1, Scalar adj2)
{
    using std::cosh;
    using std::sinh;
    return (cosh(opp) + cosh(adj1 - adj2)) / (sinh(adj1) * sinh(adj2));
}

/// arccosh(1 + y), accurate as y -> 0+.
template <typename Scalar>
Scalar acosh1p(Scalar y)
{
    using std::log1p;
    using std::sqrt;
    return log1p(y + sqrt(y * (y + Scalar(2))));
}

template <typename Scalar>
Scalar checked(Scalar v, const char* what)
{
    using std::isfinite;
    if (!isfinite(v))
        throw NonFinite(std::string("non-finite ") + what);
    return v;
}

}  // namespace detail

/// The three B-arcs of the hexagon with the given edge sides. Throws
/// NonFinite for non-positive, non-finite or overflowing sides.
template <typename Scalar>
HexagonArcs<Scalar> opposite_arcs(const HexagonSides<Scalar>& sides)
{
    const Vector3<Scalar> s = sides.as_vector();
    detail::require_valid_sides(s);
    Vector3<Scalar> theta;
    for (int r = 0; r < 3; ++r) {
        const Scalar y = detail::arc_excess(s(r), s((r + 1) % 3), s((r + 2) % 3));
        theta(r) = detail::checked(detail::acosh1p(y), "hexagon arc");
    }
    return {theta(0), theta(1), theta(2)};
}

/// d(theta_i, theta_j, theta_k) / d(l_jk, l_ki, l_ij), differentiated from
/// the cosine rule. Row r is the arc opposite column r.
template <typename Scalar>
Matrix3<Scalar> arc_side_jacobian(const HexagonSides<Scalar>& sides)
{
    using std::cosh;
    using std::sinh;
    using std::sqrt;
    const Vector3<Scalar> s = sides.as_vector();
    detail::require_valid_sides(s);

    Vector3<Scalar> ch, sh;
    for (int r = 0; r < 3; ++r) {
        ch(r) = cosh(s(r));
        sh(r) = sinh(s(r));
    }

    Matrix3<Scalar> J;
    for (int r = 0; r < 3; ++r) {
        const int a = r, b = (r + 1) % 3, c = (r + 2) % 3;
        const Scalar y = detail::arc_excess(s(a), s(b), s(c));
        const Scalar sinh_theta = sqrt(y * (y + Scalar(2)));
        const Scalar denom = sh(b) * sh(c) * sinh_theta;
        J(r, a) = sh(a) / denom;
        J(r, b) = -(ch(c) + ch(a) * ch(b)) / (sh(b) * denom);
        J(r, c) = -(ch(b) + ch(a) * ch(c)) / (sh(c) * denom);
    }
    for (int k = 0; k < 9; ++k)
        detail::checked(J(k), "hexagon arc derivative");
    return J;
}

/// Residual of cosh l_jk = sinh l_ij sinh l_ki cosh theta_i - cosh l_ij cosh l_ki
/// (and rotations), scaled by the largest term. Used to check arcs.
template <typename Scalar>
Scalar cosine_rule_residual(const HexagonSides<Scalar>& sides, const HexagonArcs<Scalar>& arcs)
{
    using std::abs;
    using std::cosh;
    using std::max;
    using std::sinh;
    const Vector3<Scalar> s = sides.as_vector();
    const Vector3<Scalar> t = arcs.as_vector();
    Scalar worst(0);
    for (int r = 0; r < 3; ++r) {
        const int b = (r + 1) % 3, c = (r + 2) % 3;
        const Scalar big = sinh(s(b)) * sinh(s(c)) * cosh(t(r));
        const Scalar rhs = big - cosh(s(b)) * cosh(s(c));
        const Scalar scale = max(big, cosh(s(r)));
        worst = max(worst, abs(cosh(s(r)) - rhs) / scale);
    }
    return worst;
}

}  // namespace hypflow
