#pragma once

#include <cstdint>
#include <random>

#include "hypflow/triangulation.hpp"
#include "hypflow/types.hpp"

namespace hypflow {

/// Seeded source of reproducible variates. Uniforms are built from the raw
/// 64-bit engine output so they do not depend on the standard library's
/// distribution implementations.
class Rng
{
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform(double lo, double hi);
    /// Uniform integer in [lo, hi].
    int uniform_int(int lo, int hi);

private:
    std::mt19937_64 engine_;
};

struct Instance
{
    IdealTriangulation mesh;
    BaseMetric l0;
};

/// Closed surface from randomly glued triangle pairs, made ideal by taking
/// each vertex as a boundary component. Connected, with 2 <= |F| <= 2 *
/// max_face_pairs and at most max_boundaries components.
IdealTriangulation random_triangulation(Rng& rng, int max_face_pairs = 4, int max_boundaries = 10);

/// l0 uniform in [lo, hi] per edge.
BaseMetric random_metric(const IdealTriangulation& tri, Rng& rng, double lo = 1.0, double hi = 3.0);

/// w uniform in [lo, hi]^n, redrawn until every admissibility margin is at
/// least min_margin.
ConformalFactor random_admissible_factor(const IdealTriangulation& tri,
                                         const BaseMetric& l0,
                                         Rng& rng,
                                         double lo = -0.25,
                                         double hi = 1.0,
                                         double min_margin = 0.05);

Instance random_instance(Rng& rng, int max_face_pairs = 4, int max_boundaries = 10);

}  // namespace hypflow
