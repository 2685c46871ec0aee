#include "hypflow/random_instance.hpp"

#include <numeric>
#include <optional>
#include <stdexcept>

#include "hypflow/conformal_metric.hpp"

namespace hypflow {

double Rng::uniform(double lo, double hi)
{
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
}

int Rng::uniform_int(int lo, int hi)
{
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(engine_() % span);
}

namespace {

struct DisjointSets
{
    explicit DisjointSets(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }

    int find(int x)
    {
        while (parent[x] != x)
            x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }

    std::vector<int> parent;
};

std::optional<IdealTriangulation> try_glue(Rng& rng, int n_faces, int max_boundaries)
{
    const int n_slots = 3 * n_faces;
    std::vector<int> order(n_slots);
    std::iota(order.begin(), order.end(), 0);
    for (int k = n_slots - 1; k > 0; --k)
        std::swap(order[k], order[rng.uniform_int(0, k)]);

    // Corner slot 3f+m; side slot 3f+m joins corners 3f+m-1 and 3f+m.
    auto corner_before = [](int slot) { return slot - slot % 3 + (slot % 3 + 2) % 3; };
    DisjointSets corners(n_slots);
    DisjointSets faces(n_faces);
    std::vector<int> side_edge(n_slots, -1);
    for (int k = 0; k < n_slots; k += 2) {
        const int a = order[k], b = order[k + 1];
        const int edge = k / 2;
        side_edge[a] = side_edge[b] = edge;
        faces.unite(a / 3, b / 3);
        if (rng.uniform_int(0, 1) == 0) {
            corners.unite(corner_before(a), corner_before(b));
            corners.unite(a, b);
        } else {
            corners.unite(corner_before(a), b);
            corners.unite(a, corner_before(b));
        }
    }
    for (int f = 1; f < n_faces; ++f)
        if (faces.find(f) != faces.find(0))
            return std::nullopt;

    std::vector<int> label(n_slots, -1);
    int n = 0;
    for (int c = 0; c < n_slots; ++c) {
        int& l = label[corners.find(c)];
        if (l < 0)
            l = n++;
    }
    if (n > max_boundaries)
        return std::nullopt;

    std::vector<EdgeRecord> edges(n_slots / 2);
    std::vector<FaceRecord> face_records(n_faces);
    for (int slot = 0; slot < n_slots; ++slot) {
        const int f = slot / 3, m = slot % 3;
        face_records[f].sides[m] = side_edge[slot];
        face_records[f].corners[m] = label[corners.find(slot)];
        edges[side_edge[slot]].endpoints = {label[corners.find(corner_before(slot))], label[corners.find(slot)]};
    }
    return IdealTriangulation::build(n, std::move(edges), std::move(face_records));
}

}  // namespace

IdealTriangulation random_triangulation(Rng& rng, int max_face_pairs, int max_boundaries)
{
    if (max_face_pairs < 1 || max_boundaries < 1)
        throw std::invalid_argument("random_triangulation needs at least one face pair and one boundary");
    for (int attempt = 0; attempt < 10000; ++attempt) {
        const int n_faces = 2 * rng.uniform_int(1, max_face_pairs);
        if (auto tri = try_glue(rng, n_faces, max_boundaries))
            return std::move(*tri);
    }
    throw std::runtime_error("random_triangulation: no admissible gluing found");
}

BaseMetric random_metric(const IdealTriangulation& tri, Rng& rng, double lo, double hi)
{
    BaseMetric l0(tri.n_edges());
    for (Eigen::Index e = 0; e < l0.size(); ++e)
        l0(e) = rng.uniform(lo, hi);
    return l0;
}

ConformalFactor random_admissible_factor(const IdealTriangulation& tri,
                                         const BaseMetric& l0,
                                         Rng& rng,
                                         double lo,
                                         double hi,
                                         double min_margin)
{
    ConformalFactor w(tri.n_boundaries());
    for (int attempt = 0; attempt < 100000; ++attempt) {
        for (Eigen::Index i = 0; i < w.size(); ++i)
            w(i) = rng.uniform(lo, hi);
        if (admissibility_margin(tri, l0, w).minCoeff() >= min_margin)
            return w;
    }
    throw std::runtime_error("random_admissible_factor: box contains no admissible point");
}

Instance random_instance(Rng& rng, int max_face_pairs, int max_boundaries)
{
    IdealTriangulation mesh = random_triangulation(rng, max_face_pairs, max_boundaries);
    BaseMetric l0 = random_metric(mesh, rng);
    return {std::move(mesh), std::move(l0)};
}

}  // namespace hypflow
