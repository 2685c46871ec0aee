#include "hypflow/triangulation.hpp"

#include <algorithm>
#include <optional>
#include <sstream>

#include "hypflow/errors.hpp"

namespace hypflow {

namespace {

std::string edge_tag(std::size_t e) { return "edge " + std::to_string(e); }
std::string face_tag(std::size_t f) { return "face " + std::to_string(f); }

struct Failure
{
    std::string message;
    std::size_t index = MalformedMesh::npos;
};

// Each check returns the first failure it finds, if any.
using CheckResult = std::optional<Failure>;

CheckResult check_counts(int n, const std::vector<EdgeRecord>& edges, const std::vector<FaceRecord>& faces)
{
    if (n < 1)
        return Failure{"n_boundaries must be positive, got " + std::to_string(n)};
    if (faces.empty())
        return Failure{"no faces: |F| - |E| < 0 requires at least one face"};
    if (3 * faces.size() != 2 * edges.size()) {
        std::ostringstream os;
        os << "3|F| = " << 3 * faces.size() << " != 2|E| = " << 2 * edges.size();
        return Failure{os.str()};
    }
    return std::nullopt;
}

CheckResult check_ranges(int n, const std::vector<EdgeRecord>& edges, const std::vector<FaceRecord>& faces)
{
    for (std::size_t e = 0; e < edges.size(); ++e)
        for (int b : edges[e].endpoints)
            if (b < 0 || b >= n)
                return Failure{edge_tag(e) + " has endpoint " + std::to_string(b) + " outside [0, n)", e};
    const int n_edges = static_cast<int>(edges.size());
    for (std::size_t f = 0; f < faces.size(); ++f) {
        for (int s : faces[f].sides)
            if (s < 0 || s >= n_edges)
                return Failure{face_tag(f) + " references missing edge " + std::to_string(s), f};
        for (int c : faces[f].corners)
            if (c < 0 || c >= n)
                return Failure{face_tag(f) + " has corner " + std::to_string(c) + " outside [0, n)", f};
    }
    return std::nullopt;
}

CheckResult check_edge_use(const std::vector<EdgeRecord>& edges, const std::vector<FaceRecord>& faces)
{
    std::vector<int> uses(edges.size(), 0);
    for (const auto& face : faces)
        for (int s : face.sides)
            ++uses[s];
    for (std::size_t e = 0; e < uses.size(); ++e)
        if (uses[e] != 2)
            return Failure{edge_tag(e) + " lies on " + std::to_string(uses[e]) + " face sides (expected 2)", e};
    return std::nullopt;
}

CheckResult check_gluing(const std::vector<EdgeRecord>& edges, const std::vector<FaceRecord>& faces)
{
    for (std::size_t f = 0; f < faces.size(); ++f) {
        const auto& face = faces[f];
        for (int m = 0; m < 3; ++m) {
            std::array<int, 2> expect{face.corners[(m + 2) % 3], face.corners[m]};
            std::array<int, 2> have = edges[face.sides[m]].endpoints;
            std::sort(expect.begin(), expect.end());
            std::sort(have.begin(), have.end());
            if (expect != have) {
                std::ostringstream os;
                os << face_tag(f) << " side " << m << " (edge " << face.sides[m] << ") joins boundaries {"
                   << have[0] << ", " << have[1] << "} but its corners are {" << expect[0] << ", " << expect[1]
                   << "}";
                return Failure{os.str(), f};
            }
        }
    }
    return std::nullopt;
}

CheckResult check_boundary_coverage(int n, const std::vector<FaceRecord>& faces)
{
    std::vector<int> corners(n, 0);
    for (const auto& face : faces)
        for (int c : face.corners)
            ++corners[c];
    for (int i = 0; i < n; ++i)
        if (corners[i] == 0)
            return Failure{"boundary " + std::to_string(i) + " meets no face"};
    return std::nullopt;
}

}  // namespace

std::vector<InvariantCheck> check_invariants(
    int n_boundaries,
    const std::vector<EdgeRecord>& edges,
    const std::vector<FaceRecord>& faces)
{
    std::vector<InvariantCheck> out;
    auto record = [&](std::string name, const CheckResult& r) {
        out.push_back({std::move(name), !r.has_value(), r ? r->message : std::string{}});
        return !r.has_value();
    };

    record("counts (n >= 1, |F| >= 1, 3|F| = 2|E|)", check_counts(n_boundaries, edges, faces));
    if (!record("index ranges", check_ranges(n_boundaries, edges, faces)))
        return out;
    record("each edge on exactly two face sides", check_edge_use(edges, faces));
    record("corner labels match side endpoints", check_gluing(edges, faces));
    if (n_boundaries >= 1)
        record("every boundary meets a face", check_boundary_coverage(n_boundaries, faces));
    return out;
}

IdealTriangulation IdealTriangulation::build(
    int n_boundaries,
    std::vector<EdgeRecord> edges,
    std::vector<FaceRecord> faces)
{
    auto raise = [](const CheckResult& r) {
        if (r)
            throw MalformedMesh(r->message, r->index);
    };
    raise(check_counts(n_boundaries, edges, faces));
    raise(check_ranges(n_boundaries, edges, faces));
    raise(check_edge_use(edges, faces));
    raise(check_gluing(edges, faces));
    raise(check_boundary_coverage(n_boundaries, faces));
    return IdealTriangulation(n_boundaries, std::move(edges), std::move(faces));
}

std::vector<CornerRef> IdealTriangulation::incident_corners(int i) const
{
    if (i < 0 || i >= n_)
        throw InvalidBoundaryIndex("boundary index " + std::to_string(i) + " outside [0, " +
                                   std::to_string(n_) + ")");
    std::vector<CornerRef> out;
    for (int f = 0; f < n_faces(); ++f)
        for (int m = 0; m < 3; ++m)
            if (faces_[f].corners[m] == i)
                out.push_back({f, m});
    return out;
}

IdealTriangulation pair_of_pants()
{
    return IdealTriangulation::build(
        3,
        {{{0, 1}}, {{1, 2}}, {{2, 0}}},
        {{{0, 1, 2}, {1, 2, 0}}, {{0, 1, 2}, {1, 2, 0}}});
}

IdealTriangulation one_holed_torus()
{
    return IdealTriangulation::build(
        1,
        {{{0, 0}}, {{0, 0}}, {{0, 0}}},
        {{{0, 1, 2}, {0, 0, 0}}, {{0, 1, 2}, {0, 0, 0}}});
}

}  // namespace hypflow
