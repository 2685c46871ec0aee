#pragma once

#include <array>
#include <string>
#include <vector>

namespace hypflow {

// Boundary, edge and face indices are 0-based throughout the C++ API. Only
// the JSON mesh format uses 1-based boundary labels.

struct EdgeRecord
{
    std::array<int, 2> endpoints{};  // boundary indices, equal for a self-edge

    bool operator==(const EdgeRecord&) const = default;
};

/// Ideal face (a right-angled hexagon). Corner m is the B-arc between sides
/// m and m+1 (mod 3); side m joins corners m-1 and m.
struct FaceRecord
{
    std::array<int, 3> sides{};
    std::array<int, 3> corners{};

    bool operator==(const FaceRecord&) const = default;
};

struct CornerRef
{
    int face = 0;
    int slot = 0;

    bool operator==(const CornerRef&) const = default;
};

/// Result of one structural check, used by the `validate` command.
struct InvariantCheck
{
    std::string name;
    bool passed = true;
    std::string detail;
};

/// Runs every structural check without throwing. Checks after a failed
/// index-range check are skipped.
std::vector<InvariantCheck> check_invariants(
    int n_boundaries,
    const std::vector<EdgeRecord>& edges,
    const std::vector<FaceRecord>& faces);

/// Validated, immutable ideal triangulation of a bordered surface.
class IdealTriangulation
{
public:
    /// Throws MalformedMesh on the first failed invariant.
    static IdealTriangulation build(
        int n_boundaries,
        std::vector<EdgeRecord> edges,
        std::vector<FaceRecord> faces);

    int n_boundaries() const noexcept { return n_; }
    int n_edges() const noexcept { return static_cast<int>(edges_.size()); }
    int n_faces() const noexcept { return static_cast<int>(faces_.size()); }
    const std::vector<EdgeRecord>& edges() const noexcept { return edges_; }
    const std::vector<FaceRecord>& faces() const noexcept { return faces_; }
    const EdgeRecord& edge(int e) const { return edges_.at(e); }
    const FaceRecord& face(int f) const { return faces_.at(f); }

    /// |F| - |E|; always negative for a valid triangulation.
    int euler_characteristic() const noexcept { return n_faces() - n_edges(); }

    /// Every (face, slot) whose corner is boundary i, ascending by face then
    /// slot. Throws InvalidBoundaryIndex.
    std::vector<CornerRef> incident_corners(int i) const;

    bool operator==(const IdealTriangulation&) const = default;

private:
    IdealTriangulation(int n, std::vector<EdgeRecord> e, std::vector<FaceRecord> f)
        : n_(n), edges_(std::move(e)), faces_(std::move(f))
    {
    }

    int n_;
    std::vector<EdgeRecord> edges_;
    std::vector<FaceRecord> faces_;
};

/// Three-holed sphere: edges (0,1),(1,2),(2,0) and two faces with corners
/// (1,2,0).
IdealTriangulation pair_of_pants();

/// One-holed torus: three self-edges on boundary 0 and two faces.
IdealTriangulation one_holed_torus();

}  // namespace hypflow
