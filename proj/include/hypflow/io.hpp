#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "hypflow/flows.hpp"
#include "hypflow/triangulation.hpp"
#include "hypflow/types.hpp"

namespace hypflow::io {

// Mesh JSON: {"n_boundaries": n, "edges": [[i, j], ...],
//             "faces": [{"sides": [e0, e1, e2], "corners": [c0, c1, c2]}, ...]}
// Boundary labels are 1-based in the file, edge indices 0-based.

/// Raw mesh fields before validation; used by `validate` to report every
/// failed invariant instead of the first.
struct MeshDescription
{
    int n_boundaries = 0;
    std::vector<EdgeRecord> edges;
    std::vector<FaceRecord> faces;
};

/// Throws ParseError on malformed text or missing keys.
MeshDescription parse_mesh_description(const std::string& text);
/// Throws ParseError or MalformedMesh.
IdealTriangulation parse_mesh(const std::string& text);
std::string serialize_mesh(const IdealTriangulation& tri);

/// Metric JSON: array of per-edge lengths.
VectorXd parse_vector_json(const std::string& text);
std::string serialize_vector_json(const VectorXd& v);

/// "1,2.5,3" -> (1, 2.5, 3). Throws ParseError.
VectorXd parse_inline_list(const std::string& text);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);

/// Header `t,w_1..w_n,B_1..B_n,residual,energy`; 17 significant digits.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

struct CsvTable
{
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

/// Parses numeric CSV with a header row. Throws ParseError.
CsvTable read_csv(std::istream& in);

}  // namespace hypflow::io
