#include "hypflow/io.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <limits>
#include <sstream>

#include "hypflow/errors.hpp"

namespace hypflow::io {

using nlohmann::json;

namespace {

json parse_json(const std::string& text)
{
    try {
        return json::parse(text);
    } catch (const json::parse_error& err) {
        throw ParseError(std::string("invalid JSON: ") + err.what());
    }
}

template <typename T>
T get_field(const json& obj, const char* key)
{
    if (!obj.is_object() || !obj.contains(key))
        throw ParseError(std::string("missing key '") + key + "'");
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& err) {
        throw ParseError(std::string("bad value for '") + key + "': " + err.what());
    }
}

}  // namespace

MeshDescription parse_mesh_description(const std::string& text)
{
    const json doc = parse_json(text);
    MeshDescription mesh;
    mesh.n_boundaries = get_field<int>(doc, "n_boundaries");
    for (const auto& pair : get_field<std::vector<std::array<int, 2>>>(doc, "edges"))
        mesh.edges.push_back({{pair[0] - 1, pair[1] - 1}});
    const json faces = get_field<json>(doc, "faces");
    if (!faces.is_array())
        throw ParseError("'faces' must be an array");
    for (const auto& face : faces) {
        FaceRecord rec;
        rec.sides = get_field<std::array<int, 3>>(face, "sides");
        rec.corners = get_field<std::array<int, 3>>(face, "corners");
        for (int& c : rec.corners)
            --c;
        mesh.faces.push_back(rec);
    }
    return mesh;
}

IdealTriangulation parse_mesh(const std::string& text)
{
    MeshDescription mesh = parse_mesh_description(text);
    return IdealTriangulation::build(mesh.n_boundaries, std::move(mesh.edges), std::move(mesh.faces));
}

std::string serialize_mesh(const IdealTriangulation& tri)
{
    json edges = json::array();
    for (const auto& e : tri.edges())
        edges.push_back({e.endpoints[0] + 1, e.endpoints[1] + 1});
    json faces = json::array();
    for (const auto& f : tri.faces())
        faces.push_back({{"sides", f.sides},
                         {"corners", {f.corners[0] + 1, f.corners[1] + 1, f.corners[2] + 1}}});
    json doc = {{"n_boundaries", tri.n_boundaries()}, {"edges", edges}, {"faces", faces}};
    return doc.dump(2) + "\n";
}

VectorXd parse_vector_json(const std::string& text)
{
    const json doc = parse_json(text);
    if (!doc.is_array())
        throw ParseError("expected a JSON array of numbers");
    VectorXd v(static_cast<Eigen::Index>(doc.size()));
    for (std::size_t k = 0; k < doc.size(); ++k) {
        if (!doc[k].is_number())
            throw ParseError("entry " + std::to_string(k) + " is not a number");
        v(static_cast<Eigen::Index>(k)) = doc[k].get<double>();
    }
    return v;
}

std::string serialize_vector_json(const VectorXd& v)
{
    return json(std::vector<double>(v.data(), v.data() + v.size())).dump() + "\n";
}

VectorXd parse_inline_list(const std::string& text)
{
    std::vector<double> values;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        if (comma == std::string::npos)
            comma = text.size();
        std::string token = text.substr(pos, comma - pos);
        const auto first = token.find_first_not_of(" \t");
        const auto last = token.find_last_not_of(" \t");
        if (first == std::string::npos)
            throw ParseError("empty entry in list '" + text + "'");
        token = token.substr(first, last - first + 1);
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
        if (ec != std::errc{} || ptr != token.data() + token.size())
            throw ParseError("'" + token + "' is not a number");
        values.push_back(value);
        pos = comma + 1;
    }
    return Eigen::Map<VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ParseError("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write '" + path.string() + "'");
    out << contents;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj)
{
    const Eigen::Index n = traj.targets.size();
    out << "t";
    for (Eigen::Index i = 1; i <= n; ++i)
        out << ",w_" << i;
    for (Eigen::Index i = 1; i <= n; ++i)
        out << ",B_" << i;
    out << ",residual,energy\n";

    const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
    for (const auto& s : traj.samples) {
        out << s.t;
        for (Eigen::Index i = 0; i < n; ++i)
            out << ',' << s.w(i);
        for (Eigen::Index i = 0; i < n; ++i)
            out << ',' << s.B(i);
        out << ',' << s.residual << ',' << traj.reported_energy(s) << '\n';
    }
    out.precision(old_precision);
}

CsvTable read_csv(std::istream& in)
{
    CsvTable table;
    std::string line;
    if (!std::getline(in, line))
        throw ParseError("empty CSV");
    std::stringstream header(line);
    for (std::string cell; std::getline(header, cell, ',');)
        table.header.push_back(cell);
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::vector<double> row;
        std::stringstream cells(line);
        for (std::string cell; std::getline(cells, cell, ',');) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(cell, &used));
                if (used != cell.size())
                    throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw ParseError("non-numeric CSV cell '" + cell + "'");
            }
        }
        if (row.size() != table.header.size())
            throw ParseError("CSV row has " + std::to_string(row.size()) + " cells, header has " +
                             std::to_string(table.header.size()));
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace hypflow::io
