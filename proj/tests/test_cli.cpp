#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "cli.hpp"
#include "hypflow/io.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string data_dir = HYPFLOW_DATA_DIR;
const std::string pants_mesh = data_dir + "/pair_of_pants.mesh.json";
const std::string pants_metric = data_dir + "/pair_of_pants.metric.json";

struct Run
{
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args)
{
    args.insert(args.begin(), "hypflow");
    std::ostringstream out, err;
    const int code = hypflow::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / "hypflow_cli_test";
    fs::create_directories(dir);
    return dir / name;
}

std::vector<std::string> pants_args(std::vector<std::string> rest)
{
    std::vector<std::string> args{"--mesh", pants_mesh, "--metric", pants_metric};
    args.insert(args.end(), rest.begin(), rest.end());
    return args;
}

std::vector<std::string> cmd(const std::string& name, std::vector<std::string> rest)
{
    rest.insert(rest.begin(), name);
    return rest;
}

}  // namespace

TEST_CASE("validate accepts the bundled meshes")
{
    const auto r = run({"validate", pants_mesh});
    CHECK(r.code == 0);
    CHECK(r.out.find("euler_char -1") != std::string::npos);
    CHECK(r.out.find("FAIL") == std::string::npos);
    CHECK(run({"validate", "--mesh", data_dir + "/one_holed_torus.mesh.json"}).code == 0);
}

TEST_CASE("validate reports a dangling edge and malformed text")
{
    auto doc = json::parse(hypflow::io::read_file(pants_mesh));
    doc["edges"].push_back({1, 2});
    const auto dangling = scratch("dangling.json");
    hypflow::io::write_file(dangling, doc.dump());
    const auto r = run({"validate", dangling.string()});
    CHECK(r.code == 1);
    CHECK(r.out.find("edge 3") != std::string::npos);

    const auto bad = scratch("bad.json");
    hypflow::io::write_file(bad, "{\"n_boundaries\": 3,");
    CHECK(run({"validate", bad.string()}).code == 2);
    CHECK(run({"validate", scratch("missing.json").string()}).code == 2);
}

TEST_CASE("flow converges on the pants and writes parseable outputs")
{
    const auto csv = scratch("flow.csv"), report = scratch("flow.json");
    const auto r = run(cmd("flow", pants_args({"--kind", "fractional-calabi", "--s", "1", "--targets", "1,1,1",
                                               "--out-csv", csv.string(), "--out-json", report.string(), "--seed",
                                               "17"})));
    REQUIRE(r.code == 0);
    const auto doc = json::parse(hypflow::io::read_file(report));
    CHECK(doc["status"] == "Converged");
    CHECK(doc["residual"].get<double>() < 1e-8);
    CHECK(doc["kind"] == "fractional-calabi");
    CHECK(doc["params"]["s"] == 1.0);
    CHECK(doc["seed"] == 17);
    CHECK(doc["version"] == hypflow::cli::version());
    CHECK(doc["decay"]["r_squared"].get<double>() > 0.99);
    CHECK(doc.contains("wall_time_s"));

    std::ifstream in(csv);
    const auto table = hypflow::io::read_csv(in);
    CHECK(table.header.front() == "t");
    CHECK(table.header.back() == "energy");
    CHECK(table.rows.size() == doc["samples"].get<std::size_t>());
}

TEST_CASE("Guo flow with a short budget exits 1 with partial output")
{
    const auto csv = scratch("guo.csv");
    const auto r = run(cmd("flow", pants_args({"--kind", "guo", "--t-max", "100", "--out-csv", csv.string()})));
    CHECK(r.code == 1);
    CHECK(json::parse(r.out)["status"] == "TimeBudgetExhausted");
    std::ifstream in(csv);
    const auto table = hypflow::io::read_csv(in);
    REQUIRE(table.rows.size() > 2);
    for (std::size_t k = 1; k < table.rows.size(); ++k)
        for (int i = 4; i <= 6; ++i)
            CHECK(table.rows[k][i] < table.rows[k - 1][i]);
}

TEST_CASE("flow usage errors")
{
    CHECK(run(cmd("flow", pants_args({"--kind", "generalized-yamabe", "--s", "1", "--targets", "1,1,1"}))).code == 2);
    CHECK(run(cmd("flow", pants_args({"--kind", "fractional-calabi", "--p", "1", "--targets", "1,1,1"}))).code == 2);
    CHECK(run(cmd("flow", pants_args({"--kind", "fractional-calabi"}))).code == 2);
    CHECK(run(cmd("flow", pants_args({"--kind", "nope", "--targets", "1,1,1"}))).code == 2);
    CHECK(run(cmd("flow", pants_args({"--targets", "1,1"}))).code == 2);
    CHECK(run(cmd("flow", pants_args({"--targets", "1,1,1", "--w0", "-1,-1,-1"}))).code == 2);
    CHECK(run(cmd("flow", pants_args({"--kind", "generalized-yamabe", "--p", "2", "--targets", "1,1,1"}))).code == 2);
    CHECK(run({"flow", "--targets", "1,1,1"}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({}).code == 2);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("solve on the symmetric pants")
{
    const auto r = run(cmd("solve", pants_args({"--targets", "2,2,2"})));
    REQUIRE(r.code == 0);
    const auto doc = json::parse(r.out);
    const double expected = oracle::symmetric_pants_factor(oracle::pants_edge(), 2.0);
    for (const auto& w : doc["w_star"])
        CHECK(w.get<double>() == doctest::Approx(expected).epsilon(1e-10));
    CHECK(run(cmd("solve", pants_args({"--targets", "2,0,2"}))).code == 2);
    CHECK(run(cmd("solve", pants_args({}))).code == 2);
}

TEST_CASE("solve accepts targets from a JSON file and recovers a planted factor")
{
    const auto targets = scratch("targets.json");
    hypflow::io::write_file(targets, "[1.0, 1.5, 2.0]");
    CHECK(run(cmd("solve", pants_args({"--targets", targets.string()}))).code == 0);

    const auto mesh = scratch("gen.mesh.json"), metric = scratch("gen.metric.json");
    REQUIRE(run({"generate", "--seed", "9", "--out-mesh", mesh.string(), "--out-metric", metric.string()}).code == 0);
    CHECK(run({"validate", mesh.string()}).code == 0);
    const auto r =
        run({"solve", "--mesh", mesh.string(), "--metric", metric.string(), "--plant", "--seed", "4"});
    REQUIRE(r.code == 0);
    CHECK(json::parse(r.out)["recovery_error"].get<double>() < 1e-8);
}

TEST_CASE("compare runs every variant to the same solution")
{
    const auto report = scratch("compare.json");
    const auto r = run(cmd("compare", pants_args({"--targets", "1,1,1", "--w0", "3,3,3", "--s-values=-1,0,1",
                                                  "--p-values", "0,1,1.5", "--out-json", report.string()})));
    REQUIRE(r.code == 0);
    const auto doc = json::parse(hypflow::io::read_file(report));
    REQUIRE(doc["variants"].size() == 6);
    for (const auto& row : doc["variants"]) {
        CHECK(row["status"] == "Converged");
        CHECK(row["w_star_deviation"].get<double>() < 1e-6);
    }
    CHECK(r.out.rfind("kind,s,p,status", 0) == 0);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 7);
    CHECK(run(cmd("compare", pants_args({"--targets", "1,1,1"}))).code == 2);
}
