#include "cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <json.hpp>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include "hypflow/conformal_metric.hpp"
#include "hypflow/errors.hpp"
#include "hypflow/flows.hpp"
#include "hypflow/io.hpp"
#include "hypflow/newton.hpp"
#include "hypflow/random_instance.hpp"

#ifndef HYPFLOW_VERSION
#define HYPFLOW_VERSION "0.1.0"
#endif

namespace hypflow::cli {

using nlohmann::json;

std::string version()
{
    return HYPFLOW_VERSION;
}

namespace {

// Bad input detected after flag parsing; maps to exit_usage.
class UsageError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

json to_json(const VectorXd& v)
{
    return std::vector<double>(v.data(), v.data() + v.size());
}

// JSON has no infinities or NaN; emit null instead.
json finite_or_null(double x)
{
    return std::isfinite(x) ? json(x) : json(nullptr);
}

struct Problem
{
    IdealTriangulation mesh;
    BaseMetric l0;
};

Problem load_problem(const std::string& mesh_path, const std::string& metric_path)
{
    try {
        IdealTriangulation mesh = io::parse_mesh(io::read_file(mesh_path));
        VectorXd l0 = io::parse_vector_json(io::read_file(metric_path));
        if (l0.size() != mesh.n_edges())
            throw UsageError("metric has " + std::to_string(l0.size()) + " lengths, mesh has " +
                             std::to_string(mesh.n_edges()) + " edges");
        if (!l0.allFinite() || (l0.array() <= 0.0).any())
            throw UsageError("metric lengths must be positive and finite");
        return {std::move(mesh), std::move(l0)};
    } catch (const ParseError& e) {
        throw UsageError(e.what());
    } catch (const MalformedMesh& e) {
        throw UsageError(std::string("malformed mesh: ") + e.what());
    }
}

// A JSON file if the argument names one, otherwise an inline list.
VectorXd parse_vector_arg(const std::string& text, const char* what)
{
    try {
        if (std::filesystem::is_regular_file(text))
            return io::parse_vector_json(io::read_file(text));
        return io::parse_inline_list(text);
    } catch (const ParseError& e) {
        throw UsageError(std::string(what) + ": " + e.what());
    }
}

VectorXd load_targets(const std::string& text, int n)
{
    VectorXd b = parse_vector_arg(text, "--targets");
    if (b.size() != n)
        throw UsageError("--targets has " + std::to_string(b.size()) + " entries, mesh has " + std::to_string(n) +
                         " boundaries");
    if (!b.allFinite() || (b.array() <= 0.0).any())
        throw UsageError("--targets must be positive and finite");
    return b;
}

VectorXd load_w0(const std::string& text, const Problem& pb)
{
    const int n = pb.mesh.n_boundaries();
    if (text.empty())
        return VectorXd::Zero(n);
    VectorXd w = parse_vector_arg(text, "--w0");
    if (w.size() != n)
        throw UsageError("--w0 has " + std::to_string(w.size()) + " entries, mesh has " + std::to_string(n) +
                         " boundaries");
    if (!w.allFinite())
        throw UsageError("--w0 must be finite");
    const VectorXd margin = admissibility_margin(pb.mesh, pb.l0, w);
    Eigen::Index e = 0;
    if (!(margin.minCoeff(&e) > 0.0))
        throw UsageError("--w0 is inadmissible on edge " + std::to_string(e));
    return w;
}

void emit_json(const json& report, const std::string& path, std::ostream& out)
{
    if (path.empty())
        out << report.dump(2) << '\n';
    else
        io::write_file(path, report.dump(2) + "\n");
}

double seconds_since(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

json decay_json(const Trajectory& traj)
{
    try {
        const DecayFit fit = decay_rate(traj);
        return {{"rate", fit.rate}, {"r_squared", fit.r_squared}, {"samples", fit.samples_used}};
    } catch (const InsufficientData&) {
        return nullptr;
    }
}

json flow_params(const FlowSpec& spec)
{
    json params = {{"step", spec.step},   {"tol", spec.tol}, {"t_max", spec.t_max},
                   {"safety", spec.safety}, {"fast_mode_cap", spec.fast_mode_cap},
                   {"slow_mode_cap", spec.slow_mode_cap}, {"evaluate_energy", spec.evaluate_energy}};
    if (spec.kind == FlowKind::FractionalCalabi)
        params["s"] = spec.s;
    if (spec.kind == FlowKind::GeneralizedYamabe)
        params["p"] = spec.p;
    if (spec.kind != FlowKind::Guo)
        params["targets"] = to_json(spec.targets);
    return params;
}

// ---------------------------------------------------------------- validate

struct ValidateArgs
{
    std::string mesh;
};

int cmd_validate(const ValidateArgs& a, std::ostream& out)
{
    io::MeshDescription desc;
    try {
        desc = io::parse_mesh_description(io::read_file(a.mesh));
    } catch (const ParseError& e) {
        throw UsageError(e.what());
    }
    const auto n_edges = static_cast<long>(desc.edges.size());
    const auto n_faces = static_cast<long>(desc.faces.size());
    out << "edges      " << n_edges << '\n'
        << "faces      " << n_faces << '\n'
        << "boundaries " << desc.n_boundaries << '\n'
        << "euler_char " << n_faces - n_edges << '\n';
    bool ok = true;
    for (const auto& check : check_invariants(desc.n_boundaries, desc.edges, desc.faces)) {
        out << (check.passed ? "PASS " : "FAIL ") << check.name;
        if (!check.passed)
            out << ": " << check.detail;
        out << '\n';
        ok = ok && check.passed;
    }
    return ok ? exit_ok : exit_numeric;
}

// -------------------------------------------------------------------- flow

struct FlowArgs
{
    std::string mesh, metric, targets, w0, kind = "fractional-calabi", out_csv, out_json;
    double s = 1.0, p = 0.0;
    double step = 0.1, tol = 1e-8, t_max = 1e4, safety = 1e-6;
    double fast_cap = 2.0, slow_cap = 0.5;
    bool no_energy = false;
    std::uint64_t seed = 0;
    bool s_given = false, p_given = false;
};

FlowSpec build_spec(const FlowArgs& a, const Problem& pb)
{
    FlowKind kind{};
    try {
        kind = parse_flow_kind(a.kind);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    if (a.s_given && kind != FlowKind::FractionalCalabi)
        throw UsageError("--s applies only to --kind fractional-calabi");
    if (a.p_given && kind != FlowKind::GeneralizedYamabe)
        throw UsageError("--p applies only to --kind generalized-yamabe");

    FlowSpec spec;
    if (kind == FlowKind::Guo) {
        if (!a.targets.empty())
            throw UsageError("--targets is not used by the guo flow");
        spec = FlowSpec::guo();
    } else {
        if (a.targets.empty())
            throw UsageError("--targets is required for --kind " + a.kind);
        VectorXd b = load_targets(a.targets, pb.mesh.n_boundaries());
        spec = kind == FlowKind::FractionalCalabi ? FlowSpec::fractional_calabi(a.s, std::move(b))
                                                  : FlowSpec::generalized_yamabe(a.p, std::move(b));
    }
    spec.step = a.step;
    spec.tol = a.tol;
    spec.t_max = a.t_max;
    spec.safety = a.safety;
    spec.fast_mode_cap = a.fast_cap;
    spec.slow_mode_cap = a.slow_cap;
    spec.evaluate_energy = !a.no_energy;
    try {
        spec.validate(pb.mesh.n_boundaries());
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return spec;
}

int cmd_flow(const FlowArgs& a, std::ostream& out)
{
    const Problem pb = load_problem(a.mesh, a.metric);
    FlowSpec spec = build_spec(a, pb);
    const VectorXd w0 = load_w0(a.w0, pb);
    // Lyapunov values are reported relative to the Newton solution when one
    // exists; otherwise integrate falls back to the final sample.
    if (spec.kind != FlowKind::Guo) {
        try {
            spec.w_star = solve_prescribed(pb.mesh, pb.l0, spec.targets).w_star;
        } catch (const Error&) {
        }
    }

    const auto start = std::chrono::steady_clock::now();
    const Trajectory traj = integrate(pb.mesh, pb.l0, w0, spec);
    const double wall = seconds_since(start);

    if (!a.out_csv.empty()) {
        std::ofstream csv(a.out_csv);
        if (!csv)
            throw UsageError("cannot write '" + a.out_csv + "'");
        io::write_trajectory_csv(csv, traj);
    }
    const FlowSample& last = traj.final();
    json report = {{"command", "flow"},
                   {"version", version()},
                   {"seed", a.seed},
                   {"kind", to_string(spec.kind)},
                   {"params", flow_params(spec)},
                   {"w0", to_json(w0)},
                   {"status", to_string(traj.status)},
                   {"message", traj.message},
                   {"residual", last.residual},
                   {"t_final", last.t},
                   {"w_final", to_json(last.w)},
                   {"B_final", to_json(last.B)},
                   {"energy_final", finite_or_null(traj.reported_energy(last))},
                   {"accepted_steps", traj.accepted_steps},
                   {"rejected_steps", traj.rejected_steps},
                   {"samples", traj.samples.size()},
                   {"decay", decay_json(traj)},
                   {"wall_time_s", wall}};
    emit_json(report, a.out_json, out);
    return traj.status == FlowStatus::Converged ? exit_ok : exit_numeric;
}

// ------------------------------------------------------------------- solve

struct SolveArgs
{
    std::string mesh, metric, targets, w0, out_json;
    double tol = 1e-12;
    int max_iterations = 200;
    bool plant = false;
    std::uint64_t seed = 0;
};

int cmd_solve(const SolveArgs& a, std::ostream& out)
{
    const Problem pb = load_problem(a.mesh, a.metric);
    if (a.plant == !a.targets.empty())
        throw UsageError("give exactly one of --targets and --plant");
    std::optional<VectorXd> planted;
    VectorXd b;
    if (a.plant) {
        Rng rng(a.seed);
        planted = random_admissible_factor(pb.mesh, pb.l0, rng);
        b = boundary_lengths(pb.mesh, pb.l0, *planted);
    } else {
        b = load_targets(a.targets, pb.mesh.n_boundaries());
    }
    const VectorXd w0 = load_w0(a.w0, pb);
    if (!(a.tol > 0.0) || a.max_iterations < 1)
        throw UsageError("--tol must be positive and --max-iterations at least 1");

    SolveOptions opts;
    opts.tol = a.tol;
    opts.max_iterations = a.max_iterations;
    json report = {{"command", "solve"},
                   {"version", version()},
                   {"seed", a.seed},
                   {"kind", "newton"},
                   {"params", {{"tol", opts.tol}, {"max_iterations", opts.max_iterations}, {"safety", opts.safety},
                               {"armijo", opts.armijo}, {"targets", to_json(b)}}},
                   {"w0", to_json(w0)}};
    const auto start = std::chrono::steady_clock::now();
    int code = exit_ok;
    try {
        const SolveReport rep = solve_prescribed(pb.mesh, pb.l0, b, w0, opts);
        report["status"] = rep.converged ? "Converged" : "NotConverged";
        report["residual"] = rep.final_residual;
        report["iterations"] = rep.iterations;
        report["residual_history"] = rep.residual_history;
        report["w_star"] = to_json(rep.w_star);
        report["B_final"] = to_json(boundary_lengths(pb.mesh, pb.l0, rep.w_star));
        if (planted) {
            report["w_planted"] = to_json(*planted);
            report["recovery_error"] = (rep.w_star - *planted).lpNorm<Eigen::Infinity>();
        }
        code = rep.converged ? exit_ok : exit_numeric;
    } catch (const Error& e) {
        report["status"] = "Failed";
        report["message"] = e.what();
        code = exit_numeric;
    }
    report["wall_time_s"] = seconds_since(start);
    emit_json(report, a.out_json, out);
    return code;
}

// ----------------------------------------------------------------- compare

struct CompareArgs
{
    std::string mesh, metric, targets, w0, out_csv, out_json;
    std::vector<double> s_values, p_values;
    double step = 0.1, tol = 1e-8, t_max = 1e4;
    std::uint64_t seed = 0;
};

struct CompareRow
{
    FlowSpec spec;
    std::string status;
    double t_final = 0.0;
    long accepted = 0, rejected = 0;
    double initial_speed = 0.0;
    std::optional<DecayFit> fit;
    double residual = 0.0;
    double deviation = 0.0;  // ||w_final - w*||_inf
};

CompareRow run_variant(const Problem& pb, const VectorXd& w0, const VectorXd& w_star, FlowSpec spec)
{
    CompareRow row;
    row.initial_speed = vector_field(pb.mesh, pb.l0, w0, spec).lpNorm<Eigen::Infinity>();
    spec.w_star = w_star;
    const Trajectory traj = integrate(pb.mesh, pb.l0, w0, spec);
    row.spec = spec;
    row.status = to_string(traj.status);
    row.t_final = traj.final().t;
    row.accepted = traj.accepted_steps;
    row.rejected = traj.rejected_steps;
    try {
        row.fit = decay_rate(traj);
    } catch (const InsufficientData&) {
    }
    row.residual = traj.final().residual;
    row.deviation = (traj.final().w - w_star).lpNorm<Eigen::Infinity>();
    return row;
}

constexpr double compare_agreement = 1e-6;

int cmd_compare(const CompareArgs& a, std::ostream& out)
{
    if (a.s_values.empty() && a.p_values.empty())
        throw UsageError("give at least one of --s-values and --p-values");
    const Problem pb = load_problem(a.mesh, a.metric);
    const VectorXd b = load_targets(a.targets, pb.mesh.n_boundaries());
    const VectorXd w0 = load_w0(a.w0, pb);

    std::vector<FlowSpec> specs;
    for (double s : a.s_values)
        specs.push_back(FlowSpec::fractional_calabi(s, b));
    for (double p : a.p_values)
        specs.push_back(FlowSpec::generalized_yamabe(p, b));
    for (auto& spec : specs) {
        spec.step = a.step;
        spec.tol = a.tol;
        spec.t_max = a.t_max;
        try {
            spec.validate(pb.mesh.n_boundaries());
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }

    const auto start = std::chrono::steady_clock::now();
    const VectorXd w_star = solve_prescribed(pb.mesh, pb.l0, b).w_star;
    std::vector<std::future<CompareRow>> jobs;
    for (const auto& spec : specs)
        jobs.push_back(std::async(std::launch::async, run_variant, std::cref(pb), std::cref(w0), std::cref(w_star),
                                  spec));
    std::vector<CompareRow> rows;
    for (auto& job : jobs)
        rows.push_back(job.get());

    bool ok = true;
    std::ostringstream csv;
    csv << std::setprecision(std::numeric_limits<double>::max_digits10);
    csv << "kind,s,p,status,t_final,accepted_steps,rejected_steps,initial_speed,decay_rate,r_squared,residual,"
           "w_star_deviation\n";
    json table = json::array();
    for (const auto& r : rows) {
        const bool row_ok = r.status == to_string(FlowStatus::Converged) && r.deviation < compare_agreement;
        ok = ok && row_ok;
        const bool calabi = r.spec.kind == FlowKind::FractionalCalabi;
        const double nan = std::numeric_limits<double>::quiet_NaN();
        csv << to_string(r.spec.kind) << ',' << (calabi ? r.spec.s : nan) << ',' << (calabi ? nan : r.spec.p) << ','
            << (row_ok ? r.status : r.status + "!") << ',' << r.t_final << ',' << r.accepted << ',' << r.rejected
            << ',' << r.initial_speed << ',' << (r.fit ? r.fit->rate : nan) << ','
            << (r.fit ? r.fit->r_squared : nan) << ',' << r.residual << ',' << r.deviation << '\n';
        json row = {{"kind", to_string(r.spec.kind)},
                    {"params", flow_params(r.spec)},
                    {"status", r.status},
                    {"ok", row_ok},
                    {"t_final", r.t_final},
                    {"accepted_steps", r.accepted},
                    {"rejected_steps", r.rejected},
                    {"initial_speed", r.initial_speed},
                    {"decay", r.fit ? json{{"rate", r.fit->rate},
                                           {"r_squared", r.fit->r_squared},
                                           {"samples", r.fit->samples_used}}
                                    : json(nullptr)},
                    {"residual", r.residual},
                    {"w_star_deviation", r.deviation}};
        table.push_back(row);
    }
    if (a.out_csv.empty())
        out << csv.str();
    else
        io::write_file(a.out_csv, csv.str());
    if (!a.out_json.empty()) {
        json report = {{"command", "compare"},
                       {"version", version()},
                       {"seed", a.seed},
                       {"w0", to_json(w0)},
                       {"targets", to_json(b)},
                       {"w_star", to_json(w_star)},
                       {"status", ok ? "Converged" : "Failed"},
                       {"residual", (boundary_lengths(pb.mesh, pb.l0, w_star) - b).lpNorm<Eigen::Infinity>()},
                       {"variants", table},
                       {"wall_time_s", seconds_since(start)}};
        io::write_file(a.out_json, report.dump(2) + "\n");
    }
    return ok ? exit_ok : exit_numeric;
}

// ---------------------------------------------------------------- generate

struct GenerateArgs
{
    std::string out_mesh, out_metric, out_w0;
    std::uint64_t seed = 0;
    int max_face_pairs = 4, max_boundaries = 10;
};

int cmd_generate(const GenerateArgs& a, std::ostream& out)
{
    if (a.max_face_pairs < 1 || a.max_boundaries < 1)
        throw UsageError("--max-face-pairs and --max-boundaries must be at least 1");
    Rng rng(a.seed);
    const Instance inst = random_instance(rng, a.max_face_pairs, a.max_boundaries);
    io::write_file(a.out_mesh, io::serialize_mesh(inst.mesh));
    io::write_file(a.out_metric, io::serialize_vector_json(inst.l0));
    json report = {{"command", "generate"},
                   {"version", version()},
                   {"seed", a.seed},
                   {"n_boundaries", inst.mesh.n_boundaries()},
                   {"edges", inst.mesh.n_edges()},
                   {"faces", inst.mesh.n_faces()}};
    if (!a.out_w0.empty()) {
        const VectorXd w0 = random_admissible_factor(inst.mesh, inst.l0, rng);
        io::write_file(a.out_w0, io::serialize_vector_json(w0));
        report["w0"] = to_json(w0);
    }
    out << report.dump(2) << '\n';
    return exit_ok;
}

void add_instance_options(CLI::App* cmd, std::string& mesh, std::string& metric)
{
    cmd->add_option("--mesh", mesh, "mesh JSON file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--metric", metric, "per-edge length JSON file")->required()->check(CLI::ExistingFile);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"hyperbolic metrics with prescribed boundary lengths"};
    app.name(args.empty() ? "hypflow" : args.front());
    app.set_version_flag("--version", version());
    app.require_subcommand(1);

    ValidateArgs va;
    auto* validate = app.add_subcommand("validate", "check mesh invariants");
    validate->add_option("mesh,--mesh", va.mesh, "mesh JSON file")->required();

    FlowArgs fa;
    auto* flow = app.add_subcommand("flow", "integrate a flow and write its trajectory");
    add_instance_options(flow, fa.mesh, fa.metric);
    flow->add_option("--targets", fa.targets, "prescribed lengths: inline list or JSON file");
    flow->add_option("--kind", fa.kind, "guo | fractional-calabi | generalized-yamabe")->capture_default_str();
    auto* s_opt = flow->add_option("--s", fa.s, "fractional exponent");
    auto* p_opt = flow->add_option("--p", fa.p, "Yamabe weight exponent in [0, 2)");
    flow->add_option("--w0", fa.w0, "initial factor: inline list or JSON file (default 0)");
    flow->add_option("--step", fa.step, "initial and maximum step")->capture_default_str();
    flow->add_option("--tol", fa.tol, "stopping tolerance on the residual")->capture_default_str();
    flow->add_option("--t-max", fa.t_max, "time budget")->capture_default_str();
    flow->add_option("--safety", fa.safety, "admissibility margin floor")->capture_default_str();
    flow->add_option("--fast-mode-cap", fa.fast_cap, "bound on h times the fastest linear rate (0: off)")
        ->capture_default_str();
    flow->add_option("--slow-mode-cap", fa.slow_cap, "bound on h times the slowest linear rate (0: off)")
        ->capture_default_str();
    flow->add_flag("--no-energy", fa.no_energy, "reject steps on sum (B - b)^2 instead of the Lyapunov value");
    flow->add_option("--out-csv", fa.out_csv, "trajectory CSV");
    flow->add_option("--out-json", fa.out_json, "report JSON (default stdout)");
    flow->add_option("--seed", fa.seed, "recorded in the report");

    SolveArgs sa;
    auto* solve = app.add_subcommand("solve", "Newton solve for the prescribed lengths");
    add_instance_options(solve, sa.mesh, sa.metric);
    solve->add_option("--targets", sa.targets, "prescribed lengths: inline list or JSON file");
    solve->add_flag("--plant", sa.plant, "targets := B(w) for a random admissible w drawn from --seed");
    solve->add_option("--w0", sa.w0, "starting factor (default 0)");
    solve->add_option("--tol", sa.tol, "residual tolerance")->capture_default_str();
    solve->add_option("--max-iterations", sa.max_iterations)->capture_default_str();
    solve->add_option("--out-json", sa.out_json, "report JSON (default stdout)");
    solve->add_option("--seed", sa.seed, "seed for --plant")->capture_default_str();

    CompareArgs ca;
    auto* compare = app.add_subcommand("compare", "decay rates of several flow variants from one start");
    add_instance_options(compare, ca.mesh, ca.metric);
    compare->add_option("--targets", ca.targets, "prescribed lengths")->required();
    compare->add_option("--s-values", ca.s_values, "fractional-calabi exponents")->delimiter(',');
    compare->add_option("--p-values", ca.p_values, "generalized-yamabe exponents")->delimiter(',');
    compare->add_option("--w0", ca.w0, "shared initial factor (default 0)");
    compare->add_option("--step", ca.step)->capture_default_str();
    compare->add_option("--tol", ca.tol)->capture_default_str();
    compare->add_option("--t-max", ca.t_max)->capture_default_str();
    compare->add_option("--out-csv", ca.out_csv, "table CSV (default stdout)");
    compare->add_option("--out-json", ca.out_json, "report JSON");
    compare->add_option("--seed", ca.seed, "recorded in the report");

    GenerateArgs ga;
    auto* generate = app.add_subcommand("generate", "write a random instance");
    generate->add_option("--seed", ga.seed)->capture_default_str();
    generate->add_option("--out-mesh", ga.out_mesh)->required();
    generate->add_option("--out-metric", ga.out_metric)->required();
    generate->add_option("--out-w0", ga.out_w0, "also draw an admissible factor");
    generate->add_option("--max-face-pairs", ga.max_face_pairs)->capture_default_str();
    generate->add_option("--max-boundaries", ga.max_boundaries)->capture_default_str();

    std::vector<const char*> argv;
    argv.push_back(args.empty() ? "hypflow" : args.front().c_str());
    for (std::size_t k = 1; k < args.size(); ++k)
        argv.push_back(args[k].c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }
    fa.s_given = s_opt->count() > 0;
    fa.p_given = p_opt->count() > 0;

    try {
        if (*validate)
            return cmd_validate(va, out);
        if (*flow)
            return cmd_flow(fa, out);
        if (*solve)
            return cmd_solve(sa, out);
        if (*compare)
            return cmd_compare(ca, out);
        if (*generate)
            return cmd_generate(ga, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_numeric;
    }
    return exit_usage;
}

}  // namespace hypflow::cli
