// Command-line driver: builds the model surfaces and fields by name, runs the
// analysis / flow / Reeb / obstruction pipelines, and writes deterministic
// JSON reports.  Exit code 0 when every requested check passes, 1 on check
// failures, 2 on unusable input.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "hamreeb/hamreeb.hpp"

using namespace hamreeb;

namespace {

struct CommonOptions {
    std::string surface = "disk";
    std::string field;      // defaults to the surface's model field
    std::string field_json;  // polynomial field definition file
    std::string form = "standard";
    double resolution = 0.05;
    double step = 1e-3;
    double tol = 1e-6;
    uint64_t seed = 0;
    std::string out = ".";
    std::string format = "json";
};

std::string default_field_for(const std::string& surface) {
    if (surface == "twowell" || surface == "twowell-domain") return "twowell";
    if (surface == "annulus") return "angular";
    if (surface == "torus") return "torus-height";
    if (surface == "sphere") return "height";
    return "r2";
}

struct Session {
    CommonOptions opt;
    std::shared_ptr<const SurfaceModel> surface;
    ScalarField field;
    AreaForm form;

    void build() {
        surface = builtins::surface(opt.surface);
        if (opt.field.empty()) opt.field = default_field_for(opt.surface);
        if (!opt.field_json.empty()) {
            std::ifstream is(opt.field_json);
            if (!is)
                throw std::invalid_argument("cannot open field file: " + opt.field_json);
            field = field_from_json(Json::parse(is), *surface);
            opt.field = "file:" + opt.field_json;
        } else {
            field = builtins::field(opt.field, *surface);
        }
        form = builtins::form(opt.form, *surface);
    }

    std::filesystem::path out_path(const std::string& name) const {
        std::filesystem::create_directories(opt.out);
        return std::filesystem::path(opt.out) / name;
    }

    Json base_report(const std::string& command) const {
        Json j;
        j["command"] = command;
        j["inputs"] = Json{{"surface", opt.surface}, {"field", opt.field},
                           {"form", opt.form},       {"resolution", opt.resolution},
                           {"step", opt.step},       {"tol", opt.tol},
                           {"seed", opt.seed}};
        return j;
    }

    int emit(Json& j, const std::vector<CheckResult>& checks, const std::string& file) {
        j["checks"] = checks_to_json(checks);
        j["passed"] = all_passed(checks);
        const std::string text = j.dump(2) + "\n";
        write_text_file(out_path(file).string(), text);
        std::cout << text;
        return all_passed(checks) ? 0 : 1;
    }
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("--surface", opt.surface,
                    "surface name: disk|annulus|torus|sphere|twowell");
    cmd->add_option("--field", opt.field,
                    "field name: r2|r4|twowell|angular|torus-height|height "
                    "(default: the surface's model field)");
    cmd->add_option("--field-json", opt.field_json,
                    "field definition file: {name} or {poly, codomain, period?}");
    cmd->add_option("--form", opt.form, "area form: standard|tilted|radial-bump");
    cmd->add_option("--resolution", opt.resolution, "target mesh edge length");
    cmd->add_option("--step", opt.step, "integrator step size");
    cmd->add_option("--tol", opt.tol, "verification tolerance");
    cmd->add_option("--seed", opt.seed, "RNG seed for sampling");
    cmd->add_option("--out", opt.out, "output directory (HAMREEB_OUT overrides default)");
    cmd->add_option("--format", opt.format, "output format: json|csv");
}

int run_analyze(Session& s) {
    s.build();
    const auto search = search_critical_points(s.field, *s.surface, 0.11, 1e-9);
    const auto report = check_axioms(s.field, *s.surface, search.points);
    Json j = s.base_report("analyze");
    Json crits = Json::array();
    for (const auto& cp : search.points)
        crits.push_back(Json{{"chart", cp.position.chart},
                             {"x", cp.position.p.x},
                             {"y", cp.position.p.y},
                             {"value", cp.value},
                             {"kind", to_string(cp.kind)},
                             {"hessian_eigs", cp.hessian_eigs}});
    j["critical_points"] = crits;
    j["diverged_seeds"] = search.diverged_seeds;
    j["axioms"] = Json{{"axiom_b_ok", report.axiom_b_ok},
                       {"axiom_l_ok", report.axiom_l_ok},
                       {"boundary_residuals", report.boundary_residuals},
                       {"in_class_F", report.in_class_F},
                       {"in_class_Morse", report.in_class_Morse}};
    j["homotopy_case"] =
        report.in_class_F
            ? to_string(homotopy_case(s.field, *s.surface, report, search.points))
            : "undefined (not in class F)";
    std::vector<CheckResult> checks;
    double bres = 0;
    for (double r : report.boundary_residuals) bres = std::max(bres, r);
    checks.push_back(CheckResult::of("boundary-constancy", bres, 1e-8,
                                     256 * (int)s.surface->boundary.size()));
    checks.push_back(CheckResult::flag("no-boundary-critical-points",
                                       search.boundary_violations.empty(),
                                       (int)search.points.size()));
    return s.emit(j, checks, "analyze.json");
}

int run_reeb(Session& s) {
    s.build();
    const auto crit = find_critical_points(s.field, *s.surface, 0.11, 1e-9);
    auto mesh = std::make_shared<TriMesh>(triangulate(s.surface, s.opt.resolution));
    sample_field(*mesh, s.field);
    const auto graph = build_reeb_graph(mesh, s.field, crit);
    Json j = s.base_report("reeb");
    j["graph"] = reeb_to_json(graph);
    j["first_betti_number"] = graph.first_betti_number();
    write_text_file(s.out_path("reeb.dot").string(), reeb_to_dot(graph));
    std::vector<CheckResult> checks = {
        CheckResult::flag("graph-connected", graph.connected(), (int)graph.nodes.size())};
    return s.emit(j, checks, "reeb.json");
}

int run_flow(Session& s, double x, double y, int chart, double time) {
    s.build();
    const auto H = hamiltonian_field(s.field, s.form);
    FlowIntegrator integ;
    integ.step_size = s.opt.step;
    const auto traj = flow_trajectory(*s.surface, H, {chart, {x, y}}, time, integ);
    std::ostringstream csv;
    write_trajectory_csv(traj, csv);
    write_text_file(s.out_path("flow.csv").string(), csv.str());
    double drift = 0;
    for (const auto& sample : traj)
        drift = std::max(drift, s.field.value_distance(sample.f_value, traj.front().f_value));
    Json j = s.base_report("flow");
    j["start"] = Json{{"chart", chart}, {"x", x}, {"y", y}};
    j["time"] = time;
    j["samples"] = traj.size();
    j["artifacts"] = Json::array({"flow.csv"});  // relative to --out
    std::vector<CheckResult> checks = {
        CheckResult::of("f-invariance-along-trajectory", drift, integ.reprojection_tolerance,
                        (int)traj.size())};
    if (s.opt.format == "csv") std::cout << csv.str();
    return s.emit(j, checks, "flow.json");
}

int run_shift(Session& s, const std::string& gf_file, double alpha_const) {
    s.build();
    const auto crit = find_critical_points(s.field, *s.surface, 0.11, 1e-9);
    auto mesh = std::make_shared<TriMesh>(triangulate(s.surface, s.opt.resolution));
    sample_field(*mesh, s.field);
    const auto graph = std::make_shared<const ReebGraph>(build_reeb_graph(mesh, s.field, crit));
    GraphFunction gf;
    if (!gf_file.empty()) {
        std::ifstream is(gf_file);
        if (!is) throw std::invalid_argument("cannot open graph function file: " + gf_file);
        Json parsed = Json::parse(is);
        gf = graph_function_from_json(parsed);
    } else {
        gf = constant_graph_function(*graph, alpha_const);
    }
    const auto r = symplectomorphism_from_graph_function(graph, gf, s.field, s.form, 200, 1e-6,
                                                         1e-5, s.opt.seed + 303, false);
    Json j = s.base_report("shift");
    j["graph_function"] = graph_function_to_json(gf);
    j["collar_width"] = r.lift.collar_width;
    std::vector<CheckResult> checks = {
        CheckResult::of("f-invariance", r.report.max_f_drift, 1e-6, r.report.samples),
        CheckResult::of("density-ratio-unit", r.report.max_ratio_deviation, 1e-5,
                        r.report.samples)};
    return s.emit(j, checks, "shift.json");
}

int run_theta(Session& s) {
    s.build();
    const auto crit = find_critical_points(s.field, *s.surface, 0.11, 1e-9);
    const auto report = check_axioms(s.field, *s.surface, crit);
    const auto hcase = homotopy_case(s.field, *s.surface, report, crit);
    if (!is_circle_case(hcase))
        throw std::invalid_argument("theta requires one of the circle cases (A)-(D)");
    auto mesh = std::make_shared<TriMesh>(triangulate(s.surface, s.opt.resolution));
    sample_field(*mesh, s.field);
    const auto graph = std::make_shared<const ReebGraph>(build_reeb_graph(mesh, s.field, crit));
    const auto H = hamiltonian_field(s.field, s.form);
    FlowIntegrator integ;
    integ.step_size = s.opt.step;
    const auto th = theta_function(graph, H, integ, s.opt.tol, 200, s.opt.seed + 404);

    const auto alpha = make_constant_field(kPi / 3, (int)s.surface->charts.size());
    ShiftMap plain{s.surface, alpha, H, integ};
    ShiftMap shifted{s.surface, field_sum(alpha, th.theta.field), H, integ};
    Rng rng(s.opt.seed + 405);
    double cover = 0;
    for (const auto& z : random_surface_points(*s.surface, 100, rng, 0.05))
        cover = std::max(cover,
                         s.surface->distance(shift_apply(plain, z), shift_apply(shifted, z)));

    Json j = s.base_report("theta");
    j["homotopy_case"] = to_string(hcase);
    j["theta"] = graph_function_to_json(th.theta_hat);
    j["k_per_edge"] = th.k_per_edge;
    std::vector<CheckResult> checks = {
        CheckResult::of("phi-theta-identity", th.max_identity_residual, s.opt.tol, 200),
        CheckResult::of("theta-covering-translation", cover, s.opt.tol, 100),
        CheckResult::of("period-constancy-per-edge", th.max_period_jitter, 1e-6, 9)};
    return s.emit(j, checks, "theta.json");
}

int run_volumes(Session& s, double level, const std::string& involution_name) {
    s.build();
    const auto crit = find_critical_points(s.field, *s.surface, 0.11, 1e-9);
    auto mesh = std::make_shared<TriMesh>(triangulate(s.surface, s.opt.resolution));
    sample_field(*mesh, s.field);
    const auto comps = sublevel_components(s.field, *mesh, s.form, level, crit);
    Json j = s.base_report("volumes");
    j["level"] = level;
    Json comp_json = Json::array();
    for (const auto& c : comps.components)
        comp_json.push_back(Json{{"id", c.id},
                                 {"seed", Json::array({c.seed.p.x, c.seed.p.y})},
                                 {"omega_volume", c.omega_volume},
                                 {"contains_critical", c.contains_critical}});
    j["components"] = comp_json;
    std::vector<CheckResult> checks;
    if (!involution_name.empty()) {
        const auto inv = builtins::involution(involution_name);
        const auto rep = j0_obstruction(s.field, *mesh, s.form, level, inv, crit, s.opt.seed + 71);
        j["obstruction"] = obstruction_to_json(rep);
        checks.push_back(
            CheckResult::flag("involution-preserves-f", rep.involution_preserves_f, 200));
    }
    checks.push_back(CheckResult::flag("components-found", !comps.components.empty(),
                                       (int)comps.components.size()));
    return s.emit(j, checks, "volumes.json");
}

int run_counterexample(Session& s) {
    s.opt.surface = "disk";
    s.opt.field = "r2,r4";
    auto result = run_counterexample_disk(s.opt.resolution, s.opt.step);
    result.artifacts.push_back("counterexample.json");  // relative to --out
    Json j = s.base_report("counterexample");
    j["scenario"] = scenario_to_json(result);
    std::vector<CheckResult> checks;
    for (const auto& c : result.checks) {
        CheckResult cr;
        cr.name = c.description;
        cr.samples = 1;
        cr.max_residual = c.expected == 0.0 ? c.value : std::abs(c.value - c.expected);
        cr.tolerance = c.tolerance;
        cr.passed = c.passed;
        checks.push_back(cr);
    }
    return s.emit(j, checks, "counterexample.json");
}

int run_verify_all(Session& s) {
    s.opt.surface = "all";
    s.opt.field = "all";
    const auto checks = verify::run_all(s.opt.seed);
    Json j = s.base_report("verify-all");
    return s.emit(j, checks, "verify-all.json");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hamreeb: Hamiltonian flows, shift maps and Kronrod-Reeb graphs on surfaces"};
    app.require_subcommand(1);

    Session s;
    if (const char* env_out = std::getenv("HAMREEB_OUT")) s.opt.out = env_out;

    auto* analyze = app.add_subcommand("analyze", "critical points, axioms, homotopy case");
    add_common(analyze, s.opt);

    auto* reeb = app.add_subcommand("reeb", "Kronrod-Reeb graph extraction (JSON + DOT)");
    add_common(reeb, s.opt);

    auto* flow = app.add_subcommand("flow", "Hamiltonian trajectory dump (CSV)");
    add_common(flow, s.opt);
    double fx = 0.5, fy = 0.0, ftime = 1.0;
    int fchart = 0;
    flow->add_option("--x", fx, "start x");
    flow->add_option("--y", fy, "start y");
    flow->add_option("--chart", fchart, "start chart");
    flow->add_option("--time", ftime, "integration time");

    auto* shift = app.add_subcommand("shift", "shift map of a Reeb-graph function, verified");
    add_common(shift, s.opt);
    std::string gf_file;
    double alpha_const = 1.0;
    shift->add_option("--graph-function", gf_file, "graph function JSON file");
    shift->add_option("--alpha-const", alpha_const, "constant graph function value");

    auto* theta = app.add_subcommand("theta", "theta function and deck identities");
    add_common(theta, s.opt);

    auto* volumes = app.add_subcommand("volumes", "sublevel components and volume obstruction");
    add_common(volumes, s.opt);
    double level = 0.5;
    std::string involution;
    volumes->add_option("--level", level, "sublevel value");
    volumes->add_option("--involution", involution, "involution name: negate|identity");

    auto* counter = app.add_subcommand("counterexample", "the |z|^2 vs |z|^4 disk scenario");
    add_common(counter, s.opt);

    auto* verify_all = app.add_subcommand("verify-all", "full invariant suite");
    add_common(verify_all, s.opt);

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(analyze)) return run_analyze(s);
        if (app.got_subcommand(reeb)) return run_reeb(s);
        if (app.got_subcommand(flow)) return run_flow(s, fx, fy, fchart, ftime);
        if (app.got_subcommand(shift)) return run_shift(s, gf_file, alpha_const);
        if (app.got_subcommand(theta)) return run_theta(s);
        if (app.got_subcommand(volumes)) return run_volumes(s, level, involution);
        if (app.got_subcommand(counter)) return run_counterexample(s);
        if (app.got_subcommand(verify_all)) return run_verify_all(s);
    } catch (const Json::parse_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
