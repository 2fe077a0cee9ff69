#include "cli.hpp"

#include "c1mixed/analysis.hpp"
#include "c1mixed/assembly.hpp"
#include "c1mixed/error.hpp"
#include "c1mixed/interpolation.hpp"
#include "c1mixed/io.hpp"
#include "c1mixed/parallel.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <filesystem>
#include <memory>
#include <sstream>

#ifndef C1MIXED_DATA_DIR
#define C1MIXED_DATA_DIR "data"
#endif

namespace c1mixed {

namespace {

struct Options {
    std::string mesh;
    int p = 5;
    int levels = 4;
    std::string fn = "trig";
    std::string out;
    std::string norms = "linf,l2,h1,h2";
    std::string experiment = "interpolation";
    bool assert_rates = false;
    int threads = 0;
};

// Paths that do not exist are looked up among the bundled meshes.
std::string resolve_mesh(const std::string& path)
{
    namespace fs = std::filesystem;
    if (path.empty()) throw Error("--mesh is required");
    if (fs::exists(path)) return path;
    const fs::path bundled = fs::path(C1MIXED_DATA_DIR) / "meshes" / path;
    if (fs::path(path).filename() == path && fs::exists(bundled)) return bundled.string();
    throw Error("mesh file '" + path + "' not found");
}

void check_degree(int p)
{
    if (p < 5) throw Error("degree must be >= 5");
    if (p > 10) throw Error("degree must be <= 10");
}

std::array<bool, 4> parse_norms(const std::string& list)
{
    std::array<bool, 4> sel{};
    std::stringstream s(list);
    std::string item;
    while (std::getline(s, item, ',')) {
        bool found = false;
        for (int k = 0; k < 4; ++k)
            if (item == norm_names[k]) sel[k] = found = true;
        if (!found) throw Error("unknown norm '" + item + "' (expected linf, l2, h1, h2)");
    }
    return sel;
}

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

int cmd_dim(const Options& o, std::ostream& out)
{
    check_degree(o.p);
    const MixedMesh mesh = load_mesh(resolve_mesh(o.mesh));
    const auto d = dimension_breakdown(mesh, o.p);
    out << "degree            " << o.p << "\n";
    out << "vertex dofs       " << d.vertex << "  (6 x " << mesh.vertices().size() << ")\n";
    out << "edge dofs         " << d.edge << "  (" << 2 * o.p - 9 << " x " << mesh.edges().size() << ")\n";
    out << "quad interior     " << d.quad_interior << "  (" << (o.p - 3) * (o.p - 3) << " x " << mesh.quad_count()
        << ")\n";
    out << "triangle interior " << d.triangle_interior << "  (" << interior_dof_count(ElementKind::Triangle, o.p)
        << " x " << mesh.triangle_count() << ")\n";
    out << "total             " << d.total() << "\n";
    return 0;
}

int cmd_validate(const Options& o, std::ostream& out)
{
    const MixedMesh mesh = load_mesh(resolve_mesh(o.mesh));
    std::array<int, 3> cases{};
    for (int e = 0; e < static_cast<int>(mesh.edges().size()); ++e)
        if (!mesh.edges()[e].boundary()) ++cases[static_cast<int>(canonical_interface(mesh, e).kind)];
    out << "valid mesh\n";
    out << "vertices " << mesh.vertices().size() << ", edges " << mesh.edges().size() << ", triangles "
        << mesh.triangle_count() << ", quads " << mesh.quad_count() << "\n";
    out << "interfaces: quad-triangle " << cases[0] << ", triangle-triangle " << cases[1] << ", quad-quad "
        << cases[2] << "\n";
    out << "area " << fmt("%.12g", mesh.area()) << ", longest edge " << fmt("%.12g", longest_edge(mesh))
        << ", shape regularity " << fmt("%.6g", shape_regularity(mesh)) << " rad\n";
    out << "hash " << mesh_hash(mesh) << "\n";
    return 0;
}

int cmd_refine(const Options& o, std::ostream& out)
{
    MixedMesh mesh = load_mesh(resolve_mesh(o.mesh));
    for (int l = 0; l < o.levels; ++l) mesh = refine(mesh);
    const std::string json = mesh_to_json(mesh);
    if (o.out.empty())
        out << json;
    else
        write_file(o.out, json);
    return 0;
}

int cmd_solve(Experiment kind, const Options& o, std::ostream& out)
{
    check_degree(o.p);
    auto mesh = std::make_shared<const MixedMesh>(load_mesh(resolve_mesh(o.mesh)));
    const Oracle f = function_by_id(o.fn, o.p);
    auto space = std::make_shared<const SplineSpace>(mesh, o.p);
    SplineFunction fh;
    if (kind == Experiment::Interpolation) {
        fh = project(*space, f);
    } else {
        const Basis basis = build_basis(space);
        if (kind == Experiment::L2Fit) {
            fh = l2_fit(f, basis).function;
        } else {
            const auto r = solve_biharmonic([&](const Point& x) { return f.bilaplacian(x); }, f, basis);
            out << "free dofs " << r.free_dofs << " (" << r.released_hessians
                << " released boundary Hessians), energy identity residual " << fmt("%.3e", r.energy_residual)
                << "\n";
            fh = r.function;
        }
    }
    out << to_string(kind) << " p=" << o.p << " fn=" << o.fn << " ndof=" << space->dofs().size() << "\n";
    out << "err_linf " << fmt("%.6e", error_linf(fh, f, *mesh)) << "\n";
    for (int k = 0; k < 3; ++k)
        out << "err_" << norm_names[k + 1] << "   " << fmt("%.6e", error_sobolev(fh, f, *mesh, k)) << "\n";
    const auto m = check_membership(fh, *mesh, o.p);
    out << "membership: value " << fmt("%.2e", m.value) << ", gradient " << fmt("%.2e", m.gradient) << ", hessian "
        << fmt("%.2e", m.hessian) << ", normal fit " << fmt("%.2e", m.normal_fit) << "\n";
    if (!o.out.empty()) write_file(o.out, export_spline(fh, *mesh));
    return 0;
}

int cmd_study(const Options& o, std::ostream& out, std::ostream& err)
{
    check_degree(o.p);
    if (o.levels < 1 || o.levels > 6) throw Error("levels must be between 1 and 6");
    const MixedMesh mesh = load_mesh(resolve_mesh(o.mesh));
    StudyConfig config;
    config.experiment = experiment_from_string(o.experiment);
    config.degree = o.p;
    config.levels = o.levels;
    config.function = o.fn;
    config.norms = parse_norms(o.norms);
    const ErrorReport report = convergence_study(config, mesh);
    const std::string csv = to_csv(report);
    if (o.out.empty()) {
        out << csv;
    } else {
        write_file(o.out, csv);
        out << to_string(config.experiment) << " study, p=" << o.p << ", " << o.levels << " levels, fn=" << o.fn
            << (report.relative ? " (relative errors)" : "") << "\n";
        for (const auto& row : report.levels) {
            out << "  L" << row.level << "  h=" << fmt("%.4f", row.h) << "  ndof=" << row.ndof;
            for (int k = 0; k < 4; ++k) {
                if (!row.error[k]) continue;
                out << "  " << norm_names[k] << "=" << fmt("%.3e", *row.error[k]);
                if (row.exact[k])
                    out << " (exact)";
                else if (row.rate[k])
                    out << " (" << fmt("%.2f", *row.rate[k]) << ")";
            }
            out << "\n";
        }
        out << "wrote " << o.out << "\n";
    }
    if (o.assert_rates) {
        const auto failures = check_rates(report);
        for (const auto& f : failures) err << "rate check failed: " << f << "\n";
        if (!failures.empty()) return 2;
        out << "rate check passed\n";
    }
    return 0;
}

int cmd_export(const Options& o, std::ostream& out)
{
    check_degree(o.p);
    if (o.out.empty()) throw Error("--out is required");
    auto mesh = std::make_shared<const MixedMesh>(load_mesh(resolve_mesh(o.mesh)));
    const SplineSpace space(mesh, o.p);
    const SplineFunction fh = project(space, function_by_id(o.fn, o.p));
    write_file(o.out, export_spline(fh, *mesh));
    out << "exported interpolant of '" << o.fn << "' (" << mesh->elements().size() << " patches) to " << o.out
        << "\n";
    return 0;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"C1 super-smooth splines on mixed triangle/quadrilateral meshes"};
    app.require_subcommand(1);
    Options o;
    app.add_option("--threads", o.threads, "Worker threads (default: C1MIXED_THREADS or 1)");

    auto mesh_opt = [&](CLI::App* c) { c->add_option("--mesh", o.mesh, "Mesh JSON file")->required(); };
    auto degree_opt = [&](CLI::App* c) { c->add_option("--p", o.p, "Spline degree (5..10)"); };
    auto fn_opt = [&](CLI::App* c) { c->add_option("--fn", o.fn, "Test function: trig, linear, quadratic, poly"); };

    auto* dim = app.add_subcommand("dim", "Print the dimension breakdown");
    mesh_opt(dim);
    degree_opt(dim);
    auto* validate = app.add_subcommand("validate", "Validate a mesh and print diagnostics");
    mesh_opt(validate);
    auto* refine_cmd = app.add_subcommand("refine", "Refine a mesh uniformly");
    mesh_opt(refine_cmd);
    refine_cmd->add_option("--levels", o.levels, "Number of refinements")->default_val(1);
    refine_cmd->add_option("--out", o.out, "Output mesh file (default: stdout)");

    std::array<CLI::App*, 3> solvers{app.add_subcommand("interpolate", "Hermite interpolant of a test function"),
                                     app.add_subcommand("l2fit", "L2 least-squares fit of a test function"),
                                     app.add_subcommand("biharmonic", "Biharmonic Dirichlet solve")};
    for (auto* c : solvers) {
        mesh_opt(c);
        degree_opt(c);
        fn_opt(c);
        c->add_option("--out", o.out, "Write the resulting spline as JSON");
    }

    auto* study = app.add_subcommand("study", "Convergence study over uniform refinements");
    mesh_opt(study);
    degree_opt(study);
    fn_opt(study);
    study->add_option("--exp", o.experiment, "interpolation, l2fit or biharmonic");
    study->add_option("--levels", o.levels, "Number of levels (level 0 is the input mesh)");
    study->add_option("--out", o.out, "CSV output file (default: stdout)");
    study->add_option("--norms", o.norms, "Comma-separated subset of linf,l2,h1,h2");
    study->add_flag("--assert-rates", o.assert_rates, "Exit with code 2 when the final rates are off");

    auto* exp = app.add_subcommand("export", "Export the interpolant of a test function");
    mesh_opt(exp);
    degree_opt(exp);
    fn_opt(exp);
    exp->add_option("--out", o.out, "Output JSON file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (o.threads < 0) throw Error("--threads must be positive");
        if (o.threads > 0) set_thread_count(o.threads);
        if (dim->parsed()) return cmd_dim(o, out);
        if (validate->parsed()) return cmd_validate(o, out);
        if (refine_cmd->parsed()) return cmd_refine(o, out);
        if (solvers[0]->parsed()) return cmd_solve(Experiment::Interpolation, o, out);
        if (solvers[1]->parsed()) return cmd_solve(Experiment::L2Fit, o, out);
        if (solvers[2]->parsed()) return cmd_solve(Experiment::Biharmonic, o, out);
        if (study->parsed()) return cmd_study(o, out, err);
        if (exp->parsed()) return cmd_export(o, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

} // namespace c1mixed
