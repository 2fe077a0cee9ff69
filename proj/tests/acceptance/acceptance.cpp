// Acceptance run: one PASS/FAIL line per criterion.

#include "oracles.hpp"

#include "../../tools/cli.hpp"

#include "c1mixed/analysis.hpp"
#include "c1mixed/assembly.hpp"
#include "c1mixed/interpolation.hpp"

#include <Eigen/SparseCholesky>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace c1mixed;
using c1mixed::testing::bundled_mesh;
using c1mixed::testing::desk_meshes;
using c1mixed::testing::uniform;

namespace {

constexpr std::array<InterfaceCase, 3> all_cases{InterfaceCase::QuadTriangle, InterfaceCase::TriangleTriangle,
                                                 InterfaceCase::QuadQuad};

struct Outcome {
    bool pass = true;
    std::string detail;

    void fail(const std::string& why)
    {
        if (pass) detail = why;
        pass = false;
    }
};

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::shared_ptr<const SplineSpace> make_space(std::shared_ptr<const MixedMesh> mesh, int p)
{
    return std::make_shared<const SplineSpace>(std::move(mesh), p);
}

Point perp_of(const Point& a) { return Point(a.y(), -a.x()); }

// Derivative of a canonical map across the edge at edge parameter v, from unit differences.
Point across(const GeometryMap<double>& m, double v)
{
    return m.kind() == ElementKind::Triangle ? Point(m(1.0, 0.0) - m(0.0, 0.0)) : Point(m(1.0, v) - m(0.0, v));
}

double det_at_edge(const GeometryMap<double>& m, double v)
{
    const Point du = across(m, v);
    const Point dv = m(0.0, 1.0) - m(0.0, 0.0);
    return du.x() * dv.y() - du.y() * dv.x();
}

Outcome criterion_dimension()
{
    Outcome o;
    const std::vector<std::string> meshes{"single_triangle", "single_quad", "diag_square", "desk1", "desk2", "desk3"};
    if (dimension(*bundled_mesh("single_triangle"), 5) != 21) o.fail("single triangle p=5 is not 21");
    for (const auto& name : meshes)
        for (int p = 5; p <= 10; ++p) {
            const auto mesh = bundled_mesh(name);
            const long d = dimension(*mesh, p);
            const auto space = make_space(mesh, p);
            const Basis basis = build_basis(space);
            if (d != c1mixed::testing::dimension_oracle(*mesh, p) || d != basis.size())
                o.fail(name + " p=" + std::to_string(p) + ": dimension mismatch");
            const Eigen::SimplicialLLT<SparseMatrix> llt(assemble_mass(basis));
            if (llt.info() != Eigen::Success) o.fail(name + " p=" + std::to_string(p) + ": mass Cholesky failed");
        }
    if (o.pass) o.detail = "6 meshes, p=5..10, single triangle p=5 gives 21";
    return o;
}

Outcome criterion_membership()
{
    Outcome o;
    MembershipReport worst;
    int checked = 0;
    auto note = [&](const MembershipReport& r, const std::string& what) {
        worst.value = std::max(worst.value, r.value);
        worst.gradient = std::max(worst.gradient, r.gradient);
        worst.hessian = std::max(worst.hessian, r.hessian);
        worst.normal_fit = std::max(worst.normal_fit, r.normal_fit);
        ++checked;
        if (!r.ok()) o.fail(what);
    };
    for (const auto& name : desk_meshes())
        for (int p = 5; p <= 8; ++p) {
            const auto space = make_space(bundled_mesh(name), p);
            const Basis basis = build_basis(space);
            for (int i = 0; i < basis.size(); ++i)
                note(check_membership(basis.function(i), space->mesh(), p),
                     name + " p=" + std::to_string(p) + " basis " + std::to_string(i));
            note(check_membership(project(*space, trig_function()), space->mesh(), p),
                 name + " p=" + std::to_string(p) + " interpolant");
        }
    const std::string summary = std::to_string(checked) + " splines, worst value " + fmt("%.1e", worst.value) +
                                " gradient " + fmt("%.1e", worst.gradient) + " hessian " +
                                fmt("%.1e", worst.hessian) + " fit " + fmt("%.1e", worst.normal_fit);
    o.detail = o.pass ? summary : o.detail + "; " + summary;
    return o;
}

Outcome criterion_gluing()
{
    Outcome o;
    std::mt19937_64 rng(2024);
    double worst_identity = 0, worst_alpha = 0;
    for (const auto kind : all_cases)
        for (int k = 0; k < 200; ++k) {
            const auto mesh = c1mixed::testing::random_interface_pair(kind, rng);
            const auto iface = canonical_interface(mesh, c1mixed::testing::interior_edge(mesh));
            const auto& f1 = iface.first.map;
            const auto& f2 = iface.second.map;
            const Point dv = f1(0.0, 1.0) - f1(0.0, 0.0);
            const double e2 = dv.squaredNorm();
            const double identity_scale = e2 * std::max(1.0, std::sqrt(e2));
            for (int s = 0; s <= 20; ++s) {
                const double v = s / 20.0;
                const Point du1 = across(f1, v), du2 = across(f2, v);
                const double cross = du2.x() * du1.y() - du2.y() * du1.x();
                const Point r =
                    det_at_edge(f2, v) * perp_of(du1) - det_at_edge(f1, v) * perp_of(du2) - cross * perp_of(dv);
                worst_identity = std::max(worst_identity, r.norm() / identity_scale);
                worst_identity = std::max(worst_identity, gluing_identity_residual(f1, f2, v).norm() / identity_scale);
            }
            const auto g = gluing_data(iface);
            const Eigen::VectorXd rhs =
                multiply(g.alpha2, g.beta1).coefficients() - multiply(g.alpha1, g.beta2).coefficients();
            worst_alpha = std::max(worst_alpha, (g.alpha3.coefficients() - rhs).cwiseAbs().maxCoeff() / (g.beta * g.beta));
        }
    if (worst_identity > 1e-11) o.fail("gluing identity residual " + fmt("%.2e", worst_identity));
    if (worst_alpha > 1e-11) o.fail("alpha3 identity residual " + fmt("%.2e", worst_alpha));
    if (o.pass)
        o.detail = "600 pairs, scaled residuals " + fmt("%.1e", worst_identity) + " / " + fmt("%.1e", worst_alpha);
    return o;
}

Outcome criterion_nullspace()
{
    Outcome o;
    std::mt19937_64 rng(7);
    for (const auto kind : all_cases)
        for (int p = 5; p <= 10; ++p) {
            const auto mesh = c1mixed::testing::random_interface_pair(kind, rng);
            const auto cons = c1mixed::testing::interface_constraints(mesh, c1mixed::testing::interior_edge(mesh), p);
            const int n = c1mixed::testing::nullspace_dimension(cons.matrix);
            if (n != 2 * p + 1)
                o.fail(std::string(to_string(kind)) + " p=" + std::to_string(p) + ": nullspace " + std::to_string(n));
        }
    if (o.pass) o.detail = "3 cases, p=5..10, nullspace 2p+1";
    return o;
}

Outcome criterion_reproduction()
{
    Outcome o;
    std::mt19937_64 rng(5);
    double worst = 0, worst_idem = 0;
    for (const auto& name : desk_meshes()) {
        const auto mesh = bundled_mesh(name);
        for (int k = 0; k < 20; ++k) {
            const int p = 5 + k % 4;
            const auto space = make_space(mesh, p);
            const Oracle f = c1mixed::testing::random_scaled_polynomial(p, *mesh, rng);
            const auto fh = project(*space, f);
            worst = std::max(worst, error_linf(fh, f, *mesh));
            if (k % 4 == 0) {
                const auto again = project(*space, c1mixed::testing::spline_oracle(mesh, fh));
                double diff = 0, top = 0;
                for (std::size_t el = 0; el < fh.patches.size(); ++el) {
                    diff = std::max(diff, (again.patches[el].ordinates() - fh.patches[el].ordinates()).cwiseAbs().maxCoeff());
                    top = std::max(top, fh.patches[el].ordinates().cwiseAbs().maxCoeff());
                }
                worst_idem = std::max(worst_idem, diff / std::max(1.0, top));
            }
        }
    }
    if (worst >= 1e-9) o.fail("reproduction error " + fmt("%.2e", worst));
    if (worst_idem >= 1e-12) o.fail("idempotence defect " + fmt("%.2e", worst_idem));
    if (o.pass)
        o.detail = "60 polynomials, worst Linf " + fmt("%.1e", worst) + ", idempotence " + fmt("%.1e", worst_idem);
    return o;
}

std::string final_rates(const ErrorReport& r)
{
    std::string s;
    for (int k = 0; k < 4; ++k)
        if (r.levels.back().rate[k]) s += std::string(s.empty() ? "" : " ") + norm_names[k] + "=" + fmt("%.3f", *r.levels.back().rate[k]);
    return s;
}

Outcome rate_study(Experiment e, const std::vector<int>& degrees, std::array<bool, 4> norms)
{
    Outcome o;
    std::string rates;
    for (const auto& name : desk_meshes())
        for (int p : degrees) {
            StudyConfig config;
            config.experiment = e;
            config.degree = p;
            config.levels = 4;
            config.norms = norms;
            const auto report = convergence_study(config, *bundled_mesh(name));
            for (int k = 0; k < 4; ++k)
                if (norms[k] && !report.levels.back().rate[k])
                    o.fail(name + " p=" + std::to_string(p) + ": no numeric " + norm_names[k] + " rate");
            for (const auto& msg : check_rates(report)) o.fail(name + " p=" + std::to_string(p) + ": " + msg);
            rates += (rates.empty() ? "" : "; ") + name + " p" + std::to_string(p) + " " + final_rates(report);
        }
    o.detail = o.pass ? rates : o.detail + " [" + rates + "]";
    return o;
}

Outcome criterion_biharmonic()
{
    Outcome o = rate_study(Experiment::Biharmonic, {5}, {false, true, true, true});
    std::mt19937_64 rng(8);
    double worst = 0;
    for (const auto& name : desk_meshes()) {
        const auto mesh = bundled_mesh(name);
        const Basis basis = build_basis(make_space(mesh, 5));
        const Oracle u = c1mixed::testing::random_scaled_polynomial(5, *mesh, rng);
        const auto r = solve_biharmonic([&](const Point& x) { return u.bilaplacian(x); }, u, basis);
        worst = std::max(worst, error_linf(r.function, u, *mesh));
    }
    if (worst >= 1e-8) o.fail("degree-5 manufactured solution error " + fmt("%.2e", worst));
    o.detail += "; degree-5 solution Linf " + fmt("%.1e", worst);
    return o;
}

Outcome criterion_derivatives()
{
    Outcome o;
    std::mt19937_64 rng(9);
    using c1mixed::testing::pushed_forward;
    double worst_grad = 0, worst_field = 0, worst_hess = 0;
    for (int k = 0; k < 100; ++k) {
        const auto kind = k % 2 == 0 ? ElementKind::Quad : ElementKind::Triangle;
        const int p = 5 + k % 6;
        const auto map = c1mixed::testing::random_map(kind, rng);
        const auto patch = c1mixed::testing::random_patch(kind, p, rng);
        const Point uv = c1mixed::testing::random_reference_point(kind, rng, 0.25);
        const Point x = map(uv.x(), uv.y());
        auto f = [&](double dx, double dy) { return pushed_forward(map, patch, x + Point(dx, dy)); };

        const double h1 = 1e-6 * map.diameter();
        const Point fd_grad((f(h1, 0) - f(-h1, 0)) / (2 * h1), (f(0, h1) - f(0, -h1)) / (2 * h1));
        auto second = [&](double h) {
            Eigen::Matrix2d d;
            d(0, 0) = (f(h, 0) - 2 * f(0, 0) + f(-h, 0)) / (h * h);
            d(1, 1) = (f(0, h) - 2 * f(0, 0) + f(0, -h)) / (h * h);
            d(0, 1) = d(1, 0) = (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4 * h * h);
            return d;
        };
        const double h2 = 2e-3 * map.diameter();
        const Eigen::Matrix2d fd_hess = (4 * second(h2 / 2) - second(h2)) / 3;

        const auto jet = physical_derivatives(map, patch, uv.x(), uv.y());
        const Point field = directional_derivative_field(map, patch, uv.x(), uv.y());
        worst_grad = std::max(worst_grad, (jet.gradient - fd_grad).norm() / std::max(1.0, fd_grad.norm()));
        worst_field = std::max(worst_field, (field - fd_grad).norm() / std::max(1.0, fd_grad.norm()));
        worst_hess = std::max(worst_hess, (jet.hessian - fd_hess).norm() / std::max(1.0, fd_hess.norm()));
    }
    if (worst_grad > 1e-6) o.fail("gradient deviation " + fmt("%.2e", worst_grad));
    if (worst_field > 1e-6) o.fail("directional field deviation " + fmt("%.2e", worst_field));
    if (worst_hess > 1e-5) o.fail("Hessian deviation " + fmt("%.2e", worst_hess));
    if (o.pass)
        o.detail = "100 triples, gradient " + fmt("%.1e", worst_grad) + ", field " + fmt("%.1e", worst_field) +
                   ", Hessian " + fmt("%.1e", worst_hess);
    return o;
}

Outcome criterion_determinism()
{
    Outcome o;
    const auto dir = std::filesystem::temp_directory_path() / "c1mixed_acceptance";
    std::filesystem::create_directories(dir);
    const std::vector<std::vector<std::string>> studies{
        {"--exp", "interpolation", "--p", "6", "--levels", "3", "--mesh", c1mixed::testing::mesh_path("desk1")},
        {"--exp", "l2fit", "--p", "5", "--levels", "3", "--mesh", c1mixed::testing::mesh_path("desk2")},
        {"--exp", "biharmonic", "--p", "5", "--levels", "3", "--mesh", c1mixed::testing::mesh_path("desk3")}};
    int index = 0;
    for (const auto& study : studies) {
        std::vector<std::string> outputs;
        for (const char* threads : {"1", "4", "4", "2"}) {
            const std::string file = (dir / ("run" + std::to_string(index++) + ".csv")).string();
            std::vector<std::string> args{"c1mixed", "--threads", threads, "study", "--out", file};
            args.insert(args.end(), study.begin(), study.end());
            std::vector<const char*> argv;
            for (const auto& a : args) argv.push_back(a.c_str());
            std::ostringstream out, err;
            if (run_cli(static_cast<int>(argv.size()), argv.data(), out, err) != 0) {
                o.fail("study " + study[1] + " failed: " + err.str());
                break;
            }
            outputs.push_back(read_file(file));
        }
        for (const auto& csv : outputs)
            if (csv != outputs.front()) o.fail("study " + study[1] + " CSV differs between runs");
    }
    if (o.pass) o.detail = "3 studies x 4 runs (threads 1, 4, 4, 2) byte-identical";
    return o;
}

} // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"dimension formula and linear independence", criterion_dimension},
        {"C1/C2 membership of basis and interpolants", criterion_membership},
        {"gluing identities on random interface pairs", criterion_gluing},
        {"interface constraint nullspace 2p+1", criterion_nullspace},
        {"polynomial reproduction and idempotence", criterion_reproduction},
        {"interpolation rates p=5,6,7",
         [] { return rate_study(Experiment::Interpolation, {5, 6, 7}, {true, false, false, false}); }},
        {"L2 fit rates p=5", [] { return rate_study(Experiment::L2Fit, {5}, {true, true, false, false}); }},
        {"biharmonic rates p=5 and polynomial solution", criterion_biharmonic},
        {"derivatives against finite differences", criterion_derivatives},
        {"study CSV determinism", criterion_determinism},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.fail(std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failures += o.pass ? 0 : 1;
        std::cout << (o.pass ? "PASS" : "FAIL") << " [" << i + 1 << "] " << criteria[i].first << " (" << fmt("%.1f", secs)
                  << " s): " << o.detail << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
