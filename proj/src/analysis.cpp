#include "c1mixed/analysis.hpp"

#include "c1mixed/assembly.hpp"
#include "c1mixed/error.hpp"
#include "c1mixed/interpolation.hpp"
#include "c1mixed/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <sstream>

namespace c1mixed {

std::vector<Point> linf_samples(ElementKind kind, int n)
{
    std::vector<Point> pts;
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= (kind == ElementKind::Quad ? n : n - i); ++j)
            pts.emplace_back(static_cast<double>(i) / n, static_cast<double>(j) / n);
    return pts;
}

namespace {

constexpr int kind_slot(ElementKind kind) { return kind == ElementKind::Quad ? 1 : 0; }

Eigen::MatrixXd sample_values(ElementKind kind, int p, const std::vector<Point>& pts)
{
    Eigen::MatrixXd t(pts.size(), ordinate_count(kind, p));
    for (std::size_t r = 0; r < pts.size(); ++r) {
        const Point& uv = pts[r];
        if (kind == ElementKind::Quad) {
            const auto bu = bernstein_values<double>(p, uv.x());
            const auto bv = bernstein_values<double>(p, uv.y());
            for (int i = 0; i <= p; ++i)
                for (int j = 0; j <= p; ++j) t(r, tensor_index(p, i, j)) = bu(i) * bv(j);
        } else {
            t.row(r) = detail::triangle_basis<double>(p, uv.x(), uv.y()).transpose();
        }
    }
    return t;
}

// Per-element maxima/sums reduced in element order.
template <typename Fn>
std::vector<double> per_element(const MixedMesh& mesh, Fn fn)
{
    std::vector<double> out(mesh.elements().size());
    parallel_for(out.size(), [&](std::size_t el) { out[el] = fn(static_cast<int>(el)); });
    return out;
}

double squared_difference(const PhysicalJet<double>& h, const Jet2& f, int order)
{
    if (order == 0) return (f.value - h.value) * (f.value - h.value);
    if (order == 1) return (f.gradient - h.gradient).squaredNorm();
    return (f.hessian - h.hessian).squaredNorm();
}

} // namespace

double error_linf(const SplineFunction& fh, const Oracle& f, const MixedMesh& mesh, int n)
{
    const int p = fh.degree;
    std::array<std::vector<Point>, 2> pts{linf_samples(ElementKind::Triangle, n), linf_samples(ElementKind::Quad, n)};
    std::array<Eigen::MatrixXd, 2> tables{sample_values(ElementKind::Triangle, p, pts[0]),
                                          sample_values(ElementKind::Quad, p, pts[1])};
    const auto maxima = per_element(mesh, [&](int el) {
        const int slot = kind_slot(mesh.elements()[el].kind);
        const auto map = element_map(mesh, el);
        const Eigen::VectorXd values = tables[slot] * fh.patches[el].ordinates();
        double m = 0;
        for (std::size_t s = 0; s < pts[slot].size(); ++s) {
            const Point x = map(pts[slot][s].x(), pts[slot][s].y());
            m = std::max(m, std::abs(f.value(x) - values(s)));
        }
        return m;
    });
    return *std::max_element(maxima.begin(), maxima.end());
}

double norm_linf(const Oracle& f, const MixedMesh& mesh, int n)
{
    const SplineFunction zero = zero_spline(mesh, 1);
    return error_linf(zero, f, mesh, n);
}

double error_sobolev(const SplineFunction& fh, const Oracle& f, const MixedMesh& mesh, int order, int points)
{
    if (order < 0 || order > 2) throw Error("error_sobolev: order must be 0, 1 or 2");
    const int p = fh.degree;
    const int n = points > 0 ? points : p + 4;
    std::array<QuadratureRule, 2> rules{quadrature(ElementKind::Triangle, n), quadrature(ElementKind::Quad, n)};
    std::array<std::vector<BasisJet<double>>, 2> jets;
    for (const ElementKind kind : {ElementKind::Triangle, ElementKind::Quad})
        for (const Point& q : rules[kind_slot(kind)].points)
            jets[kind_slot(kind)].push_back(basis_jet<double>(kind, p, q.x(), q.y()));

    const auto sums = per_element(mesh, [&](int el) {
        const int slot = kind_slot(mesh.elements()[el].kind);
        const auto map = element_map(mesh, el);
        double acc = 0;
        for (std::size_t q = 0; q < rules[slot].points.size(); ++q) {
            const Point& uv = rules[slot].points[q];
            const auto jet = evaluate_jet(fh.patches[el], jets[slot][q]);
            const auto h = physical_derivatives(map, jet, uv.x(), uv.y());
            const double w = rules[slot].weights[q] * std::abs(jacobian(map, uv.x(), uv.y()).det);
            acc += w * squared_difference(h, f.jet(map(uv.x(), uv.y())), order);
        }
        return acc;
    });
    double total = 0;
    for (const double s : sums) total += s;
    return std::sqrt(total);
}

double norm_sobolev(const Oracle& f, const MixedMesh& mesh, int order, int points)
{
    const SplineFunction zero = zero_spline(mesh, 5);
    return error_sobolev(zero, f, mesh, order, points > 0 ? points : 12);
}

const char* to_string(Experiment e)
{
    switch (e) {
    case Experiment::Interpolation: return "interpolation";
    case Experiment::L2Fit: return "l2fit";
    case Experiment::Biharmonic: return "biharmonic";
    }
    return "?";
}

Experiment experiment_from_string(const std::string& s)
{
    if (s == "interpolation") return Experiment::Interpolation;
    if (s == "l2fit") return Experiment::L2Fit;
    if (s == "biharmonic") return Experiment::Biharmonic;
    throw Error("unknown experiment '" + s + "' (expected interpolation, l2fit or biharmonic)");
}

double decay_exponent(double previous, double current) { return std::log2(previous / current); }

ErrorReport convergence_study(const StudyConfig& config, const MixedMesh& mesh)
{
    if (config.levels < 1) throw Error("levels must be >= 1");
    const Oracle f = function_by_id(config.function, config.degree);
    ErrorReport report;
    report.experiment = config.experiment;
    report.degree = config.degree;
    report.relative = config.experiment == Experiment::Biharmonic;

    auto current = std::make_shared<const MixedMesh>(mesh);
    std::array<double, 4> scale{};
    for (int level = 0; level < config.levels; ++level) {
        if (level > 0) current = std::make_shared<const MixedMesh>(refine(*current));
        if (level == 0) {
            scale[Linf] = norm_linf(f, *current);
            for (int k = 1; k < 4; ++k) scale[k] = config.norms[k] ? norm_sobolev(f, *current, k - 1) : 0;
        }
        auto space = std::make_shared<const SplineSpace>(current, config.degree);
        SplineFunction fh;
        if (config.experiment == Experiment::Interpolation) {
            fh = project(*space, f);
        } else {
            const Basis basis = build_basis(space);
            if (config.experiment == Experiment::L2Fit)
                fh = l2_fit(f, basis).function;
            else
                fh = solve_biharmonic([&](const Point& x) { return f.bilaplacian(x); }, f, basis).function;
        }

        LevelResult row;
        row.level = level;
        row.h = longest_edge(*current);
        row.ndof = space->dofs().size();
        for (int k = 0; k < 4; ++k) {
            if (!config.norms[k]) continue;
            const double e = k == Linf ? error_linf(fh, f, *current) : error_sobolev(fh, f, *current, k - 1);
            row.absolute_error[k] = e;
            row.error[k] = report.relative && scale[k] > 0 ? e / scale[k] : e;
        }
        if (level > 0) {
            const auto& prev = report.levels.back();
            for (int k = 0; k < 4; ++k) {
                if (!row.absolute_error[k] || !prev.absolute_error[k]) continue;
                const double floor = error_floor * std::max(1.0, scale[k]);
                const double a = *prev.absolute_error[k];
                const double b = *row.absolute_error[k];
                if (b < floor)
                    row.exact[k] = true;
                else if (a >= floor)
                    row.rate[k] = decay_exponent(*prev.error[k], *row.error[k]);
            }
        }
        report.levels.push_back(row);
    }
    return report;
}

std::string to_csv(const ErrorReport& report)
{
    std::ostringstream out;
    out << "level,h,ndof";
    for (const char* n : norm_names) out << ",err_" << n;
    for (const char* n : norm_names) out << ",gamma_" << n;
    out << '\n';
    char buf[64];
    for (const auto& row : report.levels) {
        std::snprintf(buf, sizeof buf, "%d,%.12e,%ld", row.level, row.h, row.ndof);
        out << buf;
        for (int k = 0; k < 4; ++k) {
            out << ',';
            if (row.error[k]) {
                std::snprintf(buf, sizeof buf, "%.12e", *row.error[k]);
                out << buf;
            }
        }
        for (int k = 0; k < 4; ++k) {
            out << ',';
            if (row.exact[k]) {
                out << "exact";
            } else if (row.rate[k]) {
                std::snprintf(buf, sizeof buf, "%.6f", *row.rate[k]);
                out << buf;
            }
        }
        out << '\n';
    }
    return out.str();
}

std::vector<LevelResult> parse_csv(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    std::vector<LevelResult> rows;
    if (!std::getline(in, line) || line.rfind("level,h,ndof", 0) != 0) throw Error("parse_csv: missing header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        while (cells.size() < 11) cells.emplace_back();
        LevelResult row;
        row.level = std::stoi(cells[0]);
        row.h = std::stod(cells[1]);
        row.ndof = std::stol(cells[2]);
        for (int k = 0; k < 4; ++k) {
            if (!cells[3 + k].empty()) row.error[k] = std::stod(cells[3 + k]);
            const std::string& g = cells[7 + k];
            if (g == "exact")
                row.exact[k] = true;
            else if (!g.empty())
                row.rate[k] = std::stod(g);
        }
        rows.push_back(row);
    }
    return rows;
}

std::vector<std::string> check_rates(const ErrorReport& report)
{
    std::vector<std::string> failures;
    if (report.levels.size() < 2) {
        failures.push_back("rate check needs at least two levels");
        return failures;
    }
    const int p = report.degree;
    const auto& last = report.levels.back();
    auto require = [&](Norm k, double lo, double hi) {
        char buf[160];
        if (last.exact[k]) return;
        if (!last.rate[k]) {
            std::snprintf(buf, sizeof buf, "gamma_%s: no rate at level %d", norm_names[k], last.level);
            failures.emplace_back(buf);
            return;
        }
        const double g = *last.rate[k];
        if (!(g >= lo && g <= hi)) {
            std::snprintf(buf, sizeof buf, "gamma_%s = %.4f at level %d outside [%.2f, %.2f]", norm_names[k], g,
                          last.level, lo, hi);
            failures.emplace_back(buf);
        }
    };
    switch (report.experiment) {
    case Experiment::Interpolation: require(Linf, p + 0.7, p + 1.3); break;
    case Experiment::L2Fit:
        require(Linf, p + 1 - 0.35, p + 1 + 0.35);
        require(L2, p + 1 - 0.35, p + 1 + 0.35);
        break;
    case Experiment::Biharmonic:
        require(L2, p + 1 - 0.35, p + 1 + 0.35);
        require(H1, p - 0.35, p + 0.35);
        require(H2, p - 1 - 0.35, p - 1 + 0.35);
        break;
    }
    return failures;
}

} // namespace c1mixed
