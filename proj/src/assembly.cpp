#include "c1mixed/assembly.hpp"

#include "c1mixed/error.hpp"
#include "c1mixed/interpolation.hpp"
#include "c1mixed/parallel.hpp"

#include <Eigen/SparseCholesky>

#include <cmath>

namespace c1mixed {

std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_legendre(int n)
{
    if (n < 1) throw Error("gauss_legendre: need at least one point");
    Eigen::VectorXd x(n), w(n);
    for (int i = 0; i < n; ++i) {
        // Newton on P_n starting from the Chebyshev-like guess.
        double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1, p1 = t;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (t * p1 - p0) / (t * t - 1);
            const double step = p1 / dp;
            t -= step;
            if (std::abs(step) < 1e-16) break;
        }
        double p0 = 1, p1 = t;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (t * p1 - p0) / (t * t - 1);
        x(n - 1 - i) = 0.5 * (t + 1);
        w(n - 1 - i) = 1.0 / ((1 - t * t) * dp * dp);
    }
    return {x, w};
}

QuadratureRule quadrature(ElementKind kind, int n)
{
    const auto [x, w] = gauss_legendre(n);
    QuadratureRule rule;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (kind == ElementKind::Quad) {
                rule.points.emplace_back(x(i), x(j));
                rule.weights.push_back(w(i) * w(j));
            } else {
                rule.points.emplace_back(x(i), (1 - x(i)) * x(j));
                rule.weights.push_back(w(i) * w(j) * (1 - x(i)));
            }
        }
    rule.exactness = kind == ElementKind::Quad ? 2 * n - 1 : 2 * n - 2;
    return rule;
}

int default_quadrature_points(int p) { return p + 2; }

namespace {

struct KindTables {
    QuadratureRule rule;
    std::vector<BasisJet<double>> jets;
};

std::array<KindTables, 2> make_tables(int p, int n)
{
    std::array<KindTables, 2> t;
    for (const ElementKind kind : {ElementKind::Triangle, ElementKind::Quad}) {
        auto& k = t[kind == ElementKind::Quad ? 1 : 0];
        k.rule = quadrature(kind, n);
        for (const Point& q : k.rule.points) k.jets.push_back(basis_jet<double>(kind, p, q.x(), q.y()));
    }
    return t;
}

const KindTables& tables_for(const std::array<KindTables, 2>& t, ElementKind kind)
{
    return t[kind == ElementKind::Quad ? 1 : 0];
}

// Physical Laplacian of every Bernstein basis function at one point.
Eigen::VectorXd basis_laplacian(const GeometryMap<double>& map, const BasisJet<double>& b, const Point& uv)
{
    const auto j = jacobian(map, uv.x(), uv.y());
    const Eigen::Matrix2d g = j.inverse * j.inverse.transpose();
    const Point m = map.mixed_derivative();
    // gradient components: J^{-T} (du, dv)
    const Eigen::VectorXd gx = j.inverse(0, 0) * b.du + j.inverse(1, 0) * b.dv;
    const Eigen::VectorXd gy = j.inverse(0, 1) * b.du + j.inverse(1, 1) * b.dv;
    const Eigen::VectorXd mixed = b.duv - m.x() * gx - m.y() * gy;
    return g(0, 0) * b.duu + 2 * g(0, 1) * mixed + g(1, 1) * b.dvv;
}

template <typename LocalFn>
SparseMatrix assemble(const Basis& basis, LocalFn local)
{
    const auto& space = basis.space();
    const int nel = static_cast<int>(space.mesh().elements().size());
    std::vector<Eigen::MatrixXd> blocks(nel);
    parallel_for(nel, [&](std::size_t el) {
        const Eigen::MatrixXd k = local(static_cast<int>(el));
        const auto& e = basis.extraction(static_cast<int>(el));
        blocks[el] = e.transpose() * k * e;
    });
    std::vector<Eigen::Triplet<double>> triplets;
    for (int el = 0; el < nel; ++el) {
        const auto& ids = space.dofs().element_dofs(el);
        const auto& b = blocks[el];
        for (int r = 0; r < b.rows(); ++r)
            for (int c = 0; c < b.cols(); ++c)
                if (b(r, c) != 0.0) triplets.emplace_back(ids[r], ids[c], b(r, c));
    }
    SparseMatrix m(basis.size(), basis.size());
    m.setFromTriplets(triplets.begin(), triplets.end());
    // Exact symmetry regardless of rounding in the element products.
    SparseMatrix mt = m.transpose();
    return 0.5 * (m + mt);
}

} // namespace

SparseMatrix assemble_mass(const Basis& basis, int points)
{
    const auto& space = basis.space();
    const int p = space.degree();
    const auto tables = make_tables(p, points > 0 ? points : default_quadrature_points(p));
    return assemble(basis, [&](int el) {
        const auto& map = space.map(el);
        const auto& t = tables_for(tables, map.kind());
        const int n = ordinate_count(map.kind(), p);
        Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
        for (std::size_t q = 0; q < t.rule.points.size(); ++q) {
            const Point& uv = t.rule.points[q];
            const double w = t.rule.weights[q] * std::abs(jacobian(map, uv.x(), uv.y()).det);
            k.selfadjointView<Eigen::Lower>().rankUpdate(t.jets[q].value, w);
        }
        return Eigen::MatrixXd(k.selfadjointView<Eigen::Lower>());
    });
}

SparseMatrix assemble_bilaplacian(const Basis& basis, int points)
{
    const auto& space = basis.space();
    const int p = space.degree();
    const auto tables = make_tables(p, points > 0 ? points : default_quadrature_points(p));
    return assemble(basis, [&](int el) {
        const auto& map = space.map(el);
        const auto& t = tables_for(tables, map.kind());
        const int n = ordinate_count(map.kind(), p);
        Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
        for (std::size_t q = 0; q < t.rule.points.size(); ++q) {
            const Point& uv = t.rule.points[q];
            const double w = t.rule.weights[q] * std::abs(jacobian(map, uv.x(), uv.y()).det);
            k.selfadjointView<Eigen::Lower>().rankUpdate(basis_laplacian(map, t.jets[q], uv), w);
        }
        return Eigen::MatrixXd(k.selfadjointView<Eigen::Lower>());
    });
}

Eigen::VectorXd assemble_load(const Basis& basis, const std::function<double(const Point&)>& f, int points)
{
    const auto& space = basis.space();
    const int p = space.degree();
    const auto tables = make_tables(p, points > 0 ? points : default_quadrature_points(p) + 2);
    const int nel = static_cast<int>(space.mesh().elements().size());
    std::vector<Eigen::VectorXd> blocks(nel);
    parallel_for(nel, [&](std::size_t el) {
        const auto& map = space.map(static_cast<int>(el));
        const auto& t = tables_for(tables, map.kind());
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(ordinate_count(map.kind(), p));
        for (std::size_t q = 0; q < t.rule.points.size(); ++q) {
            const Point& uv = t.rule.points[q];
            const double w = t.rule.weights[q] * std::abs(jacobian(map, uv.x(), uv.y()).det);
            acc += (w * f(map(uv.x(), uv.y()))) * t.jets[q].value;
        }
        blocks[el] = basis.extraction(static_cast<int>(el)).transpose() * acc;
    });
    Eigen::VectorXd out = Eigen::VectorXd::Zero(basis.size());
    for (int el = 0; el < nel; ++el) {
        const auto& ids = space.dofs().element_dofs(el);
        for (std::size_t i = 0; i < ids.size(); ++i) out(ids[i]) += blocks[el](i);
    }
    return out;
}

FitResult l2_fit(const Oracle& f, const Basis& basis)
{
    const SparseMatrix m = assemble_mass(basis);
    const Eigen::VectorXd rhs = assemble_load(basis, [&](const Point& x) { return f.value(x); });
    Eigen::SimplicialLLT<SparseMatrix> llt(m);
    if (llt.info() != Eigen::Success) throw SolveError("l2_fit: mass matrix is not positive definite");
    FitResult out;
    out.coefficients = llt.solve(rhs);
    out.function = basis.combine(out.coefficients);
    return out;
}

std::vector<Point> straight_boundary_normals(const MixedMesh& mesh)
{
    const int nv = static_cast<int>(mesh.vertices().size());
    std::vector<Point> normals(nv, Point::Zero());
    std::vector<bool> bent(nv, false);
    for (const auto& ed : mesh.edges()) {
        if (!ed.boundary()) continue;
        const Point t = (mesh.vertices()[ed.vertices[1]] - mesh.vertices()[ed.vertices[0]]).normalized();
        for (const int v : ed.vertices) {
            if (normals[v].isZero())
                normals[v] = perp<double>(t);
            else if (std::abs(normals[v].dot(t)) > 1e-12)
                bent[v] = true;
        }
    }
    for (int v = 0; v < nv; ++v)
        if (bent[v]) normals[v].setZero();
    return normals;
}

BiharmonicResult solve_biharmonic(const std::function<double(const Point&)>& load, const Oracle& exact,
                                  const Basis& basis, BoundaryHessian hessian)
{
    const auto& space = basis.space();
    const auto& dofs = space.dofs();
    const int n = basis.size();

    // Coefficients are fixed + T x with x the reduced unknowns.
    Eigen::VectorXd fixed = Eigen::VectorXd::Zero(n);
    std::vector<Eigen::Triplet<double>> t_entries;
    int nfree = 0;
    for (int i = 0; i < n; ++i) {
        if (dofs.boundary_dof(i))
            fixed(i) = dof_value(space, exact, i);
        else
            t_entries.emplace_back(i, nfree++, 1.0);
    }
    BiharmonicResult out;
    if (hessian == BoundaryHessian::ReleaseNormal) {
        const auto normals = straight_boundary_normals(space.mesh());
        for (int v = 0; v < static_cast<int>(normals.size()); ++v) {
            const Point& nv = normals[v];
            if (nv.isZero()) continue;
            const int h = dofs.vertex_offset(v) + 3;
            const double dir[3] = {nv.x() * nv.x(), nv.x() * nv.y(), nv.y() * nv.y()};
            const double shift = nv.dot(exact.hessian(space.mesh().vertices()[v]) * nv);
            for (int k = 0; k < 3; ++k) {
                fixed(h + k) -= shift * dir[k];
                t_entries.emplace_back(h + k, nfree, dir[k]);
            }
            ++nfree;
            ++out.released_hessians;
        }
    }
    SparseMatrix t(n, nfree);
    t.setFromTriplets(t_entries.begin(), t_entries.end());

    out.free_dofs = nfree;
    out.coefficients = fixed;
    if (nfree > 0) {
        const SparseMatrix b = assemble_bilaplacian(basis);
        const Eigen::VectorXd l = assemble_load(basis, load);
        const SparseMatrix tt = t.transpose();
        SparseMatrix reduced = tt * b * t;
        reduced = 0.5 * (reduced + SparseMatrix(reduced.transpose()));
        const Eigen::VectorXd rhs = tt * (l - b * fixed);
        Eigen::SimplicialLLT<SparseMatrix> llt(reduced);
        if (llt.info() != Eigen::Success) throw SolveError("solve_biharmonic: reduced system is not positive definite");
        const Eigen::VectorXd u = llt.solve(rhs);
        if (llt.info() != Eigen::Success) throw SolveError("solve_biharmonic: solve failed");
        const double energy = u.dot(reduced * u);
        out.energy_residual = std::abs(energy - u.dot(rhs)) / std::max(1.0, std::abs(energy));
        out.coefficients += t * u;
    }
    out.function = basis.combine(out.coefficients);
    return out;
}

} // namespace c1mixed
