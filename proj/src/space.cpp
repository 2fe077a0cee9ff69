#include "c1mixed/space.hpp"

#include "c1mixed/assembly.hpp"
#include "c1mixed/error.hpp"
#include "c1mixed/parallel.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>

namespace c1mixed {

std::string describe(const DofDescriptor& dof)
{
    std::ostringstream s;
    std::visit(
        [&](const auto& d) {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, VertexDof>)
                s << "vertex " << d.vertex << " d(" << d.a << "," << d.b << ")";
            else if constexpr (std::is_same_v<T, EdgeValueDof>)
                s << "edge " << d.edge << " value " << d.index;
            else if constexpr (std::is_same_v<T, EdgeNormalDof>)
                s << "edge " << d.edge << " normal " << d.index;
            else
                s << "element " << d.element << " interior (" << d.l << "," << d.k << ")";
        },
        dof);
    return s.str();
}

DimensionBreakdown dimension_breakdown(const MixedMesh& mesh, int p)
{
    if (p < 5) throw Error("degree must be >= 5");
    DimensionBreakdown d;
    d.vertex = 6L * static_cast<long>(mesh.vertices().size());
    d.edge = static_cast<long>(2 * p - 9) * static_cast<long>(mesh.edges().size());
    d.quad_interior = static_cast<long>((p - 3) * (p - 3)) * static_cast<long>(mesh.quad_count());
    d.triangle_interior = static_cast<long>(binomial(p - 4, 2)) * static_cast<long>(mesh.triangle_count());
    return d;
}

long dimension(const MixedMesh& mesh, int p) { return dimension_breakdown(mesh, p).total(); }

int interior_dof_count(ElementKind kind, int p)
{
    return kind == ElementKind::Quad ? (p - 3) * (p - 3) : (p - 4) * (p - 5) / 2;
}

std::vector<std::array<int, 2>> interior_grid(ElementKind kind, int p)
{
    std::vector<std::array<int, 2>> grid;
    for (int l = 2; l <= p - 2; ++l) {
        const int kmax = kind == ElementKind::Quad ? p - 2 : p - 2 - l;
        for (int k = 2; k <= kmax; ++k) grid.push_back({l, k});
    }
    return grid;
}

// ---------------------------------------------------------------------------
// DofMap
// ---------------------------------------------------------------------------

DofMap::DofMap(const MixedMesh& mesh, int p) : p_(p)
{
    if (p < 5) throw Error("degree must be >= 5");
    const int nv = static_cast<int>(mesh.vertices().size());
    const int ne = static_cast<int>(mesh.edges().size());
    const int nel = static_cast<int>(mesh.elements().size());

    for (int v = 0; v < nv; ++v)
        for (const auto& [a, b] : vertex_dof_orders) descriptors_.push_back(VertexDof{v, a, b});
    edge_offset_ = static_cast<int>(descriptors_.size());
    for (int e = 0; e < ne; ++e) {
        for (int l = 1; l <= p - 5; ++l) descriptors_.push_back(EdgeValueDof{e, l});
        for (int l = 1; l <= p - 4; ++l) descriptors_.push_back(EdgeNormalDof{e, l});
    }
    interior_offsets_.resize(nel);
    for (int el = 0; el < nel; ++el) {
        interior_offsets_[el] = static_cast<int>(descriptors_.size());
        for (const auto& [l, k] : interior_grid(mesh.elements()[el].kind, p))
            descriptors_.push_back(InteriorDof{el, l, k});
    }

    element_dofs_.resize(nel);
    for (int el = 0; el < nel; ++el) {
        const auto& element = mesh.elements()[el];
        auto& local = element_dofs_[el];
        for (int k = 0; k < element.vertex_count(); ++k)
            for (int a = 0; a < 6; ++a) local.push_back(vertex_offset(element.vertices[k]) + a);
        for (int k = 0; k < element.vertex_count(); ++k) {
            const int e = element.edges[k];
            for (int l = 0; l < 2 * p - 9; ++l) local.push_back(edge_value_offset(e) + l);
        }
        const int ni = interior_dof_count(element.kind, p);
        for (int l = 0; l < ni; ++l) local.push_back(interior_offsets_[el] + l);
    }

    boundary_.assign(descriptors_.size(), false);
    for (int v = 0; v < nv; ++v)
        if (mesh.boundary_vertex(v))
            for (int a = 0; a < 6; ++a) boundary_[vertex_offset(v) + a] = true;
    for (int e = 0; e < ne; ++e)
        if (mesh.edges()[e].boundary())
            for (int l = 0; l < 2 * p - 9; ++l) boundary_[edge_value_offset(e) + l] = true;
}

// ---------------------------------------------------------------------------
// Strips
// ---------------------------------------------------------------------------

StripOrdinates strip_ordinates(ElementKind kind, const SideGluing& glue, const EdgeTrace& trace)
{
    const int p = static_cast<int>(trace.c.size()) - 1;
    auto c = [&](int j) { return j < 0 || j > p ? 0.0 : trace.c(j); };
    auto d = [&](int j) { return j < 0 || j > p - 1 ? 0.0 : trace.d(j); };
    StripOrdinates s;
    s.row0 = trace.c;
    if (kind == ElementKind::Quad) {
        const auto [a0, a1] = glue.alpha;
        const auto [b0, b1] = glue.beta;
        s.row1.resize(p + 1);
        for (int j = 0; j <= p; ++j) {
            const double normal = ((p - j) * a0 * d(j) + j * a1 * d(j - 1)) / p;
            const double tangential = (p - j) * b0 * (c(j + 1) - c(j)) + j * b1 * (c(j) - c(j - 1));
            s.row1(j) = c(j) + (normal + tangential) / p;
        }
    } else {
        const double a = glue.alpha[0];
        const double b = glue.beta[0];
        s.row1.resize(p);
        for (int j = 0; j < p; ++j) s.row1(j) = c(j) + b * (c(j + 1) - c(j)) + a * d(j) / p;
    }
    return s;
}

namespace {

SideGluing side_from(const UnivariateBernstein<double>& alpha, const UnivariateBernstein<double>& beta)
{
    SideGluing g;
    g.alpha = {alpha.coefficient(0), alpha.coefficient(alpha.degree())};
    g.beta = {beta.coefficient(0), beta.coefficient(beta.degree())};
    return g;
}

} // namespace

InterfaceOrdinates interface_ordinates(const CanonicalInterface& iface, const GluingData& glue, const EdgeTrace& trace)
{
    InterfaceOrdinates out;
    out.first = strip_ordinates(iface.first.kind, side_from(glue.alpha1, glue.beta1), trace);
    out.second = strip_ordinates(iface.second.kind, side_from(glue.alpha2, glue.beta2), trace);
    return out;
}

// ---------------------------------------------------------------------------
// Space
// ---------------------------------------------------------------------------

SplineFunction zero_spline(const MixedMesh& mesh, int p)
{
    SplineFunction f;
    f.degree = p;
    for (const auto& el : mesh.elements()) f.patches.emplace_back(el.kind, p);
    return f;
}

EdgeParameters edge_point_parameters(int p)
{
    if (p < 5) throw Error("degree must be >= 5");
    const int m = 2 * (p / 2) - 2;
    const double lo = 2.0 / p;
    const double hi = (p - 2.0) / p;
    auto cand = [&](int l) { return lo + (static_cast<double>(l) / m) * (hi - lo); };
    EdgeParameters e;
    if (p % 2 == 1) {
        for (int l = 1; l <= p - 5; ++l) e.r.push_back(l <= (p - 5) / 2 ? cand(l) : cand(l + 1));
        for (int l = 1; l <= p - 4; ++l) e.s.push_back(cand(l));
    } else {
        for (int l = 1; l <= p - 5; ++l) {
            if (l <= (p - 6) / 2)
                e.r.push_back(cand(l));
            else if (l == (p - 4) / 2)
                e.r.push_back(cand((p - 2) / 2));
            else
                e.r.push_back(cand(l + 2));
        }
        for (int l = 1; l <= p - 4; ++l) e.s.push_back(l <= (p - 4) / 2 ? cand(l) : cand(l + 1));
    }
    return e;
}

SplineSpace::SplineSpace(std::shared_ptr<const MixedMesh> mesh, int p)
    : mesh_(std::move(mesh)), p_(p), dofs_(*mesh_, p), params_(edge_point_parameters(p))
{
    const auto& m = *mesh_;
    const int nel = static_cast<int>(m.elements().size());
    maps_.reserve(nel);
    frames_.resize(nel);
    glue_.resize(nel);
    for (int el = 0; el < nel; ++el) {
        maps_.push_back(element_map(m, el));
        for (int k = 0; k < m.elements()[el].vertex_count(); ++k) {
            frames_[el].push_back(element_frame(m, el, k));
            glue_[el].push_back(side_gluing(frames_[el].back()));
        }
    }
    for (const auto& e : m.edges()) {
        const Point t = m.vertices()[e.vertices[1]] - m.vertices()[e.vertices[0]];
        normals_.push_back(perp<double>(t) / t.norm());
    }

    auto invert_checked = [](const Eigen::MatrixXd& a, const char* what) {
        Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
        if (!lu.isInvertible()) throw SolveError(std::string(what) + ": singular collocation matrix");
        return Eigen::MatrixXd(lu.inverse());
    };
    theta_inverse_ = invert_checked(hermite_matrix<double>(p, 3, 3, params_.r), "edge value fit");
    omega_inverse_ = invert_checked(hermite_matrix<double>(p - 1, 2, 2, params_.s), "edge normal fit");

    for (const ElementKind kind : {ElementKind::Triangle, ElementKind::Quad}) {
        KindData& data = kind_[kind == ElementKind::Quad ? 1 : 0];
        const int n = ordinate_count(kind, p);
        for (int idx = 0; idx < n; ++idx) {
            const auto [i, j] = ordinate_multi_index(kind, p, idx);
            const bool inner = kind == ElementKind::Quad ? (i >= 2 && i <= p - 2 && j >= 2 && j <= p - 2)
                                                         : (i >= 2 && j >= 2 && p - i - j >= 2);
            if (inner) data.interior_ordinates.push_back(idx);
        }
        for (const auto& [l, k] : interior_grid(kind, p))
            data.points.emplace_back(static_cast<double>(l) / p, static_cast<double>(k) / p);
        const int ni = static_cast<int>(data.points.size());
        data.values_at_points.resize(ni, n);
        for (int r = 0; r < ni; ++r)
            data.values_at_points.row(r) =
                basis_jet<double>(kind, p, data.points[r].x(), data.points[r].y()).value.transpose();
        if (ni == 0) continue;
        Eigen::MatrixXd a(ni, ni);
        for (int c = 0; c < ni; ++c) a.col(c) = data.values_at_points.col(data.interior_ordinates[c]);
        const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
        const auto& sv = svd.singularValues();
        data.condition = sv(sv.size() - 1) > 0 ? sv(0) / sv(sv.size() - 1) : INFINITY;
        if (!(data.condition <= 1e12))
            throw SolveError(std::string("interior collocation matrix for ") + to_string(kind) +
                             " elements is too ill-conditioned");
        if (data.condition > 1e8)
            std::cerr << "warning: interior collocation condition number " << data.condition << " for "
                      << to_string(kind) << " elements\n";
        data.interior_inverse = a.fullPivLu().inverse();
    }
}

Point SplineSpace::edge_point(int edge, double t) const
{
    const auto& e = mesh_->edges()[edge];
    const Point& a = mesh_->vertices()[e.vertices[0]];
    const Point& b = mesh_->vertices()[e.vertices[1]];
    return a + t * (b - a);
}

const std::vector<Point>& SplineSpace::interior_points(ElementKind kind) const { return kind_data(kind).points; }

double SplineSpace::interior_condition(ElementKind kind) const { return kind_data(kind).condition; }

EdgeTrace SplineSpace::edge_trace(int edge, const VertexJet& lower, const VertexJet& higher,
                                  const Eigen::VectorXd& values, const Eigen::VectorXd& normals) const
{
    const int p = p_;
    const auto& ed = mesh_->edges()[edge];
    const Point e = mesh_->vertices()[ed.vertices[1]] - mesh_->vertices()[ed.vertices[0]];
    const Point& n = normals_[edge];
    auto grad = [](const VertexJet& j) { return Point(j[1], j[2]); };
    auto hess = [](const VertexJet& j) {
        Eigen::Matrix2d h;
        h << j[3], j[4], j[4], j[5];
        return h;
    };

    Eigen::VectorXd rhs(p + 1);
    rhs(0) = lower[0];
    rhs(1) = grad(lower).dot(e);
    rhs(2) = e.dot(hess(lower) * e);
    rhs(3) = higher[0];
    rhs(4) = grad(higher).dot(e);
    rhs(5) = e.dot(hess(higher) * e);
    rhs.tail(p - 5) = values;

    Eigen::VectorXd rhs_n(p);
    rhs_n(0) = n.dot(grad(lower));
    rhs_n(1) = n.dot(hess(lower) * e);
    rhs_n(2) = n.dot(grad(higher));
    rhs_n(3) = n.dot(hess(higher) * e);
    rhs_n.tail(p - 4) = normals;

    EdgeTrace t;
    t.c = theta_inverse_ * rhs;
    t.d = omega_inverse_ * rhs_n / e.norm();
    return t;
}

BezierPatch<double> SplineSpace::element_patch(int element, const Eigen::VectorXd& local) const
{
    const auto& el = mesh_->elements()[element];
    const int p = p_;
    const int nv = el.vertex_count();
    const int per_edge = 2 * p - 9;
    BezierPatch<double> patch(el.kind, p);
    auto& b = patch.ordinates();

    auto jet_of = [&](int k) {
        VertexJet j;
        for (int a = 0; a < 6; ++a) j[a] = local(6 * k + a);
        return j;
    };
    auto local_vertex = [&](int global) {
        for (int k = 0; k < nv; ++k)
            if (el.vertices[k] == global) return k;
        return -1;
    };

    for (int k = 0; k < nv; ++k) {
        const int edge = el.edges[k];
        const auto& ed = mesh_->edges()[edge];
        const int offset = 6 * nv + k * per_edge;
        const EdgeTrace trace = edge_trace(edge, jet_of(local_vertex(ed.vertices[0])),
                                           jet_of(local_vertex(ed.vertices[1])), local.segment(offset, p - 5),
                                           local.segment(offset + p - 5, p - 4));
        const StripOrdinates strip = strip_ordinates(el.kind, glue_[element][k], trace);
        const ElementFrame& f = frames_[element][k];
        for (int j = 0; j < strip.row0.size(); ++j) b(f.stored_index(p, 0, j)) = strip.row0(j);
        for (int j = 0; j < strip.row1.size(); ++j) b(f.stored_index(p, 1, j)) = strip.row1(j);
    }

    const KindData& data = kind_data(el.kind);
    const int ni = static_cast<int>(data.interior_ordinates.size());
    if (ni > 0) {
        const int offset = 6 * nv + nv * per_edge;
        const Eigen::VectorXd rhs = local.segment(offset, ni) - data.values_at_points * b;
        const Eigen::VectorXd inner = data.interior_inverse * rhs;
        for (int c = 0; c < ni; ++c) b(data.interior_ordinates[c]) = inner(c);
    }
    return patch;
}

Eigen::MatrixXd SplineSpace::extraction(int element) const
{
    const int n = static_cast<int>(dofs_.element_dofs(element).size());
    Eigen::MatrixXd e(ordinate_count(mesh_->elements()[element].kind, p_), n);
    Eigen::VectorXd unit = Eigen::VectorXd::Zero(n);
    for (int c = 0; c < n; ++c) {
        unit(c) = 1.0;
        e.col(c) = element_patch(element, unit).ordinates();
        unit(c) = 0.0;
    }
    return e;
}

SplineFunction SplineSpace::assemble_function(const Eigen::VectorXd& dof_values) const
{
    if (dof_values.size() != dofs_.size()) throw Error("assemble_function: wrong number of DOF values");
    SplineFunction f = zero_spline(*mesh_, p_);
    parallel_for(mesh_->elements().size(), [&](std::size_t el) {
        const auto& ids = dofs_.element_dofs(static_cast<int>(el));
        Eigen::VectorXd local(ids.size());
        for (std::size_t i = 0; i < ids.size(); ++i) local(i) = dof_values(ids[i]);
        f.patches[el] = element_patch(static_cast<int>(el), local);
    });
    return f;
}

// ---------------------------------------------------------------------------
// Basis
// ---------------------------------------------------------------------------

Basis::Basis(std::shared_ptr<const SplineSpace> space) : space_(std::move(space))
{
    const int nel = static_cast<int>(space_->mesh().elements().size());
    extraction_.resize(nel);
    parallel_for(nel, [&](std::size_t el) { extraction_[el] = space_->extraction(static_cast<int>(el)); });
    support_.resize(space_->dofs().size());
    for (int el = 0; el < nel; ++el)
        for (const int i : space_->dofs().element_dofs(el)) support_[i].push_back(el);
}

SplineFunction Basis::function(int i) const
{
    SplineFunction f = zero_spline(space_->mesh(), space_->degree());
    for (const int el : support_[i]) {
        const auto& ids = space_->dofs().element_dofs(el);
        const auto pos = std::find(ids.begin(), ids.end(), i) - ids.begin();
        f.patches[el].ordinates() = extraction_[el].col(pos);
    }
    return f;
}

SplineFunction Basis::combine(const Eigen::VectorXd& coefficients) const
{
    if (coefficients.size() != size()) throw Error("Basis::combine: wrong number of coefficients");
    SplineFunction f = zero_spline(space_->mesh(), space_->degree());
    for (std::size_t el = 0; el < f.patches.size(); ++el) {
        const auto& ids = space_->dofs().element_dofs(static_cast<int>(el));
        Eigen::VectorXd local(ids.size());
        for (std::size_t i = 0; i < ids.size(); ++i) local(i) = coefficients(ids[i]);
        f.patches[el].ordinates() = extraction_[el] * local;
    }
    return f;
}

Basis build_basis(std::shared_ptr<const SplineSpace> space) { return Basis(std::move(space)); }

// ---------------------------------------------------------------------------
// Membership
// ---------------------------------------------------------------------------

MembershipReport check_membership(const SplineFunction& spline, const MixedMesh& mesh, int p)
{
    MembershipReport report;
    if (spline.degree != p || spline.patches.size() != mesh.elements().size())
        throw Error("check_membership: spline does not match mesh/degree");
    double scale = 0;
    for (const auto& patch : spline.patches) {
        if (patch.degree() != p) throw Error("check_membership: patch degree mismatch");
        if (patch.size()) scale = std::max(scale, patch.ordinates().cwiseAbs().maxCoeff());
    }
    if (scale == 0) return report;

    constexpr int samples = 33;
    Eigen::MatrixXd fit(samples, p);
    for (int s = 0; s < samples; ++s) fit.row(s) = bernstein_values<double>(p - 1, s / (samples - 1.0)).transpose();
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(fit);

    for (int e = 0; e < static_cast<int>(mesh.edges().size()); ++e) {
        const auto& ed = mesh.edges()[e];
        const Point& a = mesh.vertices()[ed.vertices[0]];
        const Point tangent = mesh.vertices()[ed.vertices[1]] - a;
        const double len = tangent.norm();
        const Point n = perp<double>(tangent) / len;
        const int sides = ed.boundary() ? 1 : 2;
        std::array<ElementFrame, 2> frames;
        std::array<GeometryMap<double>, 2> maps;
        for (int s = 0; s < sides; ++s) {
            frames[s] = element_frame(mesh, ed.elements[s], ed.local_edges[s]);
            maps[s] = element_map(mesh, ed.elements[s]);
        }
        for (int s = 0; s < sides; ++s) {
            Eigen::VectorXd normal(samples);
            for (int k = 0; k < samples; ++k) {
                const Point uv = frames[s].to_stored(0.0, k / (samples - 1.0));
                const auto jet = physical_derivatives(maps[s], spline.patches[ed.elements[s]], uv.x(), uv.y());
                normal(k) = n.dot(jet.gradient);
            }
            const Eigen::VectorXd coef = qr.solve(normal);
            const double res = (fit * coef - normal).cwiseAbs().maxCoeff() * len / scale;
            if (res > report.normal_fit) report.normal_fit = res;
        }
        if (sides < 2) continue;
        for (int k = 0; k < samples; ++k) {
            const double t = k / (samples - 1.0);
            const Point uv0 = frames[0].to_stored(0.0, t);
            const Point uv1 = frames[1].to_stored(0.0, t);
            const auto j0 = physical_derivatives(maps[0], spline.patches[ed.elements[0]], uv0.x(), uv0.y());
            const auto j1 = physical_derivatives(maps[1], spline.patches[ed.elements[1]], uv1.x(), uv1.y());
            const double dv = std::abs(j0.value - j1.value) / scale;
            const double dg = (j0.gradient - j1.gradient).cwiseAbs().maxCoeff() * len / scale;
            if (dv > report.value || dg > report.gradient) report.worst_edge = e;
            report.value = std::max(report.value, dv);
            report.gradient = std::max(report.gradient, dg);
        }
    }

    for (int v = 0; v < static_cast<int>(mesh.vertices().size()); ++v) {
        const auto& incident = mesh.vertex_elements(v);
        if (incident.size() < 2) continue;
        Eigen::Matrix2d reference = Eigen::Matrix2d::Zero();
        double len = 0;
        for (std::size_t i = 0; i < incident.size(); ++i) {
            const int el = incident[i];
            const auto& element = mesh.elements()[el];
            int k = 0;
            while (element.vertices[k] != v) ++k;
            static constexpr std::array<std::array<double, 2>, 4> tri{{{0, 0}, {1, 0}, {0, 1}, {0, 0}}};
            static constexpr std::array<std::array<double, 2>, 4> quad{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
            const auto& uv = element.kind == ElementKind::Triangle ? tri[k] : quad[k];
            const auto map = element_map(mesh, el);
            const auto jet = physical_derivatives(map, spline.patches[el], uv[0], uv[1]);
            if (i == 0) {
                reference = jet.hessian;
                len = map.diameter();
                continue;
            }
            const double dh = (jet.hessian - reference).cwiseAbs().maxCoeff() * len * len / scale;
            if (dh > report.hessian) {
                report.hessian = dh;
                report.worst_vertex = v;
            }
        }
    }
    return report;
}

} // namespace c1mixed
