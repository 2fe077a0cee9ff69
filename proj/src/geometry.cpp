#include "c1mixed/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace c1mixed {

namespace {

// Reference-parameter corner of local vertex k.
std::array<int, 2> parameter_corner(ElementKind kind, int k)
{
    if (kind == ElementKind::Triangle) {
        static constexpr std::array<std::array<int, 2>, 3> tri{{{0, 0}, {1, 0}, {0, 1}}};
        return tri[k];
    }
    static constexpr std::array<std::array<int, 2>, 4> quad{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
    return quad[k];
}

int local_vertex_of(const Element& el, int global)
{
    for (int k = 0; k < el.vertex_count(); ++k)
        if (el.vertices[k] == global) return k;
    return -1;
}

} // namespace

GeometryMap<double> element_map(const MixedMesh& mesh, int element)
{
    const auto& el = mesh.elements().at(element);
    if (el.kind == ElementKind::Triangle)
        return GeometryMap<double>::linear(mesh.vertex(element, 0), mesh.vertex(element, 1), mesh.vertex(element, 2));
    return GeometryMap<double>::bilinear(mesh.vertex(element, 0), mesh.vertex(element, 1), mesh.vertex(element, 2),
                                         mesh.vertex(element, 3));
}

Point ElementFrame::to_stored(double u, double v) const
{
    return Point(origin[0] + v * along[0] + u * inward[0], origin[1] + v * along[1] + u * inward[1]);
}

int ElementFrame::stored_index(int p, int i, int j) const
{
    const int si = p * origin[0] + j * along[0] + i * inward[0];
    const int sj = p * origin[1] + j * along[1] + i * inward[1];
    return kind == ElementKind::Triangle ? triangle_index(p, si, sj) : tensor_index(p, si, sj);
}

std::vector<int> ElementFrame::permutation(int p) const
{
    std::vector<int> table(ordinate_count(kind, p));
    for (int idx = 0; idx < static_cast<int>(table.size()); ++idx) {
        const auto [i, j] = ordinate_multi_index(kind, p, idx);
        table[idx] = stored_index(p, i, j);
    }
    return table;
}

ElementFrame element_frame(const MixedMesh& mesh, int element, int local_edge)
{
    const auto& el = mesh.elements().at(element);
    const int n = el.vertex_count();
    if (local_edge < 0 || local_edge >= n) throw Error("element_frame: local edge out of range");
    const auto& edge = mesh.edges()[el.edges[local_edge]];
    const int la = local_vertex_of(el, edge.vertices[0]);
    const int lb = local_vertex_of(el, edge.vertices[1]);
    // Neighbour of la that is not lb: the apex for triangles.
    const int prev = (la + n - 1) % n;
    const int next = (la + 1) % n;
    const int ld = prev == lb ? next : prev;

    ElementFrame f;
    f.element = element;
    f.local_edge = local_edge;
    f.kind = el.kind;
    const auto pa = parameter_corner(el.kind, la);
    const auto pb = parameter_corner(el.kind, lb);
    const auto pd = parameter_corner(el.kind, ld);
    f.origin = pa;
    f.along = {pb[0] - pa[0], pb[1] - pa[1]};
    f.inward = {pd[0] - pa[0], pd[1] - pa[1]};

    const Point a = mesh.vertex(element, la);
    const Point b = mesh.vertex(element, lb);
    const Point d = mesh.vertex(element, ld);
    if (el.kind == ElementKind::Triangle) {
        f.map = GeometryMap<double>::linear(a, d, b);
    } else {
        const Point c = mesh.vertex(element, (la + 2) % 4);
        f.map = GeometryMap<double>::bilinear(a, d, c, b);
    }
    return f;
}

SideGluing side_gluing(const ElementFrame& frame)
{
    const auto& c = frame.map.corners();
    SideGluing g;
    const Point e = c[frame.kind == ElementKind::Triangle ? 2 : 3] - c[0];
    const double e2 = e.squaredNorm();
    if (!(e2 > 0)) throw GeometryError("zero-length edge");
    Point du0, du1;
    if (frame.kind == ElementKind::Triangle) {
        du0 = du1 = c[1] - c[0];
    } else {
        du0 = c[1] - c[0];
        du1 = c[2] - c[3];
    }
    g.alpha = {det2<double>(du0, e), det2<double>(du1, e)};
    g.beta = {e.dot(du0) / e2, e.dot(du1) / e2};
    return g;
}

const char* to_string(InterfaceCase c)
{
    switch (c) {
    case InterfaceCase::QuadTriangle: return "quad-triangle";
    case InterfaceCase::TriangleTriangle: return "triangle-triangle";
    case InterfaceCase::QuadQuad: return "quad-quad";
    }
    return "?";
}

CanonicalInterface canonical_interface(const MixedMesh& mesh, int edge)
{
    const auto& ed = mesh.edges().at(edge);
    if (ed.boundary()) throw GeometryError("canonical_interface: edge " + std::to_string(edge) + " is on the boundary");
    int s0 = 0;
    int s1 = 1;
    const auto kind0 = mesh.elements()[ed.elements[0]].kind;
    const auto kind1 = mesh.elements()[ed.elements[1]].kind;
    if (kind0 != kind1) {
        if (kind1 == ElementKind::Quad) std::swap(s0, s1);
    } else if (ed.elements[1] < ed.elements[0]) {
        std::swap(s0, s1);
    }

    CanonicalInterface iface;
    iface.edge = edge;
    if (kind0 != kind1)
        iface.kind = InterfaceCase::QuadTriangle;
    else
        iface.kind = kind0 == ElementKind::Quad ? InterfaceCase::QuadQuad : InterfaceCase::TriangleTriangle;
    iface.first = element_frame(mesh, ed.elements[s0], ed.local_edges[s0]);
    iface.second = element_frame(mesh, ed.elements[s1], ed.local_edges[s1]);

    const double scale = (mesh.vertices()[ed.vertices[1]] - mesh.vertices()[ed.vertices[0]]).norm();
    for (int s = 0; s <= 8; ++s) {
        const double v = s / 8.0;
        const double gap = (iface.first.map(0.0, v) - iface.second.map(0.0, v)).norm();
        if (gap > 1e-13 * std::max(1.0, scale))
            throw GeometryError("canonical_interface: maps disagree along edge " + std::to_string(edge));
    }
    return iface;
}

GluingData gluing_data(const CanonicalInterface& iface)
{
    const auto g1 = side_gluing(iface.first);
    const auto g2 = side_gluing(iface.second);
    GluingData g;
    g.alpha1 = UnivariateBernstein<double>(Eigen::Vector2d(g1.alpha[0], g1.alpha[1]));
    g.alpha2 = UnivariateBernstein<double>(Eigen::Vector2d(g2.alpha[0], g2.alpha[1]));
    g.beta1 = UnivariateBernstein<double>(Eigen::Vector2d(g1.beta[0], g1.beta[1]));
    g.beta2 = UnivariateBernstein<double>(Eigen::Vector2d(g2.beta[0], g2.beta[1]));

    const auto& c1 = iface.first.map;
    const auto& c2 = iface.second.map;
    g.beta = (c1(0.0, 1.0) - c1(0.0, 0.0)).norm();
    if (!(g.beta > 0)) throw GeometryError("zero-length edge");

    // alpha3(v) = det[d_u F2(0, v), d_u F1(0, v)], product of two linear vectors.
    const Point a0 = c2.du(0.0, 0.0), a1 = c2.du(0.0, 1.0);
    const Point b0 = c1.du(0.0, 0.0), b1 = c1.du(0.0, 1.0);
    Eigen::Vector3d a3;
    a3 << det2<double>(a0, b0), 0.5 * (det2<double>(a0, b1) + det2<double>(a1, b0)), det2<double>(a1, b1);
    g.alpha3 = UnivariateBernstein<double>(a3);
    return g;
}

Point gluing_identity_residual(const GeometryMap<double>& first, const GeometryMap<double>& second, double v)
{
    const double det1 = first.jacobian_matrix(0.0, v).determinant();
    const double det2v = second.jacobian_matrix(0.0, v).determinant();
    const Point du1 = first.du(0.0, v);
    const Point du2 = second.du(0.0, v);
    const Point dv = first.dv(0.0, v);
    return det2v * perp<double>(du1) - det1 * perp<double>(du2) - det2<double>(du2, du1) * perp<double>(dv);
}

} // namespace c1mixed
