#include "c1mixed/mesh.hpp"

#include "c1mixed/error.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <utility>

namespace c1mixed {
namespace {

double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

// Jacobian determinant of the bilinear quad map at (u, v).
double quad_det(const std::array<Point, 4>& w, double u, double v)
{
    const Point du = (1 - v) * (w[1] - w[0]) + v * (w[2] - w[3]);
    const Point dv = (1 - u) * (w[3] - w[0]) + u * (w[2] - w[1]);
    return cross(du, dv);
}

double min_triangle_angle(const Point& a, const Point& b, const Point& c)
{
    const std::array<Point, 3> p{a, b, c};
    if (std::abs(cross(b - a, c - a)) <= 1e-300) throw GeometryError("degenerate element (zero area)");
    double best = std::numbers::pi;
    for (int k = 0; k < 3; ++k) {
        const Point e1 = p[(k + 1) % 3] - p[k];
        const Point e2 = p[(k + 2) % 3] - p[k];
        best = std::min(best, std::atan2(std::abs(cross(e1, e2)), e1.dot(e2)));
    }
    return best;
}

std::string element_label(int e) { return "element " + std::to_string(e); }

} // namespace

MixedMesh::MixedMesh(std::vector<Point> vertices,
                     std::vector<std::array<int, 3>> triangles,
                     std::vector<std::array<int, 4>> quads)
    : vertices_(std::move(vertices))
{
    triangle_count_ = triangles.size();
    elements_.reserve(triangles.size() + quads.size());
    for (const auto& t : triangles) {
        Element el;
        el.kind = ElementKind::Triangle;
        std::copy(t.begin(), t.end(), el.vertices.begin());
        elements_.push_back(el);
    }
    for (const auto& q : quads) {
        Element el;
        el.kind = ElementKind::Quad;
        el.vertices = q;
        elements_.push_back(el);
    }
    if (elements_.empty()) throw MeshError("mesh has no elements");

    const int nv = static_cast<int>(vertices_.size());
    for (std::size_t e = 0; e < elements_.size(); ++e) {
        const auto& el = elements_[e];
        for (int k = 0; k < el.vertex_count(); ++k) {
            const int v = el.vertices[k];
            if (v < 0 || v >= nv)
                throw MeshError(element_label(static_cast<int>(e)) + ": vertex index out of range");
            for (int m = 0; m < k; ++m)
                if (el.vertices[m] == v)
                    throw MeshError(element_label(static_cast<int>(e)) + ": repeated vertex");
        }
    }

    build_edges();
    validate();
}

void MixedMesh::build_edges()
{
    struct Incidence {
        int element;
        int local;
        bool forward; // traversed lower -> higher
    };
    std::map<std::pair<int, int>, std::vector<Incidence>> incidence;
    for (std::size_t e = 0; e < elements_.size(); ++e) {
        const auto& el = elements_[e];
        const int n = el.vertex_count();
        for (int k = 0; k < n; ++k) {
            const int a = el.vertices[k];
            const int b = el.vertices[(k + 1) % n];
            incidence[{std::min(a, b), std::max(a, b)}].push_back({static_cast<int>(e), k, a < b});
        }
    }

    edges_.clear();
    edges_.reserve(incidence.size());
    for (const auto& [key, list] : incidence) {
        if (list.size() > 2)
            throw MeshError("edge (" + std::to_string(key.first) + "," + std::to_string(key.second) +
                            ") shared by more than two elements");
        if (list.size() == 2 && list[0].forward == list[1].forward)
            throw MeshError("inconsistent orientation across edge (" + std::to_string(key.first) + "," +
                            std::to_string(key.second) + ")");
        Edge edge;
        edge.vertices = {key.first, key.second};
        for (std::size_t s = 0; s < list.size(); ++s) {
            edge.elements[s] = list[s].element;
            edge.local_edges[s] = list[s].local;
        }
        const int index = static_cast<int>(edges_.size());
        for (const auto& inc : list) elements_[inc.element].edges[inc.local] = index;
        edges_.push_back(edge);
    }

    vertex_elements_.assign(vertices_.size(), {});
    for (std::size_t e = 0; e < elements_.size(); ++e)
        for (int k = 0; k < elements_[e].vertex_count(); ++k)
            vertex_elements_[elements_[e].vertices[k]].push_back(static_cast<int>(e));

    boundary_vertex_.assign(vertices_.size(), false);
    for (const auto& edge : edges_)
        if (edge.boundary()) boundary_vertex_[edge.vertices[0]] = boundary_vertex_[edge.vertices[1]] = true;
}

void MixedMesh::validate() const
{
    Eigen::AlignedBox2d box;
    for (const auto& v : vertices_) {
        if (!v.allFinite()) throw MeshError("non-finite vertex coordinate");
        box.extend(v);
    }
    const double scale = std::max(box.diagonal().norm(), 1e-300);
    const double tol = 1e-12 * scale;

    for (std::size_t v = 0; v < vertices_.size(); ++v)
        if (vertex_elements_[v].empty())
            throw MeshError("vertex " + std::to_string(v) + " is not used by any element");

    // O(n log n) duplicate search over x-sorted vertices.
    std::vector<int> order(vertices_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return vertices_[a].x() < vertices_[b].x(); });
    for (std::size_t i = 0; i < order.size(); ++i)
        for (std::size_t j = i + 1; j < order.size() && vertices_[order[j]].x() - vertices_[order[i]].x() <= tol; ++j)
            if ((vertices_[order[i]] - vertices_[order[j]]).norm() <= tol)
                throw MeshError("duplicate vertices " + std::to_string(order[i]) + " and " + std::to_string(order[j]));

    for (std::size_t e = 0; e < elements_.size(); ++e) {
        const auto& el = elements_[e];
        if (el.kind == ElementKind::Triangle) {
            const double a = cross(vertex(e, 1) - vertex(e, 0), vertex(e, 2) - vertex(e, 0));
            if (a <= 0) throw MeshError(element_label(e) + ": inconsistent orientation (not counterclockwise)");
        } else {
            const std::array<Point, 4> w{vertex(e, 0), vertex(e, 1), vertex(e, 2), vertex(e, 3)};
            const std::array<double, 4> d{quad_det(w, 0, 0), quad_det(w, 1, 0), quad_det(w, 1, 1), quad_det(w, 0, 1)};
            const bool all_neg = std::all_of(d.begin(), d.end(), [](double x) { return x < 0; });
            if (all_neg) throw MeshError(element_label(e) + ": inconsistent orientation (not counterclockwise)");
            if (std::any_of(d.begin(), d.end(), [](double x) { return x <= 0; }))
                throw MeshError(element_label(e) + ": irregular (non-convex) quadrilateral");
        }
        if (element_shape_regularity(*this, static_cast<int>(e)) <= 1e-6)
            throw MeshError(element_label(e) + ": shape-regularity angle below 1e-6 rad");
    }

    // A vertex strictly inside a boundary edge is a T-junction.
    for (const auto& edge : edges_) {
        if (!edge.boundary()) continue;
        const Point a = vertices_[edge.vertices[0]];
        const Point d = vertices_[edge.vertices[1]] - a;
        const double len2 = d.squaredNorm();
        for (std::size_t v = 0; v < vertices_.size(); ++v) {
            if (static_cast<int>(v) == edge.vertices[0] || static_cast<int>(v) == edge.vertices[1]) continue;
            const Point r = vertices_[v] - a;
            const double t = r.dot(d) / len2;
            if (t <= 1e-12 || t >= 1 - 1e-12) continue;
            if (std::abs(cross(d, r)) <= tol * std::sqrt(len2))
                throw MeshError("hanging vertex " + std::to_string(v) + " on edge (" +
                                std::to_string(edge.vertices[0]) + "," + std::to_string(edge.vertices[1]) + ")");
        }
    }
}

int MixedMesh::find_edge(int a, int b) const
{
    const std::array<int, 2> key{std::min(a, b), std::max(a, b)};
    const auto it = std::lower_bound(edges_.begin(), edges_.end(), key,
                                     [](const Edge& e, const std::array<int, 2>& k) { return e.vertices < k; });
    if (it == edges_.end() || it->vertices != key) return -1;
    return static_cast<int>(it - edges_.begin());
}

double MixedMesh::element_area(int element) const
{
    const auto& el = elements_[element];
    const int n = el.vertex_count();
    double twice = 0;
    for (int k = 0; k < n; ++k) twice += cross(vertex(element, k), vertex(element, (k + 1) % n));
    return 0.5 * twice;
}

double MixedMesh::area() const
{
    double total = 0;
    for (std::size_t e = 0; e < elements_.size(); ++e) total += element_area(static_cast<int>(e));
    return total;
}

std::vector<std::array<int, 3>> MixedMesh::triangles() const
{
    std::vector<std::array<int, 3>> out;
    for (const auto& el : elements_)
        if (el.kind == ElementKind::Triangle) out.push_back({el.vertices[0], el.vertices[1], el.vertices[2]});
    return out;
}

std::vector<std::array<int, 4>> MixedMesh::quads() const
{
    std::vector<std::array<int, 4>> out;
    for (const auto& el : elements_)
        if (el.kind == ElementKind::Quad) out.push_back(el.vertices);
    return out;
}

MixedMesh refine(const MixedMesh& mesh)
{
    std::vector<Point> vertices = mesh.vertices();
    const int nv = static_cast<int>(vertices.size());
    const auto& edges = mesh.edges();

    // Edge midpoints first (edge order), then quad centres (element order).
    // Straight edges make the bilinear image of a parameter midpoint equal
    // to the edge midpoint.
    for (const auto& e : edges) vertices.push_back(0.5 * (vertices[e.vertices[0]] + vertices[e.vertices[1]]));
    std::vector<int> centre(mesh.elements().size(), -1);
    for (std::size_t e = 0; e < mesh.elements().size(); ++e) {
        const auto& el = mesh.elements()[e];
        if (el.kind != ElementKind::Quad) continue;
        centre[e] = static_cast<int>(vertices.size());
        Point c = Point::Zero();
        for (int k = 0; k < 4; ++k) c += 0.25 * mesh.vertex(static_cast<int>(e), k);
        vertices.push_back(c);
    }

    std::vector<std::array<int, 3>> triangles;
    std::vector<std::array<int, 4>> quads;
    for (std::size_t e = 0; e < mesh.elements().size(); ++e) {
        const auto& el = mesh.elements()[e];
        const int n = el.vertex_count();
        std::array<int, 4> mid{};
        for (int k = 0; k < n; ++k) mid[k] = nv + el.edges[k];
        const auto& v = el.vertices;
        if (el.kind == ElementKind::Triangle) {
            triangles.push_back({v[0], mid[0], mid[2]});
            triangles.push_back({mid[0], v[1], mid[1]});
            triangles.push_back({mid[2], mid[1], v[2]});
            triangles.push_back({mid[0], mid[1], mid[2]});
        } else {
            const int c = centre[e];
            quads.push_back({v[0], mid[0], c, mid[3]});
            quads.push_back({mid[0], v[1], mid[1], c});
            quads.push_back({c, mid[1], v[2], mid[2]});
            quads.push_back({mid[3], c, mid[2], v[3]});
        }
    }
    return MixedMesh(std::move(vertices), std::move(triangles), std::move(quads));
}

double element_shape_regularity(const MixedMesh& mesh, int element)
{
    const auto& el = mesh.elements()[element];
    auto p = [&](int k) { return mesh.vertex(element, k); };
    if (el.kind == ElementKind::Triangle) return min_triangle_angle(p(0), p(1), p(2));
    return std::min({min_triangle_angle(p(0), p(1), p(2)), min_triangle_angle(p(0), p(2), p(3)),
                     min_triangle_angle(p(0), p(1), p(3)), min_triangle_angle(p(1), p(2), p(3))});
}

double shape_regularity(const MixedMesh& mesh)
{
    double rho = std::numbers::pi;
    for (std::size_t e = 0; e < mesh.elements().size(); ++e)
        rho = std::min(rho, element_shape_regularity(mesh, static_cast<int>(e)));
    return rho;
}

double longest_edge(const MixedMesh& mesh)
{
    double h = 0;
    for (const auto& e : mesh.edges())
        h = std::max(h, (mesh.vertices()[e.vertices[1]] - mesh.vertices()[e.vertices[0]]).norm());
    return h;
}

} // namespace c1mixed
