#pragma once

#include "c1mixed/types.hpp"

#include <array>
#include <cstddef>
#include <vector>

namespace c1mixed {

/// Mesh edge. Endpoints are stored with the lower vertex index first; that
/// order also fixes the edge orientation used by all continuity formulas.
struct Edge {
    std::array<int, 2> vertices{-1, -1};
    std::array<int, 2> elements{-1, -1};    ///< second entry is -1 on the boundary
    std::array<int, 2> local_edges{-1, -1}; ///< local edge slot inside each element

    bool boundary() const { return elements[1] < 0; }
};

/// Triangle or quadrilateral, vertices counterclockwise. Local edge k joins
/// local vertices k and k+1 (mod vertex count).
///
/// Reference parametrisations:
///   triangle  F(u,v) = (1-u-v) V0 + u V1 + v V2
///   quad      F(u,v) = (1-u)(1-v) V0 + u(1-v) V1 + uv V2 + (1-u)v V3
struct Element {
    ElementKind kind = ElementKind::Triangle;
    std::array<int, 4> vertices{-1, -1, -1, -1};
    std::array<int, 4> edges{-1, -1, -1, -1};

    int vertex_count() const { return kind == ElementKind::Triangle ? 3 : 4; }
};

/// Validated mixed triangle/quadrilateral mesh. Immutable after construction.
///
/// Element indices list all triangles first (in input order), then all quads.
/// Edges are derived from the element vertex lists and sorted by their
/// (lower, higher) vertex pair.
class MixedMesh {
public:
    MixedMesh(std::vector<Point> vertices,
              std::vector<std::array<int, 3>> triangles,
              std::vector<std::array<int, 4>> quads);

    const std::vector<Point>& vertices() const { return vertices_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<Element>& elements() const { return elements_; }

    std::size_t triangle_count() const { return triangle_count_; }
    std::size_t quad_count() const { return elements_.size() - triangle_count_; }

    /// Index of the edge joining a and b, or -1.
    int find_edge(int a, int b) const;

    /// Elements incident to vertex v, ascending.
    const std::vector<int>& vertex_elements(int v) const { return vertex_elements_[v]; }
    bool boundary_vertex(int v) const { return boundary_vertex_[v]; }

    Point vertex(int element, int local) const { return vertices_[elements_[element].vertices[local]]; }
    double element_area(int element) const;
    double area() const;

    std::vector<std::array<int, 3>> triangles() const;
    std::vector<std::array<int, 4>> quads() const;

private:
    void build_edges();
    void validate() const;

    std::vector<Point> vertices_;
    std::vector<Edge> edges_;
    std::vector<Element> elements_;
    std::size_t triangle_count_ = 0;
    std::vector<std::vector<int>> vertex_elements_;
    std::vector<bool> boundary_vertex_;
};

/// Uniform 4-split: triangles through edge midpoints, quads through the
/// bilinear images of the parameter midpoints and the centre.
MixedMesh refine(const MixedMesh& mesh);

/// Smallest angle over all triangles and over the triangles of both diagonal
/// splits of every quad (radians).
double shape_regularity(const MixedMesh& mesh);

/// Shape-regularity angle of a single element.
double element_shape_regularity(const MixedMesh& mesh, int element);

double longest_edge(const MixedMesh& mesh);

} // namespace c1mixed
