#pragma once

#include "c1mixed/bernstein.hpp"
#include "c1mixed/geometry.hpp"
#include "c1mixed/mesh.hpp"

#include <Eigen/Dense>

#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace c1mixed {

// ---------------------------------------------------------------------------
// Degrees of freedom
// ---------------------------------------------------------------------------

/// Physical derivative d^a/dx^a d^b/dy^b at a vertex.
struct VertexDof {
    int vertex;
    int a, b;
};
/// Value at edge point R_l, l = 1..p-5.
struct EdgeValueDof {
    int edge;
    int index;
};
/// Unit-normal derivative at edge point S_l, l = 1..p-4.
struct EdgeNormalDof {
    int edge;
    int index;
};
/// Value at the image of the reference point (l/p, k/p).
struct InteriorDof {
    int element;
    int l, k;
};

using DofDescriptor = std::variant<VertexDof, EdgeValueDof, EdgeNormalDof, InteriorDof>;

std::string describe(const DofDescriptor& dof);

/// Order of the six vertex functionals: (0,0), (1,0), (0,1), (2,0), (1,1), (0,2).
inline constexpr std::array<std::array<int, 2>, 6> vertex_dof_orders{{{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}}};

struct DimensionBreakdown {
    long vertex = 0;
    long edge = 0;
    long quad_interior = 0;
    long triangle_interior = 0;
    long total() const { return vertex + edge + quad_interior + triangle_interior; }
};

/// Terms 6|V|, (2p-9)|E|, (p-3)^2|Q|, C(p-4,2)|T|. Throws for p < 5.
DimensionBreakdown dimension_breakdown(const MixedMesh& mesh, int p);
long dimension(const MixedMesh& mesh, int p);

int interior_dof_count(ElementKind kind, int p);

/// Reference grid indices (l, k) of the interior functionals, in DOF order.
std::vector<std::array<int, 2>> interior_grid(ElementKind kind, int p);

/// Global numbering: all vertex DOFs (6 per vertex), then per edge its p-5
/// value and p-4 normal DOFs, then interior DOFs element by element.
class DofMap {
public:
    DofMap(const MixedMesh& mesh, int p);

    int degree() const { return p_; }
    int size() const { return static_cast<int>(descriptors_.size()); }
    const DofDescriptor& descriptor(int i) const { return descriptors_[i]; }

    int vertex_offset(int v) const { return 6 * v; }
    int edge_value_offset(int e) const { return edge_offset_ + e * (2 * p_ - 9); }
    int edge_normal_offset(int e) const { return edge_value_offset(e) + (p_ - 5); }
    int interior_offset(int element) const { return interior_offsets_[element]; }

    /// Global indices of an element's DOFs in local order: 6 per local
    /// vertex, then per local edge its values and normals, then interior.
    const std::vector<int>& element_dofs(int element) const { return element_dofs_[element]; }

    /// True for DOFs fixed by Dirichlet data: all DOFs of boundary vertices
    /// and boundary edges.
    bool boundary_dof(int i) const { return boundary_[i]; }

private:
    int p_;
    int edge_offset_ = 0;
    std::vector<int> interior_offsets_;
    std::vector<DofDescriptor> descriptors_;
    std::vector<std::vector<int>> element_dofs_;
    std::vector<bool> boundary_;
};

// ---------------------------------------------------------------------------
// Interface coupling
// ---------------------------------------------------------------------------

/// Value trace c_0..c_p (degree p) and scaled normal-derivative trace
/// d_0..d_{p-1} (degree p-1) of an edge, over the canonical parameter running
/// from the lower to the higher vertex index. The physical normal derivative
/// along the edge is beta * sum_j d_j B^{p-1}_j.
struct EdgeTrace {
    Eigen::VectorXd c;
    Eigen::VectorXd d;
};

/// First two canonical ordinate rows of one element adjacent to the edge:
/// row0 has p+1 entries, row1 has p+1 (quad) or p (triangle) entries.
struct StripOrdinates {
    Eigen::VectorXd row0;
    Eigen::VectorXd row1;
};

StripOrdinates strip_ordinates(ElementKind kind, const SideGluing& glue, const EdgeTrace& trace);

struct InterfaceOrdinates {
    StripOrdinates first;
    StripOrdinates second;
};

/// Ordinate rows of both elements of an interface for a given trace.
InterfaceOrdinates interface_ordinates(const CanonicalInterface& iface, const GluingData& glue, const EdgeTrace& trace);

// ---------------------------------------------------------------------------
// Space
// ---------------------------------------------------------------------------

/// Piecewise polynomial function: one Bezier patch per element.
struct SplineFunction {
    int degree = 0;
    std::vector<BezierPatch<double>> patches;

    double evaluate(int element, double u, double v) const { return patches[element].evaluate(u, v); }
};

SplineFunction zero_spline(const MixedMesh& mesh, int p);

/// Edge point parameters along [0, 1]: r holds p-5 value points, s holds p-4
/// normal-derivative points.
struct EdgeParameters {
    std::vector<double> r;
    std::vector<double> s;
};

/// Equispaced candidates between 2/p and (p-2)/p, selected by parity of p.
EdgeParameters edge_point_parameters(int p);

/// Vertex C^2 data in physical coordinates, ordered like vertex_dof_orders.
using VertexJet = std::array<double, 6>;

/// Precomputed per-degree construction data for a mesh. Element patches are
/// linear in the local DOF values; `element_patch` applies that map.
class SplineSpace {
public:
    SplineSpace(std::shared_ptr<const MixedMesh> mesh, int p);

    const MixedMesh& mesh() const { return *mesh_; }
    std::shared_ptr<const MixedMesh> mesh_ptr() const { return mesh_; }
    int degree() const { return p_; }
    const DofMap& dofs() const { return dofs_; }
    const EdgeParameters& edge_parameters() const { return params_; }

    /// Trace of an edge from vertex data at its lower/higher vertex and the
    /// edge functionals (value samples at R, normal derivatives at S).
    EdgeTrace edge_trace(int edge, const VertexJet& lower, const VertexJet& higher, const Eigen::VectorXd& values,
                         const Eigen::VectorXd& normals) const;

    /// Patch of an element for its local DOF values (layout of
    /// DofMap::element_dofs).
    BezierPatch<double> element_patch(int element, const Eigen::VectorXd& local_values) const;

    /// Ordinates x local DOFs matrix of an element.
    Eigen::MatrixXd extraction(int element) const;

    /// Spline with the given global DOF values.
    SplineFunction assemble_function(const Eigen::VectorXd& dof_values) const;

    const GeometryMap<double>& map(int element) const { return maps_[element]; }
    const ElementFrame& frame(int element, int local_edge) const { return frames_[element][local_edge]; }
    Point edge_normal(int edge) const { return normals_[edge]; }

    /// Physical points of the edge functionals.
    Point edge_point(int edge, double t) const;
    /// Reference points (l/p, k/p) of the interior functionals.
    const std::vector<Point>& interior_points(ElementKind kind) const;

    /// Condition number of the reference interior collocation matrix.
    double interior_condition(ElementKind kind) const;

private:
    struct KindData {
        std::vector<int> interior_ordinates;
        std::vector<Point> points;
        Eigen::MatrixXd values_at_points; // points x all ordinates
        Eigen::MatrixXd interior_inverse; // interior ordinates x points
        double condition = 1;
    };
    const KindData& kind_data(ElementKind kind) const { return kind_[kind == ElementKind::Quad ? 1 : 0]; }

    std::shared_ptr<const MixedMesh> mesh_;
    int p_;
    DofMap dofs_;
    EdgeParameters params_;
    std::vector<GeometryMap<double>> maps_;
    std::vector<std::vector<ElementFrame>> frames_;
    std::vector<std::vector<SideGluing>> glue_;
    std::vector<Point> normals_;
    Eigen::MatrixXd theta_inverse_; // Hermite solve, degree p
    Eigen::MatrixXd omega_inverse_; // Hermite solve, degree p-1
    std::array<KindData, 2> kind_;
};

/// Cardinal basis: basis function i has DOF i equal to one and all others
/// zero. Stored through per-element extraction matrices.
class Basis {
public:
    explicit Basis(std::shared_ptr<const SplineSpace> space);

    const SplineSpace& space() const { return *space_; }
    int size() const { return space_->dofs().size(); }
    const Eigen::MatrixXd& extraction(int element) const { return extraction_[element]; }

    /// Elements where basis function i may be nonzero.
    const std::vector<int>& support(int i) const { return support_[i]; }

    SplineFunction function(int i) const;
    SplineFunction combine(const Eigen::VectorXd& coefficients) const;

private:
    std::shared_ptr<const SplineSpace> space_;
    std::vector<Eigen::MatrixXd> extraction_;
    std::vector<std::vector<int>> support_;
};

Basis build_basis(std::shared_ptr<const SplineSpace> space);

// ---------------------------------------------------------------------------
// Membership diagnostics
// ---------------------------------------------------------------------------

/// Largest smoothness defects of a spline. Value defects are relative to the
/// largest ordinate magnitude, gradient defects are scaled by the edge length
/// and Hessian defects by its square.
struct MembershipReport {
    double value = 0;
    double gradient = 0;
    double hessian = 0;
    double normal_fit = 0;
    int worst_edge = -1;
    int worst_vertex = -1;

    bool ok(double value_tol = 1e-9, double hessian_tol = 1e-8, double fit_tol = 1e-10) const
    {
        return value < value_tol && gradient < value_tol && hessian < hessian_tol && normal_fit < fit_tol;
    }
};

MembershipReport check_membership(const SplineFunction& spline, const MixedMesh& mesh, int p);

} // namespace c1mixed
