#pragma once

#include "c1mixed/bernstein.hpp"
#include "c1mixed/error.hpp"
#include "c1mixed/mesh.hpp"
#include "c1mixed/types.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <vector>

namespace c1mixed {

template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar>
using Mat2 = Eigen::Matrix<Scalar, 2, 2>;

/// Orthogonal vector (x, y)^perp = (y, -x).
template <typename Scalar>
Vec2<Scalar> perp(const Vec2<Scalar>& a)
{
    return Vec2<Scalar>(a.y(), -a.x());
}

/// det[a, b] with a and b as columns.
template <typename Scalar>
Scalar det2(const Vec2<Scalar>& a, const Vec2<Scalar>& b)
{
    return a.x() * b.y() - a.y() * b.x();
}

/// Linear (triangle) or bilinear (quad) element parametrisation.
///
///   linear    F(u,v) = (1-u-v) c0 + u c1 + v c2
///   bilinear  F(u,v) = (1-u)(1-v) c0 + u(1-v) c1 + uv c2 + (1-u)v c3
template <typename Scalar>
class GeometryMap {
public:
    GeometryMap() = default;

    static GeometryMap linear(const Vec2<Scalar>& c0, const Vec2<Scalar>& c1, const Vec2<Scalar>& c2)
    {
        GeometryMap m;
        m.kind_ = ElementKind::Triangle;
        m.corners_ = {c0, c1, c2, Vec2<Scalar>::Zero()};
        return m;
    }

    static GeometryMap bilinear(const Vec2<Scalar>& c0, const Vec2<Scalar>& c1, const Vec2<Scalar>& c2,
                                const Vec2<Scalar>& c3)
    {
        GeometryMap m;
        m.kind_ = ElementKind::Quad;
        m.corners_ = {c0, c1, c2, c3};
        return m;
    }

    ElementKind kind() const { return kind_; }
    const std::array<Vec2<Scalar>, 4>& corners() const { return corners_; }

    Vec2<Scalar> operator()(Scalar u, Scalar v) const
    {
        const auto& c = corners_;
        if (kind_ == ElementKind::Triangle) return (Scalar(1) - u - v) * c[0] + u * c[1] + v * c[2];
        return (Scalar(1) - u) * (Scalar(1) - v) * c[0] + u * (Scalar(1) - v) * c[1] + u * v * c[2] +
               (Scalar(1) - u) * v * c[3];
    }

    Vec2<Scalar> du(Scalar /*u*/, Scalar v) const
    {
        const auto& c = corners_;
        if (kind_ == ElementKind::Triangle) return c[1] - c[0];
        return (Scalar(1) - v) * (c[1] - c[0]) + v * (c[2] - c[3]);
    }

    Vec2<Scalar> dv(Scalar u, Scalar /*v*/) const
    {
        const auto& c = corners_;
        if (kind_ == ElementKind::Triangle) return c[2] - c[0];
        return (Scalar(1) - u) * (c[3] - c[0]) + u * (c[2] - c[1]);
    }

    /// d^2 F / du dv; zero for triangles and parallelograms.
    Vec2<Scalar> mixed_derivative() const
    {
        const auto& c = corners_;
        if (kind_ == ElementKind::Triangle) return Vec2<Scalar>::Zero();
        return c[0] - c[1] + c[2] - c[3];
    }

    Mat2<Scalar> jacobian_matrix(Scalar u, Scalar v) const
    {
        Mat2<Scalar> j;
        j.col(0) = du(u, v);
        j.col(1) = dv(u, v);
        return j;
    }

    /// Characteristic length (longest corner distance).
    Scalar diameter() const
    {
        const int n = kind_ == ElementKind::Triangle ? 3 : 4;
        Scalar d = Scalar(0);
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b) d = std::max<Scalar>(d, (corners_[a] - corners_[b]).norm());
        return d;
    }

private:
    ElementKind kind_ = ElementKind::Triangle;
    std::array<Vec2<Scalar>, 4> corners_{};
};

template <typename Scalar>
struct Jacobian {
    Mat2<Scalar> matrix;
    Scalar det;
    Mat2<Scalar> inverse;
};

/// Analytic Jacobian of the map; throws GeometryError when singular.
template <typename Scalar>
Jacobian<Scalar> jacobian(const GeometryMap<Scalar>& map, Scalar u, Scalar v)
{
    Jacobian<Scalar> j;
    j.matrix = map.jacobian_matrix(u, v);
    j.det = j.matrix.determinant();
    const Scalar d = map.diameter();
    using std::abs;
    if (!(abs(j.det) > Scalar(1e-14) * d * d)) throw GeometryError("singular Jacobian");
    j.inverse << j.matrix(1, 1), -j.matrix(0, 1), -j.matrix(1, 0), j.matrix(0, 0);
    j.inverse /= j.det;
    return j;
}

/// Hessians of both coordinate functions F_1, F_2 (constant for (bi)linear maps).
template <typename Scalar>
std::array<Mat2<Scalar>, 2> second_derivatives(const GeometryMap<Scalar>& map)
{
    const Vec2<Scalar> m = map.mixed_derivative();
    std::array<Mat2<Scalar>, 2> h;
    for (int c = 0; c < 2; ++c) h[c] << Scalar(0), m(c), m(c), Scalar(0);
    return h;
}

/// Physical gradient of phi = f o F^{-1} at F(u, v), expressed through the
/// parametric derivatives of f and the orthogonal vectors of the map columns.
template <typename Scalar>
Vec2<Scalar> directional_derivative_field(const GeometryMap<Scalar>& map, const BezierPatch<Scalar>& patch, Scalar u,
                                          Scalar v)
{
    const auto j = jacobian(map, u, v);
    const auto jet = evaluate_jet(patch, u, v);
    return (jet.du * perp<Scalar>(map.dv(u, v)) - jet.dv * perp<Scalar>(map.du(u, v))) / j.det;
}

/// Newton inversion of the map: returns (u, v) with F(u, v) = x.
template <typename Scalar>
Vec2<Scalar> invert(const GeometryMap<Scalar>& map, const Vec2<Scalar>& x, Scalar tol = Scalar(1e-12),
                    int max_iterations = 50)
{
    Vec2<Scalar> uv = map.kind() == ElementKind::Triangle ? Vec2<Scalar>(Scalar(1) / 3, Scalar(1) / 3)
                                                          : Vec2<Scalar>(Scalar(0.5), Scalar(0.5));
    const Scalar scale = std::max<Scalar>(map.diameter(), Scalar(1e-300));
    for (int it = 0; it < max_iterations; ++it) {
        const Vec2<Scalar> r = map(uv.x(), uv.y()) - x;
        if (r.norm() <= tol * scale) return uv;
        uv -= map.jacobian_matrix(uv.x(), uv.y()).partialPivLu().solve(r);
    }
    const Vec2<Scalar> r = map(uv.x(), uv.y()) - x;
    if (r.norm() <= Scalar(1e3) * tol * scale) return uv;
    throw GeometryError("map inversion did not converge");
}

// ---------------------------------------------------------------------------
// Mesh-level geometry
// ---------------------------------------------------------------------------

GeometryMap<double> element_map(const MixedMesh& mesh, int element);

/// View of an element in the local frame of one of its edges: in canonical
/// coordinates (u', v') the edge is u' = 0 and v' runs from the lower-index
/// edge vertex to the higher one, u' pointing into the element.
///
/// The canonical-to-stored parameter change is an affine symmetry of the
/// reference element, so it permutes Bernstein ordinates.
struct ElementFrame {
    int element = -1;
    int local_edge = -1;
    ElementKind kind = ElementKind::Triangle;
    std::array<int, 2> origin{};  ///< stored parameter corner of F'(0, 0)
    std::array<int, 2> along{};   ///< stored parameter step for v'
    std::array<int, 2> inward{};  ///< stored parameter step for u'
    GeometryMap<double> map;      ///< canonical map F' = F o T

    /// Stored parameters of canonical (u', v').
    Point to_stored(double u, double v) const;

    /// Stored flat ordinate index of canonical ordinate (i', j').
    int stored_index(int p, int i, int j) const;

    /// Table: canonical flat index -> stored flat index, for degree p.
    std::vector<int> permutation(int p) const;
};

ElementFrame element_frame(const MixedMesh& mesh, int element, int local_edge);

/// Gluing coefficients of one side of an edge: alpha_l(v) = det J_F'(0, v)
/// and beta_l(v) = <n, (d_u F'(0, v))^perp> / beta, both linear, stored as
/// their values at v = 0 and v = 1 (= Bernstein coefficients).
struct SideGluing {
    std::array<double, 2> alpha{};
    std::array<double, 2> beta{};
};

SideGluing side_gluing(const ElementFrame& frame);

enum class InterfaceCase { QuadTriangle, TriangleTriangle, QuadQuad };

const char* to_string(InterfaceCase c);

/// Interior edge with roles assigned: `first` plays Omega^(1), `second`
/// Omega^(2). A quad takes the first role in mixed pairs, otherwise the lower
/// element index does.
struct CanonicalInterface {
    int edge = -1;
    InterfaceCase kind = InterfaceCase::TriangleTriangle;
    ElementFrame first;
    ElementFrame second;
};

/// Throws GeometryError for boundary edges or when the two canonical maps do
/// not coincide along the edge.
CanonicalInterface canonical_interface(const MixedMesh& mesh, int edge);

/// Interface gluing functions in Bernstein form over the canonical edge
/// parameter: alpha1, alpha2, beta1, beta2 of degree 1, alpha3 of degree 2.
struct GluingData {
    UnivariateBernstein<double> alpha1, alpha2, alpha3;
    double beta = 0;
    UnivariateBernstein<double> beta1, beta2;
};

GluingData gluing_data(const CanonicalInterface& iface);

/// Residual of alpha1 d_uF2 + alpha2 d_uF1 = -alpha3 d_vF at edge parameter v
/// (d_vF is shared by both maps along the edge); zero for any admissible pair.
Point gluing_identity_residual(const GeometryMap<double>& first, const GeometryMap<double>& second, double v);

} // namespace c1mixed
