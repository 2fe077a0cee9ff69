#pragma once

#include "c1mixed/bernstein.hpp"
#include "c1mixed/functions.hpp"
#include "c1mixed/geometry.hpp"
#include "c1mixed/space.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <functional>
#include <utility>
#include <vector>

namespace c1mixed {

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

/// Gauss-Legendre nodes and weights on [0, 1].
std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_legendre(int n);

/// Points and weights on a reference element. Quads use the tensor rule,
/// triangles the collapsed rule (u, v) = (x, (1 - x) y) with weight (1 - x).
/// Quads integrate degree 2n - 1 per direction exactly, triangles total
/// degree 2n - 2.
struct QuadratureRule {
    std::vector<Point> points;
    std::vector<double> weights;
    int exactness = 0;
};

QuadratureRule quadrature(ElementKind kind, int n);

// ---------------------------------------------------------------------------
// Physical derivatives
// ---------------------------------------------------------------------------

template <typename Scalar>
struct PhysicalJet {
    Scalar value{};
    Vec2<Scalar> gradient = Vec2<Scalar>::Zero();
    Mat2<Scalar> hessian = Mat2<Scalar>::Zero();
};

/// Value, gradient and Hessian of phi = f o F^{-1} from the parametric jet of
/// f: grad = J^{-T} (f_u, f_v) and Hess = J^{-T} (H_f - sum_c g_c H_{F_c}) J^{-1}.
template <typename Scalar>
PhysicalJet<Scalar> physical_derivatives(const GeometryMap<Scalar>& map, const PatchJet<Scalar>& f, Scalar u, Scalar v)
{
    const auto j = jacobian(map, u, v);
    const Mat2<Scalar> jit = j.inverse.transpose();
    PhysicalJet<Scalar> out;
    out.value = f.value;
    out.gradient = jit * Vec2<Scalar>(f.du, f.dv);
    const auto hf = second_derivatives(map);
    Mat2<Scalar> h;
    h << f.duu, f.duv, f.duv, f.dvv;
    h -= out.gradient(0) * hf[0] + out.gradient(1) * hf[1];
    out.hessian = jit * h * j.inverse;
    return out;
}

template <typename Scalar>
PhysicalJet<Scalar> physical_derivatives(const GeometryMap<Scalar>& map, const BezierPatch<Scalar>& patch, Scalar u,
                                         Scalar v)
{
    return physical_derivatives(map, evaluate_jet(patch, u, v), u, v);
}

// ---------------------------------------------------------------------------
// Galerkin systems
// ---------------------------------------------------------------------------

using SparseMatrix = Eigen::SparseMatrix<double>;

struct LinearSystem {
    SparseMatrix matrix;
    Eigen::VectorXd rhs;
};

/// Quadrature points per direction used for element matrices (p + 2 unless
/// overridden).
int default_quadrature_points(int p);

/// M_ab = int phi_a phi_b.
SparseMatrix assemble_mass(const Basis& basis, int points = 0);

/// B_ab = int lap(phi_a) lap(phi_b).
SparseMatrix assemble_bilaplacian(const Basis& basis, int points = 0);

/// (int f phi_a)_a.
Eigen::VectorXd assemble_load(const Basis& basis, const std::function<double(const Point&)>& f, int points = 0);

struct FitResult {
    SplineFunction function;
    Eigen::VectorXd coefficients;
};

/// Least-squares fit in L2: solves M c = (int f phi_a)_a.
FitResult l2_fit(const Oracle& f, const Basis& basis);

struct BiharmonicResult {
    SplineFunction function;
    Eigen::VectorXd coefficients;
    /// Unknowns of the reduced system: interior DOFs plus released Hessian directions.
    int free_dofs = 0;
    /// Boundary vertices whose normal-normal Hessian component was left free.
    int released_hessians = 0;
    /// |u^T B u - u^T (l - B~ u~)| / max(1, |u^T B u|) over the reduced unknowns.
    double energy_residual = 0;
};

/// Treatment of the vertex Hessian at boundary vertices whose incident
/// boundary edges are collinear. The clamped data u and du/dn fix t^T H t and
/// t^T H n there but leave n^T H n undetermined.
enum class BoundaryHessian {
    /// n^T H n stays an unknown of the Galerkin system.
    ReleaseNormal,
    /// All six vertex DOFs interpolate the exact solution.
    Interpolate,
};

/// Solves lap^2 u = load with u and its normal derivative prescribed on the
/// boundary by `exact`. Boundary DOFs interpolate its data except for the
/// directions released according to `hessian`.
BiharmonicResult solve_biharmonic(const std::function<double(const Point&)>& load, const Oracle& exact,
                                  const Basis& basis, BoundaryHessian hessian = BoundaryHessian::ReleaseNormal);

/// Unit normals of the boundary vertices with collinear incident boundary
/// edges, keyed by vertex index; other vertices map to a zero vector.
std::vector<Point> straight_boundary_normals(const MixedMesh& mesh);

} // namespace c1mixed
