#include "c1mixed/interpolation.hpp"

#include "c1mixed/parallel.hpp"

#include <variant>

namespace c1mixed {

InterpolationPoints interpolation_points(const SplineSpace& space)
{
    const auto& mesh = space.mesh();
    const auto& params = space.edge_parameters();
    InterpolationPoints pts;
    for (int e = 0; e < static_cast<int>(mesh.edges().size()); ++e) {
        std::vector<Point> r, s;
        for (const double t : params.r) r.push_back(space.edge_point(e, t));
        for (const double t : params.s) s.push_back(space.edge_point(e, t));
        pts.r.push_back(std::move(r));
        pts.s.push_back(std::move(s));
        pts.normals.push_back(space.edge_normal(e));
    }
    for (int el = 0; el < static_cast<int>(mesh.elements().size()); ++el) {
        std::vector<Point> inner;
        const auto& map = space.map(el);
        for (const Point& uv : space.interior_points(mesh.elements()[el].kind)) inner.push_back(map(uv.x(), uv.y()));
        pts.interior.push_back(std::move(inner));
    }
    return pts;
}

namespace {

double vertex_functional(const Jet2& j, int a, int b)
{
    if (a + b == 0) return j.value;
    if (a + b == 1) return a == 1 ? j.gradient.x() : j.gradient.y();
    if (a == 2) return j.hessian(0, 0);
    if (b == 2) return j.hessian(1, 1);
    return j.hessian(0, 1);
}

} // namespace

double dof_value(const SplineSpace& space, const Oracle& f, int i)
{
    const auto& mesh = space.mesh();
    const int p = space.degree();
    return std::visit(
        [&](const auto& d) -> double {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, VertexDof>) {
                return vertex_functional(f.jet(mesh.vertices()[d.vertex]), d.a, d.b);
            } else if constexpr (std::is_same_v<T, EdgeValueDof>) {
                return f.value(space.edge_point(d.edge, space.edge_parameters().r[d.index - 1]));
            } else if constexpr (std::is_same_v<T, EdgeNormalDof>) {
                const Point x = space.edge_point(d.edge, space.edge_parameters().s[d.index - 1]);
                return space.edge_normal(d.edge).dot(f.gradient(x));
            } else {
                const Point x = space.map(d.element)(static_cast<double>(d.l) / p, static_cast<double>(d.k) / p);
                return f.value(x);
            }
        },
        space.dofs().descriptor(i));
}

Eigen::VectorXd dof_values(const SplineSpace& space, const Oracle& f)
{
    const int n = space.dofs().size();
    Eigen::VectorXd values(n);
    parallel_for(n, [&](std::size_t i) { values(i) = dof_value(space, f, static_cast<int>(i)); });
    return values;
}

Eigen::VectorXd element_dof_values(const SplineSpace& space, const Oracle& f, int element)
{
    const auto& ids = space.dofs().element_dofs(element);
    Eigen::VectorXd local(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) local(i) = dof_value(space, f, ids[i]);
    return local;
}

SplineFunction project(const SplineSpace& space, const Oracle& f)
{
    return space.assemble_function(dof_values(space, f));
}

BezierPatch<double> local_project(const SplineSpace& space, const Oracle& f, int element)
{
    return space.element_patch(element, element_dof_values(space, f, element));
}

} // namespace c1mixed
