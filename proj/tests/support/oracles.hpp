#pragma once

// Independent reference computations shared by the unit and acceptance tests.

#include "c1mixed/assembly.hpp"
#include "c1mixed/error.hpp"
#include "c1mixed/functions.hpp"
#include "c1mixed/geometry.hpp"
#include "c1mixed/io.hpp"
#include "c1mixed/mesh.hpp"
#include "c1mixed/space.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#ifndef C1MIXED_DATA_DIR
#define C1MIXED_DATA_DIR "data"
#endif

namespace c1mixed::testing {

inline std::string mesh_path(const std::string& name)
{
    return std::string(C1MIXED_DATA_DIR) + "/meshes/" + name + ".json";
}

inline std::shared_ptr<const MixedMesh> bundled_mesh(const std::string& name)
{
    return std::make_shared<const MixedMesh>(load_mesh(mesh_path(name)));
}

inline const std::vector<std::string>& desk_meshes()
{
    static const std::vector<std::string> names{"desk1", "desk2", "desk3"};
    return names;
}

inline double uniform(std::mt19937_64& rng, double a, double b)
{
    return std::uniform_real_distribution<double>(a, b)(rng);
}

/// Locates x by Newton inversion of every element map and evaluates the
/// patch there; derivatives come from the chain rule of the located element.
inline Oracle spline_oracle(std::shared_ptr<const MixedMesh> mesh, SplineFunction spline)
{
    auto shared = std::make_shared<const SplineFunction>(std::move(spline));
    return Oracle("spline", [mesh, shared](const Point& x) {
        for (int el = 0; el < static_cast<int>(mesh->elements().size()); ++el) {
            const auto map = element_map(*mesh, el);
            Point uv;
            try {
                uv = invert(map, x, 1e-15, 100);
            } catch (const Error&) {
                continue;
            }
            if (!shared->patches[el].contains(uv.x(), uv.y(), 1e-9)) continue;
            const double u = std::clamp(uv.x(), 0.0, 1.0);
            const double v = std::clamp(uv.y(), 0.0, 1.0);
            const auto jet = physical_derivatives(map, shared->patches[el], u, v);
            Jet2 out;
            out.value = jet.value;
            out.gradient = jet.gradient;
            out.hessian = jet.hessian;
            return out;
        }
        throw Error("spline_oracle: point outside the mesh");
    });
}

/// Bounding box centre and half-diagonal of a mesh.
inline std::pair<Point, double> mesh_frame(const MixedMesh& mesh)
{
    Point lo = mesh.vertices().front(), hi = lo;
    for (const auto& v : mesh.vertices()) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
    }
    return {0.5 * (lo + hi), 0.5 * (hi - lo).norm()};
}

/// Random polynomial of total degree p in the mesh-normalised coordinates
/// (x - centre) / radius, coefficients uniform in [-1, 1].
inline Oracle random_scaled_polynomial(int p, const MixedMesh& mesh, std::mt19937_64& rng)
{
    const auto [centre, radius] = mesh_frame(mesh);
    auto poly = std::make_shared<Polynomial2>(Polynomial2::random(p, rng));
    const Point c = centre;
    const double r = radius;
    return Oracle(
        "scaled polynomial",
        [poly, c, r](const Point& x) {
            const Point xi = (x - c) / r;
            Jet2 j = poly->jet(xi);
            j.gradient /= r;
            j.hessian /= r * r;
            return j;
        },
        [poly, c, r](const Point& x) { return poly->bilaplacian((x - c) / r) / (r * r * r * r); });
}

// ---------------------------------------------------------------------------
// Random interface pairs
// ---------------------------------------------------------------------------

/// Two-element mesh sharing one edge: the element of kind `a` lies on one
/// side, `b` on the other. Vertex numbering, cyclic element start and a
/// similarity transform are randomised so that every edge orientation and
/// local edge slot occurs.
inline MixedMesh random_interface_pair(InterfaceCase kind, std::mt19937_64& rng)
{
    for (int attempt = 0; attempt < 100; ++attempt) {
        const bool above_quad = kind != InterfaceCase::TriangleTriangle;
        const bool below_quad = kind == InterfaceCase::QuadQuad;
        // Local coordinates: shared edge P = (0,0) -> Q = (1,0).
        std::vector<Point> local{Point(0, 0), Point(1, 0)};
        std::vector<int> above, below;
        if (above_quad) {
            local.emplace_back(1 + uniform(rng, -0.3, 0.3), uniform(rng, 0.5, 1.3));
            local.emplace_back(uniform(rng, -0.3, 0.3), uniform(rng, 0.5, 1.3));
            above = {0, 1, 2, 3};
        } else {
            local.emplace_back(uniform(rng, 0.15, 0.85), uniform(rng, 0.4, 1.3));
            above = {0, 1, 2};
        }
        const int base = static_cast<int>(local.size());
        if (below_quad) {
            local.emplace_back(uniform(rng, -0.3, 0.3), -uniform(rng, 0.5, 1.3));
            local.emplace_back(1 + uniform(rng, -0.3, 0.3), -uniform(rng, 0.5, 1.3));
            below = {1, 0, base, base + 1};
        } else {
            local.emplace_back(uniform(rng, 0.15, 0.85), -uniform(rng, 0.4, 1.3));
            below = {1, 0, base};
        }

        const double angle = uniform(rng, 0, 2 * M_PI);
        const double scale = std::exp(uniform(rng, -1.5, 1.5));
        const Point shift(uniform(rng, -5, 5), uniform(rng, -5, 5));
        const Eigen::Matrix2d rot = Eigen::Rotation2Dd(angle).toRotationMatrix();

        const int n = static_cast<int>(local.size());
        std::vector<int> relabel(n);
        std::iota(relabel.begin(), relabel.end(), 0);
        std::shuffle(relabel.begin(), relabel.end(), rng);
        std::vector<Point> vertices(n);
        for (int i = 0; i < n; ++i) vertices[relabel[i]] = scale * (rot * local[i]) + shift;

        auto finish = [&](std::vector<int> ids) {
            const int k = static_cast<int>(ids.size());
            std::rotate(ids.begin(), ids.begin() + std::uniform_int_distribution<int>(0, k - 1)(rng), ids.end());
            for (int& i : ids) i = relabel[i];
            return ids;
        };
        std::vector<std::array<int, 3>> tris;
        std::vector<std::array<int, 4>> quads;
        for (const auto* ids : {&above, &below}) {
            const auto f = finish(*ids);
            if (f.size() == 3)
                tris.push_back({f[0], f[1], f[2]});
            else
                quads.push_back({f[0], f[1], f[2], f[3]});
        }
        try {
            return MixedMesh(std::move(vertices), std::move(tris), std::move(quads));
        } catch (const MeshError&) {
            continue;
        }
    }
    throw Error("random_interface_pair: no valid pair generated");
}

inline int interior_edge(const MixedMesh& mesh)
{
    for (int e = 0; e < static_cast<int>(mesh.edges().size()); ++e)
        if (!mesh.edges()[e].boundary()) return e;
    return -1;
}

// ---------------------------------------------------------------------------
// Brute-force interface constraint rank
// ---------------------------------------------------------------------------

struct InterfaceConstraints {
    Eigen::MatrixXd matrix;               ///< sampled C^1 (and degree) constraints
    std::vector<int> first_columns;       ///< stored ordinate index per unknown
    std::vector<int> second_columns;
    int unknowns_first = 0;
};

/// Canonical (row, column) positions of the first two ordinate rows.
inline std::vector<std::array<int, 2>> strip_positions(ElementKind kind, int p)
{
    std::vector<std::array<int, 2>> out;
    for (int j = 0; j <= p; ++j) out.push_back({0, j});
    const int last = kind == ElementKind::Quad ? p : p - 1;
    for (int j = 0; j <= last; ++j) out.push_back({1, j});
    return out;
}

/// Sampled constraints on the first-two-row ordinates of both elements of an
/// interior edge: equal values and physical gradients at `samples` points,
/// and for quad-quad pairs a normal derivative of degree p-1.
inline InterfaceConstraints interface_constraints(const MixedMesh& mesh, int edge, int p, int samples = 0)
{
    if (samples <= 0) samples = 3 * p + 7;
    const auto iface = canonical_interface(mesh, edge);
    const std::array<const ElementFrame*, 2> frames{&iface.first, &iface.second};
    std::array<std::vector<std::array<int, 2>>, 2> pos{strip_positions(iface.first.kind, p),
                                                       strip_positions(iface.second.kind, p)};
    const int n1 = static_cast<int>(pos[0].size());
    const int n2 = static_cast<int>(pos[1].size());

    // Per side: value and gradient samples for every unit ordinate.
    std::array<Eigen::MatrixXd, 2> value, gx, gy;
    for (int s = 0; s < 2; ++s) {
        const auto& f = *frames[s];
        const auto map = element_map(mesh, f.element);
        const int n = static_cast<int>(pos[s].size());
        value[s].resize(samples, n);
        gx[s].resize(samples, n);
        gy[s].resize(samples, n);
        for (int c = 0; c < n; ++c) {
            BezierPatch<double> patch(f.kind, p);
            patch.ordinates()(f.stored_index(p, pos[s][c][0], pos[s][c][1])) = 1.0;
            for (int m = 0; m < samples; ++m) {
                const double t = (m + 0.5) / samples;
                const Point uv = f.to_stored(0.0, t);
                const auto jet = physical_derivatives(map, patch, uv.x(), uv.y());
                value[s](m, c) = jet.value;
                gx[s](m, c) = jet.gradient.x();
                gy[s](m, c) = jet.gradient.y();
            }
        }
    }

    const bool quad_quad = iface.kind == InterfaceCase::QuadQuad;
    const int rows = 3 * samples + (quad_quad ? samples : 0);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows, n1 + n2);
    a.block(0, 0, samples, n1) = value[0];
    a.block(0, n1, samples, n2) = -value[1];
    a.block(samples, 0, samples, n1) = gx[0];
    a.block(samples, n1, samples, n2) = -gx[1];
    a.block(2 * samples, 0, samples, n1) = gy[0];
    a.block(2 * samples, n1, samples, n2) = -gy[1];
    if (quad_quad) {
        const auto& ed = mesh.edges()[edge];
        const Point tangent = mesh.vertices()[ed.vertices[1]] - mesh.vertices()[ed.vertices[0]];
        const Point n = Point(tangent.y(), -tangent.x()).normalized();
        const Eigen::MatrixXd normal = n.x() * gx[0] + n.y() * gy[0];
        Eigen::MatrixXd fit(samples, p);
        for (int m = 0; m < samples; ++m) {
            const double t = (m + 0.5) / samples;
            for (int k = 0; k < p; ++k) fit(m, k) = std::pow(t, k);
        }
        const Eigen::MatrixXd q = fit.householderQr().householderQ() * Eigen::MatrixXd::Identity(samples, p);
        const Eigen::MatrixXd complement = Eigen::MatrixXd::Identity(samples, samples) - q * q.transpose();
        a.block(3 * samples, 0, samples, n1) = complement * normal;
    }
    InterfaceConstraints out;
    out.matrix = a;
    out.unknowns_first = n1;
    for (const auto& ij : pos[0]) out.first_columns.push_back(iface.first.stored_index(p, ij[0], ij[1]));
    for (const auto& ij : pos[1]) out.second_columns.push_back(iface.second.stored_index(p, ij[0], ij[1]));
    return out;
}

/// Nullspace dimension by SVD with a relative threshold.
inline int nullspace_dimension(const Eigen::MatrixXd& a, double rel_tol = 1e-9)
{
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    const auto& s = svd.singularValues();
    const double cut = rel_tol * s(0);
    int rank = 0;
    for (int i = 0; i < s.size(); ++i)
        if (s(i) > cut) ++rank;
    return static_cast<int>(a.cols()) - rank;
}

/// Independent evaluation of the dimension count.
inline long dimension_oracle(const MixedMesh& mesh, int p)
{
    const long v = static_cast<long>(mesh.vertices().size());
    const long e = static_cast<long>(mesh.edges().size());
    const long q = static_cast<long>(mesh.quad_count());
    const long t = static_cast<long>(mesh.triangle_count());
    return 6 * v + (2 * p - 9) * e + (p - 3) * (p - 3) * q + (p - 4) * (p - 5) / 2 * t;
}

/// Random convex quadrilateral or triangle geometry map (skewed, not a
/// parallelogram in general).
inline GeometryMap<double> random_map(ElementKind kind, std::mt19937_64& rng)
{
    const double s = std::exp(uniform(rng, -1, 1));
    const Point o(uniform(rng, -3, 3), uniform(rng, -3, 3));
    const Eigen::Matrix2d rot = Eigen::Rotation2Dd(uniform(rng, 0, 2 * M_PI)).toRotationMatrix();
    auto pt = [&](double x, double y) -> Point { return o + s * (rot * Point(x, y)); };
    if (kind == ElementKind::Triangle)
        return GeometryMap<double>::linear(pt(0, 0), pt(1 + uniform(rng, -0.2, 0.3), uniform(rng, -0.2, 0.2)),
                                           pt(uniform(rng, -0.2, 0.5), 1 + uniform(rng, -0.2, 0.3)));
    return GeometryMap<double>::bilinear(pt(uniform(rng, -0.2, 0.2), uniform(rng, -0.2, 0.2)),
                                         pt(1 + uniform(rng, -0.2, 0.4), uniform(rng, -0.3, 0.2)),
                                         pt(1 + uniform(rng, -0.4, 0.5), 1 + uniform(rng, -0.4, 0.5)),
                                         pt(uniform(rng, -0.3, 0.2), 1 + uniform(rng, -0.2, 0.4)));
}

inline BezierPatch<double> random_patch(ElementKind kind, int p, std::mt19937_64& rng)
{
    BezierPatch<double> patch(kind, p);
    for (int i = 0; i < patch.size(); ++i) patch.ordinates()(i) = uniform(rng, -1, 1);
    return patch;
}

/// Random point of the reference element at distance >= margin from its boundary.
inline Point random_reference_point(ElementKind kind, std::mt19937_64& rng, double margin = 0.1)
{
    if (kind == ElementKind::Quad) return Point(uniform(rng, margin, 1 - margin), uniform(rng, margin, 1 - margin));
    for (;;) {
        const Point uv(uniform(rng, margin, 1), uniform(rng, margin, 1));
        if (uv.sum() <= 1 - margin) return uv;
    }
}

/// phi = patch o F^{-1} evaluated through Newton inversion.
inline double pushed_forward(const GeometryMap<double>& map, const BezierPatch<double>& patch, const Point& x)
{
    const Point uv = invert(map, x, 1e-15, 100);
    return patch.evaluate(uv.x(), uv.y());
}

} // namespace c1mixed::testing
