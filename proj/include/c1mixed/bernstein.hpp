#pragma once

#include "c1mixed/error.hpp"
#include "c1mixed/types.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace c1mixed {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Binomial coefficient as a floating point value (exact for the small
/// degrees used here).
inline double binomial(int n, int k)
{
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

/// Number of Bernstein ordinates of a patch.
constexpr int ordinate_count(ElementKind kind, int p)
{
    return kind == ElementKind::Triangle ? (p + 1) * (p + 2) / 2 : (p + 1) * (p + 1);
}

/// Flat index of the triangular ordinate b_{i,j,k}, k = p - i - j.
/// Storage is lexicographic in (i, j): i is the u exponent, j the v exponent.
constexpr int triangle_index(int p, int i, int j) { return i * (p + 1) - i * (i - 1) / 2 + j; }

/// Flat index of the tensor ordinate b_{i,j}: row-major, i along u.
constexpr int tensor_index(int p, int i, int j) { return i * (p + 1) + j; }

/// Reference-domain position (i/p, j/p) of ordinate `index`.
inline std::pair<int, int> ordinate_multi_index(ElementKind kind, int p, int index)
{
    if (kind == ElementKind::Quad) return {index / (p + 1), index % (p + 1)};
    int i = 0;
    while (index > p - i) {
        index -= p - i + 1;
        ++i;
    }
    return {i, index};
}

// ---------------------------------------------------------------------------
// Univariate
// ---------------------------------------------------------------------------

/// B^p_0(t) ... B^p_p(t).
template <typename Scalar>
VectorX<Scalar> bernstein_values(int p, Scalar t)
{
    VectorX<Scalar> b = VectorX<Scalar>::Zero(p + 1);
    if (p < 0) return b;
    b(0) = Scalar(1);
    const Scalar s = Scalar(1) - t;
    // Triangular scheme; stable on [0, 1].
    for (int q = 1; q <= p; ++q) {
        Scalar saved = Scalar(0);
        for (int i = 0; i < q; ++i) {
            const Scalar tmp = b(i);
            b(i) = saved + s * tmp;
            saved = t * tmp;
        }
        b(q) = saved;
    }
    return b;
}

/// order-th derivative of every degree-p basis polynomial at t.
template <typename Scalar>
VectorX<Scalar> bernstein_derivatives(int p, Scalar t, int order)
{
    if (order == 0) return bernstein_values<Scalar>(p, t);
    VectorX<Scalar> out = VectorX<Scalar>::Zero(p + 1);
    if (order > p) return out;
    const VectorX<Scalar> low = bernstein_values<Scalar>(p - order, t);
    // d^r/dt^r B^p_i = p!/(p-r)! sum_k (-1)^(r-k) C(r,k) B^{p-r}_{i-k}
    double factor = 1.0;
    for (int q = 0; q < order; ++q) factor *= p - q;
    for (int i = 0; i <= p; ++i) {
        Scalar acc = Scalar(0);
        for (int k = 0; k <= order; ++k) {
            const int idx = i - k;
            if (idx < 0 || idx > p - order) continue;
            const double sign = ((order - k) % 2 == 0) ? 1.0 : -1.0;
            acc += Scalar(sign * binomial(order, k)) * low(idx);
        }
        out(i) = Scalar(factor) * acc;
    }
    return out;
}

/// Polynomial in univariate Bernstein form on [0, 1].
template <typename Scalar>
class UnivariateBernstein {
public:
    UnivariateBernstein() = default;
    explicit UnivariateBernstein(VectorX<Scalar> coefficients) : coefficients_(std::move(coefficients)) {}

    int degree() const { return static_cast<int>(coefficients_.size()) - 1; }
    const VectorX<Scalar>& coefficients() const { return coefficients_; }
    Scalar coefficient(int i) const { return coefficients_(i); }

    /// de Casteljau evaluation.
    Scalar operator()(Scalar t) const
    {
        VectorX<Scalar> b = coefficients_;
        for (int r = degree(); r > 0; --r)
            for (int i = 0; i < r; ++i) b(i) = (Scalar(1) - t) * b(i) + t * b(i + 1);
        return b.size() ? b(0) : Scalar(0);
    }

    UnivariateBernstein derivative() const
    {
        const int p = degree();
        if (p <= 0) return UnivariateBernstein(VectorX<Scalar>::Zero(1));
        VectorX<Scalar> d(p);
        for (int i = 0; i < p; ++i) d(i) = Scalar(p) * (coefficients_(i + 1) - coefficients_(i));
        return UnivariateBernstein(std::move(d));
    }

    /// Same polynomial represented at degree + 1.
    UnivariateBernstein elevated() const
    {
        const int p = degree();
        VectorX<Scalar> e(p + 2);
        e(0) = coefficients_(0);
        e(p + 1) = coefficients_(p);
        for (int i = 1; i <= p; ++i)
            e(i) = (Scalar(i) * coefficients_(i - 1) + Scalar(p + 1 - i) * coefficients_(i)) / Scalar(p + 1);
        return UnivariateBernstein(std::move(e));
    }

private:
    VectorX<Scalar> coefficients_;
};

/// Product of two Bernstein polynomials, returned at the sum of the degrees.
template <typename Scalar>
UnivariateBernstein<Scalar> multiply(const UnivariateBernstein<Scalar>& a, const UnivariateBernstein<Scalar>& b)
{
    const int m = a.degree();
    const int n = b.degree();
    VectorX<Scalar> c = VectorX<Scalar>::Zero(m + n + 1);
    for (int i = 0; i <= m; ++i)
        for (int j = 0; j <= n; ++j)
            c(i + j) += Scalar(binomial(m, i) * binomial(n, j) / binomial(m + n, i + j)) * a.coefficient(i) *
                        b.coefficient(j);
    return UnivariateBernstein<Scalar>(std::move(c));
}

// ---------------------------------------------------------------------------
// Hermite fits
// ---------------------------------------------------------------------------

/// Endpoint derivative data (value, first, second, ... derivative) at t = 0
/// and t = 1, plus interior point samples.
template <typename Scalar>
struct HermiteConditions {
    int degree = 0;
    std::vector<Scalar> left;
    std::vector<Scalar> right;
    std::vector<std::pair<Scalar, Scalar>> samples; ///< (t, value), t in (0, 1)
};

/// Collocation matrix of the Hermite problem: one row per condition, in the
/// order left derivatives, right derivatives, samples.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> hermite_matrix(int degree, int left_order, int right_order,
                                                                      const std::vector<Scalar>& nodes)
{
    const int rows = left_order + right_order + static_cast<int>(nodes.size());
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> a(rows, degree + 1);
    int r = 0;
    for (int k = 0; k < left_order; ++k) a.row(r++) = bernstein_derivatives<Scalar>(degree, Scalar(0), k).transpose();
    for (int k = 0; k < right_order; ++k) a.row(r++) = bernstein_derivatives<Scalar>(degree, Scalar(1), k).transpose();
    for (const Scalar& t : nodes) a.row(r++) = bernstein_values<Scalar>(degree, t).transpose();
    return a;
}

/// Solves the square Hermite collocation problem in Bernstein form.
/// Throws SolveError when the conditions do not determine the polynomial
/// (wrong count, repeated nodes).
template <typename Scalar>
UnivariateBernstein<Scalar> hermite_fit_univariate(const HermiteConditions<Scalar>& c)
{
    const int n = c.degree + 1;
    const int count = static_cast<int>(c.left.size() + c.right.size() + c.samples.size());
    if (count != n)
        throw SolveError("hermite fit: " + std::to_string(count) + " conditions for degree " + std::to_string(c.degree));
    std::vector<Scalar> nodes;
    VectorX<Scalar> rhs(n);
    int r = 0;
    for (const auto& v : c.left) rhs(r++) = v;
    for (const auto& v : c.right) rhs(r++) = v;
    for (const auto& [t, v] : c.samples) {
        nodes.push_back(t);
        rhs(r++) = v;
    }
    const auto a = hermite_matrix<Scalar>(c.degree, static_cast<int>(c.left.size()), static_cast<int>(c.right.size()), nodes);
    Eigen::FullPivLU<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> lu(a);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible()) throw SolveError("hermite fit: singular system (repeated nodes?)");
    VectorX<Scalar> x = lu.solve(rhs);
    const Scalar residual = (a * x - rhs).cwiseAbs().maxCoeff();
    const Scalar scale = std::max<Scalar>(Scalar(1), rhs.cwiseAbs().maxCoeff());
    if (!(residual <= Scalar(1e-10) * scale)) throw SolveError("hermite fit: residual too large");
    return UnivariateBernstein<Scalar>(std::move(x));
}

// ---------------------------------------------------------------------------
// Bivariate patches
// ---------------------------------------------------------------------------

/// Polynomial on the reference triangle {u, v >= 0, u + v <= 1} (total
/// degree p) or on the unit square (bi-degree (p, p)) in Bernstein form.
template <typename Scalar>
class BezierPatch {
public:
    BezierPatch() = default;
    BezierPatch(ElementKind kind, int degree)
        : kind_(kind), degree_(degree), ordinates_(VectorX<Scalar>::Zero(ordinate_count(kind, degree)))
    {
    }
    BezierPatch(ElementKind kind, int degree, VectorX<Scalar> ordinates)
        : kind_(kind), degree_(degree), ordinates_(std::move(ordinates))
    {
        if (ordinates_.size() != ordinate_count(kind, degree))
            throw Error("BezierPatch: expected " + std::to_string(ordinate_count(kind, degree)) + " ordinates");
    }

    static BezierPatch triangular(int p) { return BezierPatch(ElementKind::Triangle, p); }
    static BezierPatch tensor(int p) { return BezierPatch(ElementKind::Quad, p); }

    ElementKind kind() const { return kind_; }
    int degree() const { return degree_; }
    int size() const { return static_cast<int>(ordinates_.size()); }

    const VectorX<Scalar>& ordinates() const { return ordinates_; }
    VectorX<Scalar>& ordinates() { return ordinates_; }

    int index(int i, int j) const
    {
        return kind_ == ElementKind::Triangle ? triangle_index(degree_, i, j) : tensor_index(degree_, i, j);
    }
    /// b_{i,j} (tensor) or b_{i,j,p-i-j} (triangle).
    Scalar& at(int i, int j) { return ordinates_(index(i, j)); }
    Scalar at(int i, int j) const { return ordinates_(index(i, j)); }

    bool contains(Scalar u, Scalar v, Scalar tol = Scalar(1e-12)) const
    {
        if (u < -tol || v < -tol) return false;
        return kind_ == ElementKind::Triangle ? u + v <= Scalar(1) + tol : (u <= Scalar(1) + tol && v <= Scalar(1) + tol);
    }

    /// de Casteljau evaluation; throws for points outside the reference element.
    Scalar operator()(Scalar u, Scalar v) const
    {
        if (!contains(u, v)) throw Error("BezierPatch: evaluation point outside the reference element");
        return evaluate(u, v);
    }

    /// de Casteljau evaluation without the domain check.
    Scalar evaluate(Scalar u, Scalar v) const
    {
        const int p = degree_;
        if (kind_ == ElementKind::Quad) {
            VectorX<Scalar> col(p + 1);
            VectorX<Scalar> row(p + 1);
            for (int i = 0; i <= p; ++i) {
                for (int j = 0; j <= p; ++j) row(j) = at(i, j);
                col(i) = casteljau(row, v);
            }
            return casteljau(col, u);
        }
        VectorX<Scalar> b = ordinates_;
        const Scalar w = Scalar(1) - u - v;
        for (int r = p; r > 0; --r) {
            // Level r - 1 stored in place with degree-(r-1) indexing.
            VectorX<Scalar> next(ordinate_count(ElementKind::Triangle, r - 1));
            for (int i = 0; i < r; ++i)
                for (int j = 0; i + j < r; ++j)
                    next(triangle_index(r - 1, i, j)) = u * b(triangle_index(r, i + 1, j)) +
                                                         v * b(triangle_index(r, i, j + 1)) +
                                                         w * b(triangle_index(r, i, j));
            b = std::move(next);
        }
        return b(0);
    }

private:
    static Scalar casteljau(VectorX<Scalar> b, Scalar t)
    {
        for (int r = static_cast<int>(b.size()) - 1; r > 0; --r)
            for (int i = 0; i < r; ++i) b(i) = (Scalar(1) - t) * b(i) + t * b(i + 1);
        return b(0);
    }

    ElementKind kind_ = ElementKind::Triangle;
    int degree_ = 0;
    VectorX<Scalar> ordinates_;
};

/// Value of basis function `index` by the closed binomial formula. Used to
/// cross-check de Casteljau.
template <typename Scalar>
Scalar bernstein_basis_direct(ElementKind kind, int p, int index, Scalar u, Scalar v)
{
    const auto [i, j] = ordinate_multi_index(kind, p, index);
    using std::pow;
    if (kind == ElementKind::Quad)
        return Scalar(binomial(p, i) * binomial(p, j)) * pow(u, i) * pow(Scalar(1) - u, p - i) * pow(v, j) *
               pow(Scalar(1) - v, p - j);
    const int k = p - i - j;
    const double multinomial = binomial(p, i) * binomial(p - i, j);
    return Scalar(multinomial) * pow(u, i) * pow(v, j) * pow(Scalar(1) - u - v, k);
}

/// Values and parametric derivatives up to order two of every basis function
/// of a patch at one reference point.
template <typename Scalar>
struct BasisJet {
    VectorX<Scalar> value, du, dv, duu, duv, dvv;
};

namespace detail {

// Triangular basis of degree q evaluated in barycentric (w, u, v), indexed with
// degree-q triangle_index. Out-of-range multi-indices read as zero.
template <typename Scalar>
VectorX<Scalar> triangle_basis(int q, Scalar u, Scalar v)
{
    VectorX<Scalar> out = VectorX<Scalar>::Zero(ordinate_count(ElementKind::Triangle, std::max(q, 0)));
    if (q < 0) return out;
    const Scalar w = Scalar(1) - u - v;
    using std::pow;
    for (int i = 0; i <= q; ++i)
        for (int j = 0; i + j <= q; ++j) {
            const int k = q - i - j;
            out(triangle_index(q, i, j)) =
                Scalar(binomial(q, i) * binomial(q - i, j)) * pow(u, i) * pow(v, j) * pow(w, k);
        }
    return out;
}

template <typename Scalar>
Scalar triangle_lookup(const VectorX<Scalar>& b, int q, int i, int j)
{
    if (q < 0 || i < 0 || j < 0 || i + j > q) return Scalar(0);
    return b(triangle_index(q, i, j));
}

} // namespace detail

template <typename Scalar>
BasisJet<Scalar> basis_jet(ElementKind kind, int p, Scalar u, Scalar v)
{
    const int n = ordinate_count(kind, p);
    BasisJet<Scalar> jet;
    jet.value.resize(n);
    jet.du.resize(n);
    jet.dv.resize(n);
    jet.duu.resize(n);
    jet.duv.resize(n);
    jet.dvv.resize(n);
    if (kind == ElementKind::Quad) {
        std::array<VectorX<Scalar>, 3> bu, bv;
        for (int r = 0; r < 3; ++r) {
            bu[r] = bernstein_derivatives<Scalar>(p, u, r);
            bv[r] = bernstein_derivatives<Scalar>(p, v, r);
        }
        for (int i = 0; i <= p; ++i)
            for (int j = 0; j <= p; ++j) {
                const int idx = tensor_index(p, i, j);
                jet.value(idx) = bu[0](i) * bv[0](j);
                jet.du(idx) = bu[1](i) * bv[0](j);
                jet.dv(idx) = bu[0](i) * bv[1](j);
                jet.duu(idx) = bu[2](i) * bv[0](j);
                jet.duv(idx) = bu[1](i) * bv[1](j);
                jet.dvv(idx) = bu[0](i) * bv[2](j);
            }
        return jet;
    }
    // d/du B^p_{ijk} = p (B^{p-1}_{i-1,j,k} - B^{p-1}_{i,j,k-1}); analogous for v.
    const auto b0 = detail::triangle_basis<Scalar>(p, u, v);
    const auto b1 = detail::triangle_basis<Scalar>(p - 1, u, v);
    const auto b2 = detail::triangle_basis<Scalar>(p - 2, u, v);
    const Scalar c1 = Scalar(p);
    const Scalar c2 = Scalar(p * (p - 1));
    using detail::triangle_lookup;
    for (int i = 0; i <= p; ++i)
        for (int j = 0; i + j <= p; ++j) {
            const int idx = triangle_index(p, i, j);
            const int k = p - i - j;
            // Lower-degree index (i', j') has k' = q - i' - j'; the "k-1" term
            // keeps (i, j) and drops the degree.
            jet.value(idx) = b0(idx);
            const Scalar bk = k >= 1 ? triangle_lookup(b1, p - 1, i, j) : Scalar(0);
            jet.du(idx) = c1 * (triangle_lookup(b1, p - 1, i - 1, j) - bk);
            jet.dv(idx) = c1 * (triangle_lookup(b1, p - 1, i, j - 1) - bk);
            auto lk = [&](int di, int dj, int dk) {
                if (k - dk < 0) return Scalar(0);
                return triangle_lookup(b2, p - 2, i - di, j - dj);
            };
            jet.duu(idx) = c2 * (lk(2, 0, 0) - Scalar(2) * lk(1, 0, 1) + lk(0, 0, 2));
            jet.duv(idx) = c2 * (lk(1, 1, 0) - lk(1, 0, 1) - lk(0, 1, 1) + lk(0, 0, 2));
            jet.dvv(idx) = c2 * (lk(0, 2, 0) - Scalar(2) * lk(0, 1, 1) + lk(0, 0, 2));
        }
    return jet;
}

/// Value and parametric derivatives of a patch at one point.
template <typename Scalar>
struct PatchJet {
    Scalar value{}, du{}, dv{}, duu{}, duv{}, dvv{};
};

template <typename Scalar>
PatchJet<Scalar> evaluate_jet(const BezierPatch<Scalar>& patch, const BasisJet<Scalar>& basis)
{
    const auto& b = patch.ordinates();
    return {b.dot(basis.value), b.dot(basis.du), b.dot(basis.dv), b.dot(basis.duu), b.dot(basis.duv), b.dot(basis.dvv)};
}

template <typename Scalar>
PatchJet<Scalar> evaluate_jet(const BezierPatch<Scalar>& patch, Scalar u, Scalar v)
{
    return evaluate_jet(patch, basis_jet<Scalar>(patch.kind(), patch.degree(), u, v));
}

enum class Direction { U, V };

/// Bernstein coefficients of d/du f(0, v) or d/dv f(0, v) along the edge u = 0.
/// Tensor: d/du trace has degree p, d/dv trace degree p - 1.
/// Triangle: both traces have degree p - 1.
template <typename Scalar>
UnivariateBernstein<Scalar> partial_derivative_trace(const BezierPatch<Scalar>& patch, Direction which)
{
    const int p = patch.degree();
    if (p < 1) throw Error("partial_derivative_trace: degree must be at least 1");
    if (patch.kind() == ElementKind::Quad) {
        if (which == Direction::U) {
            VectorX<Scalar> c(p + 1);
            for (int j = 0; j <= p; ++j) c(j) = Scalar(p) * (patch.at(1, j) - patch.at(0, j));
            return UnivariateBernstein<Scalar>(std::move(c));
        }
        VectorX<Scalar> c(p);
        for (int j = 0; j < p; ++j) c(j) = Scalar(p) * (patch.at(0, j + 1) - patch.at(0, j));
        return UnivariateBernstein<Scalar>(std::move(c));
    }
    VectorX<Scalar> c(p);
    for (int j = 0; j < p; ++j)
        c(j) = which == Direction::U ? Scalar(p) * (patch.at(1, j) - patch.at(0, j))
                                     : Scalar(p) * (patch.at(0, j + 1) - patch.at(0, j));
    return UnivariateBernstein<Scalar>(std::move(c));
}

/// Reference-domain point (i/p, j/p) of every ordinate, in storage order.
template <typename Scalar>
std::vector<Eigen::Matrix<Scalar, 2, 1>> domain_points(ElementKind kind, int p)
{
    std::vector<Eigen::Matrix<Scalar, 2, 1>> pts(ordinate_count(kind, p));
    for (int idx = 0; idx < static_cast<int>(pts.size()); ++idx) {
        const auto [i, j] = ordinate_multi_index(kind, p, idx);
        pts[idx] = Eigen::Matrix<Scalar, 2, 1>(Scalar(i) / Scalar(p), Scalar(j) / Scalar(p));
    }
    return pts;
}

/// Patch interpolating fn(u, v) at the domain points. Reproduces every
/// polynomial of the patch space.
template <typename Scalar, typename Fn>
BezierPatch<Scalar> interpolate_patch(ElementKind kind, int p, Fn&& fn)
{
    const auto pts = domain_points<Scalar>(kind, p);
    const int n = static_cast<int>(pts.size());
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> a(n, n);
    VectorX<Scalar> rhs(n);
    for (int r = 0; r < n; ++r) {
        a.row(r) = basis_jet<Scalar>(kind, p, pts[r].x(), pts[r].y()).value.transpose();
        rhs(r) = fn(pts[r].x(), pts[r].y());
    }
    return BezierPatch<Scalar>(kind, p, a.partialPivLu().solve(rhs));
}

} // namespace c1mixed
