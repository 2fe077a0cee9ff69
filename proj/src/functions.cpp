#include "c1mixed/functions.hpp"

#include "c1mixed/error.hpp"

#include <cmath>

namespace c1mixed {

double Oracle::bilaplacian(const Point& x) const
{
    if (!bilaplacian_) throw Error("function '" + name_ + "' has no bi-Laplacian");
    return bilaplacian_(x);
}

Oracle trig_function()
{
    auto jet = [](const Point& p) {
        const double cx = std::cos(2 * p.x() / 3), sx = std::sin(2 * p.x() / 3);
        const double cy = std::cos(2 * p.y() / 3), sy = std::sin(2 * p.y() / 3);
        Jet2 j;
        j.value = 4 * cx * sy;
        j.gradient = Point(-8.0 / 3 * sx * sy, 8.0 / 3 * cx * cy);
        const double mixed = -16.0 / 9 * sx * cy;
        j.hessian << -16.0 / 9 * cx * sy, mixed, mixed, -16.0 / 9 * cx * sy;
        return j;
    };
    auto bilap = [](const Point& p) { return 64.0 / 81 * 4 * std::cos(2 * p.x() / 3) * std::sin(2 * p.y() / 3); };
    return Oracle("trig", jet, bilap);
}

Oracle linear_function(double a, double b, double c)
{
    auto jet = [=](const Point& p) {
        Jet2 j;
        j.value = a + b * p.x() + c * p.y();
        j.gradient = Point(b, c);
        return j;
    };
    return Oracle("linear", jet, [](const Point&) { return 0.0; });
}

Polynomial2::Polynomial2(int degree) : degree_(degree), coef_((degree + 1) * (degree + 2) / 2, 0.0) {}

double Polynomial2::derivative(int dx, int dy, const Point& x) const
{
    auto falling = [](int n, int k) {
        double r = 1;
        for (int i = 0; i < k; ++i) r *= n - i;
        return r;
    };
    double sum = 0;
    for (int a = dx; a <= degree_; ++a)
        for (int b = dy; a + b <= degree_; ++b) {
            const double c = coef_[index(a, b)];
            if (c == 0) continue;
            sum += c * falling(a, dx) * falling(b, dy) * std::pow(x.x(), a - dx) * std::pow(x.y(), b - dy);
        }
    return sum;
}

Jet2 Polynomial2::jet(const Point& x) const
{
    Jet2 j;
    j.value = derivative(0, 0, x);
    j.gradient = Point(derivative(1, 0, x), derivative(0, 1, x));
    const double mixed = derivative(1, 1, x);
    j.hessian << derivative(2, 0, x), mixed, mixed, derivative(0, 2, x);
    return j;
}

double Polynomial2::bilaplacian(const Point& x) const
{
    return derivative(4, 0, x) + 2 * derivative(2, 2, x) + derivative(0, 4, x);
}

Polynomial2 Polynomial2::random(int degree, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Polynomial2 poly(degree);
    for (auto& c : poly.coef_) c = dist(rng);
    return poly;
}

Oracle to_oracle(const Polynomial2& poly, const std::string& name)
{
    return Oracle(
        name, [poly](const Point& x) { return poly.jet(x); }, [poly](const Point& x) { return poly.bilaplacian(x); });
}

Oracle finite_difference_oracle(std::string name, std::function<double(const Point&)> f, double scale)
{
    const double h = 1e-5 * scale;
    auto jet = [f, h](const Point& x) {
        const Point ex(h, 0), ey(0, h);
        Jet2 j;
        const double f0 = f(x);
        const double fxp = f(x + ex), fxm = f(x - ex), fyp = f(x + ey), fym = f(x - ey);
        j.value = f0;
        j.gradient = Point((fxp - fxm) / (2 * h), (fyp - fym) / (2 * h));
        const double mixed = (f(x + ex + ey) - f(x + ex - ey) - f(x - ex + ey) + f(x - ex - ey)) / (4 * h * h);
        j.hessian << (fxp - 2 * f0 + fxm) / (h * h), mixed, mixed, (fyp - 2 * f0 + fym) / (h * h);
        return j;
    };
    return Oracle(std::move(name), jet, {}, false);
}

Oracle function_by_id(const std::string& id, int p)
{
    if (id == "trig") return trig_function();
    if (id == "linear") return linear_function(0.5, 1.0, -2.0);
    if (id == "quadratic") {
        Polynomial2 q(2);
        q.coefficient(2, 0) = 1;
        q.coefficient(0, 2) = 1;
        return to_oracle(q, "quadratic");
    }
    if (id == "poly") {
        Polynomial2 q(p);
        for (int a = 0; a <= p; ++a)
            for (int b = 0; a + b <= p; ++b) q.coefficient(a, b) = std::cos(1.0 + 3 * a + 7 * b) / (1 + a + b);
        return to_oracle(q, "poly");
    }
    throw Error("unknown test function '" + id + "' (expected trig, linear, quadratic or poly)");
}

} // namespace c1mixed
