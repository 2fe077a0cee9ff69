#pragma once

#include "c1mixed/types.hpp"

#include <Eigen/Dense>

#include <functional>
#include <random>
#include <string>
#include <vector>

namespace c1mixed {

/// Value, gradient and Hessian of a function at a point.
struct Jet2 {
    double value = 0;
    Point gradient = Point::Zero();
    Eigen::Matrix2d hessian = Eigen::Matrix2d::Zero();
};

/// Function with derivatives up to order two, optionally its bi-Laplacian.
class Oracle {
public:
    using JetFn = std::function<Jet2(const Point&)>;
    using ScalarFn = std::function<double(const Point&)>;

    Oracle() = default;
    Oracle(std::string name, JetFn jet, ScalarFn bilaplacian = {}, bool exact_derivatives = true)
        : name_(std::move(name)), jet_(std::move(jet)), bilaplacian_(std::move(bilaplacian)),
          exact_(exact_derivatives)
    {
    }

    const std::string& name() const { return name_; }
    Jet2 jet(const Point& x) const { return jet_(x); }
    double value(const Point& x) const { return jet_(x).value; }
    Point gradient(const Point& x) const { return jet_(x).gradient; }
    Eigen::Matrix2d hessian(const Point& x) const { return jet_(x).hessian; }
    double laplacian(const Point& x) const { return jet_(x).hessian.trace(); }

    bool has_bilaplacian() const { return static_cast<bool>(bilaplacian_); }
    /// Throws when no bi-Laplacian was supplied.
    double bilaplacian(const Point& x) const;

    /// False for finite-difference oracles (reduced accuracy).
    bool exact_derivatives() const { return exact_; }

private:
    std::string name_;
    JetFn jet_;
    ScalarFn bilaplacian_;
    bool exact_ = true;
};

/// 4 cos(2x/3) sin(2y/3).
Oracle trig_function();

/// a + b x + c y.
Oracle linear_function(double a, double b, double c);

/// Bivariate polynomial sum_{a+b<=degree} c_ab x^a y^b.
class Polynomial2 {
public:
    explicit Polynomial2(int degree);

    int degree() const { return degree_; }
    double& coefficient(int a, int b) { return coef_[index(a, b)]; }
    double coefficient(int a, int b) const { return coef_[index(a, b)]; }

    /// d^dx/dx^dx d^dy/dy^dy at x.
    double derivative(int dx, int dy, const Point& x) const;
    double operator()(const Point& x) const { return derivative(0, 0, x); }
    Jet2 jet(const Point& x) const;
    double bilaplacian(const Point& x) const;

    /// Coefficients uniform in [-1, 1].
    static Polynomial2 random(int degree, std::mt19937_64& rng);

private:
    int index(int a, int b) const { return (a + b) * (a + b + 1) / 2 + b; }
    int degree_;
    std::vector<double> coef_;
};

Oracle to_oracle(const Polynomial2& poly, const std::string& name = "polynomial");

/// Oracle from a value-only callback with central differences (step
/// relative to `scale`). Accuracy is reduced; flagged as inexact.
Oracle finite_difference_oracle(std::string name, std::function<double(const Point&)> f, double scale = 1.0);

/// Named test functions: "trig", "linear", "quadratic", "poly" (a fixed
/// degree-p polynomial). Throws Error for unknown ids.
Oracle function_by_id(const std::string& id, int p);

} // namespace c1mixed
