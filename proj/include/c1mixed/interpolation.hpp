#pragma once

#include "c1mixed/functions.hpp"
#include "c1mixed/space.hpp"

#include <vector>

namespace c1mixed {

/// Physical locations of the edge and interior functionals.
struct InterpolationPoints {
    std::vector<std::vector<Point>> r;        ///< per edge, p-5 value points
    std::vector<std::vector<Point>> s;        ///< per edge, p-4 normal-derivative points
    std::vector<Point> normals;               ///< per edge unit normal
    std::vector<std::vector<Point>> interior; ///< per element
};

InterpolationPoints interpolation_points(const SplineSpace& space);

/// Value of global functional `i` applied to f.
double dof_value(const SplineSpace& space, const Oracle& f, int i);

/// All functionals applied to f.
Eigen::VectorXd dof_values(const SplineSpace& space, const Oracle& f);

/// Functionals of one element in its local order, computed without any
/// neighbour information.
Eigen::VectorXd element_dof_values(const SplineSpace& space, const Oracle& f, int element);

/// Global Hermite interpolant.
SplineFunction project(const SplineSpace& space, const Oracle& f);

/// Element-local interpolant of f restricted to one element.
BezierPatch<double> local_project(const SplineSpace& space, const Oracle& f, int element);

} // namespace c1mixed
