#pragma once

#include <Eigen/Core>

namespace c1mixed {

enum class ElementKind { Triangle, Quad };

using Point = Eigen::Vector2d;

inline const char* to_string(ElementKind kind)
{
    return kind == ElementKind::Triangle ? "triangle" : "quad";
}

} // namespace c1mixed
