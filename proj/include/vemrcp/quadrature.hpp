#pragma once

#include <functional>
#include <type_traits>
#include <vector>

#include "vemrcp/mesh.hpp"

namespace vemrcp {

struct QuadraturePoint {
    Point2 point;
    double weight;
};

/// Points and weights covering one cell; weights sum to the cell area.
using QuadratureRule = std::vector<QuadraturePoint>;

/// Seven-point rule exact for polynomials up to degree 5 on the triangle.
QuadratureRule triangle_quadrature(const Point2& a, const Point2& b, const Point2& c);

/// Degree-5 rule composed over the ear-clip triangulation of the cell.
/// `start` selects a different (equivalent) triangulation.
QuadratureRule cell_quadrature(const PolygonalMesh& mesh, int cell, int start = 0);

namespace detail {
template <typename T, typename = void>
struct plain_type {
    using type = T;
};
template <typename T>
struct plain_type<T, std::void_t<typename T::PlainObject>> {
    using type = typename T::PlainObject;
};
}  // namespace detail

/// Integrates a scalar, vector, or matrix valued function over a rule.
template <typename F>
auto integrate(const QuadratureRule& rule, F&& f)
{
    using Value = typename detail::plain_type<std::decay_t<decltype(f(rule.front().point))>>::type;
    Value sum = f(rule.front().point) * rule.front().weight;
    for (std::size_t q = 1; q < rule.size(); ++q)
        sum += f(rule[q].point) * rule[q].weight;
    return sum;
}

double polygon_quadrature(const PolygonalMesh& mesh, int cell, const std::function<double(const Point2&)>& integrand);

}  // namespace vemrcp
